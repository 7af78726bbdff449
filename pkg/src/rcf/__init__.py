"""Context-free recognizers for subsets of virtually free groups."""

from ._kernels import BACKEND
from .amalgam import AmalgamGraph, TreeAmalgamationSpec, amalgam_ball, quasitree_subgroup_recognizer, tree_amalgamation_pda
from .conjugacy import (
    TwistedClassData,
    conjugacy_class_recognizer,
    conjugacy_oracle,
    phi_cyclic_closure,
    twisted_class_recognizer,
)
from .free import Alphabet, FreeAutomorphism, cyclic_reduce, free_reduce, parse_word, word_invert
from .fsa import Fsa
from .geometry import (
    LabelledGraph,
    MSequence,
    TriangulationCertificate,
    ball,
    coset_fsa,
    grammar_triangulation,
    m_triangulate_dp,
    stallings_graph,
)
from .grammar import Cfg, cyk_member, remove_useless, to_cnf
from .harness import CheckReport, enumerate_and_check, make_oracle
from .pda import Pda, cfg_to_pda, pda_empty_stack, pda_to_cfg
from .vfgroup import (
    ExtendedAutomorphism,
    GroupElement,
    VfPresentation,
    build_cowp_pda,
    build_pairing_pda,
    build_wp_pda,
    d_infinity,
    free_presentation,
    z3_z2,
)

__version__ = "0.1.0"
