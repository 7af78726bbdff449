"""Virtually free groups given by a free kernel, a transversal and extension tables.

An element is a pair ``(h, t)`` standing for ``h·t`` with ``h`` a reduced
kernel word and ``t`` a transversal symbol.  The tables hold the action
``φ_t(x) = t x t⁻¹`` on the kernel and the factor set ``t·s = f(t, s)·m(t, s)``,
so that

    (h₁, t₁)(h₂, t₂) = (h₁ · φ_{t₁}(h₂) · f(t₁, t₂), m(t₁, t₂)).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from typing import Mapping, Optional, Sequence

from .free import (
    AlphabetError,
    FreeAutomorphism,
    format_word,
    free_reduce,
    inverse_letter,
    multiply,
    parse_word,
    word_invert,
)
from .fsa import Fsa
from .grammar import (
    Cfg,
    cfg_concat,
    cfg_hom_preimage,
    cfg_intersect_regular,
    cfg_substitute_many,
    word_grammar,
)
from .pda import BOTTOM, Pda, T, cfl_left_quotient_regular, cfl_right_quotient_regular


class PresentationError(ValueError):
    pass


@dataclass(frozen=True)
class GroupElement:
    h: tuple
    t: str

    def __str__(self):
        return f"({format_word(self.h)}, {self.t})"


@dataclass(frozen=True)
class VfPresentation:
    kernel: tuple
    transversal: tuple
    identity: str
    action: Mapping
    factor: Mapping
    name: str = "G"
    spelling: Mapping = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "kernel", tuple(self.kernel))
        object.__setattr__(self, "transversal", tuple(self.transversal))
        if self.identity not in self.transversal:
            raise PresentationError("identity representative missing from the transversal")
        overlap = set(self.transversal) & set(self.kernel_letters)
        if overlap:
            raise PresentationError(f"transversal symbols clash with kernel letters: {sorted(overlap)}")
        for t in self.transversal:
            if t not in self.action:
                raise PresentationError(f"no action given for {t!r}")
            if self.action[t].basis != self.kernel:
                raise PresentationError(f"action of {t!r} has the wrong basis")
            for s in self.transversal:
                if (t, s) not in self.factor:
                    raise PresentationError(f"factor set misses ({t}, {s})")

    # alphabet

    @property
    def rank(self) -> int:
        return len(self.kernel)

    @property
    def kernel_letters(self) -> tuple:
        return self.kernel + tuple(inverse_letter(x) for x in self.kernel)

    @property
    def transversal_letters(self) -> tuple:
        return tuple(t for t in self.transversal if t != self.identity)

    @property
    def alphabet(self) -> tuple:
        return self.kernel_letters + self.transversal_letters

    # arithmetic

    @property
    def one(self) -> GroupElement:
        return GroupElement((), self.identity)

    def mul(self, x: GroupElement, y: GroupElement) -> GroupElement:
        f, m = self.factor[(x.t, y.t)]
        return GroupElement(multiply(x.h, self.action[x.t](y.h), f), m)

    def letter(self, y: str) -> GroupElement:
        if y in self.transversal:
            return GroupElement((), y)
        if y in self.kernel_letters:
            return GroupElement((y,), self.identity)
        raise AlphabetError(f"letter {y!r} is not a generator of {self.name}")

    def nf(self, w: Sequence[str]) -> GroupElement:
        e = self.one
        for y in w:
            e = self.mul(e, self.letter(y))
        return e

    def kernel_element(self, h: Sequence[str]) -> GroupElement:
        return GroupElement(free_reduce(h), self.identity)

    @cached_property
    def _t_inverse(self) -> dict:
        out = {}
        for t in self.transversal:
            for s in self.transversal:
                f, m = self.factor[(t, s)]
                if m == self.identity:
                    # t·s = f, so t⁻¹ = s·f⁻¹ = φ_s(f⁻¹)·s
                    out[t] = GroupElement(self.action[s](word_invert(f)), s)
                    break
        return out

    def inverse(self, x: GroupElement) -> GroupElement:
        ti = self._t_inverse.get(x.t)
        if ti is None:
            raise PresentationError(f"{x.t!r} has no inverse in the tables")
        return self.mul(ti, self.kernel_element(word_invert(x.h)))

    def spell(self, x: GroupElement) -> tuple:
        return x.h + ((x.t,) if x.t != self.identity else ())

    def conj(self, g: GroupElement, x: GroupElement) -> GroupElement:
        """``g x g⁻¹``."""
        return self.mul(self.mul(g, x), self.inverse(g))

    def inverse_spelling(self) -> dict:
        return {y: self.spell(self.inverse(self.letter(y))) for y in self.alphabet}

    def is_identity_word(self, w: Sequence[str]) -> bool:
        return self.nf(w) == self.one

    # serialization

    def to_json(self) -> dict:
        return {
            "format": "rcf.vf/1",
            "name": self.name,
            "kernel": list(self.kernel),
            "transversal": list(self.transversal),
            "identity": self.identity,
            "action": {t: {x: format_word(self.action[t].images[x]) for x in self.kernel} for t in self.transversal},
            "action_inverse": {
                t: {x: format_word(self.action[t].inverse_images[x]) for x in self.kernel} for t in self.transversal
            },
            "factor_set": {
                t: {s: [format_word(self.factor[(t, s)][0]), self.factor[(t, s)][1]] for s in self.transversal}
                for t in self.transversal
            },
            "spelling": dict(self.spelling),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "VfPresentation":
        kernel = tuple(data["kernel"])
        action = {}
        for t in data["transversal"]:
            imgs = {x: parse_word(w) for x, w in data["action"][t].items()}
            invs = {x: parse_word(w) for x, w in data["action_inverse"][t].items()}
            action[t] = FreeAutomorphism(kernel, imgs, invs)
        factor = {}
        for t, row in data["factor_set"].items():
            for s, (w, m) in row.items():
                factor[(t, s)] = (parse_word(w), m)
        return cls(
            kernel,
            tuple(data["transversal"]),
            data["identity"],
            action,
            factor,
            data.get("name", "G"),
            dict(data.get("spelling", {})),
        )


def free_presentation(rank: int, letters: Optional[Sequence[str]] = None) -> VfPresentation:
    from .free import default_basis

    basis = tuple(letters) if letters else tuple(default_basis(rank))
    return VfPresentation(
        basis,
        ("1",),
        "1",
        {"1": FreeAutomorphism.identity(basis)},
        {("1", "1"): ((), "1")},
        name=f"F{rank}",
    )


def d_infinity(m_tt: str = "1") -> VfPresentation:
    """``⟨a, t | t² = 1, t a t = a⁻¹⟩``; ``m_tt`` lets tests corrupt the table."""
    basis = ("a",)
    flip = FreeAutomorphism(basis, {"a": ("a^-1",)}, {"a": ("a^-1",)})
    return VfPresentation(
        basis,
        ("1", "t"),
        "1",
        {"1": FreeAutomorphism.identity(basis), "t": flip},
        {("1", "1"): ((), "1"), ("1", "t"): ((), "t"), ("t", "1"): ((), "t"), ("t", "t"): ((), m_tt)},
        name="Dinf",
    )


def load_presentation(name: str) -> VfPresentation:
    data = json.loads(resources.files("rcf").joinpath("data", f"{name}.json").read_text(encoding="utf-8"))
    return VfPresentation.from_json(data)


def z3_z2() -> VfPresentation:
    return load_presentation("z3z2")


def named_presentation(name: str) -> VfPresentation:
    key = name.lower()
    if key in ("f1", "z"):
        return free_presentation(1)
    if key == "f2":
        return free_presentation(2)
    if key in ("dinf", "d_inf", "d∞"):
        return d_infinity()
    if key in ("z3z2", "z3*z2"):
        return z3_z2()
    raise PresentationError(f"unknown group {name!r}")


# validation -----------------------------------------------------------------


@dataclass
class ValidationReport:
    ok: bool
    failures: list

    def __str__(self):
        if self.ok:
            return "valid"
        return "invalid:\n" + "\n".join(f"  {f}" for f in self.failures)


def vf_validate(p: VfPresentation) -> ValidationReport:
    """Check the identity rows, associativity on generator triples and inverses."""
    fails = []
    t0 = p.identity
    if not p.action[t0].is_identity():
        fails.append(f"action of {t0} is not the identity")
    for s in p.transversal:
        for pair in ((t0, s), (s, t0)):
            if p.factor[pair] != ((), s):
                fails.append(f"factor{pair} should be (ε, {s})")
    gens = [p.letter(y) for y in p.alphabet]
    for x, y, z in itertools.product(gens, repeat=3):
        left = p.mul(p.mul(x, y), z)
        right = p.mul(x, p.mul(y, z))
        if left != right:
            names = tuple(format_word(p.spell(e)) for e in (x, y, z))
            fails.append(f"associativity fails on {names}: {left} != {right}")
    for t in p.transversal:
        if t not in p._t_inverse:
            fails.append(f"{t} has no inverse")
    return ValidationReport(not fails, fails)


def vf_normal_form(p: VfPresentation, w: Sequence[str]) -> GroupElement:
    return p.nf(w)


# extended automorphisms --------------------------------------------------------


@dataclass(frozen=True)
class ExtendedAutomorphism:
    """A kernel automorphism together with images of the transversal letters."""

    base: FreeAutomorphism
    extension: Mapping

    def image(self, y: str) -> tuple:
        if y in self.extension:
            return tuple(self.extension[y])
        return self.base((y,))

    def apply(self, w: Sequence[str]) -> tuple:
        return tuple(itertools.chain.from_iterable(self.image(y) for y in w))


def check_extension(p: VfPresentation, phi: ExtendedAutomorphism) -> list:
    """Relations of the tables that ``phi`` fails to respect."""
    fails = []
    img = {y: p.nf(phi.image(y)) for y in p.alphabet}
    img[p.identity] = p.one

    def ev(w):
        e = p.one
        for y in w:
            e = p.mul(e, img[y] if y in img else p.letter(y))
        return e

    for x in p.kernel:
        if p.nf(phi.image(x)) != p.kernel_element(phi.base((x,))):
            fails.append(f"image of {x} disagrees with the base automorphism")
    for t in p.transversal:
        for s in p.transversal:
            f, m = p.factor[(t, s)]
            lhs = p.mul(img[t], img[s])
            rhs = p.mul(p.nf(phi.base(f)), img[m])
            if lhs != rhs:
                fails.append(f"relation {t}·{s} = f·m not preserved")
        for x in p.kernel:
            lhs = p.mul(img[t], img[x])
            rhs = p.mul(p.nf(phi.base(p.action[t]((x,)))), img[t])
            if lhs != rhs:
                fails.append(f"relation {t}·{x} = φ_{t}({x})·{t} not preserved")
    return fails


def identity_extension(p: VfPresentation) -> ExtendedAutomorphism:
    return ExtendedAutomorphism(FreeAutomorphism.identity(p.kernel), {t: (t,) for t in p.transversal_letters})


def inner_extension(p: VfPresentation, g: GroupElement) -> ExtendedAutomorphism:
    """Conjugation ``x ↦ g x g⁻¹`` on the whole group; ``g`` must normalize the kernel."""
    gi = p.inverse(g)
    imgs, invs = {}, {}
    for x in p.kernel:
        e = p.conj(g, p.letter(x))
        f = p.conj(gi, p.letter(x))
        if e.t != p.identity or f.t != p.identity:
            raise PresentationError("conjugation does not preserve the kernel")
        imgs[x], invs[x] = e.h, f.h
    base = FreeAutomorphism(p.kernel, imgs, invs)
    ext = {t: p.spell(p.conj(g, p.letter(t))) for t in p.transversal_letters}
    return ExtendedAutomorphism(base, ext)


# machines -----------------------------------------------------------------------


def _stack_symbol(x: str) -> str:
    return f"[{x}]"


def _reduce_moves(p: VfPresentation, src, dst, read: tuple, mu: tuple) -> list:
    """Moves multiplying the stacked kernel word by ``mu``.

    For each length ``k`` of cancellation the move pops ``x·ω`` with ``ω`` the
    stack spelling of ``(mu[:k])⁻¹`` and ``x`` a symbol that does not cancel
    ``mu[k]``, then pushes ``x`` followed by ``mu[k:]``.
    """
    sym = _stack_symbol
    guards = [sym(x) for x in p.kernel_letters] + [BOTTOM]
    out = []
    n = len(mu)
    for k in range(n + 1):
        omega = tuple(sym(x) for x in word_invert(mu[:k]))
        nu = tuple(sym(x) for x in mu[k:])
        if k == n:
            out.append(T(src, read, omega, dst, ()))
            continue
        block = sym(inverse_letter(mu[k]))
        for x in guards:
            if x != block:
                out.append(T(src, read, (x,) + omega, dst, (x,) + nu))
    return out


def _stack_alphabet(p: VfPresentation) -> tuple:
    for y in p.alphabet:
        if y.startswith("["):
            raise PresentationError("generator names may not start with '['")
    return (BOTTOM,) + tuple(_stack_symbol(x) for x in p.kernel_letters)


def _q(t: str) -> str:
    return f"q_{t}"


def _core_moves(p: VfPresentation, state, letters, element_of) -> list:
    moves = []
    for t in p.transversal:
        for y in letters:
            e = p.mul(GroupElement((), t), element_of(y))
            moves += _reduce_moves(p, state(t), state(e.t), (y,), e.h)
    return moves


def build_wp_pda(p: VfPresentation) -> Pda:
    """Machine tracking ``(h, t)`` with ``h`` on the stack; accepts the identity.

    Reading moves are deterministic; the one ε-move is the final acceptance.
    """
    moves = _core_moves(p, _q, p.alphabet, p.letter)
    moves.append(T(_q(p.identity), (), (BOTTOM,), "acc", (BOTTOM,)))
    states = tuple(_q(t) for t in p.transversal) + ("acc",)
    return Pda(states, p.alphabet, _stack_alphabet(p), BOTTOM, tuple(moves), _q(p.identity), ("acc",))


def build_cowp_pda(p: VfPresentation) -> Pda:
    """The word-problem machine with the accepting condition flipped."""
    moves = _core_moves(p, _q, p.alphabet, p.letter)
    for t in p.transversal_letters:
        moves.append(T(_q(t), (), (), "acc", ()))
    for x in p.kernel_letters:
        s = _stack_symbol(x)
        moves.append(T(_q(p.identity), (), (s,), "acc", (s,)))
    states = tuple(_q(t) for t in p.transversal) + ("acc",)
    return Pda(states, p.alphabet, _stack_alphabet(p), BOTTOM, tuple(moves), _q(p.identity), ("acc",))


SEPARATOR = "#"


def build_pairing_pda(p: VfPresentation, phi: ExtendedAutomorphism) -> Pda:
    """Accepts ``u # v`` exactly when ``φ(u)·v = 1`` in the group."""
    fails = check_extension(p, phi)
    if fails:
        raise PresentationError("extension is not an automorphism: " + "; ".join(fails[:3]))
    before = {y: p.nf(phi.image(y)) for y in p.alphabet}
    moves = _core_moves(p, lambda t: ("u", t), p.alphabet, before.__getitem__)
    moves += _core_moves(p, lambda t: ("v", t), p.alphabet, p.letter)
    for t in p.transversal:
        moves.append(T(("u", t), (SEPARATOR,), (), ("v", t), ()))
    moves.append(T(("v", p.identity), (), (BOTTOM,), "acc", (BOTTOM,)))
    states = tuple(("u", t) for t in p.transversal) + tuple(("v", t) for t in p.transversal) + ("acc",)
    return Pda(
        states, p.alphabet + (SEPARATOR,), _stack_alphabet(p), BOTTOM, tuple(moves), ("u", p.identity), ("acc",)
    )


def transversal_fsa(p: VfPresentation, accept: Sequence[str]) -> Fsa:
    """Full preimage of the cosets ``F·t`` for ``t`` in ``accept`` (F the kernel)."""
    edges = []
    for t in p.transversal:
        for y in p.alphabet:
            edges.append((t, y, p.mul(GroupElement((), t), p.letter(y)).t))
    return Fsa(p.transversal, p.alphabet, tuple(edges), p.identity, tuple(accept))


# recognizer-level operations -------------------------------------------------------


def free_wp_grammar(letters: Sequence[str], start: str = "W") -> Cfg:
    """``W → ε | W x W x⁻¹ W`` over ``letters`` (closed under inversion)."""
    prods = [(start, ())]
    for x in letters:
        prods.append((start, (start, x, start, inverse_letter(x), start)))
    return Cfg(tuple(letters), (start,), tuple(prods), start)


def expansion_closure(g_reduced: Cfg, letters: Sequence[str]) -> Cfg:
    """All words over ``letters`` that freely reduce into ``L(g_reduced)``, given that
    ``L(g_reduced)`` holds the reduced spellings."""
    letters = tuple(letters)
    if not set(g_reduced.terminals) <= set(letters):
        raise AlphabetError("grammar terminals must be kernel letters")
    g = g_reduced.with_terminals(letters)
    W = free_wp_grammar(letters)
    subs = {x: cfg_concat([word_grammar(letters, [(x,)]), W]) for x in letters}
    return cfg_concat([W, cfg_substitute_many(g, subs)])


def _as_fsa(r, alphabet: Sequence[str]) -> Fsa:
    if isinstance(r, Fsa):
        return r
    return Fsa.from_words(alphabet, [tuple(r)])


def recognizer_multiply(g: Cfg, r, side: str, p: VfPresentation) -> Cfg:
    """Full-preimage recognizer of ``A·R`` (``side='right'``) or ``R·A``."""
    alphabet = tuple(g.terminals)
    fsa = _as_fsa(r, alphabet)
    if set(fsa.alphabet) - set(alphabet):
        raise AlphabetError("rational set uses letters outside the recognizer alphabet")
    inv = fsa.with_alphabet(alphabet).formal_inverse(p.inverse_spelling())
    if side == "right":
        return cfl_right_quotient_regular(g, inv)
    if side == "left":
        return cfl_left_quotient_regular(g, inv)
    raise ValueError("side must be 'left' or 'right'")


def recognizer_intersect_recognisable(g: Cfg, c: Fsa) -> Cfg:
    return cfg_intersect_regular(g, c)


def preimage_under_epimorphism(g_h: Cfg, hom: Mapping[str, Sequence[str]], source: Sequence[str]) -> Cfg:
    return cfg_hom_preimage(g_h, hom, source)


def decompose_over_finite_index(
    g: Cfg,
    coset_fsas: Mapping[str, Fsa],
    transversal_words: Mapping[str, Sequence[str]],
    h_generators: Mapping[str, Sequence[str]],
) -> dict:
    """``C = ⋃ C_t·t``: for each ``t`` a recognizer of ``C_t ⊆ H`` over H's letters."""
    out = {}
    for t, fsa in coset_fsas.items():
        part = cfg_intersect_regular(g, fsa)
        shifted = cfl_right_quotient_regular(part, Fsa.from_words(tuple(g.terminals), [tuple(transversal_words[t])]))
        out[t] = cfg_hom_preimage(shifted, h_generators, tuple(h_generators))
    return out
