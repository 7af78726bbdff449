"""Reading and writing the versioned JSON formats."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

from .amalgam import TreeAmalgamationSpec
from .free import FreeAutomorphism
from .fsa import Fsa
from .geometry import LabelledGraph, TriangulationCertificate
from .grammar import Cfg
from .pda import Pda
from .vfgroup import VfPresentation, named_presentation

READERS = {
    "rcf.vf/1": VfPresentation.from_json,
    "rcf.cfg/1": Cfg.from_json,
    "rcf.pda/1": Pda.from_json,
    "rcf.fsa/1": Fsa.from_json,
    "rcf.graph/1": LabelledGraph.from_json,
    "rcf.amalgam/1": TreeAmalgamationSpec.from_json,
    "rcf.automorphism/1": FreeAutomorphism.from_json,
    "rcf.triangulation/1": TriangulationCertificate.from_json,
}


class FormatError(ValueError):
    pass


def from_data(data: dict):
    fmt = data.get("format") if isinstance(data, dict) else None
    if fmt not in READERS:
        raise FormatError(f"unknown format {fmt!r}")
    return READERS[fmt](data)


def load(path: Union[str, Path]):
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise FormatError(f"{path}: {e}") from None
    return from_data(data)


def dump(obj, path: Union[str, Path, None] = None) -> str:
    text = json.dumps(obj.to_json(), indent=2, ensure_ascii=False, sort_keys=False) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def load_group(ref: str) -> VfPresentation:
    """A bundled group name (``F2``, ``Dinf``, ...) or a path to a group file."""
    if Path(ref).suffix == ".json" or Path(ref).exists():
        obj = load(ref)
        if not isinstance(obj, VfPresentation):
            raise FormatError(f"{ref} does not hold a group")
        return obj
    return named_presentation(ref)
