"""Exhaustive cross-checks of recognizers against brute-force oracles."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .free import format_word, free_reduce, is_freely_reduced, parse_word
from .geometry import LabelledGraph
from .grammar import Cfg, battery_membership
from .oracles import conjugator_search, exponent_sum
from .pda import Pda
from .vfgroup import VfPresentation

MODES = ("exact", "sound", "normal-complete")


class OracleError(ValueError):
    pass


@dataclass
class Oracle:
    """A membership predicate; ``decide`` returns ``None`` when its budget runs out."""

    name: str
    decide: Callable[[tuple], Optional[bool]]
    canonical: Callable[[tuple], bool] = is_freely_reduced
    params: dict = field(default_factory=dict)


def _word(x) -> tuple:
    return parse_word(x) if isinstance(x, str) else tuple(x)


def _free_reduce_oracle(target=()) -> Oracle:
    t = free_reduce(_word(target))
    return Oracle("free-reduce", lambda w: free_reduce(w) == t, params={"target": format_word(t)})


def _vf_oracle(group: VfPresentation, target=(), negate: bool = False) -> Oracle:
    e = group.nf(_word(target))

    def decide(w):
        return (group.nf(w) == e) != negate

    return Oracle(
        "vf-nf",
        decide,
        lambda w: group.spell(group.nf(w)) == tuple(w),
        {"group": group.name, "target": format_word(_word(target)), "negate": negate},
    )


def _conj_oracle(group: VfPresentation, element, bound: int = 8) -> Oracle:
    g0 = group.nf(_word(element))

    def decide(w):
        # one-sided: a miss within the bound is not a "no"
        return True if conjugator_search(group, g0, group.nf(w), bound) is not None else None

    return Oracle(
        "conj-search",
        decide,
        lambda w: group.spell(group.nf(w)) == tuple(w),
        {"group": group.name, "element": format_word(_word(element)), "bound": bound},
    )


def _dinf_class_oracle(element) -> Oracle:
    """Closed-form conjugacy in D∞: ``(aⁿ, t)`` by parity of ``n``, ``(aⁿ, 1)`` by ``|n|``."""

    def key(w):
        n, flip = 0, False
        for y in w:
            if y == "t":
                flip = not flip
            else:
                s = 1 if y == "a" else -1
                n += -s if flip else s
        return ("t", n % 2) if flip else ("1", abs(n))

    k0 = key(_word(element))
    return Oracle("dinf-class", lambda w: key(w) == k0, params={"element": format_word(_word(element))})


def _walk_oracle(graph: LabelledGraph, start=None, accept=None) -> Oracle:
    s = graph.basepoint if start is None else start
    acc = {s} if accept is None else set(accept)
    return Oracle("graph-walk", lambda w: bool(graph.walk(w, s) & acc), params={"start": repr(s)})


def _exp_oracle(letter: str, value: int = 0) -> Oracle:
    return Oracle("exponent-sum", lambda w: exponent_sum(w, letter) == value, params={"letter": letter, "value": value})


ORACLES = {
    "free-reduce": _free_reduce_oracle,
    "vf-nf": _vf_oracle,
    "conj-search": _conj_oracle,
    "dinf-class": _dinf_class_oracle,
    "graph-walk": _walk_oracle,
    "exponent-sum": _exp_oracle,
}


def make_oracle(name: str, **params) -> Oracle:
    if name not in ORACLES:
        raise OracleError(f"unknown oracle {name!r}; choose from {', '.join(ORACLES)}")
    return ORACLES[name](**params)


@dataclass
class CheckReport:
    """Outcome of one enumeration.

    ``unchecked`` counts words the mode does not constrain (for instance an
    oracle-accepted word the recognizer rejects under ``sound``) and
    ``exhausted`` the words where the oracle gave up.  All counts together
    equal the number of enumerated words.
    """

    recognizer: str
    oracle: str
    max_len: int
    mode: str
    agree: int = 0
    sound_failures: int = 0
    complete_failures: int = 0
    exhausted: int = 0
    unchecked: int = 0
    counterexamples: list = field(default_factory=list)
    exhausted_words: list = field(default_factory=list)

    @property
    def total(self) -> int:
        return self.agree + self.sound_failures + self.complete_failures + self.exhausted + self.unchecked

    @property
    def ok(self) -> bool:
        return self.sound_failures == 0 and self.complete_failures == 0

    def to_json(self) -> dict:
        return {
            "format": "rcf.check-report/1",
            "recognizer": self.recognizer,
            "oracle": self.oracle,
            "max_len": self.max_len,
            "mode": self.mode,
            "agree": self.agree,
            "sound_failures": self.sound_failures,
            "complete_failures": self.complete_failures,
            "exhausted": self.exhausted,
            "unchecked": self.unchecked,
            "counterexamples": [[format_word(w), r, o] for w, r, o in self.counterexamples],
            "exhausted_words": [format_word(w) for w in self.exhausted_words],
        }

    def summary(self) -> str:
        status = "ok" if self.ok else "FAIL"
        return (
            f"{self.recognizer} vs {self.oracle} ({self.mode}, ≤{self.max_len}): {status}  "
            f"agree={self.agree} sound_fail={self.sound_failures} complete_fail={self.complete_failures} "
            f"exhausted={self.exhausted} unchecked={self.unchecked}"
        )


def _grammar_of(recognizer: Union[Cfg, Pda]) -> Cfg:
    return recognizer.grammar if isinstance(recognizer, Pda) else recognizer


def enumerate_and_check(
    recognizer: Union[Cfg, Pda],
    oracle: Oracle,
    max_len: int,
    mode: str = "exact",
    alphabet: Optional[Sequence[str]] = None,
    recognizer_id: str = "recognizer",
    keep: int = 50,
    sample: Optional[int] = None,
    seed: int = 0,
) -> CheckReport:
    """Run every word up to ``max_len`` (length, then alphabet order) through both sides.

    With ``sample`` set only that many words per length are drawn, using the
    given seed; the draw is sorted back into enumeration order.
    """
    if mode not in MODES:
        raise OracleError(f"mode must be one of {MODES}")
    g = _grammar_of(recognizer)
    alphabet = tuple(alphabet if alphabet is not None else g.terminals)
    masks = battery_membership(g, alphabet, max_len)
    rng = np.random.default_rng(seed)
    rep = CheckReport(recognizer_id, oracle.name, max_len, mode)
    for n in range(max_len + 1):
        size = len(alphabet) ** n
        idx = range(size)
        if sample is not None and size > sample:
            idx = np.sort(rng.choice(size, sample, replace=False))
        words = list(itertools.product(alphabet, repeat=n)) if sample is None else None
        for i in idx:
            w = words[i] if words is not None else _index_word(int(i), n, alphabet)
            r = bool(masks[n][i])
            if mode == "sound" and not r:
                rep.unchecked += 1
                continue
            o = oracle.decide(w)
            if o is None:
                rep.exhausted += 1
                if len(rep.exhausted_words) < keep:
                    rep.exhausted_words.append(w)
                continue
            if mode == "exact":
                bad = r != o
            elif mode == "sound":
                bad = not o
            else:
                if not (o and oracle.canonical(w)):
                    rep.unchecked += 1
                    continue
                bad = not r
            if bad:
                if r:
                    rep.sound_failures += 1
                else:
                    rep.complete_failures += 1
                if len(rep.counterexamples) < keep:
                    rep.counterexamples.append((w, r, o))
            else:
                rep.agree += 1
    return rep


def _index_word(i: int, n: int, alphabet: Sequence[str]) -> tuple:
    out = []
    for _ in range(n):
        i, r = divmod(i, len(alphabet))
        out.append(alphabet[r])
    return tuple(reversed(out))


def replay(recognizer: Union[Cfg, Pda], oracle: Oracle, w: Sequence[str]) -> tuple:
    """Recognizer and oracle verdicts on one word, computed independently of the battery."""
    g = _grammar_of(recognizer)
    return g.accepts(tuple(w)), oracle.decide(tuple(w))


def partition_check(a: Union[Cfg, Pda], b: Union[Cfg, Pda], alphabet: Sequence[str], max_len: int) -> list:
    """Words accepted by both or by neither of two recognizers."""
    ma = battery_membership(_grammar_of(a), alphabet, max_len)
    mb = battery_membership(_grammar_of(b), alphabet, max_len)
    bad = []
    for n in range(max_len + 1):
        for i in np.flatnonzero(ma[n] == mb[n]):
            bad.append(_index_word(int(i), n, alphabet))
    return bad
