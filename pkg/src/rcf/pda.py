"""Generalized pushdown automata and their conversions.

A transition reads a word, pops a word and pushes a word.  Stacks are
tuples with the top at the right, so the bottom marker always sits at
index 0.  Reading a transition ``pop = (⊥, x)`` means the stack ends in
``⊥ x`` with ``x`` on top.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Optional, Sequence

from .free import format_word
from .fsa import Fsa
from .grammar import Cfg, compact, cyk_member, remove_useless

BOTTOM = "⊥"


class PdaError(ValueError):
    pass


@dataclass(frozen=True)
class Transition:
    src: Hashable
    read: tuple
    pop: tuple
    dst: Hashable
    push: tuple

    def __post_init__(self):
        object.__setattr__(self, "read", tuple(self.read))
        object.__setattr__(self, "pop", tuple(self.pop))
        object.__setattr__(self, "push", tuple(self.push))

    def label(self) -> str:
        r = format_word(self.read)
        return f"({r}, {format_word(self.pop)}) / {format_word(self.push)}"


def T(src, read, pop, dst, push) -> Transition:
    return Transition(src, tuple(read), tuple(pop), dst, tuple(push))


@dataclass(frozen=True)
class Pda:
    states: tuple
    alphabet: tuple
    stack_alphabet: tuple
    bottom: str
    transitions: tuple
    start: Hashable
    accepts: frozenset

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(dict.fromkeys(self.states)))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "stack_alphabet", tuple(dict.fromkeys(self.stack_alphabet)))
        object.__setattr__(self, "transitions", tuple(dict.fromkeys(self.transitions)))
        object.__setattr__(self, "accepts", frozenset(self.accepts))
        self.validate()

    def __hash__(self):
        return hash((self.start, len(self.transitions), len(self.states)))

    def validate(self) -> None:
        Q, S, X = set(self.states), set(self.alphabet), set(self.stack_alphabet)
        if S & X:
            raise PdaError("input and stack alphabets overlap")
        if self.bottom not in X:
            raise PdaError("bottom marker missing from the stack alphabet")
        if self.start not in Q or not self.accepts <= Q:
            raise PdaError("start/accept states must be declared")
        for t in self.transitions:
            if t.src not in Q or t.dst not in Q:
                raise PdaError(f"transition {t} uses an undeclared state")
            for a in t.read:
                if a not in S:
                    raise PdaError(f"transition reads unknown letter {a!r}")
            for x in t.pop + t.push:
                if x not in X:
                    raise PdaError(f"transition uses unknown stack symbol {x!r}")
            check_bottom_discipline(t, self.bottom)

    @cached_property
    def grammar(self) -> Cfg:
        return pda_to_cfg(self)

    def accepts_word(self, w: Sequence[str]) -> bool:
        return pda_accepts(self, w)

    def is_deterministic(self) -> bool:
        """No two transitions from one state can fire on the same input and stack."""
        by_src: dict = {}
        for t in self.transitions:
            by_src.setdefault(t.src, []).append(t)
        for ts in by_src.values():
            for t1, t2 in itertools.combinations(ts, 2):
                if _prefix_comparable(t1.read, t2.read) and _suffix_comparable(t1.pop, t2.pop):
                    return False
        return True

    def to_json(self) -> dict:
        return {
            "format": "rcf.pda/1",
            "states": [str(q) for q in self.states],
            "alphabet": list(self.alphabet),
            "stack_alphabet": list(self.stack_alphabet),
            "bottom": self.bottom,
            "start": str(self.start),
            "accepts": sorted(str(q) for q in self.accepts),
            "transitions": [[str(t.src), list(t.read), list(t.pop), str(t.dst), list(t.push)] for t in self.transitions],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Pda":
        return cls(
            tuple(data["states"]),
            tuple(data["alphabet"]),
            tuple(data["stack_alphabet"]),
            data["bottom"],
            tuple(T(s, r, p, d, u) for s, r, p, d, u in data["transitions"]),
            data["start"],
            tuple(data["accepts"]),
        )


def _prefix_comparable(a, b) -> bool:
    n = min(len(a), len(b))
    return a[:n] == b[:n]


def _suffix_comparable(a, b) -> bool:
    n = min(len(a), len(b))
    return n == 0 or a[-n:] == b[-n:]


def check_bottom_discipline(t: Transition, bottom: str) -> None:
    for word, what in ((t.pop, "pop"), (t.push, "push")):
        c = word.count(bottom)
        if c > 1:
            raise PdaError(f"{what} word of {t} holds the bottom marker twice")
        if c == 1 and word[0] != bottom:
            raise PdaError(f"bottom marker not at the bottom of the {what} word in {t}")
    if (bottom in t.pop) != (bottom in t.push):
        raise PdaError(f"transition {t} breaks the bottom-marker discipline")


def example_z_pda(a: str = "a", ainv: str = "a^-1") -> Pda:
    """The two-state machine tracking the reduced form of a word in ``⟨a | ⟩``."""
    x, X, B = "x", "x^-1", BOTTOM
    ts = (
        T("q0", (a,), (B,), "q0", (B, x)),
        T("q0", (a,), (x,), "q0", (x, x)),
        T("q0", (a,), (X,), "q0", ()),
        T("q0", (ainv,), (B,), "q0", (B, X)),
        T("q0", (ainv,), (x,), "q0", ()),
        T("q0", (ainv,), (X,), "q0", (X, X)),
        T("q0", (), (B,), "q1", (B,)),
    )
    return Pda(("q0", "q1"), (a, ainv), (B, x, X), B, ts, "q0", ("q1",))


# simulation ---------------------------------------------------------------------


@dataclass(frozen=True)
class RunResult:
    accepted: bool
    exhausted: bool
    accepting_stacks: tuple


def pda_simulate(p: Pda, w: Sequence[str], max_stack: Optional[int] = None, max_configs: int = 200_000) -> RunResult:
    """Breadth-first search of configurations; stacks longer than ``max_stack`` are cut.

    The search is only a lower bound on acceptance when ``exhausted`` is set.
    """
    w = tuple(w)
    if max_stack is None:
        longest = max((len(t.push) for t in p.transitions), default=1)
        max_stack = 4 + 2 * longest * (len(w) + 2)
    start = (p.start, 0, (p.bottom,))
    seen = {start}
    todo = deque([start])
    stacks = set()
    exhausted = False
    by_src: dict = {}
    for t in p.transitions:
        by_src.setdefault(t.src, []).append(t)
    while todo:
        q, i, st = todo.popleft()
        if i == len(w) and q in p.accepts:
            stacks.add(st)
        for t in by_src.get(q, ()):
            if w[i : i + len(t.read)] != t.read:
                continue
            if len(t.pop) > len(st) or (t.pop and st[len(st) - len(t.pop) :] != t.pop):
                continue
            nst = st[: len(st) - len(t.pop)] + t.push
            if len(nst) > max_stack:
                exhausted = True
                continue
            cfg = (t.dst, i + len(t.read), nst)
            if cfg not in seen:
                if len(seen) >= max_configs:
                    exhausted = True
                    continue
                seen.add(cfg)
                todo.append(cfg)
    return RunResult(bool(stacks), exhausted, tuple(sorted(stacks)))


def pda_accepts(p: Pda, w: Sequence[str], budget: Optional[int] = None) -> bool:
    """Exact membership through the equivalent grammar; ``budget`` is accepted for API symmetry."""
    return cyk_member(p.grammar, w)


# normalization -------------------------------------------------------------------


class _Fresh:
    def __init__(self, taken: Iterable, tag: str):
        self.taken = set(taken)
        self.tag = tag
        self.n = 0

    def __call__(self):
        while True:
            self.n += 1
            s = f"{self.tag}{self.n}"
            if s not in self.taken:
                self.taken.add(s)
                return s


def unit_reads(p: Pda) -> Pda:
    """Split transitions so that each reads at most one letter."""
    if all(len(t.read) <= 1 for t in p.transitions):
        return p
    fresh = _Fresh(map(str, p.states), "r")
    states, ts = list(p.states), []
    for t in p.transitions:
        if len(t.read) <= 1:
            ts.append(t)
            continue
        mids = [fresh() for _ in range(len(t.read) - 1)]
        states.extend(mids)
        chain = [t.src] + mids + [t.dst]
        ts.append(T(chain[0], t.read[:1], t.pop, chain[1], t.push))
        for k in range(1, len(t.read)):
            ts.append(T(chain[k], t.read[k : k + 1], (), chain[k + 1], ()))
    return Pda(tuple(states), p.alphabet, p.stack_alphabet, p.bottom, tuple(ts), p.start, p.accepts)


def normalize(p: Pda) -> Pda:
    """Unit reads, single-symbol pops and pushes of length at most two."""
    p = unit_reads(p)
    fresh = _Fresh(map(str, p.states), "n")
    states = list(p.states)
    step = []
    for t in p.transitions:
        if len(t.pop) == 0:
            for X in p.stack_alphabet:
                step.append(T(t.src, t.read, (X,), t.dst, (X,) + t.push))
        elif len(t.pop) == 1:
            step.append(t)
        else:
            mids = [fresh() for _ in range(len(t.pop) - 1)]
            states.extend(mids)
            chain = [t.src] + mids + [t.dst]
            rev = t.pop[::-1]
            for k, X in enumerate(rev):
                last = k == len(rev) - 1
                step.append(T(chain[k], t.read if k == 0 else (), (X,), chain[k + 1], t.push if last else ()))
    out = []
    for t in step:
        if len(t.push) <= 2:
            out.append(t)
            continue
        k = len(t.push)
        mids = [fresh() for _ in range(k - 2)]
        states.extend(mids)
        chain = [t.src] + mids + [t.dst]
        out.append(T(chain[0], t.read, t.pop, chain[1], t.push[:2]))
        for i in range(1, k - 1):
            out.append(T(chain[i], (), t.push[i : i + 1], chain[i + 1], t.push[i : i + 2]))
    return Pda(tuple(states), p.alphabet, p.stack_alphabet, p.bottom, tuple(out), p.start, p.accepts)


def pda_empty_stack(p: Pda) -> Pda:
    """Accept only after draining the stack down to the bottom marker."""
    fresh = _Fresh(map(str, p.states), "e")
    q1, q2 = fresh(), fresh()
    ts = list(p.transitions)
    ts += [T(f, (), (), q1, ()) for f in p.accepts]
    ts += [T(q1, (), (X,), q1, ()) for X in p.stack_alphabet if X != p.bottom]
    ts.append(T(q1, (), (p.bottom,), q2, (p.bottom,)))
    return Pda(p.states + (q1, q2), p.alphabet, p.stack_alphabet, p.bottom, tuple(ts), p.start, (q2,))


def pda_to_cfg(p: Pda) -> Cfg:
    """Triple construction ``[p X q]`` on the normalized empty-stack machine."""
    e = pda_empty_stack(p)
    n = normalize(e)
    (q2,) = tuple(e.accepts)
    qf = ("final",)
    pop_bottom = (q2, None, p.bottom, qf, ())  # internal only: lets the bottom marker go
    moves = [(t.src, t.read[0] if t.read else None, t.pop[0], t.dst, t.push) for t in n.transitions]
    moves.append(pop_bottom)

    found: set = set()
    by_start: dict = {}  # (state, X) -> ends
    prods: set = set()
    todo = []
    one: dict = {}  # (dst, Y) -> moves pushing exactly Y
    two_top: dict = {}  # (dst, Z) -> moves pushing (Y, Z)
    two_low: dict = {}  # Y -> moves pushing (Y, Z)

    def add(tri):
        if tri not in found:
            found.add(tri)
            by_start.setdefault((tri[0], tri[1]), set()).add(tri[2])
            todo.append(tri)

    for m in moves:
        src, a, X, dst, push = m
        body_a = (a,) if a is not None else ()
        if len(push) == 0:
            prods.add(((src, X, dst), body_a))
            add((src, X, dst))
        elif len(push) == 1:
            one.setdefault((dst, push[0]), []).append(m)
        else:
            two_top.setdefault((dst, push[1]), []).append(m)
            two_low.setdefault(push[0], []).append(m)
    while todo:
        q, Y, r = todo.pop()
        for src, a, X, dst, push in one.get((q, Y), ()):
            body_a = (a,) if a is not None else ()
            prods.add(((src, X, r), body_a + ((q, Y, r),)))
            add((src, X, r))
        # (q, Y, r) as the top part of a two-symbol push
        for src, a, X, dst, push in two_top.get((q, Y), ()):
            body_a = (a,) if a is not None else ()
            for s in list(by_start.get((r, push[0]), ())):
                prods.add(((src, X, s), body_a + ((q, Y, r), (r, push[0], s))))
                add((src, X, s))
        # (q, Y, r) as the lower part
        for src, a, X, dst, push in two_low.get(Y, ()):
            if (dst, push[1], q) in found:
                body_a = (a,) if a is not None else ()
                prods.add(((src, X, r), body_a + ((dst, push[1], q), (q, Y, r))))
                add((src, X, r))
    root = (p.start, p.bottom, qf)
    names = {tri: f"[{tri[0]}|{tri[1]}|{tri[2]}]" for tri in found}
    if len(set(names.values())) != len(names):
        names = {tri: f"[{i}]" for i, tri in enumerate(sorted(found, key=repr))}
    start = "S"
    while start in names.values() or start in p.alphabet:
        start += "'"
    out = []
    if root in found:
        out.append((start, (names[root],)))
    for h, b in prods:
        out.append((names[h], tuple(names[x] if isinstance(x, tuple) else x for x in b)))
    g = Cfg(p.alphabet, (start,) + tuple(names.values()), tuple(out), start)
    return compact(remove_useless(g))


def cfg_to_pda(g: Cfg) -> Pda:
    """Predict/match machine: nonterminal ``A`` is the stack symbol ``[A]``, terminal ``a`` is ``⟨a⟩``."""
    nt = {A: f"[{A}]" for A in g.nonterminals}
    tm = {a: f"⟨{a}⟩" for a in g.terminals}
    sym = {**nt, **tm}
    B = BOTTOM
    ts = [T("q0", (), (B,), "q", (B, nt[g.start]))]
    for h, body in g.productions:
        ts.append(T("q", (), (nt[h],), "q", tuple(sym[x] for x in reversed(body))))
    for a in g.terminals:
        ts.append(T("q", (a,), (tm[a],), "q", ()))
    ts.append(T("q", (), (B,), "qf", (B,)))
    return Pda(
        ("q0", "q", "qf"),
        g.terminals,
        (B,) + tuple(nt.values()) + tuple(tm.values()),
        B,
        tuple(ts),
        "q0",
        ("qf",),
    )


# compositions ------------------------------------------------------------------


def pda_hom_preimage(p: Pda, h: Mapping[str, Sequence[str]], source: Sequence[str]) -> Pda:
    """Machine for ``{ w : h(w) ∈ L(p) }``: each source letter loads ``h(c)`` into a buffer."""
    p = unit_reads(p)
    images = {c: tuple(h[c]) for c in source}
    states = [(q, None, 0) for q in p.states]
    for q in p.states:
        for c, img in images.items():
            states.extend((q, c, i) for i in range(1, len(img)))
    ts = []
    for q in p.states:
        for c, img in images.items():
            ts.append(T((q, None, 0), (c,), (), (q, c, 0) if img else (q, None, 0), ()))
    for t in p.transitions:
        if not t.read:
            ts.append(T((t.src, None, 0), (), t.pop, (t.dst, None, 0), t.push))
            for c, img in images.items():
                for i in range(len(img)):
                    ts.append(T((t.src, c, i), (), t.pop, (t.dst, c, i), t.push))
        else:
            x = t.read[0]
            for c, img in images.items():
                for i, y in enumerate(img):
                    if y == x:
                        nxt = (t.dst, c, i + 1) if i + 1 < len(img) else (t.dst, None, 0)
                        ts.append(T((t.src, c, i), (), t.pop, nxt, t.push))
    all_states = set(states) | {(q, c, 0) for q in p.states for c in images if images[c]}
    stack_alpha = p.stack_alphabet
    if set(stack_alpha) & set(source):
        raise PdaError("source letters clash with stack symbols")
    return Pda(
        tuple(sorted(all_states, key=repr)),
        tuple(source),
        stack_alpha,
        p.bottom,
        tuple(ts),
        (p.start, None, 0),
        tuple((f, None, 0) for f in p.accepts),
    )


def _fsa_ready(a: Fsa, alphabet: Sequence[str]) -> Fsa:
    extra = set(a.alphabet) - set(alphabet)
    if extra:
        raise PdaError(f"automaton letters {sorted(extra)} outside the grammar terminals")
    return a.remove_epsilon().trim()


def pda_right_quotient_regular(p: Pda, a: Fsa) -> Pda:
    """``{ w : ∃u ∈ L(a), wu ∈ L(p) }``: after ``w`` the machine guesses ``u`` letter by letter."""
    p = unit_reads(p)
    fsa = _fsa_ready(a, p.alphabet)
    states = [("in", q) for q in p.states] + [("end", q, s) for q in p.states for s in fsa.states]
    ts = [T(("in", q), (), (), ("end", q, fsa.start), ()) for q in p.states]
    for t in p.transitions:
        ts.append(T(("in", t.src), t.read, t.pop, ("in", t.dst), t.push))
        for s in fsa.states:
            if not t.read:
                ts.append(T(("end", t.src, s), (), t.pop, ("end", t.dst, s), t.push))
        if t.read:
            for s, x, s2 in fsa.edges:
                if x == t.read[0]:
                    ts.append(T(("end", t.src, s), (), t.pop, ("end", t.dst, s2), t.push))
    acc = [("end", f, s) for f in p.accepts for s in fsa.accepts]
    return Pda(tuple(states), p.alphabet, p.stack_alphabet, p.bottom, tuple(ts), ("in", p.start), acc)


def pda_left_quotient_regular(p: Pda, a: Fsa) -> Pda:
    """``{ w : ∃u ∈ L(a), uw ∈ L(p) }``: the machine first guesses ``u``."""
    p = unit_reads(p)
    fsa = _fsa_ready(a, p.alphabet)
    states = [("pre", q, s) for q in p.states for s in fsa.states] + [("in", q) for q in p.states]
    ts = []
    for q in p.states:
        for s in fsa.accepts:
            ts.append(T(("pre", q, s), (), (), ("in", q), ()))
    for t in p.transitions:
        ts.append(T(("in", t.src), t.read, t.pop, ("in", t.dst), t.push))
        if not t.read:
            for s in fsa.states:
                ts.append(T(("pre", t.src, s), (), t.pop, ("pre", t.dst, s), t.push))
        else:
            for s, x, s2 in fsa.edges:
                if x == t.read[0]:
                    ts.append(T(("pre", t.src, s), (), t.pop, ("pre", t.dst, s2), t.push))
    acc = [("in", f) for f in p.accepts]
    return Pda(tuple(states), p.alphabet, p.stack_alphabet, p.bottom, tuple(ts), ("pre", p.start, fsa.start), acc)


def cfl_right_quotient_regular(g: Cfg, a: Fsa) -> Cfg:
    return pda_to_cfg(pda_right_quotient_regular(cfg_to_pda(g), a))


def cfl_left_quotient_regular(g: Cfg, a: Fsa) -> Cfg:
    return pda_to_cfg(pda_left_quotient_regular(cfg_to_pda(g), a))
