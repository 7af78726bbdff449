"""Finite-state automata with ε-edges."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping, Optional, Sequence

from .free import format_word, parse_word


@dataclass(frozen=True)
class Fsa:
    """Nondeterministic automaton.  An edge label of ``None`` is an ε-move."""

    states: tuple
    alphabet: tuple
    edges: tuple
    start: Hashable
    accepts: frozenset

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        object.__setattr__(self, "accepts", frozenset(self.accepts))
        known = set(self.states)
        if self.start not in known:
            raise ValueError(f"start state {self.start!r} undeclared")
        if not self.accepts <= known:
            raise ValueError("accept states must be declared")
        sigma = set(self.alphabet)
        for p, a, q in self.edges:
            if p not in known or q not in known:
                raise ValueError(f"edge {p!r} -> {q!r} uses an undeclared state")
            if a is not None and a not in sigma:
                raise ValueError(f"edge label {a!r} not in alphabet")

    # construction helpers

    @classmethod
    def empty(cls, alphabet: Sequence[str]) -> "Fsa":
        return cls((0,), alphabet, (), 0, ())

    @classmethod
    def universal(cls, alphabet: Sequence[str]) -> "Fsa":
        return cls((0,), alphabet, tuple((0, a, 0) for a in alphabet), 0, (0,))

    @classmethod
    def from_words(cls, alphabet: Sequence[str], words: Iterable[Sequence[str]]) -> "Fsa":
        """Trie automaton accepting exactly the listed words."""
        states, edges, accepts = [()], [], set()
        seen = {()}
        for w in words:
            w = tuple(w)
            for i in range(len(w)):
                if w[: i + 1] not in seen:
                    seen.add(w[: i + 1])
                    states.append(w[: i + 1])
                    edges.append((w[:i], w[i], w[: i + 1]))
            accepts.add(w)
        names = {s: i for i, s in enumerate(states)}
        return cls(
            tuple(range(len(states))),
            alphabet,
            tuple((names[p], a, names[q]) for p, a, q in edges),
            0,
            tuple(names[s] for s in accepts),
        )

    # queries

    def successors(self) -> dict:
        out: dict = {s: [] for s in self.states}
        for p, a, q in self.edges:
            out[p].append((a, q))
        return out

    def eps_closure(self, sset: Iterable) -> frozenset:
        succ = self.successors()
        seen = set(sset)
        todo = list(seen)
        while todo:
            p = todo.pop()
            for a, q in succ[p]:
                if a is None and q not in seen:
                    seen.add(q)
                    todo.append(q)
        return frozenset(seen)

    def run(self, w: Sequence[str]) -> frozenset:
        succ = self.successors()
        cur = self.eps_closure([self.start])
        for x in w:
            nxt = {q for p in cur for a, q in succ[p] if a == x}
            cur = self.eps_closure(nxt)
            if not cur:
                break
        return cur

    def accepts_word(self, w: Sequence[str]) -> bool:
        return bool(self.run(w) & self.accepts)

    def has_epsilon(self) -> bool:
        return any(a is None for _, a, _ in self.edges)

    # transformations

    def remove_epsilon(self) -> "Fsa":
        if not self.has_epsilon():
            return self
        succ = self.successors()
        closures = {s: self.eps_closure([s]) for s in self.states}
        edges = set()
        accepts = set()
        for s in self.states:
            for c in closures[s]:
                if c in self.accepts:
                    accepts.add(s)
                for a, q in succ[c]:
                    if a is not None:
                        edges.add((s, a, q))
        return Fsa(self.states, self.alphabet, tuple(sorted(edges, key=repr)), self.start, accepts)

    def trim(self) -> "Fsa":
        """Keep states that are reachable and co-reachable; the start always stays."""
        succ = self.successors()
        fwd = {self.start}
        todo = [self.start]
        while todo:
            p = todo.pop()
            for _, q in succ[p]:
                if q not in fwd:
                    fwd.add(q)
                    todo.append(q)
        pred: dict = {s: [] for s in self.states}
        for p, _, q in self.edges:
            pred[q].append(p)
        back = set(self.accepts)
        todo = list(back)
        while todo:
            q = todo.pop()
            for p in pred[q]:
                if p not in back:
                    back.add(p)
                    todo.append(p)
        keep = (fwd & back) | {self.start}
        return Fsa(
            tuple(s for s in self.states if s in keep),
            self.alphabet,
            tuple(e for e in self.edges if e[0] in keep and e[2] in keep and e[0] in back and e[2] in back),
            self.start,
            self.accepts & keep,
        )

    def relabel(self) -> "Fsa":
        """Rename states to consecutive integers (start becomes 0)."""
        order = [self.start] + [s for s in self.states if s != self.start]
        names = {s: i for i, s in enumerate(order)}
        return Fsa(
            tuple(range(len(order))),
            self.alphabet,
            tuple((names[p], a, names[q]) for p, a, q in self.edges),
            0,
            tuple(names[s] for s in self.accepts),
        )

    def with_alphabet(self, alphabet: Sequence[str]) -> "Fsa":
        if not set(self.alphabet) <= set(alphabet):
            raise ValueError("new alphabet must contain the old one")
        return Fsa(self.states, alphabet, self.edges, self.start, self.accepts)

    def map_labels(self, f: Callable[[str], Sequence[str]], alphabet: Sequence[str]) -> "Fsa":
        """Replace every label by a word (possibly empty) via intermediate states."""
        states = list(self.states)
        edges = []
        for n, (p, a, q) in enumerate(self.edges):
            if a is None:
                edges.append((p, None, q))
                continue
            w = tuple(f(a))
            if not w:
                edges.append((p, None, q))
                continue
            prev = p
            for i, x in enumerate(w):
                nxt = q if i == len(w) - 1 else ("~", n, i)
                if nxt != q:
                    states.append(nxt)
                edges.append((prev, x, nxt))
                prev = nxt
        return Fsa(tuple(states), alphabet, tuple(edges), self.start, self.accepts)

    def formal_inverse(self, inverse_spelling: Mapping[str, Sequence[str]]) -> "Fsa":
        """Automaton for ``{ u⁻¹ : u accepted }`` with ``u⁻¹`` spelled letterwise."""
        new_start = ("inv-start",)
        edges = [(new_start, None, f) for f in self.accepts]
        edges += [(q, a, p) for p, a, q in self.edges]
        rev = Fsa(self.states + (new_start,), self.alphabet, tuple(edges), new_start, (self.start,))
        return rev.map_labels(lambda a: inverse_spelling[a], self.alphabet).relabel()

    def product(self, other: "Fsa") -> "Fsa":
        a, b = self.remove_epsilon(), other.remove_epsilon()
        sa, sb = a.successors(), b.successors()
        start = (a.start, b.start)
        seen = {start}
        todo = [start]
        edges = []
        while todo:
            p, q = todo.pop()
            for x, p2 in sa[p]:
                for y, q2 in sb[q]:
                    if x == y:
                        edges.append(((p, q), x, (p2, q2)))
                        if (p2, q2) not in seen:
                            seen.add((p2, q2))
                            todo.append((p2, q2))
        acc = [s for s in seen if s[0] in a.accepts and s[1] in b.accepts]
        alpha = tuple(dict.fromkeys(self.alphabet + other.alphabet))
        return Fsa(tuple(sorted(seen, key=repr)), alpha, tuple(edges), start, acc).relabel()

    def words(self, max_len: int) -> list:
        """Accepted words of length at most ``max_len``, length-then-lex."""
        out = []
        for n in range(max_len + 1):
            for w in itertools.product(self.alphabet, repeat=n):
                if self.accepts_word(w):
                    out.append(w)
        return out

    # serialization

    def to_json(self) -> dict:
        return {
            "format": "rcf.fsa/1",
            "alphabet": list(self.alphabet),
            "states": [str(s) for s in self.states],
            "start": str(self.start),
            "accepts": sorted(str(s) for s in self.accepts),
            "edges": [[str(p), a if a is not None else "", str(q)] for p, a, q in self.edges],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Fsa":
        return cls(
            tuple(data["states"]),
            tuple(data["alphabet"]),
            tuple((p, a if a else None, q) for p, a, q in data["edges"]),
            data["start"],
            tuple(data["accepts"]),
        )


def word_fsa(alphabet: Sequence[str], w: Sequence[str]) -> Fsa:
    return Fsa.from_words(alphabet, [tuple(w)])


def example_ambc(a: str = "a", b: str = "b", c: str = "c") -> Fsa:
    """Two-state automaton for ``a^m b c^n`` (accepting in the state after ``b``)."""
    return Fsa(
        ("q0", "q1"),
        (a, b, c),
        (("q0", a, "q0"), ("q0", b, "q1"), ("q1", c, "q1")),
        "q0",
        ("q1",),
    )


def fsa_from_text(text: str, alphabet: Sequence[str]) -> Fsa:
    return word_fsa(alphabet, parse_word(text))


def describe(fsa: Fsa, max_len: int = 3) -> str:
    return ", ".join(format_word(w) for w in fsa.words(max_len))
