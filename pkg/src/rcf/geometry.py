"""Labelled graphs, Stallings folding, balls, coset automata and triangulations."""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Hashable, Iterable, Mapping, Optional, Sequence

import numpy as np

from . import _kernels
from .free import Alphabet, default_basis, format_word, free_reduce, inverse_letter, parse_word
from .fsa import Fsa
from .grammar import Cfg, GrammarError, cyk_parse, has_useless, shortest_terminal_words


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class LabelledGraph:
    """Directed graph with labelled edges ``(u, label, v)`` and an optional basepoint."""

    vertices: tuple
    alphabet: tuple
    edges: tuple
    basepoint: Optional[Hashable] = None

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(dict.fromkeys(self.vertices)))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "edges", tuple(dict.fromkeys(tuple(e) for e in self.edges)))
        vs = set(self.vertices)
        for u, a, v in self.edges:
            if u not in vs or v not in vs:
                raise GraphError(f"edge {u!r} -{a}-> {v!r} leaves the vertex set")
            if a not in self.alphabet:
                raise GraphError(f"label {a!r} not in the alphabet")
        if self.basepoint is not None and self.basepoint not in vs:
            raise GraphError("basepoint is not a vertex")

    @cached_property
    def out(self) -> dict:
        d: dict = {v: [] for v in self.vertices}
        for u, a, v in self.edges:
            d[u].append((a, v))
        return d

    def out_edges(self, v) -> list:
        return self.out[v]

    def step(self, v, a):
        """Targets of ``a``-edges leaving ``v``."""
        return [w for b, w in self.out[v] if b == a]

    def walk(self, w: Sequence[str], start=None) -> set:
        cur = {self.basepoint if start is None else start}
        for a in w:
            cur = {x for v in cur for x in self.step(v, a)}
        return cur

    def is_complete(self, alphabet: Optional[Sequence[str]] = None) -> bool:
        """Every vertex has exactly one out-edge per letter."""
        alphabet = self.alphabet if alphabet is None else alphabet
        for v in self.vertices:
            labels = [a for a, _ in self.out[v]]
            if sorted(labels) != sorted(alphabet):
                return False
        return True

    def distances(self, source) -> dict:
        """Undirected BFS distances from ``source``."""
        nbr = self.undirected
        dist = {source: 0}
        q = deque([source])
        while q:
            v = q.popleft()
            for w in nbr[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    q.append(w)
        return dist

    @cached_property
    def undirected(self) -> dict:
        nbr: dict = {v: set() for v in self.vertices}
        for u, _, v in self.edges:
            if u != v:
                nbr[u].add(v)
                nbr[v].add(u)
        return {v: sorted(s, key=repr) for v, s in nbr.items()}

    def distance_matrix(self, vertices: Sequence) -> np.ndarray:
        idx = {v: i for i, v in enumerate(vertices)}
        D = np.full((len(vertices), len(vertices)), np.iinfo(np.int64).max // 4, dtype=np.int64)
        for v in set(vertices):
            dist = self.distances(v)
            for w in set(vertices):
                if w in dist:
                    D[idx[v], idx[w]] = dist[w]
        # repeated vertices share rows
        for i, v in enumerate(vertices):
            D[i] = D[idx[v]]
            D[:, i] = D[:, idx[v]]
        return D

    def to_fsa(self, start=None, accepts: Iterable = ()) -> Fsa:
        start = self.basepoint if start is None else start
        return Fsa(self.vertices, self.alphabet, self.edges, start, tuple(accepts))

    def to_json(self) -> dict:
        return {
            "format": "rcf.graph/1",
            "alphabet": list(self.alphabet),
            "vertices": [_jsonable(v) for v in self.vertices],
            "edges": [[_jsonable(u), a, _jsonable(v)] for u, a, v in self.edges],
            "basepoint": _jsonable(self.basepoint),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "LabelledGraph":
        vs = tuple(_hashable(v) for v in data["vertices"])
        es = tuple((_hashable(u), a, _hashable(v)) for u, a, v in data["edges"])
        bp = data.get("basepoint")
        return cls(vs, tuple(data["alphabet"]), es, _hashable(bp) if bp is not None else None)


def _jsonable(v):
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    return v


def _hashable(v):
    if isinstance(v, list):
        return tuple(_hashable(x) for x in v)
    return v


def cycle_graph(n: int, label: str = "a", inverse: Optional[str] = None, start: int = 0) -> LabelledGraph:
    """``n``-cycle with ``label`` edges ``i → i+1``; ``inverse`` adds the reversed edges."""
    edges = [(i, label, (i + 1) % n) for i in range(n)]
    alphabet = [label]
    if inverse:
        edges += [((i + 1) % n, inverse, i) for i in range(n)]
        alphabet.append(inverse)
    return LabelledGraph(tuple(range(n)), tuple(alphabet), tuple(edges), start)


# Stallings folding -------------------------------------------------------------


@dataclass(frozen=True)
class StallingsGraph:
    graph: LabelledGraph
    complete: bool

    @property
    def index(self) -> Optional[int]:
        return len(self.graph.vertices) if self.complete else None

    def accepts(self, w: Sequence[str]) -> bool:
        """Whether the reduced form of ``w`` reads a basepoint loop."""
        return self.graph.basepoint in self.graph.walk(free_reduce(w))


def stallings_graph(rank: int, subgroup_generators: Sequence[Sequence[str]], letters=None) -> StallingsGraph:
    """Folded core graph of the subgroup generated by the given words."""
    alpha = Alphabet(tuple(letters) if letters else default_basis(rank))
    parent: dict = {}

    def find(v):
        while parent.get(v, v) != v:
            parent[v] = parent.get(parent[v], parent[v])
            v = parent[v]
        return v

    edges: set = set()
    n = 1
    for g in subgroup_generators:
        g = free_reduce(g)
        if not g:
            continue
        prev = 0
        for i, x in enumerate(g):
            nxt = 0 if i == len(g) - 1 else n
            if nxt:
                n += 1
            edges.add((prev, x, nxt))
            prev = nxt
    # store positive-letter edges only
    def norm(e):
        u, x, v = e
        return (v, inverse_letter(x), u) if x not in alpha.positive else (u, x, v)

    edges = {norm(e) for e in edges}
    changed = True
    while changed:
        changed = False
        cur = {(find(u), x, find(v)) for u, x, v in edges}
        edges = cur
        fwd: dict = {}
        bwd: dict = {}
        for u, x, v in sorted(edges, key=repr):
            for key, w, table in (((u, x), v, fwd), ((v, x), u, bwd)):
                if key in table and find(table[key]) != find(w):
                    a, b = sorted((find(table[key]), find(w)))
                    parent[b] = a
                    changed = True
                    break
                table.setdefault(key, w)
            if changed:
                break
    verts = sorted({find(0)} | {x for u, _, v in edges for x in (u, v)})
    ren = {v: i for i, v in enumerate(verts)}
    full = []
    for u, x, v in sorted(edges):
        full.append((ren[u], x, ren[v]))
        full.append((ren[v], inverse_letter(x), ren[u]))
    g = LabelledGraph(tuple(range(len(verts))), alpha.group_letters, tuple(full), ren[find(0)])
    return StallingsGraph(g, g.is_complete(alpha.group_letters))


# balls ------------------------------------------------------------------------------


def ball(source, radius: int, start=None) -> LabelledGraph:
    """Everything within ``radius`` of the basepoint, with all edges among those vertices.

    ``source`` is a :class:`~rcf.vfgroup.VfPresentation` (Cayley graph), a
    :class:`LabelledGraph`, or anything with ``alphabet`` and ``out_edges``.
    """
    from .vfgroup import VfPresentation

    if radius < 0:
        raise GraphError("radius must be non-negative")
    if isinstance(source, VfPresentation):
        p = source
        gens = [(y, p.letter(y)) for y in p.alphabet]
        alphabet = p.alphabet
        origin = p.one if start is None else start

        def out(v):
            return [(y, p.mul(v, e)) for y, e in gens]

        def back(v):
            return [p.mul(v, p.inverse(e)) for _, e in gens]

    else:
        alphabet = source.alphabet
        origin = source.basepoint if start is None else start
        out = source.out_edges
        ins: dict = {}
        if isinstance(source, LabelledGraph):
            for u, a, v in source.edges:
                ins.setdefault(v, []).append(u)

            def back(v):
                return ins.get(v, [])

        else:
            back = getattr(source, "in_neighbours", lambda v: [])
    dist = {origin: 0}
    q = deque([origin])
    while q:
        v = q.popleft()
        if dist[v] == radius:
            continue
        nbrs = [w for _, w in out(v)] + list(back(v))
        for w in nbrs:
            if w not in dist:
                dist[w] = dist[v] + 1
                q.append(w)
    edges = [(v, a, w) for v in dist for a, w in out(v) if w in dist]
    verts = sorted(dist, key=lambda v: (dist[v], repr(v)))
    return LabelledGraph(tuple(verts), tuple(alphabet), tuple(edges), origin)


def coset_fsa(schreier: LabelledGraph, accept_cosets: Iterable) -> Fsa:
    """Automaton of a complete finite Schreier graph accepting the listed cosets."""
    if not schreier.is_complete():
        raise GraphError("Schreier graph is not complete")
    return schreier.to_fsa(schreier.basepoint, tuple(accept_cosets))


# triangulations ------------------------------------------------------------------------


@dataclass(frozen=True)
class MSequence:
    vertices: tuple
    m: int

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        if not self.vertices or self.vertices[0] != self.vertices[-1]:
            raise GraphError("an m-sequence must start and end at the same vertex")

    @property
    def n(self) -> int:
        return len(self.vertices) - 1

    def check(self, D: np.ndarray) -> bool:
        return all(D[i, i + 1] <= self.m for i in range(self.n))


@dataclass(frozen=True)
class TriangulationCertificate:
    """Reductions given as original indices in removal order, and the remaining core."""

    reductions: tuple
    m: int
    core: tuple
    shortcuts: tuple = ()

    def to_json(self) -> dict:
        return {
            "format": "rcf.triangulation/1",
            "m": self.m,
            "reductions": list(self.reductions),
            "core": list(self.core),
            "shortcuts": [[i, j, format_word(w)] for i, j, w in self.shortcuts],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "TriangulationCertificate":
        sc = tuple((i, j, parse_word(w)) for i, j, w in data.get("shortcuts", []))
        return cls(tuple(data["reductions"]), int(data["m"]), tuple(data["core"]), sc)


def replay_certificate(cert: TriangulationCertificate, n: int, D: np.ndarray) -> bool:
    """Check every guard ``d(v_{i-1}, v_{i+1}) ≤ m`` along the removal order."""
    alive = list(range(n + 1))
    for k in cert.reductions:
        if k not in alive:
            return False
        pos = alive.index(k)
        if pos == 0 or pos == len(alive) - 1:
            return False
        if D[alive[pos - 1], alive[pos + 1]] > cert.m:
            return False
        alive.pop(pos)
    return tuple(alive) == tuple(cert.core) and len(alive) <= 4


def _order(split, i, j, out):
    if j - i < 2:
        return
    k = int(split[i, j])
    _order(split, i, k, out)
    _order(split, k, j, out)
    out.append(k)


def m_triangulate_dp(D: np.ndarray, m: int, backend: Optional[str] = None) -> Optional[TriangulationCertificate]:
    """Interval DP over a circuit whose pairwise distances are ``D`` (size ``n+1``).

    ``clear[i, j]`` says all vertices strictly between ``i`` and ``j`` can go,
    the last one removed having neighbours ``i`` and ``j``.  A certificate
    exists iff some core ``0 ≤ b ≤ c ≤ n`` has all three intervals clear.
    """
    D = np.asarray(D)
    n = D.shape[0] - 1
    if any(D[i, i + 1] > m for i in range(n)):
        return None
    if n <= 3:
        return TriangulationCertificate((), m, tuple(range(n + 1)))
    clear, split = _kernels.interval_dp(D, m, backend=backend)
    for b in range(1, n):
        if not clear[0, b]:
            continue
        for c in range(b + 1, n):
            if clear[b, c] and clear[c, n]:
                order: list = []
                _order(split, 0, b, order)
                _order(split, b, c, order)
                _order(split, c, n, order)
                return TriangulationCertificate(tuple(order), m, (0, b, c, n))
    return None


def exhaustive_triangulable(D: np.ndarray, m: int) -> bool:
    """Brute force over all reduction orders (memoised on the surviving indices)."""
    D = np.asarray(D)
    n = D.shape[0] - 1
    if any(D[i, i + 1] > m for i in range(n)):
        return False
    seen: dict = {}

    def go(alive: tuple) -> bool:
        if len(alive) <= 4:
            return True
        if alive in seen:
            return seen[alive]
        ok = False
        for p in range(1, len(alive) - 1):
            if D[alive[p - 1], alive[p + 1]] <= m and go(alive[:p] + alive[p + 1 :]):
                ok = True
                break
        seen[alive] = ok
        return ok

    return go(tuple(range(n + 1)))


def minimal_m(D: np.ndarray, m_max: Optional[int] = None) -> Optional[int]:
    D = np.asarray(D)
    top = m_max if m_max is not None else int(D.max())
    for m in range(1, top + 1):
        if m_triangulate_dp(D, m) is not None:
            return m
    return None


def circuit_vertices(graph_step: Callable, start, w: Sequence[str]) -> list:
    vs = [start]
    for a in w:
        vs.append(graph_step(vs[-1], a))
    return vs


def grammar_triangulation(g: Cfg, w: Sequence[str], step: Callable, start, dist: Callable):
    """M-triangulation of the circuit traced by ``w`` read off a derivation tree.

    Every binary node ``A → B C`` over ``w[i:j]`` with split ``k`` removes
    vertex ``k`` once its subtrees are done; its shortcut is the stored
    shortest word of ``A``.  ``step(v, a)`` walks the graph and ``dist`` gives
    exact distances.  Returns ``(certificate, M, vertices)``.
    """
    w = tuple(w)
    tree = cyk_parse(g, w)
    if tree is None:
        raise GrammarError(f"{format_word(w) or 'ε'} is not accepted")
    cnf = g.cnf_tables.grammar
    best, M = shortest_terminal_words(cnf)
    M = max(M, 1)
    vs = circuit_vertices(step, start, w)
    if vs[-1] != vs[0]:
        raise GraphError("the word does not trace a circuit")
    order, shortcuts = [], []

    def walk(node):
        if len(node.children) == 2:
            walk(node.children[0])
            walk(node.children[1])
            k = node.children[0].j
            order.append(k)
            shortcuts.append((node.i, node.j, best[node.symbol]))

    walk(tree)
    n = len(w)
    core = tuple(sorted(set(range(n + 1)) - set(order)))
    cert = TriangulationCertificate(tuple(order), M, core, tuple(shortcuts))
    return cert, M, vs


def shortcut_labels_valid(cert: TriangulationCertificate, vs: Sequence, step: Callable) -> bool:
    """Each shortcut word really walks from ``v_i`` to ``v_j``."""
    for i, j, word in cert.shortcuts:
        v = vs[i]
        for a in word:
            v = step(v, a)
        if v != vs[j]:
            return False
    return True


# DOT ---------------------------------------------------------------------------


def _q(s) -> str:
    return '"' + str(s).replace('"', '\\"') + '"'


def graph_to_dot(g: LabelledGraph, name: str = "G") -> str:
    lines = [f"digraph {name} {{"]
    for v in sorted(g.vertices, key=repr):
        shape = "doublecircle" if v == g.basepoint else "circle"
        lines.append(f"  {_q(v)} [shape={shape}];")
    for u, a, v in sorted(g.edges, key=repr):
        lines.append(f"  {_q(u)} -> {_q(v)} [label={_q(a)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def certificate_to_dot(cert: TriangulationCertificate, n: int, name: str = "T") -> str:
    """The circuit as a polygon with one chord per reduction."""
    alive = list(range(n + 1))
    lines = [f"graph {name} {{", "  layout=circo;"]
    for i in range(n):
        lines.append(f"  v{i} -- v{(i + 1) % n if i + 1 == n else i + 1};")
    for k in cert.reductions:
        pos = alive.index(k)
        a, b = alive[pos - 1], alive[pos + 1]
        alive.pop(pos)
        lines.append(f"  v{a % n} -- v{b % n} [style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"
