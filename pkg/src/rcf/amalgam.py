"""Tree amalgamations of labelled graphs and pushdown machines for their languages.

The connecting tree is rooted at the origin's copy.  A node is addressed by
the items ``"k>l"`` met on the way down from the root: ``k`` labels the edge
at the parent and ``l`` the same edge at the child.  The child reached
through ``k`` has back label ``back[k]``; its remaining labels lead further
down.  Adhesion sets are explicit vertex lists and the default bonding map
pairs them position by position.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Mapping, Optional, Sequence, Union

from .free import format_word
from .fsa import Fsa
from .geometry import GraphError, LabelledGraph, _hashable, _jsonable
from .pda import BOTTOM, Pda, T, pda_empty_stack


class AmalgamError(ValueError):
    pass


def item(k: str, l: str) -> str:
    return f"{k}>{l}"


def split_item(s: str) -> tuple:
    k, l = s.split(">")
    return k, l


Component = Union[LabelledGraph, "TreeAmalgamationSpec"]


@dataclass(frozen=True)
class TreeAmalgamationSpec:
    """Two components, their adhesion families and the tree labelling.

    ``adhesion[i]`` maps each label of side ``i`` (0 or 1) to a vertex list.
    ``bonding[(k, l)]`` optionally overrides the positional bijection from
    ``S_k`` (side 0) onto ``S_l`` (side 1).  ``back`` gives the child's label
    for the edge to its parent; the default is the first label of the other
    side.  ``root_side`` says which component the root copy is.
    """

    components: tuple
    adhesion: tuple
    bonding: Mapping = field(default_factory=dict)
    back: Mapping = field(default_factory=dict)
    root_side: int = 0
    identification_budget: int = 10_000

    def __post_init__(self):
        comps = tuple(self.components)
        adh = tuple({k: tuple(_hashable(v) for v in vs) for k, vs in a.items()} for a in self.adhesion)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "adhesion", adh)
        if len(comps) != 2 or len(adh) != 2:
            raise AmalgamError("need exactly two components and two adhesion families")
        if set(adh[0]) & set(adh[1]):
            raise AmalgamError("index sets must be disjoint")
        if not adh[0] or not adh[1]:
            raise AmalgamError("index sets must be non-empty")
        sizes = {len(v) for a in adh for v in a.values()}
        if len(sizes) != 1:
            raise AmalgamError("adhesion sets must have equal cardinality")
        for a in adh:
            for k in a:
                if ">" in str(k):
                    raise AmalgamError("labels may not contain '>'")
        back = dict(self.back)
        for i in (0, 1):
            first = sorted(adh[1 - i])[0]
            for k in adh[i]:
                back.setdefault(k, first)
                if back[k] not in adh[1 - i]:
                    raise AmalgamError(f"back label of {k!r} must belong to the other side")
        object.__setattr__(self, "back", back)
        bond = {}
        for k, sk in adh[0].items():
            for l, sl in adh[1].items():
                m = self.bonding.get((k, l))
                m = {_hashable(a): _hashable(b) for a, b in m.items()} if m else dict(zip(sk, sl))
                if set(m) != set(sk) or set(m.values()) != set(sl) or len(set(m.values())) != len(sk):
                    raise AmalgamError(f"bonding map for ({k}, {l}) is not a bijection S_k → S_l")
                bond[(k, l)] = m
        object.__setattr__(self, "bonding", bond)

    # tree -------------------------------------------------------------------

    def side_of(self, address: tuple) -> int:
        return (self.root_side + len(address)) % 2

    def alphabet(self) -> tuple:
        out: list = []
        for c in self.components:
            letters = c.alphabet() if isinstance(c, TreeAmalgamationSpec) else c.alphabet
            out.extend(x for x in letters if x not in out)
        return tuple(out)

    def bond(self, i: int, k, l, v):
        """Image of ``v ∈ S_k`` (side ``i``) in ``S_l`` on the other side."""
        if i == 0:
            return self.bonding[(k, l)][v]
        inv = {b: a for a, b in self.bonding[(l, k)].items()}
        return inv[v]

    def labels_at(self, address: tuple) -> list:
        return sorted(self.adhesion[self.side_of(address)])

    def crossings(self, address: tuple, v) -> list:
        """Identifications of ``(address, v)`` with vertices of neighbouring copies."""
        i = self.side_of(address)
        out = []
        parent = split_item(address[-1]) if address else None
        for k, S in sorted(self.adhesion[i].items()):
            if v not in S:
                continue
            if parent is not None and k == parent[1]:
                out.append((address[:-1], self.bond(i, k, parent[0], v)))
            else:
                l = self.back[k]
                out.append((address + (item(k, l),), self.bond(i, k, l, v)))
        return out

    def to_json(self) -> dict:
        return {
            "format": "rcf.amalgam/1",
            "components": [c.to_json() for c in self.components],
            "adhesion": [{k: [_jsonable(v) for v in vs] for k, vs in a.items()} for a in self.adhesion],
            "bonding": [[k, l, [[_jsonable(a), _jsonable(b)] for a, b in m.items()]] for (k, l), m in self.bonding.items()],
            "back": dict(self.back),
            "root_side": self.root_side,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "TreeAmalgamationSpec":
        comps = []
        for c in data["components"]:
            comps.append(cls.from_json(c) if c.get("format") == "rcf.amalgam/1" else LabelledGraph.from_json(c))
        bonding = {}
        for k, l, pairs in data.get("bonding", []):
            bonding[(k, l)] = {_hashable(a): _hashable(b) for a, b in pairs}
        return cls(tuple(comps), tuple(data["adhesion"]), bonding, data.get("back", {}), data.get("root_side", 0))


# the amalgamated graph ---------------------------------------------------------------


def _key(x) -> tuple:
    addr, v = x
    return (len(addr), addr, repr(v))


class AmalgamGraph:
    """Lazy view of the amalgam.  Vertices are canonical ``(address, vertex)`` pairs."""

    def __init__(self, spec: TreeAmalgamationSpec):
        self.spec = spec
        self.alphabet = spec.alphabet()
        self.parts = [c if isinstance(c, LabelledGraph) else AmalgamGraph(c) for c in spec.components]
        self._cls: dict = {}
        self._in: dict = {}

    def identification_class(self, x) -> tuple:
        """All copies of the vertex ``x``, following bonding maps through the tree."""
        if x in self._cls:
            return self._cls[x]
        seen = {x}
        q = deque([x])
        while q:
            addr, v = q.popleft()
            for y in self.spec.crossings(addr, v):
                if y not in seen:
                    seen.add(y)
                    if len(seen) > self.spec.identification_budget:
                        raise AmalgamError("identification class exceeds its budget")
                    q.append(y)
        cls = tuple(sorted(seen, key=_key))
        for y in cls:
            self._cls[y] = cls
        return cls

    def canon(self, x) -> tuple:
        return self.identification_class(x)[0]

    def out_edges(self, x) -> list:
        out = []
        for addr, v in self.identification_class(x):
            part = self.parts[self.spec.side_of(addr)]
            for a, w in part.out_edges(v):
                out.append((a, self.canon((addr, w))))
        return sorted(set(out), key=repr)

    def in_neighbours(self, x) -> list:
        out = []
        for addr, v in self.identification_class(x):
            part = self.parts[self.spec.side_of(addr)]
            for u in _in_neighbours(part, v):
                out.append(self.canon((addr, u)))
        return sorted(set(out), key=repr)

    def vertex(self, v, address: tuple = ()) -> tuple:
        return self.canon((tuple(address), _hashable(v)))


def _in_neighbours(part, v) -> list:
    if isinstance(part, LabelledGraph):
        return [u for u, _, w in part.edges if w == v]
    return part.in_neighbours(v)


def amalgam_ball(spec: TreeAmalgamationSpec, origin, depth: int, address: tuple = ()) -> LabelledGraph:
    """Finite ball of the given radius (directed edges, undirected distance) around the origin."""
    from .geometry import ball

    g = AmalgamGraph(spec)
    o = g.vertex(origin, address)

    class _View:
        alphabet = g.alphabet
        basepoint = o
        out_edges = staticmethod(g.out_edges)
        in_neighbours = staticmethod(g.in_neighbours)

    return ball(_View, depth)


def walk_language(graph: LabelledGraph, start, accept, max_len: int) -> set:
    """Words of length ``≤ max_len`` tracing a path from ``start`` to ``accept``."""
    out = set()
    layer = {((), start)}
    for n in range(max_len + 1):
        for w, v in layer:
            if v == accept:
                out.add(w)
        if n == max_len:
            break
        nxt = set()
        for w, v in layer:
            for a, x in graph.out_edges(v):
                nxt.add((w + (a,), x))
        layer = nxt
    return out


# machines ------------------------------------------------------------------------------


LanguageProvider = Callable[[int, Hashable, Hashable], Pda]


def graph_pda(graph: LabelledGraph, start, accept, alphabet: Sequence[str]) -> Pda:
    """The graph read as a finite automaton, written as a machine that leaves the stack alone."""
    ts = [T(u, (a,), (BOTTOM,), v, (BOTTOM,)) for u, a, v in graph.edges]
    return Pda(graph.vertices, tuple(alphabet), (BOTTOM,), BOTTOM, tuple(ts), start, (accept,))


def default_provider(spec: TreeAmalgamationSpec, alphabet: Sequence[str]) -> LanguageProvider:
    cache: dict = {}

    def provide(i, u, v):
        key = (i, u, v)
        if key not in cache:
            c = spec.components[i]
            if isinstance(c, LabelledGraph):
                cache[key] = graph_pda(c, u, v, alphabet)
            else:
                cache[key] = tree_amalgamation_pda(c, u[1], v, address=u[0], alphabet=alphabet)
        return cache[key]

    return provide


def _embed(p: Pda, tag: str) -> tuple:
    """Rename a block's states and stack symbols; return (transitions, bottom, stack symbols, start, accepts)."""
    sym = {x: f"{tag}:{x}" for x in p.stack_alphabet}
    bot = sym[p.bottom]
    ts = []
    for t in p.transitions:
        pops = [(t.pop, t.push)]
        if not t.pop:
            # a block only ever sees its own symbols on top
            pops = [((x,), (x,) + t.push) for x in p.stack_alphabet]
        for pop, push in pops:
            ts.append(T((tag, t.src), t.read, tuple(sym[x] for x in pop), (tag, t.dst), tuple(sym[x] for x in push)))
    states = tuple((tag, q) for q in p.states)
    return ts, bot, tuple(sym.values()), (tag, p.start), tuple((tag, q) for q in p.accepts), states


def tree_amalgamation_pda(
    spec: TreeAmalgamationSpec,
    origin,
    accept,
    address: tuple = (),
    provider: Optional[LanguageProvider] = None,
    alphabet: Optional[Sequence[str]] = None,
) -> Pda:
    """Machine accepting the words that trace a path from ``origin`` to ``accept``.

    ``origin`` is a vertex of the copy at ``address`` and ``accept`` is an
    ``(address, vertex)`` pair.  Blocks ``B[i, u, v]`` run the component
    machine for paths from ``u`` to ``v`` in copy side ``i``; ``u`` is the
    origin or an adhesion vertex, ``v`` an adhesion vertex or the target.  The
    current tree address lives on the stack between the global bottom and the
    running block's bottom marker.  Leaving a block through an adhesion vertex
    crosses one tree edge: up (pop an item) when the label is the one towards
    the parent, down (push ``k>l``) otherwise.
    """
    alphabet = tuple(alphabet) if alphabet is not None else spec.alphabet()
    provider = provider or default_provider(spec, alphabet)
    address = tuple(address)
    origin = _hashable(origin)
    acc_addr, acc_v = tuple(accept[0]), _hashable(accept[1])
    side0 = spec.side_of(address)
    side_acc = spec.side_of(acc_addr)
    adh = [sorted({v for S in spec.adhesion[i].values() for v in S}, key=repr) for i in (0, 1)]
    for it in address + acc_addr:
        if it.count(">") != 1:
            raise AmalgamError(f"bad tree address item {it!r}")

    entries = [list(adh[0]), list(adh[1])]
    exits = [list(adh[0]), list(adh[1])]
    if origin not in entries[side0]:
        entries[side0].append(origin)
    if acc_v not in exits[side_acc]:
        exits[side_acc].append(acc_v)

    blocks: dict = {}
    states: list = ["init", "acc"]
    stack: list = [BOTTOM]
    trans: list = []
    items = set()
    # every item that can occur: parent label k on side i, child label l = back[k]
    for i in (0, 1):
        for k in spec.adhesion[i]:
            items.add(item(k, spec.back[k]))
    items |= set(address) | set(acc_addr)

    def block(i, u, v):
        key = (i, u, v)
        if key not in blocks:
            p = pda_empty_stack(provider(i, u, v))
            tag = f"B{len(blocks)}"
            ts, bot, syms, st, accs, qs = _embed(p, tag)
            blocks[key] = (bot, st, accs)
            trans.extend(ts)
            states.extend(qs)
            stack.extend(syms)
        return blocks[key]

    for i in (0, 1):
        for u in entries[i]:
            for v in exits[i]:
                block(i, u, v)

    tops = [BOTTOM] + sorted(items)
    for (i, u, v), (bot, st, accs) in list(blocks.items()):
        for f in accs:
            # crossings out of v
            for top in tops:
                if top == BOTTOM:
                    parent = None
                else:
                    parent = split_item(top)
                    if parent[1] not in spec.adhesion[i]:
                        continue
                for k, S in sorted(spec.adhesion[i].items()):
                    if v not in S:
                        continue
                    if parent is not None and k == parent[1]:
                        w = spec.bond(i, k, parent[0], v)
                        push_addr = ()
                        pop = (top, bot)
                    else:
                        l = spec.back[k]
                        w = spec.bond(i, k, l, v)
                        push_addr = (top, item(k, l))
                        pop = (top, bot)
                    j = 1 - i
                    for x in exits[j]:
                        nb, nst, _ = blocks[(j, w, x)]
                        trans.append(T(f, (), pop, nst, push_addr + (nb,)))
            if i == side_acc and v == acc_v:
                pop = (BOTTOM,) + acc_addr + (bot,)
                trans.append(T(f, (), pop, "acc", (BOTTOM,)))
    for x in exits[side0]:
        nb, nst, _ = blocks[(side0, origin, x)]
        trans.append(T("init", (), (BOTTOM,), nst, (BOTTOM,) + address + (nb,)))
    stack.extend(sorted(items))
    return Pda(tuple(states), alphabet, tuple(stack), BOTTOM, tuple(trans), "init", ("acc",))


def quasitree_subgroup_recognizer(
    factorization: Sequence[TreeAmalgamationSpec],
    origin,
    seed: Optional[LabelledGraph] = None,
    alphabet: Optional[Sequence[str]] = None,
) -> Pda:
    """Machine for the words tracing origin-to-origin circuits in the last amalgam.

    The factorisation lists the amalgamations in build order; later specs use
    earlier ones as components.  With no amalgamation the single finite
    ``seed`` graph is read directly.
    """
    if not factorization:
        if seed is None:
            raise AmalgamError("an empty factorisation needs a seed graph")
        return graph_pda(seed, origin, origin, alphabet or seed.alphabet)
    spec = factorization[-1]
    for s in factorization:
        if not isinstance(s, TreeAmalgamationSpec):
            raise AmalgamError("factorisation entries must be tree amalgamation specs")
    return tree_amalgamation_pda(spec, origin, ((), origin), alphabet=alphabet)
