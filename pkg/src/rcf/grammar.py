"""Context-free grammars: normal forms, closure constructions, CYK membership.

Productions are ``(head, body)`` pairs with ``body`` a tuple of symbols.  The
Chomsky normal form used throughout allows ``S → ε`` when the start symbol
never appears on a right-hand side.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from . import _kernels
from .free import AlphabetError, format_word, parse_word
from .fsa import Fsa

log = logging.getLogger(__name__)


class GrammarError(ValueError):
    pass


@dataclass(frozen=True)
class Cfg:
    terminals: tuple
    nonterminals: tuple
    productions: tuple
    start: str

    def __post_init__(self):
        object.__setattr__(self, "terminals", tuple(dict.fromkeys(self.terminals)))
        object.__setattr__(self, "nonterminals", tuple(dict.fromkeys(self.nonterminals)))
        prods = tuple(dict.fromkeys((h, tuple(b)) for h, b in self.productions))
        object.__setattr__(self, "productions", prods)
        T, N = set(self.terminals), set(self.nonterminals)
        if T & N:
            raise GrammarError(f"terminals and nonterminals overlap: {sorted(T & N)[:5]}")
        if self.start not in N:
            raise GrammarError(f"start symbol {self.start!r} is not a nonterminal")
        for h, body in prods:
            if h not in N:
                raise GrammarError(f"production head {h!r} is not a nonterminal")
            for x in body:
                if x not in T and x not in N:
                    raise GrammarError(f"undeclared symbol {x!r} in production for {h!r}")

    def __hash__(self):
        return hash((self.terminals, self.start, len(self.productions)))

    @property
    def size(self) -> int:
        return sum(1 + len(b) for _, b in self.productions)

    def by_head(self) -> dict:
        out: dict = {A: [] for A in self.nonterminals}
        for h, b in self.productions:
            out[h].append(b)
        return out

    def with_start(self, start: str) -> "Cfg":
        return Cfg(self.terminals, self.nonterminals, self.productions, start)

    def with_terminals(self, terminals: Sequence[str]) -> "Cfg":
        if not set(self.terminals) <= set(terminals):
            raise AlphabetError("new terminal set must contain the old one")
        return Cfg(tuple(terminals), self.nonterminals, self.productions, self.start)

    @cached_property
    def cnf_tables(self) -> "CnfTables":
        return CnfTables.build(to_cnf(self))

    def accepts(self, w: Sequence[str]) -> bool:
        return cyk_member(self, w)

    def to_json(self) -> dict:
        return {
            "format": "rcf.cfg/1",
            "terminals": list(self.terminals),
            "nonterminals": list(self.nonterminals),
            "start": self.start,
            "productions": [[h, list(b)] for h, b in self.productions],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Cfg":
        return cls(
            tuple(data["terminals"]),
            tuple(data["nonterminals"]),
            tuple((h, tuple(b)) for h, b in data["productions"]),
            data["start"],
        )

    @classmethod
    def from_text(cls, text: str, terminals: Sequence[str]) -> "Cfg":
        """Parse lines like ``S -> S a S a^-1 S | ε``; the first head is the start."""
        prods, heads = [], []
        for line in text.strip().splitlines():
            if not line.strip():
                continue
            head, rhs = line.split("->")
            head = head.strip()
            heads.append(head)
            for alt in rhs.split("|"):
                prods.append((head, parse_word(alt)))
        return cls(tuple(terminals), tuple(dict.fromkeys(heads)), tuple(prods), heads[0])


def empty_grammar(terminals: Sequence[str], start: str = "S") -> Cfg:
    return Cfg(tuple(terminals), (start,), (), start)


def word_grammar(terminals: Sequence[str], words: Iterable[Sequence[str]], start: str = "S") -> Cfg:
    return Cfg(tuple(terminals), (start,), tuple((start, tuple(w)) for w in words), start)


def z_grammar(a: str = "a", ainv: str = "a^-1") -> Cfg:
    """``S → S a S a⁻¹ S | S a⁻¹ S a S | ε``: words with as many ``a`` as ``a⁻¹``."""
    return Cfg(
        (a, ainv),
        ("S",),
        (("S", ("S", a, "S", ainv, "S")), ("S", ("S", ainv, "S", a, "S")), ("S", ())),
        "S",
    )


def fsa_to_cfg(fsa: Fsa, prefix: str = "Q") -> Cfg:
    """Right-linear grammar for an automaton."""
    names = {s: f"{prefix}{i}" for i, s in enumerate(fsa.states)}
    prods = []
    for p, a, q in fsa.edges:
        prods.append((names[p], ((a,) if a is not None else ()) + (names[q],)))
    for f in fsa.accepts:
        prods.append((names[f], ()))
    return Cfg(fsa.alphabet, tuple(names.values()), tuple(prods), names[fsa.start])


# renaming helpers ---------------------------------------------------------


def _fresh_prefix(taken: Iterable[str], base: str = "N") -> str:
    taken = set(taken)
    prefix = base
    while any(t.startswith(prefix) for t in taken):
        prefix += "_"
    return prefix


def compact(g: Cfg, prefix: Optional[str] = None, avoid: Iterable[str] = ()) -> Cfg:
    """Rename nonterminals to ``prefix0`` (the start), ``prefix1``, ...."""
    if prefix is None:
        prefix = _fresh_prefix(list(g.terminals) + list(avoid))
    order = [g.start] + [A for A in g.nonterminals if A != g.start]
    names = {A: f"{prefix}{i}" for i, A in enumerate(order)}
    clash = set(names.values()) & (set(g.terminals) | set(avoid))
    if clash:
        raise GrammarError(f"renaming prefix {prefix!r} clashes with {sorted(clash)[:3]}")
    prods = tuple((names[h], tuple(names.get(x, x) if x in names else x for x in b)) for h, b in g.productions)
    return Cfg(g.terminals, tuple(names[A] for A in order), prods, names[g.start])


# useless symbols ------------------------------------------------------------


def productive_set(g: Cfg) -> set:
    nts = set(g.nonterminals)
    prod = set()
    changed = True
    bodies = [(h, [x for x in b if x in nts]) for h, b in g.productions]
    while changed:
        changed = False
        for h, needs in bodies:
            if h not in prod and all(x in prod for x in needs):
                prod.add(h)
                changed = True
    return prod


def remove_useless(g: Cfg) -> Cfg:
    """Drop nonproductive, then unreachable, nonterminals."""
    prod = productive_set(g)
    if g.start not in prod:
        return empty_grammar(g.terminals, g.start)
    nts = set(g.nonterminals)
    P = [(h, b) for h, b in g.productions if h in prod and all(x in prod or x not in nts for x in b)]
    heads: dict = {}
    for h, b in P:
        heads.setdefault(h, []).append(b)
    reach = {g.start}
    todo = [g.start]
    while todo:
        A = todo.pop()
        for b in heads.get(A, ()):
            for x in b:
                if x in nts and x not in reach:
                    reach.add(x)
                    todo.append(x)
    return Cfg(
        g.terminals,
        tuple(A for A in g.nonterminals if A in reach),
        tuple((h, b) for h, b in P if h in reach),
        g.start,
    )


def has_useless(g: Cfg) -> bool:
    return len(remove_useless(g).nonterminals) != len(g.nonterminals)


# Chomsky normal form -------------------------------------------------------


def nullable_set(g: Cfg) -> set:
    nts = set(g.nonterminals)
    null = set()
    changed = True
    while changed:
        changed = False
        for h, b in g.productions:
            if h not in null and all(x in null for x in b):
                if all(x in nts for x in b):
                    null.add(h)
                    changed = True
    return null


def is_cnf(g: Cfg) -> bool:
    T = set(g.terminals)
    for h, b in g.productions:
        if len(b) == 0:
            if h != g.start:
                return False
        elif len(b) == 1:
            if b[0] not in T:
                return False
        elif len(b) == 2:
            if b[0] in T or b[1] in T or g.start in b:
                return False
        else:
            return False
    return True


def to_cnf(g: Cfg) -> Cfg:
    """Equivalent grammar in Chomsky normal form with no useless nonterminals."""
    g = remove_useless(g)
    if not g.productions:
        return g
    T = set(g.terminals)
    prefix = _fresh_prefix(list(g.terminals) + list(g.nonterminals), "C")
    counter = itertools.count()

    def fresh() -> str:
        return f"{prefix}{next(counter)}"

    start = fresh()
    nts = [start] + list(g.nonterminals)
    prods = [(start, (g.start,))] + list(g.productions)

    # TERM
    term_nt: dict = {}
    step = []
    for h, b in prods:
        if len(b) >= 2:
            nb = []
            for x in b:
                if x in T:
                    if x not in term_nt:
                        term_nt[x] = fresh()
                        nts.append(term_nt[x])
                        step.append((term_nt[x], (x,)))
                    nb.append(term_nt[x])
                else:
                    nb.append(x)
            step.append((h, tuple(nb)))
        else:
            step.append((h, b))
    prods = step

    # BIN (prefixes are shared; triple-construction bodies share long prefixes)
    step = []
    heads_of: dict = {}
    for h, b in prods:
        while len(b) > 2:
            init = b[:-1]
            X = heads_of.get(init)
            known = X is not None
            if not known:
                X = heads_of[init] = fresh()
                nts.append(X)
            step.append((h, (X, b[-1])))
            if known:
                break
            h, b = X, init
        else:
            step.append((h, b))
    prods = list(dict.fromkeys(step))

    # DEL
    tmp = Cfg(g.terminals, tuple(nts), tuple(prods), start)
    null = nullable_set(tmp)
    step = []
    for h, b in prods:
        if len(b) == 0:
            continue
        step.append((h, b))
        if len(b) == 2:
            if b[0] in null:
                step.append((h, (b[1],)))
            if b[1] in null:
                step.append((h, (b[0],)))
    if start in null:
        step.append((start, ()))
    prods = list(dict.fromkeys(step))

    # UNIT
    ntset = set(nts)
    unit: dict = {A: {A} for A in nts}
    for h, b in prods:
        if len(b) == 1 and b[0] in ntset:
            unit[h].add(b[0])
    changed = True
    while changed:
        changed = False
        for A in nts:
            extra = set()
            for B in unit[A]:
                extra |= unit[B]
            if not extra <= unit[A]:
                unit[A] |= extra
                changed = True
    nonunit: dict = {}
    for h, b in prods:
        if not (len(b) == 1 and b[0] in ntset):
            nonunit.setdefault(h, []).append(b)
    step = []
    for A in nts:
        for B in unit[A]:
            for b in nonunit.get(B, ()):
                if len(b) == 0 and A != start:
                    continue
                step.append((A, b))
    out = remove_useless(Cfg(g.terminals, tuple(nts), tuple(dict.fromkeys(step)), start))
    return out


@dataclass(frozen=True)
class CnfTables:
    """Integer encoding of a CNF grammar for the CYK kernels."""

    grammar: Cfg
    names: tuple
    index: dict
    start: int
    eps: bool
    term_rows: dict
    offs: np.ndarray
    rA: np.ndarray
    rC: np.ndarray
    start_rules: tuple

    @classmethod
    def build(cls, cnf: Cfg) -> "CnfTables":
        names = cnf.nonterminals
        index = {A: i for i, A in enumerate(names)}
        N = len(names)
        term_rows = {a: np.zeros(N, dtype=np.bool_) for a in cnf.terminals}
        rA, rB, rC = [], [], []
        eps = False
        for h, b in cnf.productions:
            if len(b) == 0:
                eps = True
            elif len(b) == 1:
                term_rows[b[0]][index[h]] = True
            else:
                rA.append(index[h])
                rB.append(index[b[0]])
                rC.append(index[b[1]])
        rA, rB, rC = (np.array(x, dtype=np.int64) for x in (rA, rB, rC))
        s = index[cnf.start]
        top = rA == s
        return cls(
            cnf,
            names,
            index,
            s,
            eps,
            term_rows,
            *_kernels.csr_rules(rA, rB, rC, N),
            _kernels.csr_rules(np.zeros(int(top.sum()), np.int64), rB[top], rC[top], N),
        )

    @property
    def n_nt(self) -> int:
        return len(self.names)

    def rows(self, w: Sequence[str]) -> Optional[np.ndarray]:
        try:
            return np.array([self.term_rows[x] for x in w], dtype=np.bool_).reshape(len(w), self.n_nt)
        except KeyError:
            return None

    def table(self, w: Sequence[str]) -> Optional[np.ndarray]:
        rows = self.rows(w)
        if rows is None:
            return None
        return _kernels.cyk_table(rows, self.offs, self.rA, self.rC)


def cyk_member(g: Cfg, w: Sequence[str]) -> bool:
    """Membership test; a letter outside the terminals gives ``False`` and a log line."""
    tab = g.cnf_tables
    w = tuple(w)
    if not w:
        return tab.eps
    if any(x not in tab.term_rows for x in w):
        log.info("cyk_member: word %s uses letters outside the terminals", format_word(w))
        return False
    if tab.n_nt == 0:
        return False
    T = tab.table(w)
    return bool(T[len(w), 0, tab.start])


@dataclass(frozen=True)
class ParseNode:
    symbol: str
    i: int
    j: int
    children: tuple = ()

    def leaves(self) -> list:
        if not self.children:
            return [self]
        out = []
        for c in self.children:
            out.extend(c.leaves())
        return out


def cyk_parse(g: Cfg, w: Sequence[str]) -> Optional[ParseNode]:
    """A derivation tree over the CNF grammar (``None`` if ``w`` is rejected)."""
    tab = g.cnf_tables
    w = tuple(w)
    if not w:
        return ParseNode(tab.grammar.start, 0, 0) if tab.eps else None
    T = tab.table(w)
    if T is None or not T[len(w), 0, tab.start]:
        return None
    by_head: dict = {}
    for B in range(tab.n_nt):
        for r in range(tab.offs[B], tab.offs[B + 1]):
            by_head.setdefault(int(tab.rA[r]), []).append((B, int(tab.rC[r])))

    def build(A: int, i: int, n: int) -> ParseNode:
        if n == 1:
            return ParseNode(tab.names[A], i, i + 1, (ParseNode(w[i], i, i + 1),))
        for k in range(1, n):
            for B, C in by_head.get(A, ()):
                if T[k, i, B] and T[n - k, i + k, C]:
                    return ParseNode(tab.names[A], i, i + n, (build(B, i, k), build(C, i + k, n - k)))
        raise GrammarError("inconsistent CYK table")

    return build(tab.start, 0, len(w))


class _RowRegistry:
    """Deduplicates bit-packed nonterminal rows."""

    def __init__(self):
        self.ids: dict = {}
        self.rows: list = []

    def add_packed(self, packed: np.ndarray) -> np.ndarray:
        out = np.empty(len(packed), dtype=np.int64)
        for i, row in enumerate(packed):
            key = row.tobytes()
            j = self.ids.get(key)
            if j is None:
                j = self.ids[key] = len(self.rows)
                self.rows.append(row)
            out[i] = j
        return out

    def packed(self, width: int) -> np.ndarray:
        if not self.rows:
            return np.zeros((0, width), dtype=np.uint8)
        return np.stack(self.rows)


def _csr_of(packed: np.ndarray, n_nt: int) -> tuple:
    dense = np.unpackbits(packed, axis=1, count=n_nt).astype(np.bool_)
    counts = dense.sum(axis=1)
    ptr = np.zeros(len(dense) + 1, dtype=np.int64)
    ptr[1:] = np.cumsum(counts)
    idx = np.nonzero(dense)[1].astype(np.int64)
    return ptr, idx


def _has_bit(packed: np.ndarray, bit: int) -> np.ndarray:
    return (packed[:, bit >> 3] & (128 >> (bit & 7))) != 0


def battery_membership(g: Cfg, alphabet: Sequence[str], max_len: int) -> list:
    """Membership of every word of length ``0..max_len`` over ``alphabet``.

    Entry ``n`` is a boolean array indexed like ``itertools.product(alphabet,
    repeat=n)``.  Each word is reduced to the set of nonterminals deriving it;
    words sharing that set are combined once, so the work grows with the number
    of distinct sets rather than the number of words.
    """
    tab = g.cnf_tables
    s = len(alphabet)
    N = tab.n_nt
    out = [np.array([tab.eps])]
    if max_len == 0:
        return out
    if N == 0:
        return out + [np.zeros(s**n, dtype=np.bool_) for n in range(1, max_len + 1)]
    width = (N + 7) // 8
    zero = np.zeros(N, dtype=np.bool_)
    letters = np.array([tab.term_rows.get(a, zero) for a in alphabet], dtype=np.bool_).reshape(s, N)
    reg = _RowRegistry()
    cls1 = reg.add_packed(np.packbits(letters, axis=1))
    classes = {1: (cls1, reg.packed(width))}
    out.append(_has_bit(classes[1][1], tab.start)[cls1])
    for n in range(2, max_len + 1):
        top = n == max_len
        offs, rA, rC = tab.start_rules if top else (tab.offs, tab.rA, tab.rC)
        width_n = 1 if top else width
        nn = 1 if top else N
        reg = _RowRegistry()
        split_ids = []
        for k in range(1, n):
            cp, pk = classes[k]
            cs, sk = classes[n - k]
            code = np.repeat(cp, s ** (n - k)) * len(sk) + np.tile(cs, s**k)
            ucode, inv = np.unique(code, return_inverse=True)
            ptr, idx = _csr_of(pk, N)
            ids = np.empty(len(ucode), dtype=np.int64)
            for lo in range(0, len(ucode), 1 << 15):
                chunk = ucode[lo : lo + (1 << 15)]
                rows = _kernels.pair_rows(ptr, idx, sk, chunk // len(sk), chunk % len(sk), offs, rA, rC, nn)
                ids[lo : lo + len(chunk)] = reg.add_packed(np.packbits(rows, axis=1))
            split_ids.append(ids[inv.reshape(-1)])
        packed = reg.packed(width_n)
        if top:
            acc = np.zeros(s**n, dtype=np.bool_)
            for ids in split_ids:
                acc |= _has_bit(packed, 0)[ids]
            out.append(acc)
            break
        combo = np.stack(split_ids, axis=1)
        ucombo, cinv = np.unique(combo, axis=0, return_inverse=True)
        merged = packed[ucombo[:, 0]].copy()
        for col in range(1, ucombo.shape[1]):
            merged |= packed[ucombo[:, col]]
        final = _RowRegistry()
        cls_of_combo = final.add_packed(merged)
        cls = cls_of_combo[cinv.reshape(-1)]
        classes[n] = (cls, final.packed(width))
        out.append(_has_bit(classes[n][1], tab.start)[cls])
    return out


def accepted_words(g: Cfg, max_len: int, alphabet: Optional[Sequence[str]] = None) -> set:
    alphabet = tuple(g.terminals if alphabet is None else alphabet)
    masks = battery_membership(g, alphabet, max_len)
    out = set()
    for n, mask in enumerate(masks):
        for idx in np.flatnonzero(mask):
            out.add(index_to_word(int(idx), n, alphabet))
    return out


def index_to_word(idx: int, n: int, alphabet: Sequence[str]) -> tuple:
    s = len(alphabet)
    letters = []
    for _ in range(n):
        idx, r = divmod(idx, s)
        letters.append(alphabet[r])
    return tuple(reversed(letters))


def all_words(alphabet: Sequence[str], max_len: int):
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)


# closure constructions ------------------------------------------------------


def _disjoint_parts(parts: Sequence[Cfg]) -> list:
    avoid = set()
    for p in parts:
        avoid |= set(p.terminals)
    base = _fresh_prefix(avoid, "P")
    return [compact(p, f"{base}{i}.", avoid) for i, p in enumerate(parts)]


def cfg_combine(kind: str, parts: Sequence[Cfg]) -> Cfg:
    """Union, concatenation or Kleene star of grammars over one terminal set."""
    parts = list(parts)
    if kind not in ("union", "concat", "star"):
        raise GrammarError(f"unknown combination {kind!r}")
    if not parts or (kind == "star" and len(parts) != 1):
        raise GrammarError(f"{kind} got {len(parts)} parts")
    terms = set(parts[0].terminals)
    for p in parts[1:]:
        if set(p.terminals) != terms:
            raise AlphabetError("grammars in a combination must share their terminals")
    return _combine(kind, parts, parts[0].terminals)


def _combine(kind: str, parts: Sequence[Cfg], terminals: Sequence[str]) -> Cfg:
    renamed = _disjoint_parts(parts)
    start = _fresh_prefix(list(terminals) + [A for p in renamed for A in p.nonterminals], "S")
    nts = [start]
    prods = []
    for p in renamed:
        nts.extend(p.nonterminals)
        prods.extend(p.productions)
    if kind == "union":
        prods.extend((start, (p.start,)) for p in renamed)
    elif kind == "concat":
        prods.append((start, tuple(p.start for p in renamed)))
    else:
        prods.append((start, ()))
        prods.append((start, (renamed[0].start, start)))
    return Cfg(tuple(terminals), tuple(nts), tuple(prods), start)


def cfg_union(parts: Sequence[Cfg]) -> Cfg:
    """Union over possibly different terminal sets."""
    terms = tuple(dict.fromkeys(a for p in parts for a in p.terminals))
    if not parts:
        return empty_grammar(())
    return _combine("union", parts, terms)


def cfg_concat(parts: Sequence[Cfg]) -> Cfg:
    terms = tuple(dict.fromkeys(a for p in parts for a in p.terminals))
    return _combine("concat", parts, terms)


def cfg_intersect_regular(g: Cfg, a: Fsa) -> Cfg:
    """Triple construction ``[p, A, q]`` over the CNF of ``g``."""
    if set(a.alphabet) - set(g.terminals):
        g = g.with_terminals(tuple(g.terminals) + tuple(x for x in a.alphabet if x not in g.terminals))
    fsa = a.remove_epsilon().trim().relabel()
    cnf = to_cnf(g)
    term_heads: dict = {}
    left: dict = {}
    right: dict = {}
    has_eps = False
    for h, b in cnf.productions:
        if len(b) == 0:
            has_eps = True
        elif len(b) == 1:
            term_heads.setdefault(b[0], []).append(h)
        else:
            left.setdefault(b[0], []).append((h, b[1]))
            right.setdefault(b[1], []).append((h, b[0]))
    found: set = set()
    by_start: dict = {}  # (p, B) -> set of q
    by_end: dict = {}  # (q, C) -> set of p
    prods: set = set()
    todo = []

    def add(p, A, q):
        if (p, A, q) not in found:
            found.add((p, A, q))
            by_start.setdefault((p, A), set()).add(q)
            by_end.setdefault((q, A), set()).add(p)
            todo.append((p, A, q))

    for p, x, q in fsa.edges:
        for A in term_heads.get(x, ()):
            add(p, A, q)
            prods.add(((p, A, q), (x,)))
    while todo:
        p, B, q = todo.pop()
        for A, C in left.get(B, ()):
            for r in list(by_start.get((q, C), ())):
                prods.add(((p, A, r), ((p, B, q), (q, C, r))))
                add(p, A, r)
        for A, X in right.get(B, ()):
            for o in list(by_end.get((p, X), ())):
                prods.add(((o, A, q), ((o, X, p), (p, B, q))))
                add(o, A, q)
    prefix = _fresh_prefix(g.terminals, "I")
    names = {t: f"{prefix}{i}" for i, t in enumerate(sorted(found, key=repr))}
    start = f"{prefix}S"
    out = [(start, (names[(fsa.start, cnf.start, f)],)) for f in fsa.accepts if (fsa.start, cnf.start, f) in found]
    if has_eps and fsa.start in fsa.accepts:
        out.append((start, ()))
    for h, b in prods:
        out.append((names[h], tuple(names[x] if isinstance(x, tuple) else x for x in b)))
    res = Cfg(g.terminals, (start,) + tuple(names.values()), tuple(out), start)
    return remove_useless(res)


def cfg_hom_image(g: Cfg, h: Mapping[str, Sequence[str]], target: Sequence[str]) -> Cfg:
    """Image of ``L(g)`` under the monoid homomorphism ``h``."""
    for a in g.terminals:
        if a not in h:
            raise AlphabetError(f"homomorphism undefined on {a!r}")
        for x in h[a]:
            if x not in target:
                raise AlphabetError(f"image letter {x!r} outside the target alphabet")
    g = compact(g, avoid=target)
    T = set(g.terminals)
    prods = []
    for head, b in g.productions:
        nb = []
        for x in b:
            nb.extend(h[x] if x in T else (x,))
        prods.append((head, tuple(nb)))
    return Cfg(tuple(target), g.nonterminals, tuple(prods), g.start)


def cfg_substitute_many(g: Cfg, subs: Mapping[str, Cfg]) -> Cfg:
    """Simultaneously replace each terminal ``a`` in ``subs`` by the language ``subs[a]``."""
    for a in subs:
        if a not in g.terminals:
            raise AlphabetError(f"{a!r} is not a terminal of the grammar")
    terms = [x for x in g.terminals if x not in subs]
    for m in subs.values():
        terms.extend(x for x in m.terminals if x not in terms)
    parts = [g] + list(subs.values())
    avoid = set(terms) | set(g.terminals)
    base = _fresh_prefix(avoid, "U")
    renamed = [compact(p, f"{base}{i}.", avoid) for i, p in enumerate(parts)]
    main = renamed[0]
    starts = {a: renamed[i + 1].start for i, a in enumerate(subs)}
    nts, prods = list(main.nonterminals), []
    for h, b in main.productions:
        prods.append((h, tuple(starts.get(x, x) for x in b)))
    for r in renamed[1:]:
        nts.extend(r.nonterminals)
        prods.extend(r.productions)
    return Cfg(tuple(terms), tuple(nts), tuple(prods), main.start)


def cfg_substitute(g: Cfg, a: str, m: Cfg) -> Cfg:
    return cfg_substitute_many(g, {a: m})


def cfg_hom_preimage(g: Cfg, h: Mapping[str, Sequence[str]], source: Sequence[str]) -> Cfg:
    """``{ w over source : h(w) ∈ L(g) }``, by running ``g``'s pushdown machine on images."""
    from .pda import cfg_to_pda, pda_hom_preimage, pda_to_cfg

    for c in source:
        if c not in h:
            raise AlphabetError(f"homomorphism undefined on {c!r}")
        for x in h[c]:
            if x not in g.terminals:
                raise AlphabetError(f"image letter {x!r} outside the grammar terminals")
    return pda_to_cfg(pda_hom_preimage(cfg_to_pda(g), h, source))


def cfg_reverse(g: Cfg) -> Cfg:
    return Cfg(g.terminals, g.nonterminals, tuple((h, tuple(reversed(b))) for h, b in g.productions), g.start)


# shortest words ---------------------------------------------------------------


def shortest_terminal_words(g: Cfg) -> tuple:
    """Shortest word derivable from each nonterminal, and the maximum length ``M``.

    Ties go to the lexicographically smaller word.  Letters contain no
    whitespace, so comparing letter tuples matches comparing the serialized
    strings.
    """
    if has_useless(g):
        raise GrammarError("grammar has useless nonterminals")
    nts = set(g.nonterminals)
    best: dict = {}
    changed = True
    while changed:
        changed = False
        for h, b in g.productions:
            if any(x in nts and x not in best for x in b):
                continue
            cand = tuple(itertools.chain.from_iterable(best[x] if x in nts else (x,) for x in b))
            cur = best.get(h)
            if cur is None or (len(cand), cand) < (len(cur), cur):
                best[h] = cand
                changed = True
    M = max((len(w) for w in best.values()), default=0)
    return best, M


def grammar_summary(g: Cfg) -> str:
    return f"{len(g.nonterminals)} nonterminals, {len(g.productions)} productions, {len(g.terminals)} terminals"
