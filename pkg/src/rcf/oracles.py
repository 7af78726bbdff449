"""Brute-force reference answers used to cross-check the recognizers.

Two independent routes to the word problem are provided: folding words
through the normal-form tables, and multiplying faithful 2×2 integer
matrices (which never looks at the tables).
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

from .free import free_reduce, inverse_letter, multiply, word_invert
from .vfgroup import GroupElement, VfPresentation

# matrices ---------------------------------------------------------------------

_Z3Z2_X = np.array([[0, -1], [1, 1]], dtype=np.int64)
_Z3Z2_Y = np.array([[0, -1], [1, 0]], dtype=np.int64)


def _prod(ms) -> np.ndarray:
    out = np.eye(2, dtype=np.int64)
    for m in ms:
        out = out @ m
    return out


def _inv2(m: np.ndarray) -> np.ndarray:
    """Inverse of a determinant ±1 integer matrix."""
    det = int(round(np.linalg.det(m)))
    a, b, c, d = m.ravel()
    return np.array([[d, -b], [-c, a]], dtype=np.int64) * det


@dataclass(frozen=True)
class MatrixRep:
    """Faithful representation into GL(2, Z), or PSL(2, Z) when ``projective``."""

    letters: Mapping
    projective: bool = False

    def of(self, w: Sequence[str]) -> np.ndarray:
        return _prod(self.letters[x] for x in w)

    def is_identity(self, m: np.ndarray) -> bool:
        eye = np.eye(2, dtype=np.int64)
        return bool((m == eye).all() or (self.projective and (m == -eye).all()))


def _with_inverses(gens: Mapping) -> dict:
    out = dict(gens)
    for x, m in gens.items():
        out[inverse_letter(x)] = _inv2(m)
    return out


def matrix_rep(p: VfPresentation) -> MatrixRep:
    """Hand-chosen faithful matrices for the bundled groups."""
    if p.name in ("F1", "F2") and p.transversal == (p.identity,):
        sanov = [np.array([[1, 2], [0, 1]]), np.array([[1, 0], [2, 1]])]
        return MatrixRep(_with_inverses({x: sanov[i].astype(np.int64) for i, x in enumerate(p.kernel)}))
    if p.name == "Dinf":
        # affine maps x ↦ ±x + n
        gens = _with_inverses({"a": np.array([[1, 1], [0, 1]], dtype=np.int64)})
        gens["t"] = np.array([[-1, 0], [0, 1]], dtype=np.int64)
        return MatrixRep(gens)
    if p.name == "Z3*Z2":
        X, Y = _Z3Z2_X, _Z3Z2_Y
        word = {"x": [X], "X": [X, X], "y": [Y], "xy": [X, Y], "Xy": [X, X, Y]}
        gens = _with_inverses({"a": _prod([X, Y, X, X, Y]), "b": _prod([X, X, Y, X, Y])})
        for t in p.transversal_letters:
            gens[t] = _prod(word[t])
        return MatrixRep(gens, projective=True)
    raise KeyError(f"no matrix representation for {p.name}")


def matrix_identity_masks(rep: MatrixRep, alphabet: Sequence[str], max_len: int) -> list:
    """For each length, which words (in ``itertools.product`` order) are trivial."""
    L = np.stack([rep.letters[x] for x in alphabet])
    s = len(alphabet)
    eye = np.eye(2, dtype=np.int64)
    cur = eye[None]
    out = []
    for n in range(max_len + 1):
        if n:
            cur = np.repeat(cur, s, axis=0) @ np.tile(L, (s ** (n - 1), 1, 1))
        triv = (cur == eye).all(axis=(1, 2))
        if rep.projective:
            triv |= (cur == -eye).all(axis=(1, 2))
        out.append(triv)
    return out


# normal forms -------------------------------------------------------------------


def nf_identity_masks(p: VfPresentation, alphabet: Sequence[str], max_len: int) -> list:
    """Word-problem masks from the normal-form fold, level by level."""
    elems = [p.letter(y) for y in alphabet]
    inv_of = [p.inverse(e) for e in elems]
    level = [p.one]
    out = [np.array([True])]
    for n in range(1, max_len + 1):
        if n == max_len:
            # last level: u·y = 1 iff nf(u) = y⁻¹
            mask = np.zeros(len(level) * len(elems), dtype=np.bool_)
            for i, e in enumerate(level):
                for j, yi in enumerate(inv_of):
                    if e == yi:
                        mask[i * len(elems) + j] = True
            out.append(mask)
            break
        level = [p.mul(e, y) for e in level for y in elems]
        out.append(np.array([e == p.one for e in level], dtype=np.bool_))
    return out


def words_of_length(alphabet: Sequence[str], n: int):
    return itertools.product(alphabet, repeat=n)


def exponent_sum(w: Sequence[str], letter: str) -> int:
    inv = inverse_letter(letter)
    return sum(1 for x in w if x == letter) - sum(1 for x in w if x == inv)


# conjugacy ---------------------------------------------------------------------


def conjugator_search(
    p: VfPresentation,
    g: GroupElement,
    target: GroupElement,
    bound: int,
    twist: Optional[Callable[[GroupElement], GroupElement]] = None,
):
    """Search ``x`` of word length ``≤ bound`` with ``x⁻¹·g·twist(x) = target``.

    Without a twist this is ordinary conjugacy.  The search runs over group
    elements by breadth-first search, so each element is tried once.
    """
    twist = twist or (lambda e: e)
    gens = [p.letter(y) for y in p.alphabet]
    seen = {p.one: ()}
    frontier = [p.one]
    for depth in range(bound + 1):
        for x in frontier:
            if p.mul(p.mul(p.inverse(x), g), twist(x)) == target:
                return seen[x]
        if depth == bound:
            break
        nxt = []
        for x in frontier:
            for y, e in zip(p.alphabet, gens):
                z = p.mul(x, e)
                if z not in seen:
                    seen[z] = seen[x] + (y,)
                    nxt.append(z)
        frontier = nxt
    return None


def bfs_ball_distances(start, neighbours: Callable, radius: int) -> dict:
    dist = {start: 0}
    q = deque([start])
    while q:
        v = q.popleft()
        if dist[v] == radius:
            continue
        for u in neighbours(v):
            if u not in dist:
                dist[u] = dist[v] + 1
                q.append(u)
    return dist
