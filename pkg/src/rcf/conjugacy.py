"""φ-cyclic permutations, twisted conjugacy classes and conjugacy classes.

Twisted conjugacy uses ``g ~ x⁻¹ · g · φ(x)``.  A φ-cyclic step rewrites a
reduced word ``u v`` (literal split) as ``reduce(v · φ(u))``.
"""

from __future__ import annotations

import json
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .free import (
    FreeAutomorphism,
    cyclic_reduce,
    format_word,
    free_reduce,
    is_freely_reduced,
    multiply,
    parse_word,
    power,
    virtually_inner_order,
    word_invert,
)
from .fsa import Fsa
from .grammar import (
    Cfg,
    cfg_concat,
    cfg_intersect_regular,
    cfg_substitute,
    cfg_union,
    compact,
    remove_useless,
    word_grammar,
)
from .vfgroup import (
    SEPARATOR,
    ExtendedAutomorphism,
    GroupElement,
    VfPresentation,
    build_pairing_pda,
    expansion_closure,
    inner_extension,
    recognizer_multiply,
)

log = logging.getLogger(__name__)


class BudgetExhausted(RuntimeError):
    """A bounded search ran out of budget before reaching a definite answer."""


class NotVirtuallyInner(ValueError):
    pass


def _certify(phi: FreeAutomorphism, k_max: int = 12):
    found = virtually_inner_order(phi, k_max=k_max)
    if found is None:
        raise NotVirtuallyInner(f"no power ≤ {k_max} of the automorphism is inner")
    return found


# φ-cyclic permutations ------------------------------------------------------


def cyclic_step(phi: FreeAutomorphism, u: Sequence[str], v: Sequence[str]) -> tuple:
    return multiply(v, phi(u))


def cyclic_neighbours(phi: FreeAutomorphism, w: Sequence[str]) -> set:
    """Forward steps ``uv → v·φ(u)`` and backward steps ``v·b → φ⁻¹(b)·v``
    over all literal splits of ``w``."""
    inv = phi.inverse()
    w = tuple(w)
    out = set()
    for i in range(len(w) + 1):
        a, b = w[:i], w[i:]
        out.add(multiply(b, phi(a)))
        out.add(multiply(inv(b), a))
    return out


@dataclass(frozen=True)
class TwistedClassData:
    """The finite description ``{h⁻ⁿ p hⁿ : p ∈ X, n ∈ ℤ}`` of a φ-cyclic class."""

    phi: FreeAutomorphism
    k: int
    base_point: tuple
    X: frozenset
    h: tuple
    certificates: Mapping = field(default_factory=dict, compare=False, repr=False)

    def window(self, n_max: int = 3) -> set:
        out = set()
        for n in range(-n_max, n_max + 1):
            hn = power(self.h, n)
            for p in self.X:
                out.add(multiply(word_invert(hn), p, hn))
        return out

    def to_json(self) -> dict:
        return {
            "format": "rcf.twisted-data/1",
            "phi": self.phi.to_json(),
            "k": self.k,
            "base_point": format_word(self.base_point),
            "h": format_word(self.h),
            "X": sorted(format_word(p) for p in self.X),
            "certificates": {format_word(p): c for p, c in sorted(self.certificates.items())},
        }


def phi_cyclic_closure(phi: FreeAutomorphism, g: Sequence[str], order=None) -> TwistedClassData:
    """Finite set ``X`` and ``h`` with φ-cyclic permutations of ``g`` equal to ``{h⁻ⁿ p hⁿ}``.

    ``X`` collects, for each rotation point ``i``, residue ``r < k`` and literal
    split ``u'v'`` of the reduced ``φ^r(x_i)``, the word
    ``v' · φ^r(x_{i+1} ⋯ x_m) · φ^{r+1}(x_1 ⋯ x_{i-1}) · φ(u')``.
    ``order`` is a known ``(k, h)`` with ``φ^k(x) = h⁻¹ x h``.
    """
    g = tuple(g)
    if not is_freely_reduced(g):
        raise ValueError("base point must be freely reduced")
    k, h = order if order is not None else _certify(phi)
    if not g:
        return TwistedClassData(phi, k, g, frozenset({()}), tuple(h), {(): []})
    pw = [FreeAutomorphism.identity(phi.basis)]
    for _ in range(k):
        pw.append(pw[-1].then(phi))
    X = set()
    certs = {}
    m = len(g)
    for i in range(m):
        for r in range(k):
            img = pw[r](g[i : i + 1])
            mid = pw[r](g[i + 1 :])
            tail = pw[r + 1](g[:i])
            for j in range(len(img) + 1):
                u, v = img[:j], img[j:]
                p = multiply(v, mid, tail, phi(u))
                X.add(p)
    cap = max(len(p) for p in X) + len(g)
    for p in X:
        certs[p] = find_certificate(phi, g, p, cap)
    return TwistedClassData(phi, k, g, frozenset(X), tuple(h), certs)


def _step(phi: FreeAutomorphism, w: tuple, move: Mapping) -> tuple:
    i = move["split"]
    if move["dir"] == "fwd":
        return multiply(w[i:], phi(w[:i]))
    return multiply(phi.inverse()(w[i:]), w[:i])


def find_certificate(phi: FreeAutomorphism, g: Sequence[str], target: Sequence[str], max_len: int, budget: int = 50_000):
    """Shortest list of forward φ-cyclic moves from ``g`` to ``target`` staying within ``max_len``."""
    g, target = tuple(g), tuple(target)
    prev = {g: None}
    q = deque([g])
    while q:
        w = q.popleft()
        if w == target:
            path = []
            while prev[w] is not None:
                w, mv = prev[w]
                path.append(mv)
            return path[::-1]
        for i in range(len(w) + 1):
            mv = {"dir": "fwd", "split": i}
            x = _step(phi, w, mv)
            if len(x) <= max_len and x not in prev:
                prev[x] = (w, mv)
                if len(prev) > budget:
                    return None
                q.append(x)
    return None


def replay_certificate(phi: FreeAutomorphism, g: Sequence[str], moves: Sequence[Mapping]) -> tuple:
    w = tuple(g)
    for mv in moves:
        w = _step(phi, w, mv)
    return w


def direct_closure(phi: FreeAutomorphism, g: Sequence[str], max_len: int, budget: int = 200_000) -> set:
    """Reduced words reachable from ``g`` by forward φ-cyclic steps ``uv → v·φ(u)``
    (literal splits) without exceeding ``max_len``."""
    g = free_reduce(g)
    seen = {g}
    q = deque([g])
    while q:
        w = q.popleft()
        for x in {cyclic_step(phi, w[:i], w[i:]) for i in range(len(w) + 1)}:
            if len(x) <= max_len and x not in seen:
                seen.add(x)
                if len(seen) > budget:
                    raise BudgetExhausted("direct closure exceeded its budget")
                q.append(x)
    return seen


# grammars -------------------------------------------------------------------


def conjugator_tower_grammar(u: Sequence[str], v: Sequence[str], letters: Sequence[str]) -> Cfg:
    """``S → T | U``, ``T → u⁻¹ T u | v``, ``U → u U u⁻¹ | v``: the words ``u⁻ⁿ v uⁿ``."""
    u, v = tuple(u), tuple(v)
    ui = word_invert(u)
    prods = [
        ("S", ("T",)),
        ("S", ("U",)),
        ("T", ui + ("T",) + u),
        ("T", v),
        ("U", u + ("U",) + ui),
        ("U", v),
    ]
    return Cfg(tuple(letters), ("S", "T", "U"), tuple(prods), "S")


def _tower_parts(h: tuple, p: tuple, letters) -> list:
    """Grammars whose union holds every reduced spelling of ``{h⁻ⁿ p hⁿ}`` literally.

    With ``h = d h₀ d⁻¹`` (``h₀`` cyclically reduced) the reduced forms are
    ``d · reduce(h₀⁻ⁿ q h₀ⁿ) · d⁻¹`` with ``q = reduce(d⁻¹ p d)``, and no letter
    of ``d`` cancels once the inner word has grown.  Past a finite window the
    inner word gains a literal ``h₀⁻¹ … h₀`` (or ``h₀ … h₀⁻¹``) per step, so two
    towers started at the window's edges plus the words inside the window
    cover everything.
    """
    if not h:
        return [word_grammar(letters, [p])]
    h0, d = cyclic_reduce(h)
    di = word_invert(d)
    q = multiply(di, p, d)

    def inner(n):
        hn = power(h0, n)
        return multiply(word_invert(hn), q, hn)

    N = len(q) // len(h0) + 2
    while True:
        bases = []
        for sign in (1, -1):
            step = h0 if sign > 0 else word_invert(h0)
            a, b = inner(sign * N), inner(sign * (N + 1))
            if b == a:
                continue
            if b != word_invert(step) + a + step:
                break
            bases.append(a)
        else:
            break
        N += 1
        if N > 64:
            raise BudgetExhausted("conjugation tower did not stabilise")
    lits = {multiply(d, inner(n), di) for n in range(-N, N + 1)}
    parts = [word_grammar(letters, sorted(lits))]
    wrap_l, wrap_r = word_grammar(letters, [d]), word_grammar(letters, [di])
    for a in bases:
        parts.append(cfg_concat([wrap_l, conjugator_tower_grammar(h0, a, letters), wrap_r]))
    return parts


def _cyclic_parts(data: TwistedClassData, letters) -> list:
    parts = []
    for p in sorted(data.X):
        parts.extend(_tower_parts(data.h, p, letters))
    return parts


def cyclic_perm_set_recognizer(data: TwistedClassData, letters: Optional[Sequence[str]] = None) -> Cfg:
    """Full free-group preimage of the φ-cyclic permutations described by ``data``."""
    letters = tuple(letters) if letters is not None else _group_letters(data.phi)
    return expansion_closure(cfg_union(_cyclic_parts(data, letters)), letters)


def _group_letters(phi: FreeAutomorphism) -> tuple:
    from .free import Alphabet

    return Alphabet(phi.basis).group_letters


# minimal representatives ---------------------------------------------------------


def twisted_conjugate(phi: FreeAutomorphism, x: Sequence[str], g: Sequence[str]) -> tuple:
    return multiply(word_invert(x), g, phi(x))


def minimal_twisted_reps(phi: FreeAutomorphism, g: Sequence[str], radius_bound: int = 20_000) -> set:
    """Minimal-length words of the φ-twisted class of ``g`` reached by length descent.

    Moves are single-letter twisted conjugations and φ-cyclic steps.  Whenever a
    shorter word appears the search restarts from it; the answer is the set of
    words at the final length once no move yields anything new.  More than
    ``radius_bound`` visited words raises :class:`BudgetExhausted`.
    """
    letters = _group_letters(phi)
    cur = free_reduce(g)
    visited = 0
    while True:
        L = len(cur)
        seen = {cur}
        q = deque([cur])
        shorter = None
        while q and shorter is None:
            w = q.popleft()
            nbrs = {twisted_conjugate(phi, (x,), w) for x in letters} | cyclic_neighbours(phi, w)
            for x in sorted(nbrs, key=lambda v: (len(v), v)):
                if len(x) < L:
                    shorter = x
                    break
                if len(x) == L and x not in seen:
                    seen.add(x)
                    q.append(x)
                    visited += 1
                    if visited > radius_bound:
                        raise BudgetExhausted("minimal representative search exceeded its budget")
        if shorter is None:
            return seen
        cur = shorter


# recognizers -------------------------------------------------------------------


def _kernel_prefix_fsa(p: VfPresentation) -> Fsa:
    """Words ``u # v`` whose ``u`` evaluates into the kernel."""
    edges = []
    for t in p.transversal:
        for y in p.alphabet:
            edges.append((("u", t), y, ("u", p.mul(GroupElement((), t), p.letter(y)).t)))
    edges.append((("u", p.identity), SEPARATOR, "v"))
    edges.extend(("v", y, "v") for y in p.alphabet)
    states = tuple(("u", t) for t in p.transversal) + ("v",)
    return Fsa(states, p.alphabet + (SEPARATOR,), tuple(edges), ("u", p.identity), ("v",))


def twisted_class_recognizer(
    p: VfPresentation,
    phi: ExtendedAutomorphism,
    g: Sequence[str],
    restrict_to_kernel: bool = False,
    radius_bound: int = 20_000,
) -> Cfg:
    """Grammar over ``Σ± ∪ T`` for the φ-twisted class of the kernel element ``g``.

    Built as ``u x v`` with ``u # v`` from the pairing machine and ``x`` ranging
    over the full preimage of the φ-cyclic permutations of the minimal
    representatives.  Every accepted word evaluates into the class and every
    reduced kernel spelling of a class element is accepted.  With
    ``restrict_to_kernel`` only ``u`` evaluating into the kernel is allowed.
    """
    base = phi.base
    order = _certify(base)
    g = free_reduce(g)
    reps = minimal_twisted_reps(base, g, radius_bound)
    letters = p.kernel_letters
    parts = []
    for r in sorted(reps):
        parts.extend(_cyclic_parts(phi_cyclic_closure(base, r, order), letters))
    E = expansion_closure(cfg_union(parts), letters)
    pair = build_pairing_pda(p, phi).grammar
    if restrict_to_kernel:
        pair = cfg_intersect_regular(pair, _kernel_prefix_fsa(p))
    out = cfg_substitute(pair, SEPARATOR, E)
    return compact(remove_useless(out.with_terminals(p.alphabet)))


def class_decomposition(p: VfPresentation, g0: GroupElement) -> list:
    """Pairs ``(t', c)`` with the class of ``g0`` equal to ``⋃ (φ_{t'}-twisted class of c)·t'``.

    Conjugating by ``y·s`` gives ``z⁻¹ · φ_s(h₀)·f · φ_{t'}(z) · t'`` where
    ``s t₀ s⁻¹ = f·t'`` and ``z = y⁻¹``.
    """
    out = []
    for s in p.transversal:
        es = GroupElement((), s)
        c = p.mul(p.mul(es, GroupElement((), g0.t)), p.inverse(es))
        hs = p.mul(p.mul(es, GroupElement(g0.h, p.identity)), p.inverse(es)).h
        item = (c.t, multiply(hs, c.h))
        if item not in out:
            out.append(item)
    return out


def conjugacy_class_recognizer(p: VfPresentation, g0: GroupElement, radius_bound: int = 20_000) -> Cfg:
    """Sound and normal-complete grammar over ``Σ± ∪ T`` for the conjugacy class of ``g0``."""
    parts = []
    for t, c in class_decomposition(p, g0):
        psi = inner_extension(p, GroupElement((), t))
        part = twisted_class_recognizer(p, psi, c, radius_bound=radius_bound)
        if t != p.identity:
            part = recognizer_multiply(part, (t,), "right", p)
        parts.append(part)
    return compact(remove_useless(cfg_union(parts).with_terminals(p.alphabet)))


# oracle ----------------------------------------------------------------------


@dataclass(frozen=True)
class ConjugacyAnswer:
    conjugate: bool
    conjugator: Optional[tuple]
    bound: int

    def __str__(self):
        if self.conjugate:
            return f"yes, conjugator {format_word(self.conjugator) or 'ε'}"
        return f"not within bound {self.bound}"


def conjugacy_oracle(p: VfPresentation, g1: GroupElement, g2: GroupElement, conjugator_bound: int = 8) -> ConjugacyAnswer:
    """Search ``x = y·s`` with ``|y| ≤ bound`` and ``x g1 x⁻¹ = g2``.

    A positive answer is definitive; a negative one only covers the bound.
    """
    from .free import reduced_words

    for y in reduced_words(p.kernel_letters, conjugator_bound):
        ey = GroupElement(y, p.identity)
        for s in p.transversal:
            x = p.mul(ey, GroupElement((), s))
            if p.mul(p.mul(x, g1), p.inverse(x)) == g2:
                return ConjugacyAnswer(True, p.spell(x), conjugator_bound)
    return ConjugacyAnswer(False, None, conjugator_bound)
