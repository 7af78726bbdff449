"""Free-group word arithmetic.

Words are plain tuples of letter strings.  A letter ``x`` has formal inverse
``x^-1``; anything registered as an extra letter (transversal symbols, the
``#`` separator) is carried unpaired.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

Word = tuple  # tuple[str, ...]

INV_SUFFIX = "^-1"
EPSILON: Word = ()


class AlphabetError(ValueError):
    pass


def inverse_letter(x: str) -> str:
    if x.endswith(INV_SUFFIX):
        return x[: -len(INV_SUFFIX)]
    return x + INV_SUFFIX


def is_inverse_letter(x: str) -> bool:
    return x.endswith(INV_SUFFIX)


def parse_word(text: str) -> Word:
    """Parse a whitespace separated word; a lone ``ε`` or ``eps`` is the empty word."""
    parts = text.split()
    if parts in (["ε"], ["eps"]):
        return ()
    return tuple(parts)


def format_word(w: Sequence[str]) -> str:
    return " ".join(w) if w else "ε"


@dataclass(frozen=True)
class Alphabet:
    positive: tuple
    extra: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "positive", tuple(self.positive))
        object.__setattr__(self, "extra", tuple(self.extra))
        seen = set()
        for x in self.positive:
            if is_inverse_letter(x):
                raise AlphabetError(f"positive letter {x!r} looks like an inverse")
        for x in self.letters:
            if x in seen:
                raise AlphabetError(f"duplicate symbol {x!r}")
            seen.add(x)
        if "#" in self.group_letters:
            raise AlphabetError("'#' cannot be a group letter")

    @classmethod
    def free(cls, rank: int, extra: Iterable[str] = ()) -> "Alphabet":
        return cls(tuple(default_basis(rank)), tuple(extra))

    @property
    def group_letters(self) -> tuple:
        """Basis letters followed by their inverses."""
        return self.positive + tuple(inverse_letter(x) for x in self.positive)

    @property
    def letters(self) -> tuple:
        return self.group_letters + self.extra

    def __contains__(self, x) -> bool:
        return x in self.letters

    def check(self, w: Sequence[str], group_only: bool = False) -> None:
        allowed = set(self.group_letters if group_only else self.letters)
        for x in w:
            if x not in allowed:
                raise AlphabetError(f"letter {x!r} not in alphabet")


def default_basis(rank: int) -> list:
    if rank <= 0:
        raise ValueError("rank must be positive")
    if rank > 26:
        raise ValueError("default basis only covers 26 letters")
    return [chr(ord("a") + i) for i in range(rank)]


def _check_letters(w, alphabet: Optional[Alphabet]):
    if alphabet is not None:
        alphabet.check(w, group_only=True)


def free_reduce(w: Sequence[str], alphabet: Optional[Alphabet] = None) -> Word:
    _check_letters(w, alphabet)
    out: list = []
    for x in w:
        if out and out[-1] == inverse_letter(x):
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def is_freely_reduced(w: Sequence[str]) -> bool:
    return all(w[i + 1] != inverse_letter(w[i]) for i in range(len(w) - 1))


def word_invert(w: Sequence[str], alphabet: Optional[Alphabet] = None) -> Word:
    _check_letters(w, alphabet)
    if alphabet is None and any(x == "#" for x in w):
        raise AlphabetError("'#' has no inverse")
    return tuple(inverse_letter(x) for x in reversed(w))


def multiply(*words: Sequence[str]) -> Word:
    return free_reduce(tuple(itertools.chain.from_iterable(words)))


def cyclic_reduce(w: Sequence[str]) -> tuple:
    """Split a reduced word as ``conjugator · core · conjugator⁻¹``."""
    w = tuple(w)
    if not is_freely_reduced(w):
        raise ValueError(f"{format_word(w)} is not freely reduced")
    i, j = 0, len(w)
    while j - i >= 2 and w[j - 1] == inverse_letter(w[i]):
        i += 1
        j -= 1
    return w[i:j], w[:i]


def power(w: Sequence[str], n: int) -> Word:
    if n < 0:
        return free_reduce(word_invert(w) * (-n))
    return free_reduce(tuple(w) * n)


def reduced_words(letters: Sequence[str], max_len: int):
    """All freely reduced words up to ``max_len`` in length-then-lex order."""
    layer = [()]
    yield ()
    for _ in range(max_len):
        nxt = []
        for w in layer:
            for x in letters:
                if w and w[-1] == inverse_letter(x):
                    continue
                nxt.append(w + (x,))
        yield from nxt
        layer = nxt


@dataclass(frozen=True)
class FreeAutomorphism:
    """Automorphism of a free group given by basis images and their inverses.

    ``images[x]`` is the image of basis letter ``x``; inverse letters map to the
    inverted image.  The caller supplies ``inverse_images`` and construction
    checks that the two maps compose to the identity in both orders.
    """

    basis: tuple
    images: Mapping
    inverse_images: Mapping
    _checked: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(self.basis))
        object.__setattr__(self, "images", {x: free_reduce(self.images[x]) for x in self.basis})
        object.__setattr__(
            self, "inverse_images", {x: free_reduce(self.inverse_images[x]) for x in self.basis}
        )
        if self._checked:
            for x in self.basis:
                if _apply(self.inverse_images, _apply(self.images, (x,))) != (x,):
                    raise ValueError(f"inverse_images do not invert images on {x!r}")
                if _apply(self.images, _apply(self.inverse_images, (x,))) != (x,):
                    raise ValueError(f"images do not invert inverse_images on {x!r}")

    @property
    def rank(self) -> int:
        return len(self.basis)

    @classmethod
    def identity(cls, basis: Sequence[str]) -> "FreeAutomorphism":
        m = {x: (x,) for x in basis}
        return cls(tuple(basis), m, m, _checked=False)

    @classmethod
    def conjugation(cls, basis: Sequence[str], h: Sequence[str]) -> "FreeAutomorphism":
        """The inner automorphism ``x ↦ h⁻¹ x h``."""
        hi = word_invert(h)
        return cls(
            tuple(basis),
            {x: multiply(hi, (x,), h) for x in basis},
            {x: multiply(h, (x,), hi) for x in basis},
        )

    def __call__(self, w: Sequence[str]) -> Word:
        return aut_apply(self, w)

    def inverse(self) -> "FreeAutomorphism":
        return FreeAutomorphism(self.basis, self.inverse_images, self.images, _checked=False)

    def then(self, other: "FreeAutomorphism") -> "FreeAutomorphism":
        """Apply ``self`` first, then ``other``."""
        if other.basis != self.basis:
            raise ValueError("basis mismatch")
        imgs = {x: other(self.images[x]) for x in self.basis}
        invs = {x: self.inverse()(other.inverse_images[x]) for x in self.basis}
        return FreeAutomorphism(self.basis, imgs, invs, _checked=False)

    def power(self, k: int) -> "FreeAutomorphism":
        base = self if k >= 0 else self.inverse()
        out = FreeAutomorphism.identity(self.basis)
        for _ in range(abs(k)):
            out = out.then(base)
        return out

    def is_identity(self) -> bool:
        return all(self.images[x] == (x,) for x in self.basis)

    def to_json(self) -> dict:
        return {
            "format": "rcf.automorphism/1",
            "basis": list(self.basis),
            "images": {x: format_word(self.images[x]) for x in self.basis},
            "inverse_images": {x: format_word(self.inverse_images[x]) for x in self.basis},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "FreeAutomorphism":
        basis = tuple(data["basis"]) if "basis" in data else tuple(data["images"])
        return cls(
            basis,
            {x: parse_word(data["images"][x]) for x in basis},
            {x: parse_word(data["inverse_images"][x]) for x in basis},
        )


def _apply(images: Mapping, w: Sequence[str]) -> Word:
    out: list = []
    for x in w:
        if x in images:
            out.extend(images[x])
        else:
            base = inverse_letter(x)
            if base not in images or not is_inverse_letter(x):
                raise AlphabetError(f"letter {x!r} outside the automorphism basis")
            out.extend(word_invert(images[base]))
    return free_reduce(out)


def aut_apply(phi: FreeAutomorphism, w: Sequence[str]) -> Word:
    return _apply(phi.images, w)


def _key(w: Word):
    return (len(w), w)


def inner_witness(phi: FreeAutomorphism, search_bound: int = 12) -> Optional[Word]:
    """Shortest ``h`` with ``phi(x) = h⁻¹ x h`` on every basis letter, if ``|h| ≤ search_bound``.

    The first basis equation pins ``h`` down to the line ``x₁^j · h₀``
    (centralisers of basis letters are cyclic), so only that line is scanned.
    ``None`` means nothing was found within the bound.
    """
    x1 = phi.basis[0]
    core, c = cyclic_reduce(phi.images[x1])
    if core != (x1,):
        return None
    h0 = word_invert(c)
    found = []
    # |x1^j h0| >= |j| - |h0|, so the scan range below is exhaustive for the bound.
    span = search_bound + len(h0)
    for j in range(-span, span + 1):
        h = multiply(power((x1,), j), h0)
        if len(h) > search_bound:
            continue
        if all(phi.images[x] == multiply(word_invert(h), (x,), h) for x in phi.basis):
            found.append(h)
    return min(found, key=_key) if found else None


def virtually_inner_order(phi: FreeAutomorphism, k_max: int = 12, search_bound: int = 12):
    """Smallest ``k ≤ k_max`` with ``phi^k`` inner (witness within ``search_bound``)."""
    if k_max < 1:
        raise ValueError("k_max must be positive")
    psi = phi
    for k in range(1, k_max + 1):
        h = inner_witness(psi, search_bound)
        if h is not None:
            return k, h
        psi = psi.then(phi)
    return None
