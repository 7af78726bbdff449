import pytest
from hypothesis import given, settings, strategies as st

from rcf.free import (
    Alphabet,
    AlphabetError,
    FreeAutomorphism,
    aut_apply,
    cyclic_reduce,
    free_reduce,
    inner_witness,
    is_freely_reduced,
    multiply,
    parse_word,
    virtually_inner_order,
    word_invert,
)

W = parse_word
LETTERS = ["a", "b", "a^-1", "b^-1"]
words = st.lists(st.sampled_from(LETTERS), max_size=10).map(tuple)


def test_free_reduce_examples():
    assert free_reduce(W("a a^-1")) == ()
    assert free_reduce(W("a b b^-1 a")) == W("a a")
    assert free_reduce(W("b^-1 a a^-1 b a")) == W("a")


def test_free_reduce_rejects_foreign_letter():
    with pytest.raises(AlphabetError):
        free_reduce(W("a z"), Alphabet.free(2))


def test_word_invert_examples():
    assert word_invert(W("a b")) == W("b^-1 a^-1")
    assert word_invert(()) == ()
    assert word_invert(W("a a b^-1")) == W("b a^-1 a^-1")
    with pytest.raises(AlphabetError):
        word_invert(W("a #"))


def test_cyclic_reduce_examples():
    assert cyclic_reduce(W("a b a^-1")) == (W("b"), W("a"))
    assert cyclic_reduce(W("b a")) == (W("b a"), ())
    with pytest.raises(ValueError):
        cyclic_reduce(W("a a b b^-1"))


@given(words)
def test_reduce_properties(w):
    r = free_reduce(w)
    assert is_freely_reduced(r)
    assert free_reduce(r) == r
    assert len(r) <= len(w)
    assert free_reduce(w + word_invert(w)) == ()


@given(words)
def test_cyclic_reduce_recombines(w):
    r = free_reduce(w)
    core, c = cyclic_reduce(r)
    assert multiply(c, core, word_invert(c)) == r
    if len(core) >= 2:
        assert core[-1] != word_invert(core[:1])[0]


def _nielsen(kind):
    if kind == 0:
        return FreeAutomorphism(("a", "b"), {"a": W("a b"), "b": W("b")}, {"a": W("a b^-1"), "b": W("b")})
    if kind == 1:
        return FreeAutomorphism(("a", "b"), {"a": W("b"), "b": W("a")}, {"a": W("b"), "b": W("a")})
    if kind == 2:
        return FreeAutomorphism(("a", "b"), {"a": W("a^-1"), "b": W("b")}, {"a": W("a^-1"), "b": W("b")})
    return FreeAutomorphism(("a", "b"), {"a": W("b a"), "b": W("b")}, {"a": W("b^-1 a"), "b": W("b")})


@settings(max_examples=60)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=4), st.lists(st.sampled_from(LETTERS), max_size=8))
def test_automorphism_roundtrip(kinds, w):
    phi = _nielsen(kinds[0])
    for k in kinds[1:]:
        phi = phi.then(_nielsen(k))
    w = tuple(w)
    assert aut_apply(phi.inverse(), aut_apply(phi, w)) == free_reduce(w)
    # homomorphism up to reduction
    assert aut_apply(phi, w + w) == multiply(aut_apply(phi, w), aut_apply(phi, w))


def test_automorphism_validation():
    with pytest.raises(ValueError):
        FreeAutomorphism(("a", "b"), {"a": W("a b"), "b": W("b")}, {"a": W("a"), "b": W("b")})


def test_aut_apply_examples():
    neg = FreeAutomorphism(("a",), {"a": W("a^-1")}, {"a": W("a^-1")})
    assert aut_apply(neg, W("a a")) == W("a^-1 a^-1")
    ident = FreeAutomorphism.identity(("a", "b"))
    assert aut_apply(ident, W("a b b^-1")) == W("a")
    conj = FreeAutomorphism.conjugation(("a", "b"), W("b"))
    assert conj.images["a"] == W("b^-1 a b")
    assert aut_apply(conj, W("a b")) == W("b^-1 a b b")


def test_inner_witness_examples():
    conj = FreeAutomorphism.conjugation(("a", "b"), W("b"))
    assert inner_witness(conj) == W("b")
    assert inner_witness(FreeAutomorphism.identity(("a", "b"))) == ()
    assert inner_witness(_nielsen(1), 6) is None


@given(st.lists(st.sampled_from(LETTERS), max_size=6))
def test_inner_witness_recovers_conjugator(h):
    h = free_reduce(tuple(h))
    phi = FreeAutomorphism.conjugation(("a", "b"), h)
    found = inner_witness(phi, 12)
    assert found is not None and len(found) <= len(h)
    for x in phi.basis:
        assert phi.images[x] == multiply(word_invert(found), (x,), found)


def test_virtually_inner_order_examples():
    neg = FreeAutomorphism(("a",), {"a": W("a^-1")}, {"a": W("a^-1")})
    assert virtually_inner_order(neg) == (2, ())
    conj = FreeAutomorphism.conjugation(("a", "b"), W("a b"))
    assert virtually_inner_order(conj) == (1, W("a b"))
    assert virtually_inner_order(_nielsen(1)) == (2, ())
    assert virtually_inner_order(_nielsen(0), k_max=5) is None


def test_virtually_inner_order_minimality():
    phi = _nielsen(1).then(FreeAutomorphism.conjugation(("a", "b"), W("a")))
    k, h = virtually_inner_order(phi)
    psi = phi.power(k)
    assert inner_witness(psi) == h
    for j in range(1, k):
        assert inner_witness(phi.power(j)) is None


def test_json_roundtrip():
    phi = _nielsen(0)
    assert FreeAutomorphism.from_json(phi.to_json()) == phi
