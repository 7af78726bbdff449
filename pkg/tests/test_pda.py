import itertools

import pytest

from rcf.free import parse_word as W
from rcf.fsa import Fsa, example_ambc, word_fsa
from rcf.grammar import Cfg, cyk_member, fsa_to_cfg, word_grammar, z_grammar
from rcf.pda import (
    BOTTOM,
    Pda,
    PdaError,
    T,
    cfg_to_pda,
    cfl_left_quotient_regular,
    cfl_right_quotient_regular,
    check_bottom_discipline,
    example_z_pda,
    normalize,
    pda_accepts,
    pda_empty_stack,
    pda_hom_preimage,
    pda_simulate,
    pda_to_cfg,
)

from conftest import language, words_upto

Z = ("a", "a^-1")
AB = ("a", "b")


def anbn_residual():
    """Accepts aⁿbⁿ (n ≥ 1) but may leave an extra X under the counters."""
    B = BOTTOM
    ts = (
        T("p", ("a",), (B,), "p", (B, "X", "A")),
        T("p", ("a",), ("A",), "p", ("A", "A")),
        T("p", ("b",), ("A",), "q", ()),
        T("q", ("b",), ("A",), "q", ()),
    )
    return Pda(("p", "q", "f"), AB, (B, "A", "X"), B, ts + (T("q", (), ("X",), "f", ("X",)),), "p", ("f",))


def anbn(w):
    n = len(w) // 2
    return n >= 1 and w == ("a",) * n + ("b",) * n


def all_discipline_ok(p):
    for t in p.transitions:
        check_bottom_discipline(t, p.bottom)
    return True


def test_example_z_pda():
    p = example_z_pda()
    assert pda_accepts(p, W("a a^-1"))
    assert not pda_accepts(p, W("a"))
    assert pda_accepts(p, W("a^-1 a a a^-1"))


def test_simulation_agrees_with_grammar():
    p = example_z_pda()
    for w in words_upto(Z, 6):
        assert pda_simulate(p, w).accepted == pda_accepts(p, w)


def test_empty_stack_conversion():
    p = anbn_residual()
    e = pda_empty_stack(p)
    assert all_discipline_ok(e)
    for w in words_upto(AB, 8):
        r = pda_simulate(e, w)
        assert r.accepted == anbn(w) == pda_simulate(p, w).accepted
        if r.accepted:
            assert set(r.accepting_stacks) == {(BOTTOM,)}
    # an already empty-stack machine and an empty machine
    z = example_z_pda()
    assert language(pda_empty_stack(z), Z, 6) == language(z, Z, 6)
    dead = Pda(("s", "f"), Z, (BOTTOM,), BOTTOM, (), "s", ("f",))
    assert language(pda_empty_stack(dead), Z, 4) == set()


def test_pda_to_cfg():
    assert language(pda_to_cfg(example_z_pda()), Z, 6) == language(z_grammar(), Z, 6)
    dead = Pda(("s", "f"), Z, (BOTTOM,), BOTTOM, (), "s", ("f",))
    assert language(pda_to_cfg(dead), Z, 4) == set()
    one = Pda(("s", "f"), Z, (BOTTOM,), BOTTOM, (T("s", ("a",), (BOTTOM,), "f", (BOTTOM,)),), "s", ("f",))
    assert language(pda_to_cfg(one), Z, 4) == {("a",)}


def test_cfg_to_pda():
    # no left recursion, so bounded simulation is a decision procedure here
    g = Cfg.from_text("S -> a S a^-1 S | a^-1 S a S | ε", Z)
    z = cfg_to_pda(g)
    assert all_discipline_ok(z)
    for w in words_upto(Z, 6):
        r = pda_simulate(z, w)
        assert not r.exhausted or r.accepted
        assert r.accepted == cyk_member(z_grammar(), w)
    assert language(cfg_to_pda(z_grammar()), Z, 6) == language(z_grammar(), Z, 6)
    e = cfg_to_pda(word_grammar(Z, [()]))
    assert language(e, Z, 4) == {()}
    assert language(pda_to_cfg(cfg_to_pda(z_grammar())), Z, 6) == language(z_grammar(), Z, 6)


def test_normalize_preserves_language():
    p = anbn_residual()
    n = normalize(p)
    assert all(len(t.read) <= 1 and len(t.pop) <= 1 for t in n.transitions)
    assert all_discipline_ok(n)
    for w in words_upto(AB, 6):
        assert pda_simulate(n, w).accepted == anbn(w)


def test_bottom_discipline_rejected():
    with pytest.raises(PdaError):
        Pda(("s",), Z, (BOTTOM, "x"), BOTTOM, (T("s", (), (BOTTOM,), "s", ("x",)),), "s", ("s",))
    with pytest.raises(PdaError):
        Pda(("s",), Z, (BOTTOM, "x"), BOTTOM, (T("s", (), ("x",), "s", ("x", BOTTOM)),), "s", ("s",))


def brute_right_quotient(g_words, a_words, n):
    return {w for w in words_upto(AB, n) if any(w + u in g_words for u in a_words)}


def test_right_quotient_examples():
    g = word_grammar(AB, [("a", "b")])
    assert language(cfl_right_quotient_regular(g, word_fsa(AB, ("b",))), AB, 4) == {("a",)}
    assert language(cfl_right_quotient_regular(z_grammar(), word_fsa(Z, ())), Z, 6) == language(z_grammar(), Z, 6)
    q = cfl_right_quotient_regular(z_grammar(), word_fsa(Z, ("a^-1",)))
    assert cyk_member(q, ("a",)) and cyk_member(q, W("a a a^-1")) and not cyk_member(q, ())


def test_quotients_against_brute_force():
    g = Cfg.from_text("S -> a S b | ε", AB)
    # a finite set, so the brute force below sees all of it
    a = Fsa.from_words(AB, [("b",), ("b", "b"), ("a", "b"), ("b", "a")])
    a_words = set(a.words(4))
    g_words = language(g, AB, 9)
    right = cfl_right_quotient_regular(g, a)
    assert language(right, AB, 5) == brute_right_quotient(g_words, a_words, 5)
    left = cfl_left_quotient_regular(g, a)
    want = {w for w in words_upto(AB, 5) if any(u + w in g_words for u in a_words)}
    assert language(left, AB, 5) == want


def test_hom_preimage_machine():
    p = pda_hom_preimage(example_z_pda(), {"b": ("a", "a"), "c": ("a^-1",)}, ("b", "c"))
    for w in words_upto(("b", "c"), 6):
        assert pda_accepts(p, w) == (2 * w.count("b") == w.count("c"))


def test_ambc_language():
    g = fsa_to_cfg(example_ambc())
    assert cyk_member(g, W("a a b c")) and cyk_member(g, ("b",))
    assert not cyk_member(g, W("a c")) and not cyk_member(g, W("b b"))


def test_json_round_trip():
    p = example_z_pda()
    q = Pda.from_json(p.to_json())
    assert language(q, Z, 5) == language(p, Z, 5)


def test_determinism_flag():
    # the final ε-move competes with the reading moves on ⊥
    assert not example_z_pda().is_deterministic()
    p = Pda(("s",), Z, (BOTTOM,), BOTTOM, (T("s", ("a",), (BOTTOM,), "s", (BOTTOM,)),), "s", ("s",))
    assert p.is_deterministic()
