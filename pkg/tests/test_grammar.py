import itertools

import pytest
from hypothesis import given, settings, strategies as st

from rcf.free import parse_word as W
from rcf.fsa import Fsa, example_ambc
from rcf.grammar import (
    Cfg,
    GrammarError,
    battery_membership,
    cfg_combine,
    cfg_hom_image,
    cfg_hom_preimage,
    cfg_intersect_regular,
    cfg_reverse,
    cfg_substitute,
    cyk_member,
    cyk_parse,
    empty_grammar,
    fsa_to_cfg,
    is_cnf,
    remove_useless,
    shortest_terminal_words,
    to_cnf,
    word_grammar,
    z_grammar,
)

from conftest import language, words_upto

Z = ("a", "a^-1")


def balanced(w):
    return w.count("a") == w.count("a^-1")


def test_z_grammar_membership():
    g = z_grammar()
    assert cyk_member(g, W("a a^-1"))
    assert not cyk_member(g, W("a"))
    assert cyk_member(g, W("a^-1 a a a^-1 a^-1 a"))


def test_battery_matches_cyk_member():
    g = z_grammar()
    masks = battery_membership(g, Z, 6)
    for n, mask in enumerate(masks):
        for w, m in zip(itertools.product(Z, repeat=n), mask):
            assert bool(m) == cyk_member(g, w) == balanced(w)


def test_remove_useless_drops_unreachable():
    g = Cfg.from_text("S -> a S b | ε\nX -> a X", ("a", "b"))
    r = remove_useless(g)
    assert "X" not in r.nonterminals
    assert language(r, ("a", "b"), 6) == language(g, ("a", "b"), 6)
    assert r.size <= g.size


def test_remove_useless_keeps_z_grammar():
    assert len(remove_useless(z_grammar()).nonterminals) == 1


def test_nonproductive_start_gives_empty():
    g = remove_useless(Cfg.from_text("S -> a S", ("a",)))
    assert not cyk_member(g, ()) and not cyk_member(g, ("a",))


def test_to_cnf_examples():
    g = z_grammar()
    c = to_cnf(g)
    assert is_cnf(c)
    assert language(c, Z, 6) == {w for w in words_upto(Z, 6) if balanced(w)}
    eps = to_cnf(word_grammar(("a",), [()]))
    assert cyk_member(eps, ()) and not cyk_member(eps, ("a",))
    ab = to_cnf(word_grammar(("a", "b"), [("a", "b")]))
    assert is_cnf(ab)
    assert cyk_member(ab, W("a b"))
    assert not any(cyk_member(ab, W(x)) for x in ("a", "b", "b a"))


def test_to_cnf_idempotent_on_battery():
    g = Cfg.from_text("S -> a S b | S S | ε", ("a", "b"))
    once = to_cnf(g)
    assert language(to_cnf(once), ("a", "b"), 6) == language(once, ("a", "b"), 6) == language(g, ("a", "b"), 6)


def test_combine():
    A, B = word_grammar(("a", "b"), [("a",)]), word_grammar(("a", "b"), [("b",)])
    u = cfg_combine("union", [A, B])
    assert cyk_member(u, ("a",)) and cyk_member(u, ("b",)) and not cyk_member(u, W("a b"))
    c = cfg_combine("concat", [A, B])
    assert language(c, ("a", "b"), 4) == {("a", "b")}
    s = cfg_combine("star", [word_grammar(("a", "b"), [("a", "b")])])
    want = {w for w in words_upto(("a", "b"), 6) if len(w) % 2 == 0 and all(w[i : i + 2] == ("a", "b") for i in range(0, len(w), 2))}
    assert language(s, ("a", "b"), 6) == want
    with pytest.raises(GrammarError):
        cfg_combine("shuffle", [A])


def test_intersect_regular():
    a_then_inv = Fsa(
        ("p", "q"), Z, (("p", "a", "p"), ("p", "a^-1", "q"), ("q", "a^-1", "q")), "p", ("p", "q")
    )
    g = cfg_intersect_regular(z_grammar(), a_then_inv)
    assert cyk_member(g, W("a a a^-1 a^-1"))
    assert not cyk_member(g, W("a a^-1 a a^-1"))
    assert language(cfg_intersect_regular(z_grammar(), Fsa.empty(Z)), Z, 6) == set()
    assert language(cfg_intersect_regular(z_grammar(), Fsa.universal(Z)), Z, 6) == language(z_grammar(), Z, 6)


def test_hom_image():
    g = word_grammar(("a", "b"), [("a", "b")])
    assert language(cfg_hom_image(g, {"a": ("x",), "b": ()}, ("x",)), ("x",), 4) == {("x",)}
    ident = cfg_hom_image(z_grammar(), {"a": ("a",), "a^-1": ("a^-1",)}, Z)
    assert language(ident, Z, 6) == language(z_grammar(), Z, 6)
    dbl = cfg_hom_image(z_grammar(), {"a": ("a", "a"), "a^-1": ("a^-1", "a^-1")}, Z)
    want = set()
    for w in words_upto(Z, 4):
        if balanced(w):
            want.add(tuple(itertools.chain.from_iterable((x, x) for x in w)))
    got = {w for w in language(dbl, Z, 8)}
    assert got == want
    assert cyk_member(dbl, W("a a a a a^-1 a^-1 a^-1 a^-1"))


def test_hom_preimage():
    src = ("b", "b^-1")
    g = cfg_hom_preimage(z_grammar(), {"b": ("a", "a"), "b^-1": ("a^-1", "a^-1")}, src)
    assert cyk_member(g, W("b b^-1")) and not cyk_member(g, ("b",))
    ident = cfg_hom_preimage(z_grammar(), {"a": ("a",), "a^-1": ("a^-1",)}, Z)
    assert language(ident, Z, 6) == language(z_grammar(), Z, 6)
    nonempty = word_grammar(("a",), [("a",)])
    assert not cyk_member(cfg_hom_preimage(nonempty, {"c": ()}, ("c",)), ("c",))


def test_substitute():
    g = cfg_substitute(word_grammar(("a",), [("a",)]), "a", word_grammar(("x", "y"), [("x", "y")]))
    assert language(g, ("x", "y"), 4) == {("x", "y")}
    bab = word_grammar(("a", "b"), [("b", "a", "b")])
    m = word_grammar(("c",), [(), ("c",)])
    assert language(cfg_substitute(bab, "a", m), ("b", "c"), 4) == {("b", "b"), ("b", "c", "b")}
    same = cfg_substitute(z_grammar(), "a", word_grammar(Z, [("a",)]))
    assert language(same, Z, 6) == language(z_grammar(), Z, 6)


def test_shortest_terminal_words():
    best, M = shortest_terminal_words(z_grammar())
    assert best["S"] == () and M == 0
    c = remove_useless(to_cnf(word_grammar(("a", "b"), [("a", "b")])))
    best, M = shortest_terminal_words(c)
    assert best[c.start] == ("a", "b") and M == 2
    best, _ = shortest_terminal_words(Cfg.from_text("A -> a A | b", ("a", "b")))
    assert best["A"] == ("b",)
    with pytest.raises(GrammarError):
        shortest_terminal_words(Cfg.from_text("S -> a\nX -> X", ("a",)))


def test_shortest_words_are_derivable_and_minimal():
    g = remove_useless(to_cnf(Cfg.from_text("S -> a S b | a b b | S S", ("a", "b"))))
    best, _ = shortest_terminal_words(g)
    for A, w in best.items():
        h = g.with_start(A)
        assert cyk_member(h, w)
        assert not any(cyk_member(h, u) for u in words_upto(("a", "b"), len(w) - 1))


def test_fsa_to_cfg_ambc():
    a = example_ambc()
    g = fsa_to_cfg(a)
    got = language(g, ("a", "b", "c"), 6)
    want = {w for w in words_upto(("a", "b", "c"), 6) if w.count("b") == 1 and "c" not in w[: w.index("b")] and "a" not in w[w.index("b") :]}
    assert got == want


def test_reverse_and_parse_tree():
    g = Cfg.from_text("S -> a S b | ε", ("a", "b"))
    r = cfg_reverse(g)
    assert cyk_member(r, W("b a")) and not cyk_member(r, W("a b"))
    t = cyk_parse(g, W("a a b b"))
    assert t is not None and [n.symbol for n in t.leaves()] == list(W("a a b b"))
    assert cyk_parse(g, W("a b a")) is None


def test_json_round_trip():
    g = z_grammar()
    h = Cfg.from_json(g.to_json())
    assert h.productions == g.productions and h.start == g.start


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(Z), max_size=10).map(tuple))
def test_z_membership_property(w):
    assert cyk_member(z_grammar(), w) == balanced(w)


def test_empty_grammar():
    assert not cyk_member(empty_grammar(("a",)), ())
