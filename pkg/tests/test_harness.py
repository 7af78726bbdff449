import pytest

from rcf.conjugacy import conjugacy_class_recognizer
from rcf.free import parse_word as W
from rcf.geometry import stallings_graph
from rcf.harness import (
    CheckReport,
    OracleError,
    enumerate_and_check,
    make_oracle,
    partition_check,
    replay,
)
from rcf.vfgroup import GroupElement, build_cowp_pda, build_wp_pda, d_infinity, free_presentation


def test_wp_exact_against_normal_forms():
    p = d_infinity()
    rep = enumerate_and_check(build_wp_pda(p), make_oracle("vf-nf", group=p), 6)
    assert rep.ok and rep.total == sum(3**n for n in range(7))
    assert rep.agree == rep.total


def test_free_reduce_oracle():
    rep = enumerate_and_check(build_wp_pda(free_presentation(2)), make_oracle("free-reduce"), 5)
    assert rep.ok and rep.exhausted == rep.unchecked == 0


def test_cowp_with_negated_oracle():
    p = d_infinity()
    rep = enumerate_and_check(build_cowp_pda(p), make_oracle("vf-nf", group=p, negate=True), 5)
    assert rep.ok


def test_dinf_class_exact():
    p = d_infinity()
    g = conjugacy_class_recognizer(p, GroupElement((), "t"))
    rep = enumerate_and_check(g, make_oracle("dinf-class", element="t"), 6, alphabet=p.alphabet)
    assert rep.ok and rep.agree == rep.total


def test_failures_are_reported_and_replay():
    p = d_infinity()
    # the word-problem machine against the class of t disagrees everywhere that matters
    rep = enumerate_and_check(build_wp_pda(p), make_oracle("dinf-class", element="t"), 3)
    assert not rep.ok
    assert rep.sound_failures > 0 and rep.complete_failures > 0
    for w, r, o in rep.counterexamples:
        assert replay(build_wp_pda(p), make_oracle("dinf-class", element="t"), w) == (r, o)


def test_modes_partition_the_words():
    p = d_infinity()
    g = build_wp_pda(p)
    o = make_oracle("dinf-class", element="t")
    for mode in ("exact", "sound", "normal-complete"):
        rep = enumerate_and_check(g, o, 4, mode=mode)
        assert rep.total == sum(3**n for n in range(5))
    snd = enumerate_and_check(g, o, 4, mode="sound")
    assert snd.complete_failures == 0 and snd.unchecked > 0


def test_sound_mode_accepts_a_sub_language():
    p = d_infinity()
    o = make_oracle("vf-nf", group=p)
    # a recognizer for {ε} is sound for the word problem but not complete
    from rcf.grammar import Cfg

    eps = Cfg(p.alphabet, ("S",), (("S", ()),), "S")
    assert enumerate_and_check(eps, o, 4, mode="sound").ok
    assert not enumerate_and_check(eps, o, 4, mode="exact").ok


def test_normal_complete_only_needs_canonical_words():
    p = d_infinity()
    g = conjugacy_class_recognizer(p, GroupElement((), "t"))
    rep = enumerate_and_check(g, make_oracle("conj-search", group=p, element="t", bound=4), 5, mode="normal-complete")
    assert rep.ok and rep.unchecked > 0


def test_conj_search_exhausts_instead_of_failing():
    p = d_infinity()
    g = build_wp_pda(p)
    rep = enumerate_and_check(g, make_oracle("conj-search", group=p, element="t", bound=1), 3)
    # a miss within the bound is never a "no": only found conjugates can disagree
    assert rep.exhausted > 0 and rep.sound_failures == 0 and rep.complete_failures > 0
    assert rep.total == sum(3**n for n in range(4))


def test_graph_walk_oracle():
    s = stallings_graph(2, [W("a a"), ("b",), W("a b a^-1")])
    o = make_oracle("graph-walk", graph=s.graph)
    assert o.decide(W("a a b")) and not o.decide(W("a b"))


def test_exponent_sum_oracle():
    o = make_oracle("exponent-sum", letter="a", value=1)
    assert o.decide(W("a b a a^-1")) and not o.decide(W("b"))


def test_unknown_oracle_and_mode():
    with pytest.raises(OracleError):
        make_oracle("nope")
    with pytest.raises(OracleError):
        enumerate_and_check(build_wp_pda(d_infinity()), make_oracle("free-reduce"), 2, mode="bogus")


def test_sampling_is_deterministic():
    p = free_presentation(2)
    g = build_wp_pda(p)
    o = make_oracle("free-reduce")
    a = enumerate_and_check(g, o, 6, sample=50, seed=3)
    b = enumerate_and_check(g, o, 6, sample=50, seed=3)
    assert a.to_json() == b.to_json() and a.ok
    assert a.total < sum(4**n for n in range(7))


def test_report_json():
    rep = CheckReport("r", "o", 3, "exact", agree=4, sound_failures=1, counterexamples=[(("a",), True, False)])
    j = rep.to_json()
    assert j["format"] == "rcf.check-report/1" and j["counterexamples"] == [["a", True, False]]
    assert rep.total == 5 and not rep.ok and "FAIL" in rep.summary()


def test_partition_check():
    p = d_infinity()
    assert partition_check(build_wp_pda(p), build_cowp_pda(p), p.alphabet, 5) == []
    assert partition_check(build_wp_pda(p), build_wp_pda(p), p.alphabet, 1) != []
