from __future__ import annotations

import pytest
from hypothesis import assume, given, strategies as st

from coxflag import oracles
from coxflag.coxgraph import ColourGraph
from coxflag.errors import InvalidLetter, NotAReduct, NotDivisible, NotReduced, ParseError, UnsupportedShape
from coxflag.words import (
    Ordinal,
    absorption,
    back_and_forth,
    common_affix,
    decomposition_violations,
    divide,
    equiv,
    final_segment,
    format_word,
    is_commuting,
    is_reduced,
    normal_form,
    parse_word,
    preceq,
    rank,
    reduce_concat,
    reduce_pair_flanked,
    right_absorbed,
    satisfies_E,
    segments,
    sr,
    sr_support,
    symmetric_decomposition,
    triangle_candidates,
    triangle_decompose,
    triangle_violations,
    wobbling,
)

from conftest import GRAPHS, W, graph_names, reduced_words, words


# -- text -----------------------------------------------------------------


def test_parse_and_format(P3):
    assert parse_word(P3, "{0,1}.{2}") == (0b011, 0b100)
    assert parse_word(P3, "1") == ()
    assert format_word(P3, ()) == "1"
    with pytest.raises(InvalidLetter):
        parse_word(P3, "{0,2}")
    with pytest.raises(ParseError):
        parse_word(P3, "{0}.")
    with pytest.raises(ParseError):
        parse_word(P3, "{0")


@given(graph_names, st.data())
def test_format_roundtrip(name, data):
    g = GRAPHS[name]
    u = data.draw(words(g))
    assert parse_word(g, format_word(g, u)) == u


# -- normal form and reduction ---------------------------------------------


def test_normal_form_examples(P3):
    assert normal_form(P3, W(P3, "{2}.{0}")) == W(P3, "{0}.{2}")
    assert normal_form(P3, W(P3, "{1}.{0}")) == W(P3, "{1}.{0}")
    assert normal_form(P3, ()) == ()


def test_is_reduced_examples(P3):
    assert not is_reduced(P3, W(P3, "{0}.{2}.{0}"))
    assert is_reduced(P3, W(P3, "{0}.{1}.{0}"))
    assert is_reduced(P3, ())


def test_reduce_concat_examples(P3):
    assert reduce_concat(P3, W(P3, "{0}"), W(P3, "{0}")) == W(P3, "{0}")
    assert reduce_concat(P3, W(P3, "{0,1}.{0}")) == W(P3, "{0,1}")
    assert reduce_concat(P3, W(P3, "{1}.{0}"), W(P3, "{2}")) == W(P3, "{1}.{0}.{2}")


@given(graph_names, st.data())
def test_normal_form_is_class_minimum(name, data):
    g = GRAPHS[name]
    u = data.draw(words(g, 5))
    cls = oracles.commutation_class(g, u)
    nf = normal_form(g, u)
    assert nf in cls
    assert all(normal_form(g, v) == nf for v in cls)
    assert nf == oracles.canon(g, u)


@given(graph_names, st.data())
def test_reduction_is_confluent(name, data):
    g = GRAPHS[name]
    u = data.draw(words(g, 6))
    found = oracles.all_reducts(g, u)
    assert found == {oracles.canon(g, reduce_concat(g, u))}
    assert is_reduced(g, reduce_concat(g, u)) == oracles.is_reduced_brute(g, reduce_concat(g, u))


@given(graph_names, st.data())
def test_is_reduced_matches_brute(name, data):
    g = GRAPHS[name]
    u = data.draw(words(g, 5))
    assert is_reduced(g, u) == oracles.is_reduced_brute(g, u)


# -- order --------------------------------------------------------------------


def test_preceq_examples(P3):
    assert preceq(P3, W(P3, "{0}"), W(P3, "{0,1}"))
    assert not preceq(P3, W(P3, "{0,1}"), W(P3, "{0}"))
    u = W(P3, "{0,1}.{2}")
    assert preceq(P3, u, u)


@given(graph_names, st.data())
def test_preceq_matches_brute(name, data):
    g = GRAPHS[name]
    v = data.draw(reduced_words(g, 3))
    u = data.draw(reduced_words(g, 3))
    assert preceq(g, u, v) == oracles.preceq_brute(g, u, v)


@given(graph_names, st.data())
def test_reduct_is_below(name, data):
    g = GRAPHS[name]
    u = data.draw(words(g, 5))
    assume(is_reduced(g, u))
    # reducing a splitting never climbs above the original
    split = []
    for s in u:
        inner = [t for t in g.enumerate_letters() if t & ~s == 0]
        split.extend(data.draw(st.lists(st.sampled_from(inner), max_size=2)) if inner else [s])
    assert preceq(g, reduce_concat(g, split), u)


# -- absorption and segments --------------------------------------------------


def test_absorption_examples(P3):
    assert absorption(P3, W(P3, "{0}"), W(P3, "{1}.{0}"), "right")
    assert absorption(P3, W(P3, "{2}"), W(P3, "{1,2}.{0}"), "right")
    assert not absorption(P3, W(P3, "{1}"), W(P3, "{1,2}.{0}"), "right")
    with pytest.raises(NotReduced):
        absorption(P3, W(P3, "{0}"), W(P3, "{0}.{0}"))


@given(graph_names, st.data())
def test_right_absorption_means_reduct_unchanged(name, data):
    g = GRAPHS[name]
    u = data.draw(reduced_words(g, 4))
    t = data.draw(reduced_words(g, 2))
    assert right_absorbed(g, t, u) == equiv(g, reduce_concat(g, u, t), u)


def test_segments_examples(P3):
    s = segments(P3, W(P3, "{1}.{0}"))
    assert s.ends == W(P3, "{0}") and s.final_segment == W(P3, "{0}") and s.beginnings == W(P3, "{1}")
    s = segments(P3, W(P3, "{0}.{2}"))
    assert s.beginnings == s.ends == W(P3, "{0}.{2}")
    s = segments(P3, ())
    assert s.beginnings == s.ends == s.initial_segment == s.final_segment == ()


def test_common_affix_examples(P3):
    assert common_affix(P3, W(P3, "{0}.{1}"), W(P3, "{0}.{2}"), "initial") == W(P3, "{0}")
    assert common_affix(P3, W(P3, "{0}"), W(P3, "{1}"), "initial") == ()
    u = W(P3, "{1}.{0}.{2}")
    assert common_affix(P3, u, u, "initial") == normal_form(P3, u)
    assert common_affix(P3, u, u, "final") == normal_form(P3, u)


# -- symmetric decomposition ---------------------------------------------------


@pytest.mark.parametrize(
    "u, v, parts, reduct",
    [
        ("{0}", "{0}.{1}", ("1", "1", "{0}", "1", "{1}"), "{0}.{1}"),
        ("{1}.{0}", "{2}", ("{1}.{0}", "1", "1", "1", "{2}"), "{1}.{0}.{2}"),
        ("{0}", "{0,1}", ("1", "{0}", "1", "1", "{0,1}"), "{0,1}"),
    ],
)
def test_symmetric_decomposition_examples(P3, u, v, parts, reduct):
    d = symmetric_decomposition(P3, W(P3, u), W(P3, v))
    got = tuple(format_word(P3, p) for p in (d.u1, d.uPrime, d.w, d.vPrime, d.v1))
    assert got == parts
    assert reduce_concat(P3, W(P3, u), W(P3, v)) == W(P3, reduct)


@given(graph_names, st.data())
def test_symmetric_decomposition_conditions(name, data):
    g = GRAPHS[name]
    u = data.draw(reduced_words(g, 4))
    v = data.draw(reduced_words(g, 4))
    d = symmetric_decomposition(g, u, v)
    assert decomposition_violations(g, u, v, d) == []


def test_decomposition_unique_by_enumeration(P3):
    pool = oracles.reduced_words(P3, 3)
    for u in pool:
        for v in pool:
            if len(u) + len(v) > 4:
                continue
            d = symmetric_decomposition(P3, u, v)
            valid = {
                c for c in oracles.decomposition_candidates(P3, u, v)
                if not decomposition_violations(P3, u, v, type(d)(*c))
            }
            assert valid == {tuple(oracles.canon(P3, p) for p in (d.u1, d.uPrime, d.w, d.vPrime, d.v1))}


# -- division, sr, wobbling ---------------------------------------------------


def test_divide_examples(P3):
    assert divide(P3, W(P3, "{0,1,2}"), W(P3, "{0}")) == W(P3, "{0,1,2}")
    assert divide(P3, W(P3, "{0}"), W(P3, "{0}")) == W(P3, "{0}")
    with pytest.raises(NotDivisible):
        divide(P3, W(P3, "{1}"), W(P3, "{0}"))


@pytest.mark.parametrize("v, u", [("{0,1,2}", "{0}"), ("{0}", "{0}"), ("{0,1}.{2}", "{1}"), ("{1}.{0}.{2}", "{0}.{2}")])
def test_divide_contract(P3, v, u):
    v, u = W(P3, v), W(P3, u)
    q = divide(P3, v, u)
    for x in oracles.reduced_words(P3, 3):
        assert preceq(P3, reduce_concat(P3, x, u), v) == preceq(P3, x, q)


def test_sr_examples(P3, P4):
    assert sr_support(P4, W(P4, "{1,2}.{0}")) == 0b0101
    assert sr_support(P3, W(P3, "{0}.{2}")) == 0b101
    assert sr(P3, ()) == ()
    assert sr(P4, W(P4, "{1,2}.{0}")) == W(P4, "{0}.{2}")


@given(graph_names, st.data())
def test_sr_duality(name, data):
    g = GRAPHS[name]
    u = data.draw(reduced_words(g, 4))
    x = data.draw(reduced_words(g, 3))
    s = sr(g, u)
    assert is_commuting(g, s)
    assert preceq(g, final_segment(g, u), s)
    assert right_absorbed(g, x, u) == preceq(g, x, s)


def test_wobbling_examples(P3, P4):
    assert wobbling(P4, W(P4, "{1,2}.{0}"), W(P4, "{2,3}")) == 0b0100
    assert wobbling(P3, W(P3, "{0}"), W(P3, "{1}")) == 0
    assert wobbling(P3, W(P3, "{0}"), W(P3, "{1}.{0}")) == 0


def test_back_and_forth_examples(P3):
    assert back_and_forth(P3, W(P3, "{1}.{0}")) == W(P3, "{1}.{0}.{1}")
    assert back_and_forth(P3, W(P3, "{0}.{2}")) == W(P3, "{0}.{2}")
    assert back_and_forth(P3, ()) == ()


# -- property E and ranks -----------------------------------------------------


def test_satisfies_E_examples(P3):
    assert satisfies_E(P3, W(P3, "{0,1}"), 0b011, 1)
    assert not satisfies_E(P3, W(P3, "{0}.{1}"), 0b011, 2)
    assert satisfies_E(P3, W(P3, "{0}.{1}"), 0b011, 1)


@given(graph_names, st.data())
def test_E1_means_full_support(name, data):
    g = GRAPHS[name]
    w = data.draw(reduced_words(g, 4))
    s = data.draw(st.sampled_from(g.enumerate_letters()))
    union = 0
    for t in w:
        union |= t
    assert satisfies_E(g, w, s, 1) == (union == s)


@given(graph_names, st.data())
def test_E_blocks_force_length(name, data):
    g = GRAPHS[name]
    n = data.draw(st.integers(min_value=1, max_value=3))
    base = data.draw(reduced_words(g, 3))
    assume(len(base) == n)
    blocks = []
    for s in base:
        inner = [t for t in g.enumerate_letters() if t & ~s == 0]
        w = reduce_concat(g, data.draw(st.lists(st.sampled_from(inner), min_size=1, max_size=3)))
        blocks.append(w if satisfies_E(g, w, s, n) else (s,))
        assert satisfies_E(g, blocks[-1], s, n)
    for red in oracles.all_reducts(g, tuple(x for b in blocks for x in b)):
        assert len(red) >= n


def test_rank_examples(P3, P4):
    assert rank(P3, W(P3, "{0,1}.{1,2}.{0,1}")) == Ordinal.omega_power(1, 3)
    assert str(rank(P3, W(P3, "{0,1}.{1,2}.{0,1}"))) == "w*3"
    assert rank(P3, W(P3, "{0}.{1}.{0}")) == Ordinal.finite(3)
    assert rank(P3, ()) == Ordinal()
    assert str(rank(P4, W(P4, "{0,1,2}.{1,2,3}"))) == "w^2*2"


def test_rank_refuses_unsorted(P3):
    with pytest.raises(UnsupportedShape):
        rank(P3, W(P3, "{0}.{1,2}"))
    with pytest.raises(NotReduced):
        rank(P3, W(P3, "{0}.{0}"))


@pytest.mark.parametrize("k", range(6))
def test_singleton_rank_matches_foundation(P3, k):
    u = (W(P3, "{0}.{1}.{2}.{1}.{0}"))[:k]
    assert rank(P3, u) == Ordinal.finite(k) == Ordinal.finite(oracles.singleton_foundation_rank(P3, u))


def test_ordinal_render():
    assert str(Ordinal()) == "0"
    assert str(Ordinal.finite(4)) == "4"
    assert str(Ordinal.omega_power(2) + Ordinal.omega_power(1, 2) + Ordinal.finite(3)) == "w^2+w*2+3"
    assert Ordinal.finite(5) < Ordinal.omega_power(1)
    assert Ordinal.finite(3) + Ordinal.omega_power(1) == Ordinal.omega_power(1)


@given(graph_names, st.data())
def test_rank_invariant_under_commutation(name, data):
    g = GRAPHS[name]
    u = data.draw(reduced_words(g, 4))
    try:
        r = rank(g, u)
    except UnsupportedShape:
        return
    for v in oracles.commutation_class(g, u):
        assert rank(g, v) == r


# -- triangles and pair reduction -------------------------------------------


def _fmt(g, d):
    return {k: format_word(g, getattr(d, k)) for k in ("u1", "v1", "c", "x", "alpha", "beta")}


def test_triangle_examples(P3):
    d = triangle_decompose(P3, W(P3, "{0}"), W(P3, "{0}"), ())
    assert _fmt(P3, d) == {"u1": "1", "v1": "1", "c": "{0}", "x": "1", "alpha": "1", "beta": "1"}
    d = triangle_decompose(P3, W(P3, "{0,1}"), W(P3, "{0,1}"), W(P3, "{0}.{1}"))
    assert _fmt(P3, d) == {"u1": "1", "v1": "1", "c": "{0,1}", "x": "{0}.{1}", "alpha": "1", "beta": "1"}
    d = triangle_decompose(P3, W(P3, "{1}.{0}"), W(P3, "{2}"), W(P3, "{1}.{0}.{2}"))
    assert _fmt(P3, d) == {"u1": "{1}.{0}", "v1": "{2}", "c": "1", "x": "1", "alpha": "1", "beta": "1"}
    with pytest.raises(NotAReduct):
        triangle_decompose(P3, W(P3, "{0}"), W(P3, "{2}"), W(P3, "{1}"))


@given(graph_names, st.data())
def test_triangle_on_reducts(name, data):
    g = GRAPHS[name]
    u = data.draw(reduced_words(g, 3))
    v = data.draw(reduced_words(g, 3))
    w = reduce_concat(g, u, v)
    d = triangle_decompose(g, u, v, w)
    assert triangle_violations(g, u, v, w, d) == []
    # every candidate re-composes w
    for cand in triangle_candidates(g, u, v, w):
        assert equiv(g, w, cand.u1 + cand.x + cand.v1)


def test_pair_reduction_examples(P3):
    r = reduce_pair_flanked(P3, W(P3, "{0}"), (), W(P3, "{0}"))
    assert r.v1 == W(P3, "{0}") and r.v2 == W(P3, "{0}") and r.u1 == r.u2 == () and r.x2 == ()
    r = reduce_pair_flanked(P3, W(P3, "{1}"), W(P3, "{0}"), W(P3, "{2}"))
    assert (r.u1, r.u2, r.v1, r.v2, r.x1, r.x2) == (W(P3, "{1}"), W(P3, "{2}"), (), (), (), ())
    r = reduce_pair_flanked(P3, W(P3, "{0,1}"), (), W(P3, "{0,1}"))
    assert r.v1 == r.v2 == W(P3, "{0,1}") and r.u1 == r.u2 == () and r.x2 == ()


@given(graph_names, st.data())
def test_pair_reduction_witness(name, data):
    g = GRAPHS[name]
    w1 = data.draw(reduced_words(g, 3))
    w2 = data.draw(reduced_words(g, 3))
    mid = data.draw(reduced_words(g, 2))
    r = reduce_pair_flanked(g, w1, mid, w2)
    assert equiv(g, w1, r.u1 + r.v1) and equiv(g, w2, r.v2 + r.u2)
    assert preceq(g, r.x1, r.v1) and preceq(g, r.x2, r.v2)
    assert all(g.commute(a, b) for a in r.v1 + r.v2 for b in mid)
    s1 = s2 = 0
    for a in w1:
        s1 |= a
    for b in w2:
        s2 |= b
    assert all(a & ~(s1 & s2) == 0 for a in r.v1 + r.v2)
    joined = r.w1_star + tuple(mid) + r.w2_star
    for i in range(len(r.w1_star)):
        for j in range(len(r.w2_star)):
            a, b = joined[i], joined[len(r.w1_star) + len(mid) + j]
            between = joined[i + 1 : len(r.w1_star) + len(mid) + j]
            assert not (a & ~b == 0 and all(g.commute(a, t) for t in between))
            assert not (b & ~a == 0 and all(g.commute(b, t) for t in between))
