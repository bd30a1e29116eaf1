from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from coxflag import oracles
from coxflag.chamber import ChamberSystem, generate_quasi_building
from coxflag.coxgraph import ColourGraph
from coxflag.errors import NotAFlag, NotAGammaSpace, NotAPermutation, NotEquivalent, NotNice, NotSimplyConnected
from coxflag.gspace import (
    FlagPath,
    GammaSpace,
    base_point,
    canonical_base,
    chamber_roundtrip,
    check_P_u,
    difference,
    find_reduced_path,
    flag_word,
    generate_space,
    is_nice,
    is_reduced_path,
    is_simply_connected,
    nice_hull,
    op_letter,
    path_vertices,
    permute_path,
    realize_type,
    restrict_residue,
    simple_extension,
    space_roundtrip,
    specialise,
    to_chambers,
    to_space,
    validate_space,
)
from coxflag.verify import four_cycle_space
from coxflag.words import equiv, format_word, normal_form

from conftest import GRAPHS, W


@pytest.fixture
def one(P3):
    return GammaSpace.single_flag(P3)


def _tower(M, G, letters):
    """Apply extensions in order, each at the previous new flag."""
    cur = G
    out = [G]
    for s in letters:
        M, cur = simple_extension(M, cur, s)
        out.append(cur)
    return M, out


# -- validation and the chamber correspondence --------------------------------


def test_validate(one, K3):
    assert validate_space(one).valid
    two = GammaSpace.build(K3, [0, 1, 2, 0, 1, 2], [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 4)])
    rep = validate_space(two)
    assert not rep.valid and rep.loose_edges == [(0, 4)]
    assert validate_space(generate_space(K3, 6, seed=2)).valid


def test_bad_colour_edge(P3):
    M = GammaSpace.build(P3, [0, 1, 2], [(0, 1), (1, 2), (0, 2)])
    assert validate_space(M).bad_edges == [(0, 2)]
    with pytest.raises(NotAGammaSpace):
        to_chambers(M)


def test_to_space_and_back(P3, one):
    assert len(to_space(ChamberSystem.singleton(P3)).flags()) == 1
    assert to_chambers(one).size == 1
    X = generate_quasi_building(P3, radius=2, fanout=2, seed=3)
    M = to_space(X)
    assert validate_space(M).valid
    assert len(M.flags()) == X.size == to_chambers(M).size
    assert chamber_roundtrip(X) and space_roundtrip(M)


@pytest.mark.parametrize("name", ["P3", "P4", "K3"])
def test_roundtrips_on_towers(name):
    g = GRAPHS[name]
    for seed in range(5):
        M = generate_space(g, 6, seed=seed)
        assert space_roundtrip(M)
        assert chamber_roundtrip(to_chambers(M))


def test_json(P3):
    M = generate_space(P3, 5, seed=1)
    N = GammaSpace.from_json(P3, M.to_json())
    assert N.to_json() == M.to_json()
    F = M.flags()[-1]
    assert M.flag_from_json(M.flag_to_json(F)) == F


# -- flag relations -------------------------------------------------------------


def test_difference(P3):
    M = GammaSpace.single_flag(P3)
    F = (0, 1, 2)
    assert difference(M, F, F) == (0, ())
    assert difference(M, F, (3, 1, 4)) == (0b101, W(P3, "{0}.{2}"))
    assert difference(M, F, (3, 4, 2)) == (0b011, W(P3, "{0,1}"))


def test_op_letter(P3, one):
    G = one.flags()[0]
    assert not op_letter(one, G, G, 0b001)
    M, F = simple_extension(one, G, 0b011)
    assert op_letter(M, F, G, 0b011)
    # the same difference reached by two singleton steps is split
    N, (G0, H, F2) = _tower(one, G, [0b010, 0b001])
    assert not op_letter(N, F2, G0, 0b011)
    with pytest.raises(NotEquivalent):
        op_letter(N, F2, G0, 0b001)


def test_find_reduced_path(P3, one):
    G = one.flags()[0]
    assert find_reduced_path(one, G, G) == FlagPath((G,), ())
    M, F = simple_extension(one, G, 0b011)
    assert find_reduced_path(M, F, G).word == W(P3, "{0,1}")
    S = to_space(generate_quasi_building(P3, radius=2, fanout=2, seed=0))
    flags = S.flags()
    for F, H in itertools.product(flags[:6], flags):
        P = find_reduced_path(S, F, H)
        assert is_reduced_path(S, P)
        assert all(bin(s).count("1") == 1 for s in P.word)


def test_permute_path(P3):
    M, (G, A, B) = _tower(GammaSpace.single_flag(P3), GammaSpace.single_flag(P3).flags()[0], [0b001, 0b100])
    P = find_reduced_path(M, B, G)
    assert permute_path(M, P, P.word) == P
    other = tuple(reversed(P.word))
    Q = permute_path(M, P, other)
    assert Q.word == other and Q.start == P.start and Q.end == P.end
    assert Q.flags[1] != P.flags[1] and is_reduced_path(M, Q)
    N, (G2, _, _, F2) = _tower(GammaSpace.single_flag(P3), GammaSpace.single_flag(P3).flags()[0], [0b001, 0b010, 0b001])
    R = find_reduced_path(N, F2, G2)
    with pytest.raises(NotAPermutation):
        permute_path(N, R, R.word[1:] + R.word[:1])


# -- simple connectedness ---------------------------------------------------------


def test_sc_single_and_cycle(one):
    assert is_simply_connected(one).simply_connected
    res = is_simply_connected(four_cycle_space())
    assert not res.simply_connected
    assert format_word(ColourGraph.complete(2), res.certificate.word) == "{0}.{1}.{0}.{1}"
    assert len(res.certificate) == 4 and res.certificate.start == res.certificate.end
    with pytest.raises(NotSimplyConnected):
        nice_hull(four_cycle_space(), [0])


def test_elementary_checker_agrees(one):
    assert is_simply_connected(one, elementary=2).elementary
    res = is_simply_connected(four_cycle_space(), elementary=4)
    assert res.elementary is False and len(res.elementary_certificate) == 4


@pytest.mark.parametrize("name", ["P3", "P4", "K3"])
def test_pipeline_spaces_sc(name):
    g = GRAPHS[name]
    for radius in (1, 2):
        M = to_space(generate_quasi_building(g, radius=radius, fanout=2, seed=radius))
        assert is_simply_connected(M).simply_connected


# -- simple extensions ------------------------------------------------------------


def test_simple_extension_examples(one):
    G = one.flags()[0]
    M, F = simple_extension(one, G, 0b001)
    assert len(M.flags()) == 2 and F[1:] == G[1:] and F[0] != G[0]
    M, F = simple_extension(one, G, 0b011)
    assert len(M.flags()) == 2 and F[2] == G[2] and F[0] != G[0] and F[1] != G[1]
    with pytest.raises(NotAFlag):
        simple_extension(one, (0, 0, 0), 1)


@settings(max_examples=40)
@given(st.sampled_from(["P3", "P4", "K3", "C4"]), st.integers(0, 10_000), st.data())
def test_extension_census(name, seed, data):
    g = GRAPHS[name]
    A = generate_space(g, 4, seed=seed, verify=False)
    F = data.draw(st.sampled_from(A.flags()))
    s = data.draw(st.sampled_from(g.enumerate_letters()))
    M, star = simple_extension(A, F, s)
    assert validate_space(M).valid
    new = len(M.flags()) - len(A.flags())
    assert new == len(A.group_of(F, g.full & ~g.boundary(s)))
    assert op_letter(M, star, F, s)
    assert is_nice(M, range(A.size))


# -- niceness, hulls, base-points --------------------------------------------------


def test_is_nice_examples(P3, one):
    G = one.flags()[0]
    M, F = simple_extension(one, G, 0b011)
    assert is_nice(M, range(M.size))
    assert is_nice(M, range(one.size))
    N, (G0, H2, H1, F2) = _tower(one, G, [0b001, 0b010, 0b001])
    D = set(F2) | set(G0)
    assert not is_nice(N, D)
    assert is_nice(N, D | set(H1) | set(H2))


def test_nice_hull_examples(P3):
    M = generate_space(P3, 6, seed=5)
    assert len(nice_hull(M, [])) == 3
    F = M.flags()[-1]
    assert nice_hull(M, F) == set(F)
    hull = nice_hull(M, [4])
    assert 4 in hull and len(hull) == P3.size


def test_specialise_examples(P3, one):
    M = generate_space(P3, 4, seed=1)
    assert specialise(M, range(M.size)) == {v: v for v in range(M.size)}
    G = one.flags()[0]
    N, F = simple_extension(one, G, 0b011)
    f = specialise(N, range(one.size))
    assert all(f[F[c]] == G[c] for c in range(3))
    T, chain = _tower(one, G, [0b100, 0b011, 0b001])
    f = specialise(T, range(one.size))
    assert sorted(set(f.values())) == list(range(one.size))
    assert all(f[v] == G[T.colour[v]] for v in range(T.size))


def test_specialise_needs_nice(one):
    G = one.flags()[0]
    N, (G0, H2, H1, F2) = _tower(one, G, [0b001, 0b010, 0b001])
    with pytest.raises(NotNice):
        specialise(N, set(F2) | set(G0))


def test_base_point_examples(P3, one):
    G = one.flags()[0]
    assert base_point(one, G, G) == (G, ())
    M, F = simple_extension(one, G, 0b011)
    assert base_point(M, F, range(one.size)) == (G, W(P3, "{0,1}"))
    u = W(P3, "{0,1}.{2}")
    T, F2 = realize_type(one, G, u)
    assert base_point(T, F2, range(one.size)) == (G, normal_form(P3, u))


def test_canonical_base_examples(P3, P4):
    G4 = (10, 11, 12, 13)
    assert canonical_base(P4, G4, W(P4, "{1,2}.{0}")) == [11, 13]
    assert canonical_base(P3, (0, 1, 2), W(P3, "{0}.{2}")) == [1]
    assert canonical_base(P3, (0, 1, 2), ()) == [0, 1, 2]


def test_realize_type(P3, one):
    G = one.flags()[0]
    assert realize_type(one, G, ()) == (one, G)
    M, F = realize_type(one, G, W(P3, "{0}"))
    assert len(M.flags()) == 2 and flag_word(M, F, G) == W(P3, "{0}")
    u = W(P3, "{0,1}.{2}")
    M, F = realize_type(one, G, u)
    P = find_reduced_path(M, F, G)
    assert equiv(P3, P.word, u) and is_reduced_path(M, P)


def test_check_P_u(P3, one):
    G = one.flags()[0]
    assert check_P_u(one, G, G, ())
    M, F = simple_extension(one, G, 0b011)
    assert check_P_u(M, F, G, W(P3, "{0,1}"))
    assert not check_P_u(M, F, G, W(P3, "{0}.{1}"))
    assert not check_P_u(M, F, G, W(P3, "{1}.{0}"))


@pytest.mark.parametrize("seed", range(4))
def test_check_P_u_matches_order(P3, seed):
    from coxflag.words import preceq

    M = generate_space(P3, 5, seed=seed)
    flags = M.flags()
    for F, G in itertools.product(flags, repeat=2):
        w = flag_word(M, F, G)
        for u in oracles.reduced_words(P3, 2):
            assert check_P_u(M, F, G, u) == preceq(P3, w, u)


def test_restrict_residue(P3):
    M = to_space(generate_quasi_building(P3, radius=2, fanout=2, seed=7))
    F = M.flags()[0]
    whole = restrict_residue(M, F, 0b111)
    assert len(whole.flags()) == len(M.flags())
    sub = restrict_residue(M, F, 0b011)
    assert validate_space(sub).valid and is_simply_connected(sub).simply_connected
    # the two-colour graph is a forest
    assert len(sub.edges()) == sub.size - len(_components(sub))
    single = restrict_residue(M, F, 0b100)
    assert single.graph.size == 1 and len(single.flags()) == len(M.group_of(F, 0b100))


def _components(M):
    seen, comps = set(), []
    for v in range(M.size):
        if v in seen:
            continue
        stack, comp = [v], set()
        while stack:
            a = stack.pop()
            if a in comp:
                continue
            comp.add(a)
            stack.extend(b for b in range(M.size) if M.nbr[a] >> b & 1)
        seen |= comp
        comps.append(comp)
    return comps


# -- structural properties on generated spaces ---------------------------------------


@pytest.mark.parametrize("name", ["P3", "P4", "K3"])
def test_word_uniqueness(name):
    g = GRAPHS[name]
    for seed in range(4):
        M = generate_space(g, 6, seed=seed)
        for F, G in itertools.product(M.flags(), repeat=2):
            P = find_reduced_path(M, F, G)
            assert is_reduced_path(M, P)
            assert equiv(g, P.word, flag_word(M, F, G))


@pytest.mark.parametrize("name", ["P3", "K3"])
def test_flag_census_on_paths(name):
    g = GRAPHS[name]
    for seed in range(3):
        M = generate_space(g, 6, seed=seed)
        flags = M.flags()
        for F, G in itertools.product(flags, repeat=2):
            P = find_reduced_path(M, F, G)
            verts = path_vertices(P)
            seen = set()
            for order in oracles.commutation_class(g, P.word):
                seen.update(permute_path(M, P, order).flags)
            inside = [K for K in flags if set(K) <= verts]
            assert set(inside) <= seen
            # each such flag is pinned down by its word to the end
            ends = [flag_word(M, K, G) for K in inside]
            assert len(set(ends)) == len(ends)


def test_hull_rigidity_sample(P3):
    from coxflag.verify import hull_is_rigid

    M = generate_space(P3, 7, seed=11)
    for A in ([0], [1, 5], [2, 6, 8]):
        A = [a for a in A if a < M.size]
        assert hull_is_rigid(M, A, nice_hull(M, A)) is None
