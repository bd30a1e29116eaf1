"""Property suites shared by the ``verify`` subcommand and the test-suite."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

from . import oracles
from .chamber import ChamberSystem, check_axioms, generate_quasi_building
from .coxgraph import ColourGraph, Letter
from .errors import CoxflagError
from .gspace import (
    GammaSpace,
    chamber_roundtrip,
    difference_mask,
    find_reduced_path,
    flag_word,
    generate_space,
    homomorphisms,
    is_nice,
    is_simply_connected,
    nice_hull,
    permute_path,
    space_roundtrip,
    to_space,
    validate_space,
)
from .mtinvariants import ample_bounds, morley_rank
from .words import (
    Ordinal,
    Word,
    decomposition_violations,
    divide,
    equiv,
    final_segment,
    format_word,
    is_commuting,
    is_reduced,
    normal_form,
    preceq,
    rank,
    reduce_concat,
    right_absorbed,
    sr,
    symmetric_decomposition,
    triangle_decompose,
    triangle_violations,
    wobbling,
)

SIZES = {"small": 1, "medium": 3, "large": 10}


def fixture_graphs() -> dict[str, ColourGraph]:
    return {"P3": ColourGraph.path(3), "P4": ColourGraph.path(4), "K3": ColourGraph.complete(3)}


def four_cycle_space() -> GammaSpace:
    """Two colours, four vertices, joined in a single 4-cycle."""
    K2 = ColourGraph.complete(2)
    return GammaSpace.build(K2, [0, 1, 0, 1], [(0, 1), (1, 2), (2, 3), (3, 0)])


def case_rng(seed: int, suite: str, case: int) -> random.Random:
    """Independent deterministic stream per (seed, suite, case)."""
    return random.Random(f"{seed}:{suite}:{case}")


@dataclass
class Failure:
    case: int
    message: str
    counterexample: dict


@dataclass
class VerifyReport:
    suite: str
    seed: int
    cases: int = 0
    failures: list[Failure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, message: str, **counterexample) -> None:
        self.failures.append(Failure(self.cases, message, counterexample))

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "cases": self.cases,
            "failures": [{"case": f.case, "message": f.message, "counterexample": f.counterexample} for f in self.failures],
        }


def shrink(u: Sequence[Letter], still_fails: Callable[[Word], bool]) -> Word:
    """Greedily delete letters while the failure persists."""
    u = tuple(u)
    changed = True
    while changed:
        changed = False
        for i in range(len(u)):
            cand = u[:i] + u[i + 1 :]
            if still_fails(cand):
                u, changed = cand, True
                break
    return u


def split_word(g: ColourGraph, v: Sequence[Letter], rng: random.Random) -> Word:
    """Replace random letters of ``v`` by random words of smaller letters, then reduce."""
    out: list[Letter] = []
    for t in v:
        inner = [s for s in g.enumerate_letters() if s != t and s & ~t == 0]
        roll = rng.random()
        if roll < 0.5 or not inner:
            out.append(t)
        elif roll < 0.65:
            continue
        else:
            out.extend(rng.choice(inner) for _ in range(rng.randint(1, 2)))
    return reduce_concat(g, out)


def random_reduced(g: ColourGraph, rng: random.Random, max_len: int) -> Word:
    return reduce_concat(g, oracles.random_word(g, rng, rng.randint(0, max_len)))


def _w(g: ColourGraph, u: Sequence[Letter]) -> str:
    return format_word(g, u)


# ---------------------------------------------------------------------------
# suites


def suite_words(seed: int, scale: int) -> VerifyReport:
    rep = VerifyReport("words", seed)
    graphs = list(fixture_graphs().items())
    for i in range(300 * scale):
        name, g = graphs[i % len(graphs)]
        rng = case_rng(seed, "words", i)
        u = oracles.random_word(g, rng, rng.randint(0, 6))
        rep.cases += 1

        def bad(w: Word) -> bool:
            found = oracles.all_reducts(g, w)
            return len(found) != 1 or next(iter(found)) != oracles.canon(g, reduce_concat(g, w))

        if bad(u):
            rep.fail("reducts not confluent", graph=name, word=_w(g, shrink(u, bad)))
        nf = normal_form(g, u)
        if normal_form(g, nf) != nf or oracles.canon(g, u) != oracles.canon(g, nf):
            rep.fail("normal form unstable", graph=name, word=_w(g, u))
        v = random_reduced(g, rng, 3)
        x = split_word(g, v, rng) if rng.random() < 0.7 else random_reduced(g, rng, 3)
        if preceq(g, x, v) != oracles.preceq_brute(g, x, v):
            rep.fail("order disagrees with brute force", graph=name, u=_w(g, x), v=_w(g, v))
    return rep


def suite_decomposition(seed: int, scale: int) -> VerifyReport:
    rep = VerifyReport("decomposition", seed)
    g = ColourGraph.path(3)
    limit = 4 if scale == 1 else 6
    pool = oracles.reduced_words(g, limit)
    for u, v in itertools.product(pool, pool):
        if len(u) + len(v) > limit:
            continue
        rep.cases += 1
        d = symmetric_decomposition(g, u, v)
        bad = decomposition_violations(g, u, v, d)
        if bad:
            rep.fail("; ".join(bad), graph="P3", u=_w(g, u), v=_w(g, v))
            continue
        valid = {c for c in oracles.decomposition_candidates(g, u, v) if not decomposition_violations(g, u, v, type(d)(*c))}
        mine = tuple(oracles.canon(g, p) for p in (d.u1, d.uPrime, d.w, d.vPrime, d.v1))
        if valid != {mine}:
            rep.fail("decomposition not unique", graph="P3", u=_w(g, u), v=_w(g, v), found=len(valid))
    return rep


def suite_division(seed: int, scale: int) -> VerifyReport:
    rep = VerifyReport("division", seed)
    g = ColourGraph.path(3)
    xs = oracles.reduced_words(g, 3 if scale == 1 else 4)
    for i in range(100 * scale):
        rng = case_rng(seed, "division", i)
        v = random_reduced(g, rng, 5)
        u = split_word(g, v, rng)
        if not preceq(g, u, v):
            continue
        rep.cases += 1
        q = divide(g, v, u)
        for x in xs:
            if preceq(g, reduce_concat(g, x, u), v) != preceq(g, x, q):
                rep.fail("division contract", graph="P3", v=_w(g, v), u=_w(g, u), x=_w(g, x))
                break
    return rep


def suite_sr(seed: int, scale: int) -> VerifyReport:
    rep = VerifyReport("sr", seed)
    graphs = list(fixture_graphs().items())
    xs = {name: oracles.reduced_words(g, 3) for name, g in graphs}
    for i in range(100 * scale):
        name, g = graphs[i % len(graphs)]
        rng = case_rng(seed, "sr", i)
        u = random_reduced(g, rng, 5)
        rep.cases += 1
        s = sr(g, u)
        if not is_commuting(g, s) or not preceq(g, final_segment(g, u), s):
            rep.fail("stabiliser shape", graph=name, u=_w(g, u))
        for x in xs[name]:
            if right_absorbed(g, x, u) != preceq(g, x, s):
                rep.fail("absorption duality", graph=name, u=_w(g, u), x=_w(g, x))
                break
    return rep


def building_fixtures(scale: int) -> Iterator[tuple[str, ColourGraph, int, int, ChamberSystem]]:
    top = 2 if scale == 1 else 3
    for name, g in fixture_graphs().items():
        for fanout in range(2, top + 1):
            for radius in range(1, top + 1):
                yield name, g, fanout, radius, generate_quasi_building(g, radius=radius, fanout=fanout, seed=fanout * 10 + radius)


def suite_chamber(seed: int, scale: int) -> VerifyReport:
    rep = VerifyReport("chamber", seed)
    for name, g, fanout, radius, X in building_fixtures(scale):
        rep.cases += 1
        r = check_axioms(X)
        if not (r.quasi_building and r.dagger and r.dual_quasi_building):
            rep.fail("axiom failure", graph=name, fanout=fanout, radius=radius, witnesses=repr(r.witnesses))
    return rep


def generated_spaces(seed: int, count: int, steps: int = 7) -> Iterator[tuple[str, ColourGraph, GammaSpace]]:
    graphs = list(fixture_graphs().items())
    for i in range(count):
        name, g = graphs[i % len(graphs)]
        yield name, g, generate_space(g, steps, seed=seed * 1000 + i, verify=False)


def suite_biinterp(seed: int, scale: int) -> VerifyReport:
    rep = VerifyReport("bi-interp", seed)
    for name, g, fanout, radius, X in building_fixtures(scale):
        rep.cases += 1
        if not chamber_roundtrip(X) or not space_roundtrip(to_space(X)):
            rep.fail("round trip is not an isomorphism", graph=name, fanout=fanout, radius=radius)
    for name, g, M in generated_spaces(seed, 10 * scale):
        rep.cases += 1
        if not validate_space(M).valid or not space_roundtrip(M):
            rep.fail("space round trip", graph=name, space=M.to_json())
    return rep


def suite_sc(seed: int, scale: int) -> VerifyReport:
    rep = VerifyReport("sc", seed)
    rep.cases += 1
    res = is_simply_connected(four_cycle_space())
    if res.simply_connected or res.certificate is None or len(res.certificate) != 4:
        rep.fail("4-cycle fixture not refuted", space=four_cycle_space().to_json())
    for name, g, fanout, radius, X in building_fixtures(scale):
        rep.cases += 1
        if not is_simply_connected(to_space(X)).simply_connected:
            rep.fail("pipeline space not simply connected", graph=name, fanout=fanout, radius=radius)
    for name, g, M in generated_spaces(seed, 10 * scale):
        rep.cases += 1
        res = is_simply_connected(M)
        if not res.simply_connected:
            rep.fail("extension tower not simply connected", graph=name, space=M.to_json(), word=_w(g, res.certificate.word))
    return rep


def paths_with_word(M: GammaSpace, i: int, j: int, u: Sequence[Letter]) -> list[tuple[int, ...]]:
    """Every reduced flag path (as flag indices) from ``i`` to ``j`` whose word is exactly ``u``."""
    out = []

    def go(k: int, cur: int, trail: tuple[int, ...]) -> None:
        if k == len(u):
            if cur == j:
                out.append(trail)
            return
        for s, nxt in M.op_out(cur):
            if s == u[k]:
                go(k + 1, nxt, trail + (nxt,))

    go(0, i, (i,))
    return out


def wobbling_pairs(seed: int, want: int) -> Iterator[tuple[ColourGraph, GammaSpace, Word, tuple, tuple]]:
    """Pairs of distinct reduced paths with the same word between the same flags."""
    made = 0
    for name, g, M in generated_spaces(seed, 10_000, steps=8):
        flags = M.flags()
        for i, j in itertools.product(range(len(flags)), repeat=2):
            u = flag_word(M, flags[i], flags[j])
            if len(u) < 2:
                continue
            for a, b in itertools.combinations(paths_with_word(M, i, j, u), 2):
                yield g, M, u, a, b
                made += 1
                if made >= want:
                    return


def suite_wobbling(seed: int, scale: int) -> VerifyReport:
    rep = VerifyReport("wobbling", seed)
    for g, M, u, a, b in wobbling_pairs(seed, 200 * scale):
        rep.cases += 1
        flags = M.flags()
        for k in range(1, len(u)):
            d = difference_mask(flags[a[k]], flags[b[k]])
            if d & ~wobbling(g, u[:k], u[k:]):
                rep.fail("middle flags differ outside the wobbling set", space=M.to_json(), word=_w(g, u), position=k)
    return rep


def hull_is_rigid(M: GammaSpace, A: Sequence[int], N: set[int]) -> str | None:
    if not set(A) <= N or not is_nice(M, N):
        return "hull is not a nice superset"
    autos = sum(1 for _ in homomorphisms(M, N, fixed=A, target=N, induced=True))
    if autos != 1:
        return f"{autos} automorphisms fix the seed"
    for f in homomorphisms(M, N, fixed=A):
        if len(set(f.values())) != len(f):
            return "an endomorphism fixing the seed collapses the hull"
    return None


def triangle_failure(M: GammaSpace, F, G, H) -> str | None:
    g = M.graph
    u, v, w = flag_word(M, G, F), flag_word(M, F, H), flag_word(M, G, H)
    try:
        d = triangle_decompose(g, u, v, w)
    except CoxflagError as exc:
        return f"no decomposition: {exc}"
    if triangle_violations(g, u, v, w, d):
        return "decomposition fails its conditions"
    P = permute_path(M, find_reduced_path(M, G, H), d.u1 + d.x + d.v1)
    K = P.flags[len(d.u1)]
    if not (equiv(g, flag_word(M, G, K), d.u1) and equiv(g, flag_word(M, K, H), d.x + d.v1)):
        return "predicted base-point flag missing"
    return None


def suite_hulls(seed: int, scale: int) -> VerifyReport:
    rep = VerifyReport("hulls", seed)
    for i, (name, g, M) in enumerate(generated_spaces(seed, 20 * scale, steps=6)):
        rng = case_rng(seed, "hulls", i)
        A = sorted(rng.sample(range(M.size), rng.randint(1, min(3, M.size))))
        rep.cases += 1
        why = hull_is_rigid(M, A, nice_hull(M, A))
        if why:
            rep.fail(why, graph=name, space=M.to_json(), seed_points=[M.ids[a] for a in A])
        flags = M.flags()
        for _ in range(5):
            rep.cases += 1
            F, G, H = (rng.choice(flags) for _ in range(3))
            why = triangle_failure(M, F, G, H)
            if why:
                rep.fail(why, graph=name, space=M.to_json(), flags=[M.flag_to_json(x) for x in (F, G, H)])
    return rep


def suite_ranks(seed: int, scale: int) -> VerifyReport:
    rep = VerifyReport("ranks", seed)
    graphs = fixture_graphs()
    P3, P4 = graphs["P3"], graphs["P4"]
    checks = [
        (rank(P3, (3, 6, 3)), Ordinal.omega_power(1, 3)),
        (rank(P4, (7, 14)), Ordinal.omega_power(2, 2)),
        (morley_rank(P3), Ordinal.omega_power(2)),
        (morley_rank(ColourGraph.discrete(2)), Ordinal.finite(1)),
    ]
    for got, want in checks:
        rep.cases += 1
        if got != want:
            rep.fail("rank value", got=str(got), want=str(want))
    for g, want in ((P4, (3, 4)), (graphs["K3"], (1, 2)), (ColourGraph.cycle(5), (3, 4))):
        rep.cases += 1
        b = ample_bounds(g)
        if (b.lower, b.strict_upper) != want:
            rep.fail("ample bounds", graph=g.to_json(), got=[b.lower, b.strict_upper])
    singles = [1, 2, 4]
    for i in range(20 * scale):
        rng = case_rng(seed, "ranks", i)
        u = reduce_concat(P3, [rng.choice(singles) for _ in range(rng.randint(0, 5))])
        rep.cases += 1
        if rank(P3, u) != Ordinal.finite(len(u)) or oracles.singleton_foundation_rank(P3, u) != len(u):
            rep.fail("singleton rank", graph="P3", word=_w(P3, u))
    return rep


SUITES: dict[str, Callable[[int, int], VerifyReport]] = {
    "words": suite_words,
    "decomposition": suite_decomposition,
    "division": suite_division,
    "sr": suite_sr,
    "chamber": suite_chamber,
    "bi-interp": suite_biinterp,
    "sc": suite_sc,
    "wobbling": suite_wobbling,
    "hulls": suite_hulls,
    "ranks": suite_ranks,
}


def run_verify_suite(name: str, seed: int = 1, size: str = "small") -> VerifyReport:
    scale = SIZES[size]
    if name == "all":
        total = VerifyReport("all", seed)
        for key, fn in SUITES.items():
            part = fn(seed, scale)
            total.cases += part.cases
            for f in part.failures:
                total.failures.append(Failure(f.case, f"{key}: {f.message}", f.counterexample))
        return total
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    return SUITES[name](seed, scale)
