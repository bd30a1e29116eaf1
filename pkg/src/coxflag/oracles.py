"""Slow reference implementations used to cross-check the word algorithms.

Nothing here calls the optimised routines it is meant to check; the only
shared pieces are the diagram queries (commutation and containment).
"""

from __future__ import annotations

from collections import Counter, deque
from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

from .coxgraph import ColourGraph, Letter

Word = tuple[Letter, ...]


def _lkey(s: Letter) -> tuple[int, ...]:
    return tuple(i for i in range(s.bit_length()) if s >> i & 1)


def canon(g: ColourGraph, u: Sequence[Letter]) -> Word:
    """Lexicographically least word in the commutation class of ``u``, built letter by letter."""
    rest = list(u)
    out = []
    while rest:
        best = None
        for i, s in enumerate(rest):
            if all(g.commute(rest[k], s) for k in range(i)) and (best is None or _lkey(s) < _lkey(rest[best])):
                best = i
        out.append(rest.pop(best))
    return tuple(out)


def commutation_class(g: ColourGraph, u: Sequence[Letter]) -> set[Word]:
    """Every word reachable from ``u`` by swapping adjacent commuting letters."""
    start = tuple(u)
    seen = {start}
    queue = deque([start])
    while queue:
        w = queue.popleft()
        for i in range(len(w) - 1):
            if g.commute(w[i], w[i + 1]):
                nw = w[:i] + (w[i + 1], w[i]) + w[i + 2 :]
                if nw not in seen:
                    seen.add(nw)
                    queue.append(nw)
    return seen


def _reach(g: ColourGraph, u: Word) -> list[int]:
    """``reach[i]``: positions ``j > i`` joined to ``i`` by a chain of non-commuting letters."""
    n = len(u)
    reach = [0] * n
    for i in range(n - 1, -1, -1):
        for j in range(i + 1, n):
            if not g.commute(u[i], u[j]):
                reach[i] |= 1 << j | reach[j]
    return reach


def absorption_moves(g: ColourGraph, u: Word) -> Iterator[Word]:
    """Words obtained by one Absorption step, after any commutations that make the pair adjacent."""
    reach = _reach(g, u)
    for i in range(len(u)):
        for j in range(i + 1, len(u)):
            a, b = u[i], u[j]
            if a & ~b and b & ~a:
                continue
            # the pair can be made adjacent unless some letter strictly between is chained to both
            if any(reach[i] >> k & 1 and reach[k] >> j & 1 for k in range(i + 1, j)):
                continue
            drop = i if a & ~b == 0 else j
            yield u[:drop] + u[drop + 1 :]


def all_reducts(g: ColourGraph, u: Sequence[Letter], cap: int = 200_000) -> set[Word]:
    """Canonical forms of every irreducible word reachable from ``u`` by Commutation and Absorption."""
    start = canon(g, u)
    seen = {start}
    queue = deque([start])
    out = set()
    while queue:
        w = queue.popleft()
        moved = False
        for nw in absorption_moves(g, w):
            moved = True
            c = canon(g, nw)
            if c not in seen:
                seen.add(c)
                if len(seen) > cap:
                    raise RuntimeError("reduct exploration too large")
                queue.append(c)
        if not moved:
            out.add(w)
    return out


def is_reduced_brute(g: ColourGraph, u: Sequence[Letter]) -> bool:
    return not any(True for _ in absorption_moves(g, tuple(u)))


def _orderings(letters: Counter, inside: Letter, length: int) -> Iterator[tuple[Word, Counter]]:
    """Ordered words of exactly ``length`` letters drawn from ``letters``, each properly inside ``inside``."""
    if length == 0:
        yield (), letters
        return
    for s in list(letters):
        if letters[s] and s != inside and s & ~inside == 0:
            rest = letters.copy()
            rest[s] -= 1
            for tail, left in _orderings(rest, inside, length - 1):
                yield (s,) + tail, left


def preceq_brute(g: ColourGraph, u: Sequence[Letter], v: Sequence[Letter]) -> bool:
    """Try every way of replacing each letter of ``v`` by itself or by a word of strictly smaller letters of ``u``."""
    u, v = tuple(u), tuple(v)
    target = canon(g, u)
    pool = Counter(u)

    def go(k: int, built: Word, left: Counter) -> bool:
        if k == len(v):
            return sum(left.values()) == 0 and canon(g, built) == target
        t = v[k]
        room = sum(left.values())
        if left[t]:
            rest = left.copy()
            rest[t] -= 1
            if go(k + 1, built + (t,), rest):
                return True
        for length in range(room + 1):
            for piece, rest in _orderings(left, t, length):
                if go(k + 1, built + piece, rest):
                    return True
        return False

    return go(0, (), pool)


def downsets_brute(g: ColourGraph, u: Sequence[Letter]) -> list[int]:
    """Position sets closed under going to an earlier non-commuting letter."""
    n = len(u)
    out = []
    for d in range(1 << n):
        if all(
            not (d >> j & 1) or all(d >> i & 1 or g.commute(u[i], u[j]) for i in range(j)) for j in range(n)
        ):
            out.append(d)
    return out


def _pick(u: Sequence[Letter], mask: int) -> Word:
    return tuple(u[i] for i in range(len(u)) if mask >> i & 1)


def decomposition_candidates(g: ColourGraph, u: Sequence[Letter], v: Sequence[Letter]) -> Iterator[tuple[Word, ...]]:
    """Every split ``u = u1.u'.w``, ``v = w'.v'.v1`` with ``w'`` equivalent to ``w``, as canonical words."""
    u, v = tuple(u), tuple(v)
    du_all = downsets_brute(g, u)
    dv_all = downsets_brute(g, v)
    full_u = (1 << len(u)) - 1
    for d1, d2 in product(du_all, du_all):
        if d1 & ~d2:
            continue
        u1, up, w = _pick(u, d1), _pick(u, d2 & ~d1), _pick(u, full_u & ~d2)
        cw = canon(g, w)
        for e1, e2 in product(dv_all, dv_all):
            if e1 & ~e2:
                continue
            if canon(g, _pick(v, e1)) != cw:
                continue
            vp, v1 = _pick(v, e2 & ~e1), _pick(v, ((1 << len(v)) - 1) & ~e2)
            yield tuple(canon(g, p) for p in (u1, up, w, vp, v1))


def singleton_foundation_rank(g: ColourGraph, u: Sequence[Letter]) -> int:
    """Foundation rank of a singleton word in the order given by deleting letters."""

    @lru_cache(maxsize=None)
    def rank(w: Word) -> int:
        best = -1
        seen = set()
        for mask in range((1 << len(w)) - 1):
            c = canon(g, _pick(w, mask))
            if c not in seen:
                seen.add(c)
                best = max(best, rank(c))
        return best + 1

    if any(s & (s - 1) for s in u):
        raise ValueError("only singleton words are supported")
    return rank(canon(g, u))


def random_word(g: ColourGraph, rng, length: int, letters: Sequence[Letter] | None = None) -> Word:
    pool = list(letters) if letters is not None else g.enumerate_letters()
    return tuple(rng.choice(pool) for _ in range(length))


def reduced_words(g: ColourGraph, max_len: int, letters: Sequence[Letter] | None = None) -> list[Word]:
    """All reduced words up to ``max_len`` letters, one canonical word per class."""
    pool = list(letters) if letters is not None else g.enumerate_letters()
    layer = {()}
    out = [()]
    for _ in range(max_len):
        nxt = set()
        for w in layer:
            for s in pool:
                c = canon(g, w + (s,))
                if c not in nxt and is_reduced_brute(g, c):
                    nxt.add(c)
        out.extend(sorted(nxt, key=lambda w: [_lkey(s) for s in w]))
        layer = nxt
    return out
