"""Words over letters: trace equivalence, reduction and decompositions.

A word is a ``tuple`` of letters (colour bitmasks, see :mod:`coxflag.coxgraph`).
Every routine takes the ambient :class:`ColourGraph` as its first argument,
because commutation of letters depends on it.  Results that are only defined
up to permuting adjacent commuting letters are returned in normal form, so
equality of outputs is plain tuple equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

from .coxgraph import ColourGraph, Letter, bits, letter_key, popcount
from .errors import (
    InvalidLetter,
    NotAReduct,
    NotDivisible,
    NotReduced,
    NotReducedConcat,
    ParseError,
    UnsupportedShape,
)

Word = tuple[Letter, ...]


# ---------------------------------------------------------------------------
# text form


def format_word(g: ColourGraph, u: Sequence[Letter]) -> str:
    """``{a,b}.{c}`` style rendering; the empty word is ``1``."""
    if not u:
        return "1"
    return ".".join(g.format_set(s) for s in u)


def parse_word(g: ColourGraph, text: str) -> Word:
    """Inverse of :func:`format_word`, validating every letter against ``g``."""
    src = text.strip()
    if src == "1":
        return ()
    if not src:
        raise ParseError("empty input; the empty word is written 1", 0)
    out: list[Letter] = []
    pos = 0
    n = len(src)
    while True:
        while pos < n and src[pos].isspace():
            pos += 1
        if pos >= n or src[pos] != "{":
            raise ParseError("expected '{'", pos)
        close = src.find("}", pos)
        if close < 0:
            raise ParseError("unterminated letter", pos)
        names = [c.strip() for c in src[pos + 1 : close].split(",")]
        if any(not c for c in names):
            raise ParseError("empty colour name", pos + 1)
        mask = 0
        for c in names:
            if c not in g.colours:
                raise InvalidLetter(f"unknown colour {c!r} at position {pos}")
            mask |= 1 << g.colours.index(c)
        if not g.is_connected(mask):
            raise InvalidLetter(f"{g.format_set(mask)} at position {pos} is not connected")
        out.append(mask)
        pos = close + 1
        while pos < n and src[pos].isspace():
            pos += 1
        if pos == n:
            return tuple(out)
        if src[pos] != ".":
            raise ParseError("expected '.' between letters", pos)
        pos += 1


# ---------------------------------------------------------------------------
# basic word structure


def support(u: Iterable[Letter]) -> int:
    m = 0
    for s in u:
        m |= s
    return m


def reverse(u: Sequence[Letter]) -> Word:
    return tuple(reversed(u))


def commuting_word(g: ColourGraph, colours: int) -> Word:
    """The commuting word whose letters are the components of ``colours``."""
    return tuple(g.components(colours))


def words_commute(g: ColourGraph, u: Iterable[Letter], v: Iterable[Letter]) -> bool:
    v = tuple(v)
    return all(g.commute(s, t) for s in u for t in v)


def is_commuting(g: ColourGraph, u: Sequence[Letter]) -> bool:
    return all(g.commute(u[i], u[j]) for i in range(len(u)) for j in range(i + 1, len(u)))


def dependency(g: ColourGraph, u: Sequence[Letter]) -> list[int]:
    """For each position ``j``, the bitmask of earlier positions whose letters do not commute with ``u[j]``."""
    return [sum(1 << i for i in range(j) if not g.commute(u[i], u[j])) for j in range(len(u))]


def downsets(g: ColourGraph, u: Sequence[Letter]) -> Iterator[int]:
    """All prefix-closed position sets of ``u``, i.e. the initial subwords of its class."""
    pred = dependency(g, u)
    n = len(u)
    seen = {0}
    stack = [0]
    while stack:
        d = stack.pop()
        yield d
        for j in range(n):
            if not d >> j & 1 and pred[j] & ~d == 0:
                e = d | 1 << j
                if e not in seen:
                    seen.add(e)
                    stack.append(e)


def pick(u: Sequence[Letter], mask: int) -> Word:
    return tuple(u[i] for i in range(len(u)) if mask >> i & 1)


def normal_form(g: ColourGraph, u: Sequence[Letter]) -> Word:
    """Lexicographically least representative of the class of ``u``."""
    u = tuple(u)
    table = g.memo("nf")
    hit = table.get(u)
    if hit is not None:
        return hit
    rest = list(u)
    out = []
    while rest:
        best = -1
        for i, s in enumerate(rest):
            if all(g.commute(rest[k], s) for k in range(i)):
                if best < 0 or letter_key(s) < letter_key(rest[best]):
                    best = i
        out.append(rest.pop(best))
    res = tuple(out)
    table[u] = res
    return res


def equiv(g: ColourGraph, u: Sequence[Letter], v: Sequence[Letter]) -> bool:
    return len(u) == len(v) and normal_form(g, u) == normal_form(g, v)


def _absorbable(g: ColourGraph, u: Sequence[Letter]) -> tuple[int, int] | None:
    """A pair ``(i, j)`` with ``u[i]`` inside ``u[j]`` and ``u[i]`` commuting with everything between."""
    n = len(u)
    for i in range(n):
        s = u[i]
        for j in range(i + 1, n):
            t = u[j]
            if s & ~t == 0:
                return i, j
            if not g.commute(s, t):
                break
        for j in range(i - 1, -1, -1):
            t = u[j]
            if s & ~t == 0:
                return i, j
            if not g.commute(s, t):
                break
    return None


def is_reduced(g: ColourGraph, u: Sequence[Letter]) -> bool:
    return _absorbable(g, u) is None


def require_reduced(g: ColourGraph, *words: Sequence[Letter]) -> None:
    for u in words:
        if not is_reduced(g, u):
            raise NotReduced(f"{format_word(g, u)} is not reduced")


def reduce_concat(g: ColourGraph, u: Sequence[Letter], v: Sequence[Letter] = ()) -> Word:
    """The non-splitting reduct of ``u.v``, in normal form."""
    w = list(u) + list(v)
    while True:
        hit = _absorbable(g, w)
        if hit is None:
            return normal_form(g, w)
        del w[hit[0]]


def remove_first(u: Sequence[Letter], s: Letter) -> Word:
    i = u.index(s)
    return tuple(u[:i]) + tuple(u[i + 1 :])


def remove_last(u: Sequence[Letter], s: Letter) -> Word:
    i = len(u) - 1 - list(reversed(u)).index(s)
    return tuple(u[:i]) + tuple(u[i + 1 :])


# ---------------------------------------------------------------------------
# the splitting order


def preceq(g: ColourGraph, u: Sequence[Letter], v: Sequence[Letter]) -> bool:
    """Decide whether ``u`` is obtained from ``v`` by splitting letters, up to equivalence.

    Walk through ``v`` letter by letter while consuming an initial subword of
    ``u``: each letter ``t`` either consumes one available letter equal to
    ``t`` or any number of available letters properly inside ``t``.  Consuming
    more of ``u`` never hurts later letters, so for the second option only
    the largest reachable initial subword is kept.
    """
    u, v = tuple(u), tuple(v)
    table = g.memo("preceq")
    key = (u, v)
    hit = table.get(key)
    if hit is not None:
        return hit
    n = len(u)
    full = (1 << n) - 1
    pred = dependency(g, u)
    states = {0}
    for t in v:
        nxt = set()
        for d in states:
            grown = d
            changed = True
            while changed:
                changed = False
                for j in range(n):
                    if not grown >> j & 1 and pred[j] & ~grown == 0 and u[j] != t and u[j] & ~t == 0:
                        grown |= 1 << j
                        changed = True
            nxt.add(grown)
            for j in range(n):
                if not d >> j & 1 and pred[j] & ~d == 0 and u[j] == t:
                    nxt.add(d | 1 << j)
        states = {d for d in nxt if not any(e != d and d & ~e == 0 for e in nxt)}
    res = full in states
    table[key] = res
    return res


def preceq_strict(g: ColourGraph, u: Sequence[Letter], v: Sequence[Letter]) -> bool:
    return preceq(g, u, v) and not equiv(g, u, v)


# ---------------------------------------------------------------------------
# absorption, beginnings and ends


def _letter_absorbed(g: ColourGraph, t: Letter, u: Sequence[Letter], side: str, proper: bool) -> bool:
    order = range(len(u)) if side == "left" else range(len(u) - 1, -1, -1)
    for i in order:
        s = u[i]
        if t & ~s == 0 and not (proper and s == t):
            return True
        if not g.commute(t, s):
            return False
    return False


def absorption(
    g: ColourGraph, t: Sequence[Letter], u: Sequence[Letter], side: str = "right", proper: bool = False
) -> bool:
    """Whether every letter of ``t`` is (properly) left- or right-absorbed by the reduced word ``u``."""
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    require_reduced(g, u)
    return all(_letter_absorbed(g, s, u, side, proper) for s in t)


def left_absorbed(g: ColourGraph, t: Sequence[Letter], u: Sequence[Letter], proper: bool = False) -> bool:
    return all(_letter_absorbed(g, s, u, "left", proper) for s in t)


def right_absorbed(g: ColourGraph, t: Sequence[Letter], u: Sequence[Letter], proper: bool = False) -> bool:
    return all(_letter_absorbed(g, s, u, "right", proper) for s in t)


def beginning_positions(g: ColourGraph, u: Sequence[Letter]) -> list[int]:
    return [i for i in range(len(u)) if all(g.commute(u[k], u[i]) for k in range(i))]


def end_positions(g: ColourGraph, u: Sequence[Letter]) -> list[int]:
    n = len(u)
    return [i for i in range(n) if all(g.commute(u[k], u[i]) for k in range(i + 1, n))]


def beginning_index(g: ColourGraph, u: Sequence[Letter], s: Letter) -> int | None:
    for i, t in enumerate(u):
        if t == s:
            return i
        if not g.commute(s, t):
            return None
    return None


def end_index(g: ColourGraph, u: Sequence[Letter], s: Letter) -> int | None:
    for i in range(len(u) - 1, -1, -1):
        if u[i] == s:
            return i
        if not g.commute(s, u[i]):
            return None
    return None


@dataclass(frozen=True)
class Segments:
    beginnings: tuple[Letter, ...]
    ends: tuple[Letter, ...]
    initial_segment: Word
    final_segment: Word


def segments(g: ColourGraph, u: Sequence[Letter]) -> Segments:
    b = tuple(sorted((u[i] for i in beginning_positions(g, u)), key=letter_key))
    e = tuple(sorted((u[i] for i in end_positions(g, u)), key=letter_key))
    return Segments(b, e, b, e)


def initial_segment(g: ColourGraph, u: Sequence[Letter]) -> Word:
    return segments(g, u).initial_segment


def final_segment(g: ColourGraph, u: Sequence[Letter]) -> Word:
    return segments(g, u).final_segment


def strip_initial(g: ColourGraph, u: Sequence[Letter], prefix: Sequence[Letter]) -> Word | None:
    """``r`` with ``u`` equivalent to ``prefix.r``, or ``None`` if ``prefix`` is not an initial subword."""
    rest = tuple(u)
    for s in prefix:
        i = beginning_index(g, rest, s)
        if i is None:
            return None
        rest = rest[:i] + rest[i + 1 :]
    return rest


def strip_final(g: ColourGraph, u: Sequence[Letter], suffix: Sequence[Letter]) -> Word | None:
    """``r`` with ``u`` equivalent to ``r.suffix``, or ``None``."""
    rest = tuple(u)
    for s in reversed(suffix):
        i = end_index(g, rest, s)
        if i is None:
            return None
        rest = rest[:i] + rest[i + 1 :]
    return rest


def common_affix(g: ColourGraph, u: Sequence[Letter], v: Sequence[Letter], side: str = "initial") -> Word:
    """Largest common initial (or final) subword, by repeatedly peeling a shared beginning."""
    if side == "final":
        return normal_form(g, reverse(common_affix(g, reverse(u), reverse(v), "initial")))
    if side != "initial":
        raise ValueError("side must be 'initial' or 'final'")
    u, v = tuple(u), tuple(v)
    out = []
    while True:
        common = [u[i] for i in beginning_positions(g, u) if beginning_index(g, v, u[i]) is not None]
        if not common:
            return normal_form(g, out)
        s = min(common, key=letter_key)
        out.append(s)
        u = remove_first(u, s)
        v = remove_first(v, s)


# ---------------------------------------------------------------------------
# symmetric decomposition


@dataclass(frozen=True)
class SymDecomposition:
    u1: Word
    uPrime: Word
    w: Word
    vPrime: Word
    v1: Word


def _decompose(g: ColourGraph, u: Word, v: Word) -> tuple[Word, Word, Word, Word, Word]:
    if is_reduced(g, u + v):
        return u, (), (), (), v
    for i in reversed(end_positions(g, u)):
        s = u[i]
        if _letter_absorbed(g, s, v, "left", False):
            u1, up, w, vp, v1 = _decompose(g, u[:i] + u[i + 1 :], v)
            j = beginning_index(g, v1, s)
            if j is not None:
                return u1, up, w + (s,), vp, v1[:j] + v1[j + 1 :]
            return u1, up + (s,), w, vp, v1
    for j in beginning_positions(g, v):
        t = v[j]
        if _letter_absorbed(g, t, u, "right", False):
            u1, up, w, vp, v1 = _decompose(g, u, v[:j] + v[j + 1 :])
            i = end_index(g, u1, t)
            if i is not None:
                return u1[:i] + u1[i + 1 :], up, w + (t,), vp, v1
            return u1, up, w, (t,) + vp, v1
    raise AssertionError("non-reduced concatenation of reduced words without a crossing pair")


def symmetric_decomposition(g: ColourGraph, u: Sequence[Letter], v: Sequence[Letter]) -> SymDecomposition:
    """Split ``u = u1.u'.w`` and ``v = w.v'.v1`` so that ``u1.w.v1`` is the non-splitting reduct of ``u.v``."""
    u, v = tuple(u), tuple(v)
    require_reduced(g, u, v)
    parts = _decompose(g, u, v)
    return SymDecomposition(*(normal_form(g, p) for p in parts))


def decomposition_violations(
    g: ColourGraph, u: Sequence[Letter], v: Sequence[Letter], d: SymDecomposition
) -> list[str]:
    """Names of the defining conditions that ``d`` fails for the pair ``(u, v)``."""
    bad = []
    if not equiv(g, u, d.u1 + d.uPrime + d.w):
        bad.append("u = u1.u'.w")
    if not equiv(g, v, d.w + d.vPrime + d.v1):
        bad.append("v = w.v'.v1")
    if not is_commuting(g, d.w):
        bad.append("w commuting")
    if not left_absorbed(g, d.uPrime, d.v1, proper=True):
        bad.append("u' properly left-absorbed by v1")
    if not right_absorbed(g, d.vPrime, d.u1, proper=True):
        bad.append("v' properly right-absorbed by u1")
    if not (
        words_commute(g, d.uPrime, d.w) and words_commute(g, d.uPrime, d.vPrime) and words_commute(g, d.w, d.vPrime)
    ):
        bad.append("u', w, v' pairwise commute")
    joined = d.u1 + d.w + d.v1
    if not is_reduced(g, joined):
        bad.append("u1.w.v1 reduced")
    if normal_form(g, joined) != reduce_concat(g, u, v):
        bad.append("[u.v] = u1.w.v1")
    return bad


# ---------------------------------------------------------------------------
# division, right stabiliser, wobbling


def _divide_letter(g: ColourGraph, v: Word, s: Letter) -> Word:
    k = max(i for i, t in enumerate(v) if s & ~t == 0)
    cent = []
    bd = g.boundary(s)
    for t in v[k + 1 :]:
        cent.extend(g.components(t & ~bd))
    return reduce_concat(g, v[: k + 1] + tuple(cent))


def divide(g: ColourGraph, v: Sequence[Letter], u: Sequence[Letter]) -> Word:
    """The reduced word ``v/u`` with ``[x.u] <= v`` iff ``x <= v/u`` for all reduced ``x``."""
    v, u = tuple(v), tuple(u)
    require_reduced(g, u, v)
    if not preceq(g, u, v):
        raise NotDivisible(f"{format_word(g, u)} is not below {format_word(g, v)}")
    for s in reversed(u):
        v = _divide_letter(g, v, s)
    return normal_form(g, v)


def sr(g: ColourGraph, u: Sequence[Letter]) -> Word:
    """The largest word right-absorbed by ``u``; always commuting."""
    require_reduced(g, u)
    return commuting_word(g, sr_support(g, u))


def sr_support(g: ColourGraph, u: Sequence[Letter]) -> int:
    return sum(1 << c for c in range(g.size) if _letter_absorbed(g, 1 << c, u, "right", False))


def wobbling(g: ColourGraph, u: Sequence[Letter], v: Sequence[Letter]) -> int:
    """Colours in which the middle flag of a reduced ``u.v`` path may vary."""
    u, v = tuple(u), tuple(v)
    if not is_reduced(g, u + v):
        raise NotReducedConcat(f"{format_word(g, u)} . {format_word(g, v)} is not reduced")
    return sr_support(g, u) & sr_support(g, reverse(v))


def back_and_forth(g: ColourGraph, u: Sequence[Letter]) -> Word:
    require_reduced(g, u)
    return reduce_concat(g, u, reverse(u))


# ---------------------------------------------------------------------------
# property E


def min_blocks(g: ColourGraph, w: Sequence[Letter], s: Letter) -> float:
    """Fewest consecutive blocks, over all permutations of ``w``, each with support properly inside ``s``.

    Infinite when some letter of ``w`` equals ``s``.
    """
    n = len(w)
    full = (1 << n) - 1
    pred = dependency(g, w)
    layer = {0}
    seen = {0}
    steps = 0
    while full not in layer:
        nxt = set()
        for d in layer:
            for c in bits(s):
                grown = d
                changed = True
                while changed:
                    changed = False
                    for j in range(n):
                        if not grown >> j & 1 and pred[j] & ~grown == 0 and not w[j] >> c & 1:
                            grown |= 1 << j
                            changed = True
                if grown not in seen:
                    seen.add(grown)
                    nxt.add(grown)
        if not nxt:
            return math.inf
        layer = nxt
        steps += 1
    return steps


def satisfies_E(g: ColourGraph, w: Sequence[Letter], s: Letter, n: int) -> bool:
    require_reduced(g, w)
    if support(w) & ~s:
        return False
    return min_blocks(g, w, s) > n


# ---------------------------------------------------------------------------
# ordinals and ranks


@dataclass(frozen=True, order=False)
class Ordinal:
    """An ordinal below omega^omega in Cantor normal form."""

    terms: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        exps = [e for e, _ in self.terms]
        if any(a <= b for a, b in zip(exps, exps[1:])) or any(c < 1 or e < 0 for e, c in self.terms):
            raise ValueError(f"not in Cantor normal form: {self.terms}")

    @classmethod
    def finite(cls, n: int) -> "Ordinal":
        return cls(((0, n),)) if n else cls()

    @classmethod
    def omega_power(cls, e: int, coeff: int = 1) -> "Ordinal":
        return cls(((e, coeff),))

    def __add__(self, other: "Ordinal") -> "Ordinal":
        if not other.terms:
            return self
        lead = other.terms[0][0]
        kept = [t for t in self.terms if t[0] > lead]
        same = [c for e, c in self.terms if e == lead]
        head = (lead, other.terms[0][1] + (same[0] if same else 0))
        return Ordinal(tuple(kept) + (head,) + other.terms[1:])

    def _key(self) -> tuple:
        return tuple(x for e, c in self.terms for x in (e, c))

    def __lt__(self, other: "Ordinal") -> bool:
        return self._key() < other._key()

    def __le__(self, other: "Ordinal") -> bool:
        return self == other or self < other

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            if e == 0:
                parts.append(str(c))
                continue
            base = "w" if e == 1 else f"w^{e}"
            parts.append(base if c == 1 else f"{base}*{c}")
        return "+".join(parts)


def size_descending(g: ColourGraph, u: Sequence[Letter]) -> Word | None:
    """A representative of ``u`` with non-increasing letter sizes, if one exists."""
    rest = list(u)
    out: list[Letter] = []
    while rest:
        avail = [i for i, s in enumerate(rest) if all(g.commute(rest[k], s) for k in range(i))]
        i = max(avail, key=lambda k: popcount(rest[k]))
        if out and popcount(rest[i]) > popcount(out[-1]):
            return None
        out.append(rest.pop(i))
    return tuple(out)


def rank(g: ColourGraph, u: Sequence[Letter], kind: str = "Rd") -> Ordinal:
    """Both foundation ranks of a size-sortable reduced word: a sum of powers of omega."""
    if kind not in ("Rd", "Rkl"):
        raise ValueError("kind must be 'Rd' or 'Rkl'")
    require_reduced(g, u)
    sorted_u = size_descending(g, u)
    if sorted_u is None:
        raise UnsupportedShape(f"{format_word(g, u)} has no size-descending representative")
    total = Ordinal()
    for s in sorted_u:
        total = total + Ordinal.omega_power(popcount(s) - 1)
    return total


# ---------------------------------------------------------------------------
# triangle decomposition


@dataclass(frozen=True)
class TriangleDecomposition:
    u1: Word
    v1: Word
    c: Word
    x: Word
    alpha: Word
    beta: Word


def triangle_violations(
    g: ColourGraph, u: Sequence[Letter], v: Sequence[Letter], w: Sequence[Letter], d: TriangleDecomposition
) -> list[str]:
    bad = []
    if not equiv(g, u, d.u1 + reverse(d.alpha) + reverse(d.c)):
        bad.append("u = u1.alpha^-1.c^-1")
    if not equiv(g, v, d.c + d.beta + d.v1):
        bad.append("v = c.beta.v1")
    if not equiv(g, w, d.u1 + d.x + d.v1):
        bad.append("w = u1.x.v1")
    if not (words_commute(g, d.alpha, d.beta) and words_commute(g, d.alpha, d.x) and words_commute(g, d.beta, d.x)):
        bad.append("alpha, beta, x pairwise commute")
    if not right_absorbed(g, d.x, d.c, proper=True):
        bad.append("x properly right-absorbed by c")
    if not left_absorbed(g, d.alpha, d.v1, proper=True):
        bad.append("alpha properly left-absorbed by v1")
    if not right_absorbed(g, d.beta, d.u1):
        bad.append("beta right-absorbed by u1")
    return bad


def triangle_candidates(
    g: ColourGraph, u: Sequence[Letter], v: Sequence[Letter], w: Sequence[Letter]
) -> Iterator[TriangleDecomposition]:
    """Every decomposition of the triple satisfying the defining conditions, by exhaustive search."""
    u, v, w = tuple(u), tuple(v), tuple(w)
    for dc in downsets(g, v):
        c = pick(v, dc)
        p = strip_final(g, u, reverse(c))
        if p is None:
            continue
        v_rest = pick(v, ~dc)
        for du in downsets(g, p):
            u1 = pick(p, du)
            w_rest = strip_initial(g, w, u1)
            if w_rest is None:
                continue
            alpha = reverse(pick(p, ~du))
            for db in downsets(g, v_rest):
                beta = pick(v_rest, db)
                v1 = pick(v_rest, ~db)
                x = strip_final(g, w_rest, v1)
                if x is None:
                    continue
                d = TriangleDecomposition(u1, v1, c, x, alpha, beta)
                if not triangle_violations(g, u, v, w, d):
                    yield TriangleDecomposition(*(normal_form(g, part) for part in (u1, v1, c, x, alpha, beta)))


def triangle_decompose(
    g: ColourGraph, u: Sequence[Letter], v: Sequence[Letter], w: Sequence[Letter]
) -> TriangleDecomposition:
    """Decompose ``u``, ``v`` and a reduct ``w`` of ``u.v`` around their common middle part ``c``.

    A decomposition exists exactly when ``w`` is a reduct of ``u.v``, so the
    search doubles as the reduct check.
    """
    require_reduced(g, u, v, w)
    for d in triangle_candidates(g, u, v, w):
        return d
    raise NotAReduct(f"{format_word(g, w)} is not a reduct of {format_word(g, tuple(u) + tuple(v))}")


# ---------------------------------------------------------------------------
# reduction of a flanked pair


@dataclass(frozen=True)
class PairReduction:
    u1: Word
    v1: Word
    x1: Word
    x2: Word
    v2: Word
    u2: Word
    w1_star: Word
    w2_star: Word


def _cross_pair(g: ColourGraph, left: list, mid: Word, right: list) -> tuple[int, int] | None:
    whole = [e[0] for e in left] + list(mid) + [e[0] for e in right]
    off = len(left) + len(mid)
    for i in range(len(left)):
        for j in range(len(right)):
            a, b = whole[i], whole[off + j]
            if a & ~b == 0 and all(g.commute(a, whole[k]) for k in range(i + 1, off + j)):
                return i, j
            if b & ~a == 0 and all(g.commute(b, whole[k]) for k in range(i + 1, off + j)):
                return i, j
    return None


def reduce_pair_flanked(
    g: ColourGraph,
    w1: Sequence[Letter],
    w: Sequence[Letter],
    w2: Sequence[Letter],
    splitter: Callable[[Letter], Sequence[Letter]] | None = None,
) -> PairReduction:
    """Reduce letters of ``w1`` against letters of ``w2`` across the middle word ``w``.

    Pairs are handled leftmost first.  A letter properly inside its partner
    is deleted; equal letters are both removed from the flanks, the right one
    being replaced by ``splitter(letter)`` (empty by default) and its word
    re-reduced.  Letters originally present are tagged ``u``, letters coming
    from splittings ``x``; deleted original letters are collected in ``v1``
    and ``v2``.
    """
    require_reduced(g, w1, w2)
    mid = tuple(w)
    # entries are (letter, tag, original position); split pieces carry no position
    left = [(s, "u", k) for k, s in enumerate(w1)]
    right = [(s, "u", k) for k, s in enumerate(w2)]
    v1: list[tuple[int, Letter]] = []
    v2: list[tuple[int, Letter]] = []
    while True:
        hit = _cross_pair(g, left, mid, right)
        if hit is None:
            break
        i, j = hit
        a, tag_a, pos_a = left[i]
        b, tag_b, pos_b = right[j]
        if a != b and a & ~b == 0:
            del left[i]
            if tag_a == "u":
                v1.append((pos_a, a))
        elif a != b:
            del right[j]
            if tag_b == "u":
                v2.append((pos_b, b))
        else:
            del left[i]
            if tag_a == "u":
                v1.append((pos_a, a))
            pieces = tuple(splitter(b)) if splitter else ()
            if any(p & ~b or p == b for p in pieces):
                raise ValueError("splitter must return letters properly inside the split letter")
            right[j : j + 1] = [(p, "x", -1) for p in pieces]
            if tag_b == "u":
                v2.append((pos_b, b))
            while True:
                inner = _absorbable(g, [e[0] for e in right])
                if inner is None:
                    break
                del right[inner[0]]

    def part(side: list, tag: str) -> Word:
        return normal_form(g, [e[0] for e in side if e[1] == tag])

    def deleted(found: list[tuple[int, Letter]]) -> Word:
        return normal_form(g, [s for _, s in sorted(found)])

    return PairReduction(
        u1=part(left, "u"),
        v1=deleted(v1),
        x1=part(left, "x"),
        x2=part(right, "x"),
        v2=deleted(v2),
        u2=part(right, "u"),
        w1_star=tuple(e[0] for e in left),
        w2_star=tuple(e[0] for e in right),
    )
