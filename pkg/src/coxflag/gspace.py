"""Coloured incidence graphs, their flags, and flag paths.

Vertices are dense integers with a colour index each; a flag is a tuple of
vertex indices, one per colour, whose pairs along the diagram's edges are
edges of the space.  The word of a path from ``F`` to ``G`` is always read
in that direction.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .chamber import ChamberSystem, _bfs_order, dualize, undualize
from .coxgraph import ColourGraph, Letter, bits, popcount
from .errors import (
    BudgetExceeded,
    NoPath,
    NotAFlag,
    NotAGammaSpace,
    NotAPermutation,
    NotEquivalent,
    NotNice,
    NotSimplyConnected,
    ParseError,
)
from .words import (
    Word,
    commuting_word,
    equiv,
    format_word,
    is_reduced,
    normal_form,
    preceq,
    reduce_concat,
    require_reduced,
    sr_support,
    _absorbable,
)

Flag = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class GammaSpace:
    graph: ColourGraph
    colour: tuple[int, ...]
    nbr: tuple[int, ...]
    ids: tuple[int, ...] = ()
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.ids:
            object.__setattr__(self, "ids", tuple(range(len(self.colour))))
        if len(self.nbr) != len(self.colour) or len(self.ids) != len(self.colour):
            raise ValueError("vertex tables disagree in length")

    # -- construction -------------------------------------------------

    @classmethod
    def build(
        cls, g: ColourGraph, colours: Sequence[int], edges: Iterable[tuple[int, int]], ids: Sequence[int] = ()
    ) -> "GammaSpace":
        nbr = [0] * len(colours)
        for a, b in edges:
            if a == b:
                raise NotAGammaSpace(f"loop at vertex {a}")
            nbr[a] |= 1 << b
            nbr[b] |= 1 << a
        return cls(g, tuple(colours), tuple(nbr), tuple(ids))

    @classmethod
    def single_flag(cls, g: ColourGraph) -> "GammaSpace":
        edges = [(a, b) for a in range(g.size) for b in bits(g.adj[a]) if a < b]
        return cls.build(g, list(range(g.size)), edges)

    @classmethod
    def from_json(cls, g: ColourGraph, data: dict | str) -> "GammaSpace":
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", exc.pos) from None
        if "colours" in data and [str(c) for c in data["colours"]] != list(g.colours):
            raise ParseError("space colours do not match the graph")
        verts = data.get("vertices", [])
        ids = [int(v["id"]) for v in verts]
        if len(set(ids)) != len(ids):
            raise ParseError("duplicate vertex id")
        where = {v: i for i, v in enumerate(ids)}
        colours = []
        for v in verts:
            name = str(v["colour"])
            if name not in g.colours:
                raise ParseError(f"unknown colour {name!r}")
            colours.append(g.colours.index(name))
        edges = []
        for e in data.get("edges", []):
            a, b = int(e[0]), int(e[1])
            if a not in where or b not in where:
                raise ParseError(f"edge {e!r} mentions an unknown vertex")
            edges.append((where[a], where[b]))
        return cls.build(g, colours, edges, ids)

    def to_json(self) -> dict:
        return {
            "colours": list(self.graph.colours),
            "vertices": [{"id": self.ids[v], "colour": self.graph.colours[c]} for v, c in enumerate(self.colour)],
            "edges": [[self.ids[a], self.ids[b]] for a, b in self.edges()],
        }

    def flag_to_json(self, F: Flag) -> dict:
        return {self.graph.colours[c]: self.ids[v] for c, v in enumerate(F)}

    def flag_from_json(self, data: dict) -> Flag:
        where = {v: i for i, v in enumerate(self.ids)}
        try:
            F = tuple(where[int(data[name])] for name in self.graph.colours)
        except (KeyError, ValueError) as exc:
            raise ParseError(f"bad flag: {exc}") from None
        if not self.is_flag(F):
            raise NotAFlag(f"{data!r} is not a flag")
        return F

    # -- queries ------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.colour)

    def edges(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.size) for b in bits(self.nbr[a]) if a < b]

    def colour_mask(self, c: int) -> int:
        key = ("cmask", c)
        hit = self._cache.get(key)
        if hit is None:
            hit = sum(1 << v for v, k in enumerate(self.colour) if k == c)
            self._cache[key] = hit
        return hit

    def is_flag(self, F: Sequence[int]) -> bool:
        g = self.graph
        if len(F) != g.size:
            return False
        if any(not (0 <= F[c] < self.size) or self.colour[F[c]] != c for c in range(g.size)):
            return False
        return all(self.nbr[F[a]] >> F[b] & 1 for a in range(g.size) for b in bits(g.adj[a]))

    def flags(self) -> list[Flag]:
        """All flags in lexicographic order."""
        hit = self._cache.get("flags")
        if hit is not None:
            return hit
        g = self.graph
        order = _bfs_order(g)
        before = [[d for d in order[:k] if g.adjacent(order[k], d)] for k in range(len(order))]
        choice = [0] * g.size
        out: list[Flag] = []

        def extend(k: int) -> None:
            if k == len(order):
                out.append(tuple(choice))
                return
            c = order[k]
            cand = self.colour_mask(c)
            for d in before[k]:
                cand &= self.nbr[choice[d]]
            for v in bits(cand):
                choice[c] = v
                extend(k + 1)

        if g.size:
            extend(0)
        out.sort()
        self._cache["flags"] = out
        self._cache["flag_index"] = {F: i for i, F in enumerate(out)}
        return out

    def flag_index(self, F: Flag) -> int:
        self.flags()
        try:
            return self._cache["flag_index"][F]
        except KeyError:
            raise NotAFlag(f"{F} is not a flag") from None

    def induced(self, vertices: Iterable[int]) -> tuple["GammaSpace", list[int]]:
        """Induced subgraph, together with the list mapping new vertex indices to old ones."""
        keep = sorted(set(vertices))
        where = {v: i for i, v in enumerate(keep)}
        edges = [(where[a], where[b]) for a in keep for b in bits(self.nbr[a]) if b in where and a < b]
        sub = GammaSpace.build(self.graph, [self.colour[v] for v in keep], edges, [self.ids[v] for v in keep])
        return sub, keep

    # -- flag relations -------------------------------------------------

    def groups(self, s: int) -> dict[tuple, list[int]]:
        """Flag indices grouped by their vertices outside ``s``."""
        key = ("groups", s)
        hit = self._cache.get(key)
        if hit is None:
            hit = {}
            outside = [c for c in range(self.graph.size) if not s >> c & 1]
            for i, F in enumerate(self.flags()):
                hit.setdefault(tuple(F[c] for c in outside), []).append(i)
            self._cache[key] = hit
        return hit

    def group_of(self, F: Flag, s: int) -> list[int]:
        outside = tuple(F[c] for c in range(self.graph.size) if not s >> c & 1)
        return self.groups(s)[outside]

    def split_components(self, s: int) -> dict[int, int]:
        """Component label of each flag under steps that change a non-empty proper part of ``s``."""
        key = ("split", s)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        flags = self.flags()
        label: dict[int, int] = {}
        for members in self.groups(s).values():
            for i in members:
                if i in label:
                    continue
                label[i] = i
                todo = [i]
                while todo:
                    a = todo.pop()
                    for b in members:
                        if b not in label and difference_mask(flags[a], flags[b]) != s:
                            label[b] = i
                            todo.append(b)
        self._cache[key] = label
        return label

    def op_out(self, i: int) -> list[tuple[Letter, int]]:
        """All ``(s, j)`` with flag ``i`` opposite flag ``j`` along the letter ``s``."""
        table = self._cache.setdefault("op_out", {})
        hit = table.get(i)
        if hit is not None:
            return hit
        flags = self.flags()
        F = flags[i]
        out = []
        for s in self.graph.enumerate_letters():
            comps = self.split_components(s)
            for j in self.group_of(F, s):
                if difference_mask(F, flags[j]) == s and comps[j] != comps[i]:
                    out.append((s, j))
        table[i] = out
        return out


def difference_mask(F: Flag, G: Flag) -> int:
    m = 0
    for c, (a, b) in enumerate(zip(F, G)):
        if a != b:
            m |= 1 << c
    return m


def mix(F: Flag, G: Flag, mask: int) -> Flag:
    """``F`` with the colours in ``mask`` taken from ``G``."""
    return tuple(G[c] if mask >> c & 1 else F[c] for c in range(len(F)))


def difference(M: GammaSpace, F: Flag, G: Flag) -> tuple[int, Word]:
    d = difference_mask(F, G)
    return d, commuting_word(M.graph, d)


# ---------------------------------------------------------------------------
# validation and the chamber correspondence


@dataclass
class SpaceReport:
    valid: bool
    bad_edges: list[tuple[int, int]]
    lonely_vertices: list[int]
    loose_edges: list[tuple[int, int]]


def validate_space(M: GammaSpace) -> SpaceReport:
    """Colour constraints on edges plus: every vertex and every edge lies in a flag."""
    g = M.graph
    bad = [(a, b) for a, b in M.edges() if not g.adjacent(M.colour[a], M.colour[b])]
    in_flag = 0
    pairs = set()
    for F in M.flags():
        for c in range(g.size):
            in_flag |= 1 << F[c]
            for d in bits(g.adj[c]):
                pairs.add((F[c], F[d]))
    lonely = [v for v in range(M.size) if not in_flag >> v & 1]
    loose = [(a, b) for a, b in M.edges() if (a, b) not in pairs and (a, b) not in bad]
    ids = M.ids
    return SpaceReport(
        valid=not (bad or lonely or loose),
        bad_edges=[(ids[a], ids[b]) for a, b in bad],
        lonely_vertices=[ids[v] for v in lonely],
        loose_edges=[(ids[a], ids[b]) for a, b in loose],
    )


def to_space(X: ChamberSystem) -> GammaSpace:
    """Vertices of colour ``c`` are the dual ``c``-classes; adjacency is sharing a chamber."""
    D = X if X.dual else dualize(X)
    g = X.graph
    offset = []
    colours: list[int] = []
    for c in range(g.size):
        offset.append(len(colours))
        colours.extend([c] * len(D.classes(c)))
    edges = set()
    for x in range(D.size):
        for a in range(g.size):
            for b in bits(g.adj[a]):
                if a < b:
                    edges.add((offset[a] + D.labels[a][x], offset[b] + D.labels[b][x]))
    return GammaSpace.build(g, colours, sorted(edges))


def chamber_flags(X: ChamberSystem) -> list[Flag]:
    """The flag of :func:`to_space` attached to each chamber."""
    D = X if X.dual else dualize(X)
    g = X.graph
    offset, total = [], 0
    for c in range(g.size):
        offset.append(total)
        total += len(D.classes(c))
    return [tuple(offset[c] + D.labels[c][x] for c in range(g.size)) for x in range(D.size)]


def to_chambers(M: GammaSpace, check: bool = True) -> ChamberSystem:
    """The dual chamber system on the flags: same vertex of colour ``c`` means dual ``c``-related."""
    if check and not validate_space(M).valid:
        raise NotAGammaSpace("input is not a Gamma-space")
    flags = M.flags()
    rows = tuple(tuple(F[c] for F in flags) for c in range(M.graph.size))
    return ChamberSystem(M.graph, rows, dual=True)


def chamber_roundtrip(X: ChamberSystem) -> bool:
    """Whether the chamber-to-flag map is an isomorphism onto the flag system of ``to_space(X)``."""
    M = to_space(X)
    phi = chamber_flags(X)
    flags = M.flags()
    if sorted(phi) != flags:
        return False
    D = X if X.dual else dualize(X)
    back = to_chambers(M, check=False)
    pos = {F: i for i, F in enumerate(flags)}
    image = [pos[F] for F in phi]
    for c in range(X.graph.size):
        for x in range(X.size):
            for y in range(x + 1, X.size):
                if (D.labels[c][x] == D.labels[c][y]) != (back.labels[c][image[x]] == back.labels[c][image[y]]):
                    return False
    if not X.dual:
        ordinary = undualize(back)
        for c in range(X.graph.size):
            for x in range(X.size):
                for y in range(x + 1, X.size):
                    if X.related(x, y, c) != ordinary.related(image[x], image[y], c):
                        return False
    return True


def space_roundtrip(M: GammaSpace) -> bool:
    """Whether vertices of ``M`` correspond to the vertices of ``to_space(to_chambers(M))``."""
    D = to_chambers(M, check=False)
    M2 = to_space(D)
    flags = M.flags()
    phi = chamber_flags(D)
    image: dict[int, int] = {}
    for F, F2 in zip(flags, phi):
        for c in range(M.graph.size):
            if image.setdefault(F[c], F2[c]) != F2[c]:
                return False
    if len(image) != M.size or len(set(image.values())) != M2.size:
        return False
    for a in range(M.size):
        for b in range(M.size):
            if bool(M.nbr[a] >> b & 1) != bool(M2.nbr[image[a]] >> image[b] & 1):
                return False
    return True


# ---------------------------------------------------------------------------
# paths


@dataclass(frozen=True)
class FlagPath:
    flags: tuple[Flag, ...]
    word: Word

    @property
    def start(self) -> Flag:
        return self.flags[0]

    @property
    def end(self) -> Flag:
        return self.flags[-1]

    def __len__(self) -> int:
        return len(self.word)


def is_weak_path(P: FlagPath) -> bool:
    return len(P.flags) == len(P.word) + 1 and all(
        difference_mask(P.flags[i], P.flags[i + 1]) == P.word[i] for i in range(len(P.word))
    )


def op_letter(M: GammaSpace, F: Flag, G: Flag, s: Letter) -> bool:
    """No weak path from ``F`` to ``G`` has a splitting of ``s`` as its word."""
    d = difference_mask(F, G)
    if d & ~s:
        raise NotEquivalent(f"flags differ outside {M.graph.format_set(s)}")
    if d != s:
        return False
    comps = M.split_components(s)
    return comps[M.flag_index(F)] != comps[M.flag_index(G)]


def is_reduced_path(M: GammaSpace, P: FlagPath) -> bool:
    return (
        is_weak_path(P)
        and is_reduced(M.graph, P.word)
        and all(op_letter(M, P.flags[i], P.flags[i + 1], P.word[i]) for i in range(len(P.word)))
    )


def canonical_path(M: GammaSpace, F: Flag, G: Flag) -> list[tuple[Letter, Flag]]:
    """The weak path changing one component of the difference at a time."""
    steps = []
    cur = F
    for s in M.graph.components(difference_mask(F, G)):
        cur = mix(cur, G, s)
        steps.append((s, cur))
    return steps


def splitting_path(M: GammaSpace, F: Flag, G: Flag, s: Letter) -> list[tuple[Letter, Flag]] | None:
    """A weak path from ``F`` to ``G`` whose letters are properly inside ``s``; ``None`` if ``F op_s G``."""
    if difference_mask(F, G) & ~s:
        raise NotEquivalent("flags differ outside the letter")
    flags = M.flags()
    members = M.group_of(F, s)
    start, goal = M.flag_index(F), M.flag_index(G)
    prev = {start: -1}
    queue = deque([start])
    while queue:
        a = queue.popleft()
        if a == goal:
            break
        for b in members:
            if b not in prev and difference_mask(flags[a], flags[b]) != s:
                prev[b] = a
                queue.append(b)
    if goal not in prev:
        return None
    chain = [goal]
    while chain[-1] != start:
        chain.append(prev[chain[-1]])
    chain.reverse()
    steps = []
    for a, b in zip(chain, chain[1:]):
        steps.extend(canonical_path(M, flags[a], flags[b]))
    return steps


def _swap(flags: list[Flag], word: list[Letter], k: int) -> None:
    """Exchange the commuting steps ``k`` and ``k+1`` of a path in place."""
    flags[k + 1] = mix(flags[k], flags[k + 2], word[k + 1])
    word[k], word[k + 1] = word[k + 1], word[k]


def find_reduced_path(M: GammaSpace, F: Flag, G: Flag, max_rounds: int = 100_000) -> FlagPath:
    """Reduce the canonical weak path from ``F`` to ``G`` over actual flags of ``M``."""
    M.flag_index(F)
    M.flag_index(G)
    g = M.graph
    flags = [F] + [f for _, f in canonical_path(M, F, G)]
    word = [s for s, _ in canonical_path(M, F, G)]
    for _ in range(max_rounds):
        bad = next(
            (k for k in range(len(word)) if not op_letter(M, flags[k], flags[k + 1], word[k])),
            None,
        )
        if bad is not None:
            steps = splitting_path(M, flags[bad], flags[bad + 1], word[bad])
            if steps is None:
                raise NoPath("step is neither opposite nor split")
            word[bad : bad + 1] = [s for s, _ in steps]
            flags[bad + 1 : bad + 2] = [f for _, f in steps]
            continue
        hit = _absorbable(g, word)
        if hit is None:
            return FlagPath(tuple(flags), tuple(word))
        i, j = hit
        if i < j:
            for k in range(i, j - 1):
                _swap(flags, word, k)
            k = j - 1
        else:
            for k in range(i - 1, j, -1):
                _swap(flags, word, k)
            k = j
        a, b = word[k], word[k + 1]
        A, C = flags[k], flags[k + 2]
        big = a | b
        if A == C:
            del word[k : k + 2]
            del flags[k + 1 : k + 3]
            continue
        d = difference_mask(A, C)
        if d == big and op_letter(M, A, C, big):
            steps = [(big, C)]
        else:
            steps = splitting_path(M, A, C, big) if d == big else canonical_path(M, A, C)
            if steps is None:
                raise NoPath("absorbed pair cannot be shortened")
        word[k : k + 2] = [s for s, _ in steps]
        flags[k + 1 : k + 3] = [f for _, f in steps]
    raise NoPath("path reduction did not terminate")


def permute_path(M: GammaSpace, P: FlagPath, target: Sequence[Letter]) -> FlagPath:
    """Reorder a weak path to the word ``target``, keeping each step's vertex substitution."""
    g = M.graph
    target = tuple(target)
    if not equiv(g, P.word, target):
        raise NotAPermutation(f"{format_word(g, target)} is not a permutation of {format_word(g, P.word)}")
    flags = list(P.flags)
    word = list(P.word)
    for pos, s in enumerate(target):
        j = word.index(s, pos)
        for k in range(j - 1, pos - 1, -1):
            if not g.commute(word[k], word[k + 1]):
                raise NotAPermutation("letters do not commute")
            _swap(flags, word, k)
    return FlagPath(tuple(flags), tuple(word))


def appendable(g: ColourGraph, u: Sequence[Letter], s: Letter) -> bool:
    """Whether ``u.s`` is reduced, given that ``u`` is."""
    s_free = True
    for i in range(len(u) - 1, -1, -1):
        t = u[i]
        if s_free and s & ~t == 0:
            return False
        if t & ~s == 0 and all(g.commute(t, u[k]) for k in range(i + 1, len(u))):
            return False
        if not g.commute(s, t):
            s_free = False
    return True


def words_from(M: GammaSpace, F: Flag, limit: int | None = None) -> dict[int, Word]:
    """Word of a reduced path from ``F`` to every flag (by flag index), explored breadth first."""
    table = M._cache.setdefault("words_from", {})
    start = M.flag_index(F)
    if start in table:
        return table[start]
    g = M.graph
    limit = limit if limit is not None else len(M.flags()) ** 2 + 10
    found = {start: ()}
    seen = {(start, ())}
    queue = deque([(start, ())])
    while queue:
        i, word = queue.popleft()
        for s, j in M.op_out(i):
            if not appendable(g, word, s):
                continue
            nw = normal_form(g, word + (s,))
            if (j, nw) in seen:
                continue
            seen.add((j, nw))
            if len(seen) > limit:
                raise BudgetExceeded("reduced path exploration exceeded its budget")
            found.setdefault(j, nw)
            queue.append((j, nw))
    table[start] = found
    return found


def flag_word(M: GammaSpace, F: Flag, G: Flag) -> Word:
    """The word of the reduced paths from ``F`` to ``G``, in normal form."""
    found = words_from(M, F)
    j = M.flag_index(G)
    if j not in found:
        raise NoPath("flags are not connected by a reduced path")
    return found[j]


# ---------------------------------------------------------------------------
# simple connectedness


@dataclass
class SCResult:
    simply_connected: bool
    certificate: FlagPath | None
    explored: int
    elementary: bool | None = None
    elementary_certificate: FlagPath | None = None


def closed_reduced_path(M: GammaSpace, budget: int | None = None) -> tuple[FlagPath | None, int]:
    """Search for a non-trivial closed reduced flag path; returns it (or ``None``) and the work done."""
    g = M.graph
    flags = M.flags()
    n = len(flags)
    budget = budget if budget is not None else max(n * n, 100)
    work = 0
    for start in range(n):
        seen = {(start, ())}
        stack = [(start, (), (start,), ())]
        while stack:
            i, key, path, word = stack.pop()
            work += 1
            if work > budget:
                raise BudgetExceeded(f"simple connectedness search exceeded {budget} steps")
            pending: list = []
            for s, j in M.op_out(i):
                if not appendable(g, word, s):
                    continue
                nw = word + (s,)
                if j == start:
                    return FlagPath(tuple(flags[k] for k in path + (j,)), nw), work
                if len(nw) >= n:
                    continue
                nk = normal_form(g, nw)
                if (j, nk) not in seen:
                    seen.add((j, nk))
                    pending.append((j, nk, path + (j,), nw))
            stack.extend(reversed(pending))
    return None, work


def split_distance(M: GammaSpace, F: Flag, s: Letter) -> dict[int, int]:
    """Fewest steps, each changing a proper part of ``s``, from ``F`` to the flags of its ``s``-residue."""
    flags = M.flags()
    members = M.group_of(F, s)
    start = M.flag_index(F)
    dist = {start: 0}
    queue = deque([start])
    while queue:
        a = queue.popleft()
        for b in members:
            if b not in dist and difference_mask(flags[a], flags[b]) != s:
                dist[b] = dist[a] + 1
                queue.append(b)
    return dist


def elementary_cycle(M: GammaSpace, n: int, budget: int = 1_000_000) -> FlagPath | None:
    """A closed sequence of ``n`` steps, each opposite up to ``n`` splitting moves, with reduced word."""
    g = M.graph
    flags = M.flags()
    letters = g.enumerate_letters()
    work = 0
    far: dict[tuple[int, int], list[int]] = {}

    def far_flags(i: int, s: Letter) -> list[int]:
        key = (i, s)
        if key not in far:
            dist = split_distance(M, flags[i], s)
            far[key] = [j for j in M.group_of(flags[i], s) if dist.get(j, n + 1) > n]
        return far[key]

    for start in range(len(flags)):
        stack = [(start, (), (start,))]
        while stack:
            i, word, path = stack.pop()
            for s in letters:
                if not appendable(g, word, s):
                    continue
                for j in far_flags(i, s):
                    work += 1
                    if work > budget:
                        raise BudgetExceeded("elementary cycle search exceeded its budget")
                    if len(word) + 1 == n:
                        if j == start:
                            return FlagPath(tuple(flags[k] for k in path + (j,)), word + (s,))
                    else:
                        stack.append((j, word + (s,), path + (j,)))
    return None


def is_simply_connected(M: GammaSpace, budget: int | None = None, elementary: int = 0) -> SCResult:
    """Exhaustive search for closed reduced flag paths; optionally also the bounded elementary test."""
    cert, work = closed_reduced_path(M, budget)
    res = SCResult(cert is None, cert, work)
    if elementary:
        found = None
        for n in range(1, elementary + 1):
            found = elementary_cycle(M, n)
            if found:
                break
        res.elementary = found is None
        res.elementary_certificate = found
    return res


def require_sc(M: GammaSpace) -> None:
    hit = M._cache.get("sc")
    if hit is None:
        hit = M._cache["sc"] = is_simply_connected(M).simply_connected
    if not hit:
        raise NotSimplyConnected("space has a non-trivial closed reduced flag path")


# ---------------------------------------------------------------------------
# simple extensions and generators


def simple_extension(A: GammaSpace, F: Flag, s: Letter) -> tuple[GammaSpace, Flag]:
    """Adjoin a fresh flag ``F*`` agreeing with ``F`` off ``s``; returns the new space and ``F*``."""
    if not A.is_flag(F):
        raise NotAFlag(f"{F} is not a flag")
    g = A.graph
    colours = list(A.colour)
    ids = list(A.ids)
    nxt = max(ids, default=-1) + 1
    star = list(F)
    for c in bits(s):
        star[c] = len(colours)
        colours.append(c)
        ids.append(nxt)
        nxt += 1
    edges = A.edges()
    for a in range(g.size):
        for b in bits(g.adj[a]):
            if a < b and (s >> a & 1 or s >> b & 1):
                edges.append((star[a], star[b]))
    return GammaSpace.build(g, colours, edges, ids), tuple(star)


def space_from_building(g: ColourGraph, radius: int, fanout: int, seed: int = 0) -> GammaSpace:
    from .chamber import generate_quasi_building

    return to_space(generate_quasi_building(g, radius=radius, fanout=fanout, seed=seed))


def generate_space(
    g: ColourGraph,
    steps: int,
    seed: int = 0,
    letters: Sequence[Letter] | None = None,
    verify: bool = True,
) -> GammaSpace:
    """Random tower of simple extensions from a single flag; simple connectedness is checked, not assumed."""
    rng = random.Random(seed)
    letters = list(letters) if letters is not None else g.enumerate_letters()
    M = GammaSpace.single_flag(g)
    for _ in range(steps):
        F = rng.choice(M.flags())
        M, _ = simple_extension(M, F, rng.choice(letters))
    if verify:
        require_sc(M)
    return M


# ---------------------------------------------------------------------------
# niceness, base-points and hulls


def flags_within(M: GammaSpace, D: Iterable[int]) -> list[int]:
    mask = 0
    for v in D:
        mask |= 1 << v
    return [i for i, F in enumerate(M.flags()) if all(mask >> v & 1 for v in F)]


def nice_failure(M: GammaSpace, D: Iterable[int]) -> str | None:
    """Why ``D`` is not nice in ``M``, or ``None`` when it is."""
    D = set(D)
    inside = flags_within(M, D)
    covered = set()
    for i in inside:
        covered.update(M.flags()[i])
    lonely = sorted(D - covered)
    if lonely:
        return f"vertex {M.ids[lonely[0]]} lies in no flag of the set"
    sub, keep = M.induced(D)
    where = {v: k for k, v in enumerate(keep)}
    for s in M.graph.enumerate_letters():
        mcomp = M.split_components(s)
        scomp = sub.split_components(s)
        for i in inside:
            F = M.flags()[i]
            Fs = tuple(where[v] for v in F)
            fi = sub.flag_index(Fs)
            for j in M.group_of(F, s):
                G = M.flags()[j]
                if difference_mask(F, G) != s or not all(v in where for v in G):
                    continue
                gi = sub.flag_index(tuple(where[v] for v in G))
                if scomp[fi] != scomp[gi] and mcomp[i] == mcomp[j]:
                    return f"flags {F} and {G} are opposite inside the set but not in the space"
    return None


def is_nice(M: GammaSpace, D: Iterable[int]) -> bool:
    return nice_failure(M, D) is None


def _smallest(g: ColourGraph, candidates: list[tuple[Word, int]]) -> tuple[Word, int]:
    """A candidate whose word lies below all others; ties go to the least flag index."""
    candidates = sorted(candidates, key=lambda wc: (len(wc[0]), wc[1]))
    for u, i in candidates:
        if all(preceq(g, u, v) for v, _ in candidates):
            return u, i
    # no smallest word: fall back to a minimal one
    for u, i in candidates:
        if not any(preceq(g, v, u) and not equiv(g, u, v) for v, _ in candidates):
            return u, i
    raise AssertionError("unreachable")


def base_point(M: GammaSpace, F: Flag, D: Iterable[int], check: bool = True) -> tuple[Flag, Word]:
    """Flag of ``D`` reached from ``F`` by the smallest word, together with that word."""
    D = set(D)
    if check:
        why = nice_failure(M, D)
        if why:
            raise NotNice(why)
    inside = flags_within(M, D)
    found = words_from(M, F)
    u, i = _smallest(M.graph, [(found[j], j) for j in inside])
    G = M.flags()[i]
    if check:
        from_G = words_from(M, G)
        for j in inside[:32]:
            if not equiv(M.graph, found[j], reduce_concat(M.graph, u, from_G[j])):
                raise NotNice(f"base-point condition fails at flag {M.flags()[j]}")
    return G, u


def canonical_base(g: ColourGraph, G: Flag, u: Sequence[Letter]) -> list[int]:
    """Vertices of ``G`` whose colours lie outside the right stabiliser support of ``u``."""
    require_reduced(g, u)
    keep = g.full & ~sr_support(g, u)
    return [G[c] for c in bits(keep)]


def realize_type(M: GammaSpace, G: Flag, u: Sequence[Letter]) -> tuple[GammaSpace, Flag]:
    """Tower of simple extensions, last letter first, ending at a flag ``F`` with word ``u`` to ``G``."""
    require_reduced(M.graph, u)
    cur = G
    for s in reversed(tuple(u)):
        M, cur = simple_extension(M, cur, s)
    return M, cur


def check_P_u(M: GammaSpace, F: Flag, G: Flag, u: Sequence[Letter]) -> bool:
    """Whether a chain ``F = F0, ..., Fn = G`` exists with consecutive flags differing inside ``u[i]``."""
    flags = M.flags()
    reach = {M.flag_index(F)}
    for s in u:
        nxt = set()
        for i in reach:
            nxt.update(M.group_of(flags[i], s))
        reach = nxt
    return M.flag_index(G) in reach


def restrict_residue(M: GammaSpace, F: Flag, colours: int) -> GammaSpace:
    """The space over the induced diagram on ``colours`` formed by flags differing from ``F`` only there."""
    g = M.graph
    keep = bits(colours)
    sub_g = ColourGraph.from_edges(
        [g.colours[c] for c in keep],
        [(g.colours[a], g.colours[b]) for a in keep for b in keep if a < b and g.adjacent(a, b)],
    )
    verts = set()
    for j in M.group_of(F, colours):
        verts.update(M.flags()[j][c] for c in keep)
    order = sorted(verts)
    where = {v: k for k, v in enumerate(order)}
    edges = [(where[a], where[b]) for a in order for b in bits(M.nbr[a]) if b in where and a < b]
    return GammaSpace.build(sub_g, [keep.index(M.colour[v]) for v in order], edges, [M.ids[v] for v in order])


def path_vertices(P: FlagPath) -> set[int]:
    return {v for F in P.flags for v in F}


def homomorphisms(
    M: GammaSpace,
    source: Iterable[int],
    fixed: Iterable[int] = (),
    target: Iterable[int] | None = None,
    induced: bool = False,
    limit: int = 1_000_000,
) -> Iterator[dict[int, int]]:
    """Colour-preserving graph maps from ``source`` (induced in ``M``) into ``target``, fixing ``fixed``.

    With ``induced`` set the maps must be injective and reflect edges as well.
    """
    src = sorted(set(source))
    fixed = set(fixed)
    tgt_mask = 0
    for v in target if target is not None else range(M.size):
        tgt_mask |= 1 << v
    src_set = set(src)
    order = [v for v in src if v in fixed]
    rest = [v for v in src if v not in fixed]
    placed = set(order)
    while rest:
        nxt = next((v for v in rest if any(M.nbr[v] >> w & 1 for w in placed)), rest[0])
        rest.remove(nxt)
        order.append(nxt)
        placed.add(nxt)
    image: dict[int, int] = {}
    used = 0
    count = 0

    def extend(k: int) -> Iterator[dict[int, int]]:
        nonlocal used, count
        if k == len(order):
            yield dict(image)
            return
        v = order[k]
        if v in fixed:
            cand = 1 << v if tgt_mask >> v & 1 else 0
        else:
            cand = M.colour_mask(M.colour[v]) & tgt_mask
        for w in order[:k]:
            if M.nbr[v] >> w & 1:
                cand &= M.nbr[image[w]]
            elif induced:
                cand &= ~M.nbr[image[w]]
        if induced:
            cand &= ~used
        for x in bits(cand):
            count += 1
            if count > limit:
                raise BudgetExceeded("homomorphism enumeration exceeded its limit")
            image[v] = x
            used |= 1 << x
            yield from extend(k + 1)
            used &= ~(1 << x)
            del image[v]

    del src_set
    yield from extend(0)


def specialise(M: GammaSpace, A: Iterable[int], limit: int = 1_000_000) -> dict[int, int]:
    """A colour-preserving homomorphism from ``M`` onto ``A`` fixing ``A`` pointwise."""
    A = set(A)
    try:
        for f in homomorphisms(M, range(M.size), fixed=A, target=A, limit=limit):
            return f
    except BudgetExceeded:
        raise NotNice("no specialisation found within the search limit") from None
    raise NotNice("no homomorphism onto the set fixes it")


def nice_copies(M: GammaSpace, N: set[int], fixed: set[int], limit: int = 200_000) -> list[frozenset[int]]:
    """Images of ``N`` under induced embeddings into ``M`` fixing ``fixed``, keeping the nice ones."""
    out = []
    seen = set()
    for f in homomorphisms(M, N, fixed=fixed, induced=True, limit=limit):
        img = frozenset(f.values())
        if img in seen:
            continue
        seen.add(img)
        if is_nice(M, img):
            out.append(img)
    return out


def nice_hull(M: GammaSpace, A: Iterable[int], check_sc: bool = True) -> set[int]:
    """Smallest nice superset of ``A``, grown one point at a time along minimal reduced paths."""
    if check_sc:
        require_sc(M)
    g = M.graph
    points = sorted(set(A))
    flags = M.flags()
    if not points:
        return set(flags[0])
    first = next(F for F in flags if points[0] in F)
    N = set(first)
    done = {points[0]}
    for a in points[1:]:
        if a in N:
            done.add(a)
            continue
        best: tuple | None = None
        for copy in nice_copies(M, N, done):
            inside = flags_within(M, copy)
            for F in flags:
                if a not in F:
                    continue
                found = words_from(M, F)
                u, j = _smallest(g, [(found[k], k) for k in inside])
                cand = (u, M.flag_index(F), j, copy)
                if best is None or _better(g, cand, best):
                    best = cand
        assert best is not None
        u, fi, gj, copy = best
        P = find_reduced_path(M, flags[fi], flags[gj])
        N = set(copy) | path_vertices(P)
        done.add(a)
    return N


def _better(g: ColourGraph, cand: tuple, best: tuple) -> bool:
    u, v = cand[0], best[0]
    if preceq(g, u, v) and not equiv(g, u, v):
        return True
    if preceq(g, v, u):
        return False
    return (len(u), cand[1], cand[2], sorted(cand[3])) < (len(v), best[1], best[2], sorted(best[3]))
