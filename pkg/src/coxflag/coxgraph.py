"""The Coxeter diagram and letter-level combinatorics.

Colours are addressed by their position in ``ColourGraph.colours``; a colour
set is an ``int`` bitmask over those positions.  A *letter* is a non-empty
connected colour set, so letters are plain ints as well.  Two colours joined
by an edge do not commute.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from .errors import InvalidLetter, ParseError, SingletonLetter

Letter = int
ColourSet = int


def bits(mask: int) -> list[int]:
    """Positions of the set bits of ``mask`` in increasing order."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@lru_cache(maxsize=None)
def letter_key(mask: int) -> tuple[int, ...]:
    """Sort key realising the canonical letter order (sorted colour lists, lexicographic)."""
    return tuple(bits(mask))


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


@dataclass(frozen=True)
class GraphInvariants:
    r: int | None
    n: int
    K: int
    components: tuple[ColourSet, ...]


@dataclass(frozen=True, eq=False)
class ColourGraph:
    colours: tuple[str, ...]
    adj: tuple[int, ...]
    _conn: dict = field(default_factory=dict, repr=False, compare=False)
    _bd: dict = field(default_factory=dict, repr=False, compare=False)
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(set(self.colours)) != len(self.colours):
            raise ValueError("colour identifiers must be unique")
        if len(self.colours) > 64:
            raise ValueError("at most 64 colours are supported")
        for i, a in enumerate(self.adj):
            if a >> i & 1:
                raise ValueError(f"self edge at colour {self.colours[i]}")
            for j in bits(a):
                if not self.adj[j] >> i & 1:
                    raise ValueError("adjacency must be symmetric")

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ColourGraph) and (self.colours, self.adj) == (other.colours, other.adj)

    def __hash__(self) -> int:
        return hash((self.colours, self.adj))

    def memo(self, kind: str) -> dict:
        """Per-graph cache table used by the word routines."""
        table = self._memo.get(kind)
        if table is None:
            table = self._memo[kind] = {}
        return table

    # -- construction -------------------------------------------------

    @classmethod
    def from_edges(cls, colours: Sequence[str], edges: Iterable[tuple[str, str]]) -> "ColourGraph":
        colours = tuple(str(c) for c in colours)
        index = {c: i for i, c in enumerate(colours)}
        adj = [0] * len(colours)
        seen = set()
        for a, b in edges:
            a, b = str(a), str(b)
            if a not in index or b not in index:
                raise ParseError(f"edge mentions unknown colour {a if a not in index else b!r}")
            if a == b:
                raise ParseError(f"self edge on colour {a!r}")
            key = frozenset((a, b))
            if key in seen:
                raise ParseError(f"duplicate edge {a}-{b}")
            seen.add(key)
            adj[index[a]] |= 1 << index[b]
            adj[index[b]] |= 1 << index[a]
        return cls(colours, tuple(adj))

    @classmethod
    def path(cls, size: int) -> "ColourGraph":
        return cls.from_edges([str(i) for i in range(size)], [(str(i), str(i + 1)) for i in range(size - 1)])

    @classmethod
    def complete(cls, size: int) -> "ColourGraph":
        names = [str(i) for i in range(size)]
        return cls.from_edges(names, combinations(names, 2))

    @classmethod
    def cycle(cls, size: int) -> "ColourGraph":
        names = [str(i) for i in range(size)]
        return cls.from_edges(names, [(names[i], names[(i + 1) % size]) for i in range(size)])

    @classmethod
    def discrete(cls, size: int) -> "ColourGraph":
        return cls.from_edges([str(i) for i in range(size)], [])

    @classmethod
    def from_json(cls, data: dict | str) -> "ColourGraph":
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", exc.pos) from None
        if not isinstance(data, dict) or "colours" not in data:
            raise ParseError("graph JSON needs a 'colours' list")
        edges = data.get("edges", [])
        for e in edges:
            if not isinstance(e, (list, tuple)) or len(e) != 2:
                raise ParseError(f"malformed edge {e!r}")
        return cls.from_edges(data["colours"], [tuple(e) for e in edges])

    def to_json(self) -> dict:
        edges = [[self.colours[i], self.colours[j]] for i in range(self.size) for j in bits(self.adj[i]) if i < j]
        return {"colours": list(self.colours), "edges": edges}

    # -- basic queries ------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.colours)

    @property
    def full(self) -> ColourSet:
        return (1 << self.size) - 1

    def index(self, colour: str) -> int:
        try:
            return self.colours.index(str(colour))
        except ValueError:
            raise InvalidLetter(f"unknown colour {colour!r}") from None

    def adjacent(self, i: int, j: int) -> bool:
        return bool(self.adj[i] >> j & 1)

    def neighbours(self, mask: ColourSet) -> ColourSet:
        out = 0
        for i in bits(mask):
            out |= self.adj[i]
        return out

    def is_connected(self, mask: ColourSet) -> bool:
        """True iff ``mask`` is non-empty and induces a connected subgraph."""
        hit = self._conn.get(mask)
        if hit is None:
            hit = mask != 0 and self._grow(mask & -mask, mask) == mask
            self._conn[mask] = hit
        return hit

    def _grow(self, seed: int, within: int) -> int:
        reached = seed
        frontier = seed
        while frontier:
            frontier = self.neighbours(frontier) & within & ~reached
            reached |= frontier
        return reached

    def components(self, mask: ColourSet) -> list[Letter]:
        """Connected components of ``mask``, least colour first."""
        out = []
        rest = mask
        while rest:
            comp = self._grow(rest & -rest, rest)
            out.append(comp)
            rest &= ~comp
        return out

    def is_letter(self, mask: int) -> bool:
        return 0 < mask <= self.full and self.is_connected(mask)

    def boundary(self, s: Letter) -> ColourSet:
        """``s`` together with all its neighbours; the complement commutes with ``s``."""
        hit = self._bd.get(s)
        if hit is None:
            hit = s | self.neighbours(s)
            self._bd[s] = hit
        return hit

    def commute(self, s: Letter, t: Letter) -> bool:
        return not (self.boundary(s) & t)

    # -- letters ------------------------------------------------------

    def letter(self, colours: Iterable[str | int]) -> Letter:
        """Build a letter from colour identifiers (or indices), validating connectivity."""
        m = 0
        for c in colours:
            m |= 1 << (c if isinstance(c, int) else self.index(c))
        if not self.is_letter(m):
            raise InvalidLetter(f"{self.format_set(m)} is not connected")
        return m

    def format_set(self, mask: ColourSet) -> str:
        return "{" + ",".join(self.colours[i] for i in bits(mask)) + "}"

    def colour_names(self, mask: ColourSet) -> list[str]:
        return [self.colours[i] for i in bits(mask)]

    def enumerate_letters(self, max_size: int | None = None) -> list[Letter]:
        """All letters of size at most ``max_size``, ordered by size and then lexicographically."""
        if max_size is None:
            max_size = self.size
        found = [m for m in range(1, self.full + 1) if popcount(m) <= max_size and self.is_connected(m)]
        return sorted(found, key=lambda m: (popcount(m), letter_key(m)))


def letters_commute(g: ColourGraph, s: Letter, t: Letter) -> bool:
    return g.commute(s, t)


def components(g: ColourGraph, subset: ColourSet) -> list[Letter]:
    return g.components(subset)


def boundary(g: ColourGraph, s: Letter) -> ColourSet:
    return g.boundary(s)


def cent_word(g: ColourGraph, v: Sequence[Letter], s: Letter) -> tuple[Letter, ...]:
    """Product over the letters ``t`` of ``v`` of the components of ``t`` minus the boundary of ``s``."""
    out: list[Letter] = []
    bd = g.boundary(s)
    for t in v:
        out.extend(g.components(t & ~bd))
    return tuple(out)


def removable_pair(g: ColourGraph, s: Letter) -> tuple[int, int]:
    """Two least colours of ``s`` whose individual removal leaves ``s`` connected."""
    members = bits(s)
    if len(members) < 2:
        raise SingletonLetter(f"{g.format_set(s)} has a single colour")
    good = [c for c in members if g.is_connected(s & ~(1 << c))]
    # every connected graph with two or more vertices has two non-cut vertices
    return good[0], good[1]


def _longest_induced_path(g: ColourGraph, cutoff: int | None) -> int:
    limit = g.size if cutoff is None else min(cutoff, g.size)
    best = 0

    def extend(path: list[int], used: int) -> None:
        nonlocal best
        best = max(best, len(path) - 1)
        if len(path) >= limit:
            return
        tail = path[-1]
        inner = used & ~(1 << tail)
        for nxt in bits(g.adj[tail] & ~used):
            if g.adj[nxt] & inner:
                continue
            path.append(nxt)
            extend(path, used | 1 << nxt)
            path.pop()

    for start in range(g.size):
        extend([start], 1 << start)
    return best


def graph_invariants(g: ColourGraph, cutoff: int | None = None) -> GraphInvariants:
    """Minimal valency, longest induced path (in edges), largest component size."""
    degrees = [popcount(a) for a in g.adj if a]
    comps = tuple(g.components(g.full))
    return GraphInvariants(
        r=min(degrees) if degrees else None,
        n=_longest_induced_path(g, cutoff),
        K=max((popcount(c) for c in comps), default=0),
        components=comps,
    )


def enumerate_letters(g: ColourGraph, max_size: int | None = None) -> list[Letter]:
    return g.enumerate_letters(max_size)
