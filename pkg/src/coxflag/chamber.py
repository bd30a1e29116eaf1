"""Chamber systems over a Coxeter diagram.

A chamber system stores, for every colour, the class label of each chamber.
Chambers are the integers ``0..n-1``.  The same container holds dual systems
(one partition per colour by "all other colours"); the ``dual`` flag only
records which reading is meant.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .coxgraph import ColourGraph, bits
from .errors import BadSchedule, Disconnected, EmptySeed, NotQuasiBuilding, SizeCapExceeded, UnknownChamber
from .words import Word, normal_form


def _relabel(labels: Sequence[int]) -> tuple[int, ...]:
    """Renumber class labels by first occurrence."""
    seen: dict[int, int] = {}
    return tuple(seen.setdefault(x, len(seen)) for x in labels)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass(frozen=True, eq=False)
class ChamberSystem:
    graph: ColourGraph
    labels: tuple[tuple[int, ...], ...]
    dual: bool = False
    _classes: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.labels) != self.graph.size:
            raise ValueError("need one partition per colour")
        sizes = {len(row) for row in self.labels}
        if len(sizes) > 1:
            raise ValueError("partitions disagree on the number of chambers")
        object.__setattr__(self, "labels", tuple(_relabel(row) for row in self.labels))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ChamberSystem)
            and self.graph == other.graph
            and self.labels == other.labels
            and self.dual == other.dual
        )

    def __hash__(self) -> int:
        return hash((self.graph, self.labels, self.dual))

    @property
    def size(self) -> int:
        return len(self.labels[0]) if self.labels else 0

    @classmethod
    def singleton(cls, g: ColourGraph) -> "ChamberSystem":
        return cls(g, tuple((0,) for _ in g.colours))

    @classmethod
    def from_partitions(cls, g: ColourGraph, n: int, partitions: dict, dual: bool = False) -> "ChamberSystem":
        """Build from ``{colour: [[chambers], ...]}``; chambers not listed form singleton classes."""
        rows = []
        for ci, name in enumerate(g.colours):
            blocks = partitions.get(name, partitions.get(ci, []))
            label = list(range(n, 2 * n))
            seen = set()
            for k, block in enumerate(blocks):
                for x in block:
                    if not 0 <= x < n:
                        raise UnknownChamber(f"chamber {x} out of range")
                    if x in seen:
                        raise ValueError(f"chamber {x} appears twice in the partition of colour {name}")
                    seen.add(x)
                    label[x] = k
            rows.append(tuple(label))
        return cls(g, tuple(rows), dual)

    @classmethod
    def from_json(cls, g: ColourGraph, data: dict | str) -> "ChamberSystem":
        if isinstance(data, str):
            data = json.loads(data)
        return cls.from_partitions(g, int(data["chambers"]), data.get("partitions", {}), bool(data.get("dual", False)))

    def to_json(self) -> dict:
        out = {"chambers": self.size, "partitions": {g: self.classes(i) for i, g in enumerate(self.graph.colours)}}
        if self.dual:
            out["dual"] = True
        return out

    def check(self, x: int) -> None:
        if not (isinstance(x, int) and 0 <= x < self.size):
            raise UnknownChamber(f"no chamber {x!r}")

    def classes(self, colour: int) -> list[list[int]]:
        hit = self._classes.get(colour)
        if hit is None:
            hit = []
            for x, k in enumerate(self.labels[colour]):
                if k == len(hit):
                    hit.append([])
                hit[k].append(x)
            self._classes[colour] = hit
        return hit

    def panel(self, x: int, colour: int) -> list[int]:
        return self.classes(colour)[self.labels[colour][x]]

    def related(self, x: int, y: int, colour: int) -> bool:
        return self.labels[colour][x] == self.labels[colour][y]

    def neighbours(self, x: int) -> list[tuple[int, int]]:
        """``(colour, chamber)`` pairs for every chamber sharing a panel with ``x``."""
        return [(c, y) for c in range(self.graph.size) for y in self.panel(x, c) if y != x]

    def join_labels(self, colours: int) -> tuple[int, ...]:
        """Class labels of the transitive closure of the relations in ``colours``."""
        uf = _UnionFind(self.size)
        for c in bits(colours):
            for block in self.classes(c):
                for y in block[1:]:
                    uf.union(block[0], y)
        return _relabel([uf.find(x) for x in range(self.size)])


def residue(X: ChamberSystem, x: int, s: int) -> set[int]:
    """The class of ``x`` under the closure of the relations coloured by ``s``."""
    X.check(x)
    seen = {x}
    todo = [x]
    while todo:
        y = todo.pop()
        for c in bits(s):
            for z in X.panel(y, c):
                if z not in seen:
                    seen.add(z)
                    todo.append(z)
    return seen


def dualize(X: ChamberSystem) -> ChamberSystem:
    full = X.graph.full
    rows = tuple(X.join_labels(full & ~(1 << c)) for c in range(X.graph.size))
    return ChamberSystem(X.graph, rows, dual=True)


def undualize(D: ChamberSystem) -> ChamberSystem:
    """Recover the ordinary relations of a dual system by intersecting the other colours."""
    n = D.graph.size
    rows = []
    for c in range(n):
        keys = [tuple(D.labels[b][x] for b in range(n) if b != c) for x in range(D.size)]
        rows.append(_relabel(keys))
    return ChamberSystem(D.graph, tuple(rows), dual=False)


# ---------------------------------------------------------------------------
# axioms


@dataclass
class AxiomReport:
    classes_nontrivial: bool
    connected: bool
    exchange: bool
    no_closed_reduced_path: bool
    dual_separates: bool | None
    dual_lifts: bool | None
    dagger: bool
    min_panel: int
    witnesses: dict

    @property
    def quasi_building(self) -> bool:
        return self.connected and self.exchange and self.no_closed_reduced_path

    @property
    def building(self) -> bool:
        return self.quasi_building and self.classes_nontrivial

    @property
    def dual_quasi_building(self) -> bool:
        return bool(self.dual_separates and self.dual_lifts)


def _exchange_failure(X: ChamberSystem) -> tuple | None:
    g = X.graph
    for a in range(g.size):
        for b in range(g.size):
            if a == b or g.adjacent(a, b):
                continue
            for x in range(X.size):
                other = set(X.panel(x, b)) - {x}
                for z in X.panel(x, a):
                    if z == x:
                        continue
                    for y in X.panel(z, b):
                        if y == z:
                            continue
                        if not any(X.related(w, y, a) and w != y for w in other):
                            return (x, z, y, g.colours[a], g.colours[b])
    return None


def _append_reduced(g: ColourGraph, word: tuple[int, ...], c: int) -> bool:
    """Whether the singleton word ``word`` stays reduced after appending colour ``c``."""
    for d in reversed(word):
        if d == c:
            return False
        if g.adjacent(c, d):
            return True
    return True


def closed_reduced_gallery(X: ChamberSystem, limit: int = 2_000_000) -> tuple[list[int], list[int]] | None:
    """A non-trivial closed gallery of reduced type, as ``(chambers, colours)``, or ``None``.

    A shortest such gallery visits no chamber twice, so galleries longer than
    the number of chambers need not be explored.
    """
    g = X.graph
    budget = limit
    for start in range(X.size):
        seen = {(start, ())}
        stack = [(start, (), (start,))]
        while stack:
            y, word, path = stack.pop()
            budget -= 1
            if budget < 0:
                raise SizeCapExceeded("closed gallery search exceeded its state cap")
            for c in range(g.size):
                if not _append_reduced(g, word, c):
                    continue
                nw = word + (c,)
                key_word = tuple(sorted_singletons(g, nw))
                for z in X.panel(y, c):
                    if z == y:
                        continue
                    if z == start:
                        return list(path) + [start], list(nw)
                    if len(nw) >= X.size:
                        continue
                    state = (z, key_word)
                    if state not in seen:
                        seen.add(state)
                        stack.append((z, nw, path + (z,)))
    return None


def sorted_singletons(g: ColourGraph, colours: Sequence[int]) -> list[int]:
    """Normal form of a word of singleton letters, returned as colour indices."""
    return [s.bit_length() - 1 for s in normal_form(g, tuple(1 << c for c in colours))]


def _bfs_order(g: ColourGraph) -> list[int]:
    order: list[int] = []
    for comp in g.components(g.full):
        root = bits(comp)[0]
        queue = deque([root])
        seen = {root}
        while queue:
            c = queue.popleft()
            order.append(c)
            for d in bits(g.adj[c]):
                if d not in seen:
                    seen.add(d)
                    queue.append(d)
    return order


def coherent_sequences(D: ChamberSystem, cap: int = 2_000_000) -> Iterable[tuple[int, ...]]:
    """All colour-indexed choices of dual classes meeting pairwise along edges of the diagram."""
    g = D.graph
    order = _bfs_order(g)
    meets = {
        (a, b): {(D.labels[a][x], D.labels[b][x]) for x in range(D.size)}
        for a in range(g.size)
        for b in bits(g.adj[a])
    }
    counts = [len(D.classes(c)) for c in range(g.size)]
    choice = [0] * g.size
    nodes = 0

    def extend(k: int) -> Iterable[tuple[int, ...]]:
        nonlocal nodes
        if k == len(order):
            yield tuple(choice)
            return
        c = order[k]
        earlier = [d for d in order[:k] if g.adjacent(c, d)]
        for cls in range(counts[c]):
            nodes += 1
            if nodes > cap:
                raise SizeCapExceeded("coherent sequence enumeration exceeded its cap")
            if all((cls, choice[d]) in meets[(c, d)] for d in earlier):
                choice[c] = cls
                yield from extend(k + 1)

    yield from extend(0)


def check_dual(D: ChamberSystem, cap: int = 2_000_000, max_colours: int = 8) -> tuple[bool, bool, dict]:
    """Separation and lifting for a dual system, with witnesses."""
    if D.graph.size > max_colours:
        raise SizeCapExceeded(f"coherent sequences are only enumerated for at most {max_colours} colours")
    witnesses: dict = {}
    seen: dict[tuple, int] = {}
    separates = True
    for x in range(D.size):
        key = tuple(row[x] for row in D.labels)
        if key in seen:
            separates = False
            witnesses.setdefault("dual_separates", (seen[key], x))
        seen.setdefault(key, x)
    lifts = True
    for seq in coherent_sequences(D, cap):
        if seq not in seen:
            lifts = False
            witnesses["dual_lifts"] = {D.graph.colours[c]: D.classes(c)[k][0] for c, k in enumerate(seq)}
            break
    return separates, lifts, witnesses


def check_axioms(X: ChamberSystem, cap: int = 2_000_000, dual_checks: bool = True) -> AxiomReport:
    """Evaluate the chamber system axioms, the dual properties and the intersection identity."""
    if X.dual:
        raise ValueError("check_axioms expects an ordinary chamber system; use check_dual")
    g = X.graph
    witnesses: dict = {}
    small = [(g.colours[c], cls) for c in range(g.size) for cls in X.classes(c) if len(cls) < 2]
    if small:
        witnesses["classes_nontrivial"] = small[0]
    min_panel = min((len(cls) for c in range(g.size) for cls in X.classes(c)), default=0)
    conn_labels = X.join_labels(g.full)
    connected = max(conn_labels, default=0) == 0
    if not connected:
        witnesses["connected"] = (0, conn_labels.index(1))
    exch = _exchange_failure(X)
    if exch:
        witnesses["exchange"] = exch
    cycle = closed_reduced_gallery(X, cap)
    if cycle:
        witnesses["no_closed_reduced_path"] = cycle
    D = dualize(X)
    dagger = undualize(D).labels == X.labels
    if not dagger:
        witnesses["dagger"] = next(g.colours[c] for c in range(g.size) if undualize(D).labels[c] != X.labels[c])
    separates = lifts = None
    if dual_checks:
        separates, lifts, dual_w = check_dual(D, cap)
        witnesses.update(dual_w)
    return AxiomReport(
        classes_nontrivial=not small,
        connected=connected,
        exchange=exch is None,
        no_closed_reduced_path=cycle is None,
        dual_separates=separates,
        dual_lifts=lifts,
        dagger=dagger,
        min_panel=min_panel,
        witnesses=witnesses,
    )


# ---------------------------------------------------------------------------
# extensions and hulls


def simple_extend(X: ChamberSystem, a: int, lam: int, verify: bool = False) -> ChamberSystem:
    """Adjoin a new chamber ``a*`` in the ``lam``-panel of ``a``, copying the residue it drags along."""
    X.check(a)
    g = X.graph
    if verify and not check_axioms(X, dual_checks=False).quasi_building:
        raise NotQuasiBuilding("simple_extend needs a quasi-building")
    B = sorted(residue(X, a, g.full & ~g.boundary(1 << lam)))
    n = X.size
    rows = []
    for c in range(g.size):
        row = list(X.labels[c])
        if c == lam:
            row.extend(row[b] for b in B)
        else:
            offset = max(row) + 1
            row.extend(offset + row[b] for b in B)
        rows.append(tuple(row))
    return ChamberSystem(g, tuple(rows))


def extension_residue(X: ChamberSystem, a: int, lam: int) -> set[int]:
    """The chambers copied by :func:`simple_extend`."""
    g = X.graph
    return residue(X, a, g.full & ~g.boundary(1 << lam))


def distances_from(X: ChamberSystem, x: int) -> list[int]:
    dist = [-1] * X.size
    dist[x] = 0
    queue = deque([x])
    while queue:
        y = queue.popleft()
        for _, z in X.neighbours(y):
            if dist[z] < 0:
                dist[z] = dist[y] + 1
                queue.append(z)
    return dist


def strong_hull(X: ChamberSystem, A: Iterable[int]) -> set[int]:
    """Least superset of ``A`` containing every minimal gallery between its members."""
    hull = set(A)
    if not hull:
        raise EmptySeed("strong_hull needs a non-empty seed")
    for x in hull:
        X.check(x)
    dist: dict[int, list[int]] = {}

    def d(x: int) -> list[int]:
        if x not in dist:
            dist[x] = distances_from(X, x)
        return dist[x]

    todo = list(hull)
    done: list[int] = []
    while todo:
        x = todo.pop()
        dx = d(x)
        for y in done:
            dy = d(y)
            gap = dx[y]
            if gap < 0:
                raise Disconnected(f"chambers {x} and {y} are not connected")
            for z in range(X.size):
                if z not in hull and dx[z] + dy[z] == gap and dx[z] >= 0:
                    hull.add(z)
                    todo.append(z)
        done.append(x)
    return hull


def generate_quasi_building(
    g: ColourGraph,
    schedule: Sequence[tuple[int, int]] | None = None,
    *,
    radius: int | None = None,
    fanout: int = 2,
    seed: int = 0,
    max_chambers: int = 50_000,
) -> ChamberSystem:
    """Grow a finite quasi-building from one chamber by simple extensions.

    With an explicit ``schedule`` each ``(chamber, colour)`` entry is one
    extension.  Otherwise, for ``radius`` rounds, every chamber at gallery
    distance ``round`` from chamber 0 has each of its panels filled up to
    ``fanout`` chambers; ``seed`` shuffles the colour order per chamber.
    """
    X = ChamberSystem.singleton(g)
    if schedule is not None:
        for step, (a, c) in enumerate(schedule):
            if not (0 <= a < X.size) or not (0 <= c < g.size):
                raise BadSchedule(f"entry {step} = {(a, c)} refers to a missing chamber or colour")
            X = simple_extend(X, a, c)
            if X.size > max_chambers:
                raise SizeCapExceeded(f"more than {max_chambers} chambers")
        return X
    rng = random.Random(seed)
    for rnd in range(radius or 0):
        dist = distances_from(X, 0)
        layer = [x for x in range(X.size) if dist[x] == rnd]
        for x in layer:
            colours = list(range(g.size))
            rng.shuffle(colours)
            for c in colours:
                while len(X.panel(x, c)) < fanout:
                    X = simple_extend(X, x, c)
                    if X.size > max_chambers:
                        raise SizeCapExceeded(f"more than {max_chambers} chambers")
    return X


def gallery_path(X: ChamberSystem, x: int, y: int) -> tuple[list[int], list[int]]:
    """A shortest gallery from ``x`` to ``y`` as ``(chambers, colours)``; deterministic."""
    X.check(x)
    X.check(y)
    prev: dict[int, tuple[int, int]] = {x: (-1, -1)}
    queue = deque([x])
    while queue and y not in prev:
        a = queue.popleft()
        for c, b in X.neighbours(a):
            if b not in prev:
                prev[b] = (a, c)
                queue.append(b)
    if y not in prev:
        raise Disconnected(f"chambers {x} and {y} are not connected")
    chambers, colours = [y], []
    while chambers[-1] != x:
        a, c = prev[chambers[-1]]
        chambers.append(a)
        colours.append(c)
    return chambers[::-1], colours[::-1]


def reduced_gallery(X: ChamberSystem, x: int, y: int) -> Word:
    """Type of a minimal gallery from ``x`` to ``y``, as a normal-form word of singleton letters."""
    _, colours = gallery_path(X, x, y)
    return normal_form(X.graph, tuple(1 << c for c in colours))
