"""Closed-form model-theoretic invariants read off the diagram."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .coxgraph import ColourGraph, Letter, graph_invariants
from .errors import NoEdges
from .words import Ordinal, rank


@dataclass(frozen=True)
class AmpleBounds:
    lower: int
    strict_upper: int

    def to_json(self) -> dict:
        return {"lower": self.lower, "strict_upper": self.strict_upper}


def morley_rank(g: ColourGraph) -> Ordinal:
    """``w^(K-1)`` where ``K`` is the size of a largest component."""
    if g.size == 0:
        raise ValueError("the diagram has no colours")
    return Ordinal.omega_power(graph_invariants(g).K - 1)


def ample_bounds(g: ColourGraph) -> AmpleBounds:
    inv = graph_invariants(g)
    if inv.r is None:
        raise NoEdges("diagram has no edges; the theory is not 1-ample")
    return AmpleBounds(lower=inv.n, strict_upper=g.size - inv.r + 1)


def type_rank(g: ColourGraph, u: Sequence[Letter], kind: str = "Rd") -> Ordinal:
    return rank(g, u, kind)
