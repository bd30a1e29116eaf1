"""Right-angled Coxeter words, chamber systems and coloured flag spaces."""

from .coxgraph import ColourGraph, graph_invariants
from .words import Ordinal, format_word, normal_form, parse_word, preceq, reduce_concat
from .chamber import ChamberSystem, check_axioms, generate_quasi_building
from .gspace import FlagPath, GammaSpace, find_reduced_path, is_simply_connected, nice_hull, to_chambers, to_space
from .mtinvariants import ample_bounds, morley_rank, type_rank

__all__ = [
    "ChamberSystem",
    "ColourGraph",
    "FlagPath",
    "GammaSpace",
    "Ordinal",
    "ample_bounds",
    "check_axioms",
    "find_reduced_path",
    "format_word",
    "generate_quasi_building",
    "graph_invariants",
    "is_simply_connected",
    "morley_rank",
    "nice_hull",
    "normal_form",
    "parse_word",
    "preceq",
    "reduce_concat",
    "to_chambers",
    "to_space",
    "type_rank",
]
