from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from coxflag.coxgraph import ColourGraph
from coxflag.words import parse_word, reduce_concat

settings.register_profile(
    "repo", max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")

GRAPHS = {
    "P3": ColourGraph.path(3),
    "P4": ColourGraph.path(4),
    "K3": ColourGraph.complete(3),
    "C4": ColourGraph.cycle(4),
}


def words(g: ColourGraph, max_size: int = 6):
    return st.lists(st.sampled_from(g.enumerate_letters()), max_size=max_size).map(tuple)


def reduced_words(g: ColourGraph, max_size: int = 5):
    return words(g, max_size).map(lambda u: reduce_concat(g, u))


graph_names = st.sampled_from(sorted(GRAPHS))


@pytest.fixture
def P3() -> ColourGraph:
    return GRAPHS["P3"]


@pytest.fixture
def P4() -> ColourGraph:
    return GRAPHS["P4"]


@pytest.fixture
def K3() -> ColourGraph:
    return GRAPHS["K3"]


def W(g: ColourGraph, text: str):
    return parse_word(g, text)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
