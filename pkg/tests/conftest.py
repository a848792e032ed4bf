from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import strategies as st

from tasp.ewdg import Edge, Instance, Level
from tasp.fixtures import g_ex

DATA = Path(__file__).parent / "data"


@pytest.fixture
def gex() -> Instance:
    return g_ex()


@st.composite
def nested_levels(draw, max_levels: int = 3, max_value: int = 12):
    """Nested intervals built by shrinking an outer interval step by step."""
    k = draw(st.integers(1, max_levels))
    lo = draw(st.integers(0, max_value))
    hi = draw(st.integers(lo, lo + max_value))
    levels = [Level(lo, hi)]
    for _ in range(k - 1):
        lo = draw(st.integers(lo, hi))
        hi = draw(st.integers(lo, hi))
        levels.append(Level(lo, hi))
    return tuple(levels)


@st.composite
def instances(draw, max_nodes: int = 7, max_levels: int = 3):
    n = draw(st.integers(1, max_nodes))
    nodes = [f"v{i}" for i in range(n)]
    pairs = [(a, b) for a in nodes for b in nodes if a != b]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=min(len(pairs), 3 * n))
                  if pairs else st.just([]))
    edges = []
    for a, b in chosen:
        levels = draw(nested_levels(max_levels))
        tight = levels[-1]
        true_cost = draw(st.integers(tight.l, tight.u))
        edges.append(Edge(a, b, levels, true_cost))
    goals = draw(st.lists(st.sampled_from(nodes), min_size=1, max_size=2, unique=True))
    return Instance.build("hyp", nodes, edges, "v0", goals)


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
