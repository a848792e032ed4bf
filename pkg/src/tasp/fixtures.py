"""Small hand-built instances used by tests, the CLI demo and the docs."""
from __future__ import annotations

from fractions import Fraction

from .ewdg import Edge, Instance, Level


def _edge(src, dst, levels, true_cost=None) -> Edge:
    return Edge(src, dst, tuple(Level(l, u) for l, u in levels), true_cost)


def g_ex() -> Instance:
    """Five-node example: L* = 7 via v0-v2-v4, U* = 10 via v0-v1-v4, B* = 10/7."""
    return Instance.build(
        "G_ex",
        ["v0", "v1", "v2", "v3", "v4"],
        [
            _edge("v0", "v1", [(3, 4)], 3),
            _edge("v0", "v2", [(1, 6), (2, 5)], 4),
            _edge("v1", "v4", [(1, 7), (5, 6)], 6),
            _edge("v2", "v3", [(7, 9), (7, 8)], 8),
            _edge("v2", "v4", [(5, 6)], 6),
        ],
        "v0",
        ["v3", "v4"],
    )


def merge() -> Instance:
    """Two routes merging at v3; the second is rejected on a cheap lower bound."""
    return Instance.build(
        "merge",
        ["v0", "v1", "v2", "v3", "v4"],
        [
            _edge("v0", "v1", [(1, 1)], 1),
            _edge("v0", "v2", [(2, 2)], 2),
            _edge("v1", "v3", [(1, 9), (1, 2)], Fraction(3, 2)),
            _edge("v2", "v3", [(5, 9), (6, 7)], 6),
            _edge("v3", "v4", [(1, 1)], 1),
        ],
        "v0",
        ["v4"],
    )


def zero_lower() -> Instance:
    """Every solution has tight lower bound 0 but positive upper bound, so B* = inf."""
    return Instance.build(
        "zero_lower",
        ["v0", "v1", "v2"],
        [
            _edge("v0", "v1", [(0, 5), (0, 3)], 1),
            _edge("v1", "v2", [(0, 2)], 1),
            _edge("v0", "v2", [(0, 9), (1, 8)], 4),
        ],
        "v0",
        ["v2"],
    )
