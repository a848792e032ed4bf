"""Exhaustive ground truth for small instances.

Bounds are non-negative, so appending a cycle to a path never lowers either of
its bound sums; the minima over all paths are therefore attained by simple
paths, and enumerating simple paths is enough.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .ewdg import INF, Bound, Edge, Instance, PathError, Rational, rational

DEFAULT_NODE_LIMIT = 14


class InstanceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    l_star: Bound
    u_star: Bound
    b_star: Bound
    slb_witness: tuple[Edge, ...] | None
    sub_witness: tuple[Edge, ...] | None


def enumerate_simple_paths(inst: Instance, limit: int = DEFAULT_NODE_LIMIT) -> Iterator[tuple[Edge, ...]]:
    """Yield every simple source-to-goal path once, depth-first in edge declaration order."""
    if len(inst.nodes) > limit:
        raise InstanceTooLarge(f"{len(inst.nodes)} nodes exceeds oracle limit {limit}")
    succ: dict[str, list[Edge]] = {}
    for e in inst.edges:
        succ.setdefault(e.src, []).append(e)

    path: list[Edge] = []
    on_path = {inst.source}

    def walk(node: str) -> Iterator[tuple[Edge, ...]]:
        if node in inst.goals:
            yield tuple(path)
        for e in succ.get(node, ()):
            if e.dst in on_path:
                continue
            on_path.add(e.dst)
            path.append(e)
            yield from walk(e.dst)
            path.pop()
            on_path.discard(e.dst)

    yield from walk(inst.source)


def _tight_sums(path: Sequence[Edge]) -> tuple[Rational, Rational]:
    return (sum((e.levels[-1].l for e in path), 0), sum((e.levels[-1].u for e in path), 0))


def _argmin(inst: Instance, which: int, limit: int) -> tuple[Bound, tuple[Edge, ...] | None]:
    best: Bound = INF
    witness = None
    for p in enumerate_simple_paths(inst, limit):
        v = _tight_sums(p)[which]
        if v < best:
            best, witness = v, p
    return best, witness


def oracle_slb(inst: Instance, limit: int = DEFAULT_NODE_LIMIT):
    return _argmin(inst, 0, limit)


def oracle_sub(inst: Instance, limit: int = DEFAULT_NODE_LIMIT):
    return _argmin(inst, 1, limit)


def combine_bstar(l_star: Bound, u_star: Bound) -> Bound:
    if l_star > u_star:
        raise ValueError(f"L* = {l_star} exceeds U* = {u_star}")
    if u_star == INF:
        return INF
    if u_star == l_star:
        return 1
    if l_star == 0:
        return INF
    return rational(Fraction(u_star) / Fraction(l_star))


def solve_oracle(inst: Instance, limit: int = DEFAULT_NODE_LIMIT) -> OracleResult:
    """L*, U*, B* and witnesses in one enumeration pass."""
    l_star: Bound = INF
    u_star: Bound = INF
    slb = sub = None
    for p in enumerate_simple_paths(inst, limit):
        l, u = _tight_sums(p)
        if l < l_star:
            l_star, slb = l, p
        if u < u_star:
            u_star, sub = u, p
    return OracleResult(l_star, u_star, combine_bstar(l_star, u_star), slb, sub)


def _check_solution(inst: Instance, path: Sequence[Edge]) -> None:
    at = inst.source
    for e in path:
        if inst.edge_map.get(e.key) != e:
            raise PathError(f"{e.label} is not an edge of {inst.name}")
        if e.src != at:
            raise PathError(f"path is not contiguous at {e.label}")
        at = e.dst
    if at not in inst.goals:
        raise PathError(f"path ends at {at}, which is not a goal")


def check_admissible(inst: Instance, path: Sequence[Edge], b: Bound,
                     limit: int = DEFAULT_NODE_LIMIT) -> bool:
    """True iff the tight upper bound of ``path`` is at most L* times ``b``.

    For ``b = inf`` the product is taken as infinite when L* > 0 and as 0
    when L* = 0.
    """
    _check_solution(inst, path)
    l_star, _ = oracle_slb(inst, limit)
    u = _tight_sums(path)[1]
    if b == INF:
        return l_star > 0 or u == 0
    return u <= l_star * Fraction(b)
