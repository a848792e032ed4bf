"""Best-first search on estimated weighted digraphs.

All four solvers share one uniform-cost skeleton and differ only in how a
generated edge is evaluated:

* ``ei_ucs``  applies each edge's final estimator immediately and orders by upper bounds.
* ``beast``   orders by upper bounds, escalating estimators only while the
  cheap lower bound still allows the successor to improve and stay under
  ``u_prune``.
* ``beauty``  orders by lower bounds; a successor is updated only once its edge
  is fully estimated, so every stored key is a tight path lower bound.
* ``beauty_and_beast`` chains ``beauty`` and a bounded ``beast`` run.

OPEN ties are broken by insertion order, successors are visited in edge
declaration order, and the goal test happens on pop.
"""
from __future__ import annotations

import heapq
import itertools
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable

from .ewdg import (INF, Bound, Edge, EstimationCache, Instance, format_bound,
                   format_path, path_bounds)
from .oracle import combine_bstar

FOUND = "found"
NO_SOLUTION = "no_solution"


class SearchTimeout(RuntimeError):
    pass


@dataclass
class SolveReport:
    status: str
    path: tuple[Edge, ...]
    bound: Bound
    expanded: int = 0
    generated: int = 0
    pruned: int = 0
    counters: dict[int, int] = field(default_factory=dict)
    theta_max: int = 0
    trace: tuple[str, ...] | None = None

    @property
    def found(self) -> bool:
        return self.status == FOUND

    def to_dict(self) -> dict:
        d = {
            "status": self.status,
            "path": [[e.src, e.dst] for e in self.path],
            "bound": format_bound(self.bound),
            "expanded": self.expanded,
            "generated": self.generated,
            "pruned": self.pruned,
            "counters": {str(k): v for k, v in sorted(self.counters.items())},
            "theta_max": self.theta_max,
        }
        if self.trace is not None:
            d["trace"] = list(self.trace)
        return d


@dataclass
class TaspReport:
    path: tuple[Edge, ...]
    b_star: Bound
    l_star: Bound
    u_star: Bound
    slb_report: SolveReport
    sub_report: SolveReport | None

    @property
    def found(self) -> bool:
        return self.slb_report.found

    def to_dict(self) -> dict:
        return {
            "status": FOUND if self.found else NO_SOLUTION,
            "path": [[e.src, e.dst] for e in self.path],
            "b_star": format_bound(self.b_star),
            "l_star": format_bound(self.l_star),
            "u_star": format_bound(self.u_star),
            "slb": self.slb_report.to_dict(),
            "sub": self.sub_report.to_dict() if self.sub_report else None,
        }


class _Open:
    """Min-heap keyed on (g, insertion seq); removal is lazy."""

    def __init__(self):
        self._heap: list = []
        self._live: dict[str, int] = {}
        self._seq = itertools.count()

    def __bool__(self) -> bool:
        return bool(self._live)

    def __contains__(self, node: str) -> bool:
        return node in self._live

    def push(self, node: str, key) -> None:
        seq = next(self._seq)
        self._live[node] = seq
        heapq.heappush(self._heap, (key, seq, node))

    def pop(self):
        while True:
            key, seq, node = heapq.heappop(self._heap)
            if self._live.get(node) == seq:
                del self._live[node]
                return node, key


# An evaluator inspects edge n->s and returns (candidate g for s, or None when
# the successor is rejected, and the rejection reason).
Evaluator = Callable[[Edge, Bound, Bound, EstimationCache], "tuple[Bound | None, str | None]"]


def _search(inst: Instance, evaluate: Evaluator, cache: EstimationCache | None,
            trace: bool, deadline: float | None) -> SolveReport:
    cache = cache if cache is not None else EstimationCache()
    before_counts, before_max = cache.snapshot()
    log: list[str] | None = [] if trace else None
    saved_log = cache.log
    cache.log = log
    g: dict[str, Bound] = {inst.source: 0}
    parent: dict[str, Edge] = {}
    closed: set[str] = set()
    open_ = _Open()
    open_.push(inst.source, 0)
    expanded = generated = pruned = 0
    status, path, bound = NO_SOLUTION, (), INF
    try:
        while open_:
            if deadline is not None and time.monotonic() > deadline:
                raise SearchTimeout(inst.name)
            n, gn = open_.pop()
            expanded += 1
            if log is not None:
                log.append(f"POP {n} {format_bound(gn)}")
            if inst.is_goal(n):
                status, bound = FOUND, gn
                path = _trace_back(parent, inst.source, n)
                break
            closed.add(n)
            for e in inst.successors.get(n, ()):
                s = e.dst
                generated += 1
                if s not in g:
                    g[s] = INF
                cand, reason = evaluate(e, gn, g[s], cache)
                if cand is None:
                    if reason != "dominated":
                        pruned += 1
                    if log is not None:
                        log.append(f"PRUNE {e.label} {reason}")
                    continue
                g[s] = cand
                parent[s] = e
                open_.push(s, cand)
                if log is not None:
                    log.append(f"INS {s} {format_bound(cand)}")
        if log is not None:
            log.append(f"RET {format_path(path)} {format_bound(bound)}")
    finally:
        cache.log = saved_log
    after_counts, after_max = cache.snapshot()
    counters = dict(sorted((after_counts - before_counts).items()))
    return SolveReport(status, path, bound, expanded, generated, pruned, counters,
                       after_max - before_max, tuple(log) if log is not None else None)


def _trace_back(parent: dict[str, Edge], source: str, node: str) -> tuple[Edge, ...]:
    path = []
    while node != source:
        e = parent[node]
        path.append(e)
        node = e.src
    return tuple(reversed(path))


def _ei_evaluator(e, gn, gs, cache):
    _, u = cache.apply_final(e)
    cand = gn + u
    return (cand, None) if cand < gs else (None, "dominated")


def _beast_evaluator(u_prune: Bound, jump_new: bool) -> Evaluator:
    def evaluate(e, gn, gs, cache):
        l = u = 0
        level = 0
        threshold_hit = False
        if jump_new and gs == INF and u_prune == INF:
            l, u = cache.apply_final(e)
            level = e.k
        while level < e.k:
            if not gn + l < gs:
                break
            if not gn + l <= u_prune:
                threshold_hit = True
                break
            level += 1
            l, u = cache.estimate(e, level)
        cand = gn + u
        if cand < gs and cand <= u_prune:
            return cand, None
        if threshold_hit or cand < gs:
            return None, "u_prune"
        return None, "dominated"

    return evaluate


def _beauty_evaluator(l_prune: Bound) -> Evaluator:
    def evaluate(e, gn, gs, cache):
        l = 0
        level = 0
        threshold_hit = False
        while level < e.k:
            if not gn + l < gs:
                break
            if not gn + l <= l_prune:
                threshold_hit = True
                break
            level += 1
            l, _ = cache.estimate(e, level)
        cand = gn + l
        if level == e.k and cand < gs and cand <= l_prune:
            return cand, None
        if threshold_hit or (level == e.k and cand < gs):
            return None, "l_prune"
        return None, "dominated"

    return evaluate


def ei_ucs(inst: Instance, *, cache: EstimationCache | None = None, trace: bool = False,
           deadline: float | None = None) -> SolveReport:
    """Uniform-cost search on tight upper bounds, estimating every edge fully."""
    return _search(inst, _ei_evaluator, cache, trace, deadline)


def beast(inst: Instance, u_prune: Bound = INF, *, cache: EstimationCache | None = None,
          trace: bool = False, jump_new: bool = False,
          deadline: float | None = None) -> SolveReport:
    """Find a path with the lowest tight upper bound, or report none <= ``u_prune``.

    With ``u_prune >= U*`` the returned bound is U*; with ``u_prune < U*`` the
    result is ``no_solution``.  ``jump_new`` applies the final estimator
    directly for edges into unseen nodes when ``u_prune`` is infinite, which
    saves cheap applications but changes the counters.
    """
    if u_prune != INF and u_prune < 0:
        raise ValueError("u_prune must be non-negative")
    return _search(inst, _beast_evaluator(u_prune, jump_new), cache, trace, deadline)


def beauty(inst: Instance, l_prune: Bound = INF, *, cache: EstimationCache | None = None,
           trace: bool = False, deadline: float | None = None) -> SolveReport:
    """Find a path with the lowest tight lower bound (L* when ``l_prune >= L*``)."""
    if l_prune != INF and l_prune < 0:
        raise ValueError("l_prune must be non-negative")
    return _search(inst, _beauty_evaluator(l_prune), cache, trace, deadline)


def beauty_and_beast(inst: Instance, *, share_cache: bool = False, trace: bool = False,
                     deadline: float | None = None) -> TaspReport:
    """Tightest admissible shortest path: SLB first, then SUB bounded by u(pi_SLB)."""
    cache = EstimationCache()
    slb = beauty(inst, cache=cache, trace=trace, deadline=deadline)
    if not slb.found:
        return TaspReport((), INF, INF, INF, slb, None)
    l_star = slb.bound
    # The SLB path is fully estimated already, so this adds no applications.
    u_slb = path_bounds(slb.path, cache).u
    if l_star == u_slb:
        return TaspReport(slb.path, 1, l_star, l_star, slb, None)
    sub = beast(inst, u_slb, cache=cache if share_cache else None, trace=trace,
                deadline=deadline)
    if not sub.found:
        raise RuntimeError(f"bounded BEAST found nothing under u(pi_SLB) = {u_slb}")
    return TaspReport(sub.path, combine_bstar(l_star, sub.bound), l_star, sub.bound, slb, sub)


def merged_counters(*reports: SolveReport | None) -> Counter:
    total: Counter = Counter()
    for r in reports:
        if r is not None:
            total.update(r.counters)
    return total
