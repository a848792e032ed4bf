"""Estimated weighted digraphs: data model, estimator cache, path bounds, file format.

Every edge carries an ordered tuple of estimator levels.  Applying level ``i``
yields an interval ``[l, u]`` that contains the (hidden) true cost, and each
later interval is nested inside the earlier ones.  Bounds are exact rationals:
plain ``int`` when integral, ``fractions.Fraction`` otherwise.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

Rational = Union[int, Fraction]
Bound = Union[int, Fraction, float]  # float only ever means math.inf

INF = math.inf


class InstanceFormatError(ValueError):
    """Raised when an instance document cannot be parsed.

    ``field`` names the offending schema field for schema errors; ``line`` and
    ``column`` are set for JSON syntax errors.
    """

    def __init__(self, message: str, field: str | None = None,
                 line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.field = field
        self.line = line
        self.column = column


class EscalationExhausted(RuntimeError):
    pass


class PathError(ValueError):
    pass


def rational(value) -> Rational:
    """Coerce an int, Fraction, Decimal or ``"p/q"`` string to an exact rational."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        value = Fraction(value)
    elif isinstance(value, (str, Decimal)):
        value = Fraction(value)
    elif not isinstance(value, Fraction):
        raise TypeError(f"cannot interpret {value!r} as a rational")
    return value.numerator if value.denominator == 1 else value


def parse_bound(text: str) -> Bound:
    """Parse a CLI-style bound: ``inf``, an integer, or ``p/q``."""
    text = text.strip()
    if text.lower() in ("inf", "infinity", "∞"):
        return INF
    return rational(text)


def format_bound(value: Bound) -> str:
    if value == INF:
        return "inf"
    value = rational(value)
    if isinstance(value, int):
        return str(value)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Level:
    l: Rational
    u: Rational

    def __iter__(self):
        yield self.l
        yield self.u

    def contains(self, other: "Level") -> bool:
        return self.l <= other.l and other.u <= self.u


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    levels: tuple[Level, ...]
    true_cost: Rational | None = None

    @property
    def key(self) -> tuple[str, str]:
        return (self.src, self.dst)

    @property
    def k(self) -> int:
        return len(self.levels)

    @property
    def label(self) -> str:
        return f"{self.src}->{self.dst}"

    @property
    def tight(self) -> Level:
        return self.levels[-1]


@dataclass(frozen=True)
class Instance:
    name: str
    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    source: str
    goals: frozenset[str]
    # Declaration order of goals, kept for serialization only.
    goal_order: tuple[str, ...] = field(default=(), compare=False)

    @classmethod
    def build(cls, name: str, nodes: Iterable[str], edges: Iterable[Edge],
              source: str, goals: Iterable[str]) -> "Instance":
        goals = tuple(goals)
        return cls(name, tuple(nodes), tuple(edges), source, frozenset(goals), goals)

    @cached_property
    def successors(self) -> dict[str, tuple[Edge, ...]]:
        out: dict[str, list[Edge]] = {v: [] for v in self.nodes}
        for e in self.edges:
            out.setdefault(e.src, []).append(e)
        return {v: tuple(es) for v, es in out.items()}

    @cached_property
    def edge_map(self) -> dict[tuple[str, str], Edge]:
        return {e.key: e for e in self.edges}

    def edge(self, src: str, dst: str) -> Edge:
        return self.edge_map[(src, dst)]

    def is_goal(self, node: str) -> bool:
        return node in self.goals


def validate_instance(inst: Instance) -> list[str]:
    """Return every invariant violation in ``inst``; an empty list means valid."""
    problems: list[str] = []
    nodes = set(inst.nodes)
    if len(nodes) != len(inst.nodes):
        dupes = sorted(v for v, c in Counter(inst.nodes).items() if c > 1)
        problems.append(f"duplicate node ids: {', '.join(dupes)}")
    if inst.source not in nodes:
        problems.append(f"source {inst.source} is not a node")
    if not inst.goals:
        problems.append("goal set is empty")
    for g in sorted(inst.goals - nodes):
        problems.append(f"goal {g} is not a node")
    seen: set[tuple[str, str]] = set()
    for e in inst.edges:
        where = f"edge {e.label}"
        for end in (e.src, e.dst):
            if end not in nodes:
                problems.append(f"{where}: endpoint {end} is not a node")
        if e.key in seen:
            problems.append(f"{where}: parallel edge")
        seen.add(e.key)
        if not e.levels:
            problems.append(f"{where}: no estimator levels")
            continue
        for i, lv in enumerate(e.levels, 1):
            if lv.l < 0 or lv.u < 0:
                problems.append(f"{where}: level {i} has a negative bound")
            if lv.l > lv.u:
                problems.append(f"{where}: level {i} has l > u")
        for i in range(len(e.levels) - 1):
            if not e.levels[i].contains(e.levels[i + 1]):
                problems.append(f"{where}: levels not nested ({i + 1} -> {i + 2})")
        if e.true_cost is not None:
            t = e.tight
            if e.true_cost < 0:
                problems.append(f"{where}: negative true cost")
            if not t.l <= e.true_cost <= t.u:
                problems.append(f"{where}: true cost outside tightest interval")
    return problems


class EstimationCache:
    """Per-run record of which estimator levels have been applied to which edges.

    ``counters[i]`` is the number of applications of level ``i`` (1-based) and
    ``theta_max`` the number of applications of an edge's final level.
    """

    def __init__(self):
        self._applied: dict[tuple[str, str], int] = {}
        self._bounds: dict[tuple[str, str], tuple[Rational, Rational]] = {}
        self.counters: Counter[int] = Counter()
        self.theta_max = 0
        self.maxed: set[tuple[str, str]] = set()
        self.log: list[str] | None = None

    def applied_level(self, edge: Edge) -> int:
        return self._applied.get(edge.key, 0)

    def bounds(self, edge: Edge) -> tuple[Rational, Rational]:
        return self._bounds.get(edge.key, (0, 0))

    def _record(self, edge: Edge, level: int) -> tuple[Rational, Rational]:
        lv = edge.levels[level - 1]
        self._applied[edge.key] = level
        self._bounds[edge.key] = (lv.l, lv.u)
        self.counters[level] += 1
        if level == edge.k:
            self.theta_max += 1
            self.maxed.add(edge.key)
        if self.log is not None:
            self.log.append(
                f"EST {edge.label} L{level} l={format_bound(lv.l)} u={format_bound(lv.u)}")
        return lv.l, lv.u

    def apply_next(self, edge: Edge) -> tuple[Rational, Rational]:
        level = self.applied_level(edge)
        if level >= edge.k:
            raise EscalationExhausted(f"all {edge.k} estimators already applied to {edge.label}")
        return self._record(edge, level + 1)

    def estimate(self, edge: Edge, level: int) -> tuple[Rational, Rational]:
        """Bounds of ``level``; applies it (counted) unless already memoized."""
        applied = self.applied_level(edge)
        if level <= applied:
            lv = edge.levels[level - 1]
            return lv.l, lv.u
        while self.applied_level(edge) < level - 1:
            self.apply_next(edge)
        return self.apply_next(edge)

    def apply_final(self, edge: Edge) -> tuple[Rational, Rational]:
        """Jump straight to the final level with a single application."""
        if self.applied_level(edge) == edge.k:
            return self.bounds(edge)
        return self._record(edge, edge.k)

    def snapshot(self) -> tuple[Counter[int], int]:
        return Counter(self.counters), self.theta_max


def apply_next_estimator(cache: EstimationCache, edge: Edge) -> tuple[Rational, Rational]:
    return cache.apply_next(edge)


def tight_edge_bounds(edge: Edge, cache: EstimationCache) -> tuple[Rational, Rational]:
    while cache.applied_level(edge) < edge.k:
        cache.apply_next(edge)
    return cache.bounds(edge)


@dataclass(frozen=True)
class PathBounds:
    l: Rational
    u: Rational

    def __add__(self, other: "PathBounds") -> "PathBounds":
        return PathBounds(self.l + other.l, self.u + other.u)


def check_contiguous(path: Sequence[Edge]) -> None:
    for a, b in zip(path, path[1:]):
        if a.dst != b.src:
            raise PathError(f"path is not contiguous at {a.label} / {b.label}")


def path_bounds(path: Sequence[Edge], cache: EstimationCache | None = None) -> PathBounds:
    """Sum of tightest edge bounds along ``path``, escalating edges as needed."""
    check_contiguous(path)
    cache = cache if cache is not None else EstimationCache()
    lo: Rational = 0
    hi: Rational = 0
    for e in path:
        l, u = tight_edge_bounds(e, cache)
        lo += l
        hi += u
    return PathBounds(lo, hi)


def format_path(path: Sequence[Edge]) -> str:
    return ",".join(e.label for e in path) if path else "empty"


# ---------------------------------------------------------------------------
# instance format
# ---------------------------------------------------------------------------

_ROOT_FIELDS = ("name", "nodes", "source", "goals", "edges")


def _number(value, where: str) -> Rational:
    if isinstance(value, bool) or not isinstance(value, (int, Decimal, str)):
        raise InstanceFormatError(f"{where}: expected a number", field=where)
    try:
        r = rational(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise InstanceFormatError(f"{where}: {exc}", field=where) from None
    if r < 0:
        raise InstanceFormatError(f"{where}: negative value {value}", field=where)
    return r


def _string(value, where: str) -> str:
    if not isinstance(value, str):
        raise InstanceFormatError(f"{where}: expected a string", field=where)
    return value


def _strings(value, where: str) -> list[str]:
    if not isinstance(value, list):
        raise InstanceFormatError(f"{where}: expected a list of strings", field=where)
    return [_string(v, where) for v in value]


def parse_instance(text: str) -> Instance:
    try:
        doc = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(
            f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            line=exc.lineno, column=exc.colno) from None
    if not isinstance(doc, dict):
        raise InstanceFormatError("document must be a JSON object")
    for key in _ROOT_FIELDS:
        if key not in doc:
            raise InstanceFormatError(f"missing field {key!r}", field=key)
    name = _string(doc["name"], "name")
    nodes = _strings(doc["nodes"], "nodes")
    source = _string(doc["source"], "source")
    goals = _strings(doc["goals"], "goals")
    if not isinstance(doc["edges"], list):
        raise InstanceFormatError("edges: expected a list", field="edges")
    edges: list[Edge] = []
    seen: set[tuple[str, str]] = set()
    for i, raw in enumerate(doc["edges"]):
        where = f"edges[{i}]"
        if not isinstance(raw, dict):
            raise InstanceFormatError(f"{where}: expected an object", field="edges")
        for key in ("from", "to", "levels"):
            if key not in raw:
                raise InstanceFormatError(f"{where}: missing field {key!r}", field=key)
        src = _string(raw["from"], "from")
        dst = _string(raw["to"], "to")
        if (src, dst) in seen:
            raise InstanceFormatError(f"{where}: parallel edge {src}->{dst}",
                                      field="parallel edge")
        seen.add((src, dst))
        if not isinstance(raw["levels"], list) or not raw["levels"]:
            raise InstanceFormatError(f"{where}: levels must be a non-empty list",
                                      field="levels")
        levels = []
        for j, lv in enumerate(raw["levels"]):
            if not isinstance(lv, dict) or "l" not in lv or "u" not in lv:
                raise InstanceFormatError(f"{where}.levels[{j}]: expected {{l, u}}",
                                          field="levels")
            levels.append(Level(_number(lv["l"], "l"), _number(lv["u"], "u")))
        true_cost = _number(raw["true_cost"], "true_cost") if "true_cost" in raw else None
        edges.append(Edge(src, dst, tuple(levels), true_cost))
    return Instance.build(name, nodes, edges, source, goals)


def _emit_number(value: Rational) -> str:
    value = rational(value)
    if isinstance(value, int):
        return str(value)
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        # No finite decimal expansion; fall back to an exact "p/q" string.
        return json.dumps(f"{value.numerator}/{value.denominator}")
    digits = max(twos, fives)
    scaled = value * 10 ** digits
    sign = "-" if scaled < 0 else ""
    s = str(abs(scaled.numerator)).rjust(digits + 1, "0")
    return f"{sign}{s[:-digits]}.{s[-digits:]}"


def _emit(value, indent: int) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_emit(v, indent + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        return "[\n" + ",\n".join(pad + _emit(v, indent + 1) for v in value) + "\n" + end + "]"
    if isinstance(value, str):
        return json.dumps(value)
    return _emit_number(value)


def instance_to_dict(inst: Instance) -> dict:
    goals = list(inst.goal_order) if inst.goal_order else sorted(inst.goals)
    edges = []
    for e in inst.edges:
        d = {"from": e.src, "to": e.dst, "levels": [{"l": lv.l, "u": lv.u} for lv in e.levels]}
        if e.true_cost is not None:
            d["true_cost"] = e.true_cost
        edges.append(d)
    return {"name": inst.name, "nodes": list(inst.nodes), "source": inst.source,
            "goals": goals, "edges": edges}


def serialize_instance(inst: Instance) -> str:
    """Canonical JSON text: fixed key order, two-space indent, trailing newline."""
    return _emit(instance_to_dict(inst), 0) + "\n"
