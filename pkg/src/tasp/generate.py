"""Benchmark instance synthesis.

A topology generator draws a base cost ``c_old`` for every edge; each edge then
gets three nested estimator levels built from six integer factors picked by
``(c_old + seed) mod 27``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import NamedTuple

from .ewdg import Edge, Instance, Level, Rational, rational

TOPOLOGIES = ("layered", "grid", "random")
N_CONFIGS = 27

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """64-bit SplitMix generator; a small fixed stream so corpora are portable."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection sampling."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def randint(self, lo: int, hi: int) -> int:
        return lo + self.below(hi - lo + 1)

    def chance(self, p: float) -> bool:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53)) < p


class FactorConfig(NamedTuple):
    f1: int
    f2: int
    f3: int
    f4: int
    f5: int
    f6: int


def hash_config(c_old: int, seed: int) -> FactorConfig:
    """Decode ``(c_old + seed) mod 27`` into factors via its three base-3 digits.

    Digit ``d0`` picks ``f1`` and the gap ``f4 - f3``, ``d1`` the steps
    ``f2 - f1`` and ``f5 - f4``, ``d2`` the steps ``f3 - f2`` and ``f6 - f5``.
    """
    if c_old < 1:
        raise ValueError("c_old must be >= 1")
    h = (c_old + seed) % N_CONFIGS
    d0, d1, d2 = h % 3, (h // 3) % 3, (h // 9) % 3
    f1 = 1 + d0
    f2 = f1 + d1
    f3 = f2 + d2
    f4 = f3 + 1 + d0
    f5 = f4 + d1
    f6 = f5 + d2
    return FactorConfig(f1, f2, f3, f4, f5, f6)


def synthesize_estimators(c_old: int, cfg: FactorConfig) -> tuple[tuple[Level, ...], Rational]:
    f1, f2, f3, f4, f5, f6 = cfg
    levels = (Level(c_old * f1, c_old * f6), Level(c_old * f2, c_old * f5),
              Level(c_old * f3, c_old * f4))
    return levels, rational(Fraction(c_old * (f3 + f4), 2))


@dataclass(frozen=True)
class GenSpec:
    topology: str = "layered"
    node_count: int = 12
    layers: int = 4
    density: float = 0.5
    cost_max: int = 10
    seed: int = 0
    rng_seed: int = 0

    def validate(self) -> None:
        if self.topology not in TOPOLOGIES:
            raise ValueError(f"unknown topology {self.topology!r}; expected one of {TOPOLOGIES}")
        if self.node_count < 2:
            raise ValueError("node_count must be >= 2")
        if self.cost_max < 1:
            raise ValueError("cost_max must be >= 1")
        if not 0 <= self.seed < N_CONFIGS:
            raise ValueError("seed must be in [0, 26]")
        if self.topology == "random" and not 0 < self.density <= 1:
            raise ValueError("density must be in (0, 1] for random digraphs")
        if self.topology == "layered":
            if not 0 <= self.density <= 1:
                raise ValueError("density must be in [0, 1]")
            if not 1 <= self.layers <= self.node_count - 1:
                raise ValueError("layered topology needs 1 <= layers <= node_count - 1")
        if self.topology == "grid":
            if self.layers < 1 or self.node_count % self.layers:
                raise ValueError("grid needs node_count divisible by layers (rows)")

    @property
    def family(self) -> str:
        return (f"{self.topology}{self.node_count}x{self.layers}"
                f"d{self.density:g}c{self.cost_max}r{self.rng_seed}")

    def instance_name(self) -> str:
        return f"{self.family}-s{self.seed}"

    def to_dict(self) -> dict:
        return asdict(self)


class Topology(NamedTuple):
    nodes: list[str]
    arcs: list[tuple[str, str, int]]
    source: str
    goals: list[str]


def _layered(spec: GenSpec, rng: SplitMix64):
    rest = spec.node_count - 1
    base, extra = divmod(rest, spec.layers)
    layers = [[0]]
    nxt = 1
    for i in range(spec.layers):
        size = base + (1 if i < extra else 0)
        layers.append(list(range(nxt, nxt + size)))
        nxt += size
    arcs: set[tuple[int, int]] = set()
    for prev, cur in zip(layers, layers[1:]):
        for b in cur:
            arcs.add((prev[rng.below(len(prev))], b))
        for a in prev:
            for b in cur:
                if (a, b) not in arcs and rng.chance(spec.density):
                    arcs.add((a, b))
    return sorted(arcs), [0], layers[-1]


def _grid(spec: GenSpec, rng: SplitMix64):
    rows = spec.layers
    cols = spec.node_count // rows
    arcs = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                arcs.append((v, v + 1))
            if r + 1 < rows:
                arcs.append((v, v + cols))
    return sorted(arcs), [0], [spec.node_count - 1]


def _random(spec: GenSpec, rng: SplitMix64):
    n = spec.node_count
    arcs = [(a, b) for a in range(n) for b in range(n) if a != b and rng.chance(spec.density)]
    return arcs, [0], [n - 1]


def gen_topology(spec: GenSpec) -> Topology:
    """Nodes ``v0..v{N-1}``, arcs with base costs; deterministic in ``rng_seed``."""
    spec.validate()
    rng = SplitMix64(spec.rng_seed)
    build = {"layered": _layered, "grid": _grid, "random": _random}[spec.topology]
    arcs, sources, goals = build(spec, rng)
    # Costs come from a second stream so topology choices don't shift them.
    cost_rng = SplitMix64(spec.rng_seed ^ 0x5DEECE66D)
    names = [f"v{i}" for i in range(spec.node_count)]
    costed = [(names[a], names[b], cost_rng.randint(1, spec.cost_max)) for a, b in arcs]
    return Topology(names, costed, names[sources[0]], [names[g] for g in goals])


def generate_instance(spec: GenSpec) -> Instance:
    topo = gen_topology(spec)
    edges = []
    for a, b, c_old in topo.arcs:
        levels, true_cost = synthesize_estimators(c_old, hash_config(c_old, spec.seed))
        edges.append(Edge(a, b, levels, true_cost))
    return Instance.build(spec.instance_name(), topo.nodes, edges, topo.source, topo.goals)


def exact_instance(spec: GenSpec) -> Instance:
    """Same topology and base costs, but one exact estimator per edge."""
    topo = gen_topology(spec)
    edges = [Edge(a, b, (Level(c, c),), c) for a, b, c in topo.arcs]
    return Instance.build(f"exact-{spec.instance_name()}", topo.nodes, edges,
                          topo.source, topo.goals)
