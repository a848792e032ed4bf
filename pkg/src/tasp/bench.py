"""Benchmark runs, per-instance metrics and report rendering.

One run of an instance produces four algorithm rows: ``ei-ucs``, ``beast``
(unbounded) and the two phases of BEAUTY&BEAST, ``bnb-beauty`` and
``bnb-beast``.  The reported columns are

* col3 = 1 - theta_max(beast) / theta_max(ei-ucs)
* col4 = 1 - theta_max(bnb-beast) / theta_max(beast)
* col5 = pruned / generated of bnb-beast
* col6 = B*

with col3..col5 in percent.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import re
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .ewdg import INF, Bound, Instance, format_bound, parse_bound
from .search import SearchTimeout, SolveReport, beast, beauty_and_beast, ei_ucs

log = logging.getLogger(__name__)

CSV_HEADER = ("instance,seed,alg,theta_max,est_l1,est_l2,est_l3,expanded,generated,"
              "pruned,l_star,u_star,b_star,sim_time")
ALGS = ("beast", "bnb-beast", "bnb-beauty", "ei-ucs")
DEFAULT_TIMEOUT = 300.0
COLUMNS = ("col3", "col4", "col5", "col6")
HIST_BINS = 20


@dataclass(frozen=True)
class CostModel:
    """Simulated time per application of estimator level 1, 2, 3, ...

    Levels beyond the last weight reuse the last weight.
    """

    taus: tuple = (1, 10, 100)

    def __post_init__(self):
        if not self.taus or any(t < 0 for t in self.taus):
            raise ValueError("tau weights must be non-negative and non-empty")
        if any(a > b for a, b in zip(self.taus, self.taus[1:])):
            raise ValueError("tau weights must be non-decreasing")

    def tau(self, level: int) -> float:
        return self.taus[min(level, len(self.taus)) - 1]

    def time(self, counters: dict[int, int]):
        return sum(self.tau(level) * n for level, n in counters.items())


@dataclass
class AlgStats:
    theta_max: int
    counters: dict[int, int]
    expanded: int
    generated: int
    pruned: int
    sim_time: float

    @classmethod
    def from_report(cls, report: SolveReport | None, model: CostModel) -> "AlgStats":
        if report is None:
            # Phase skipped: nothing was applied or expanded.
            return cls(0, {}, 0, 0, 0, 0)
        return cls(report.theta_max, dict(report.counters), report.expanded,
                   report.generated, report.pruned, model.time(report.counters))

    def level_buckets(self) -> tuple[int, int, int]:
        """Counts for levels 1, 2 and 3+ (the CSV has three level columns)."""
        c = self.counters
        return c.get(1, 0), c.get(2, 0), sum(n for lv, n in c.items() if lv >= 3)


@dataclass
class BenchRecord:
    instance: str
    seed: int | None
    algs: dict[str, AlgStats | None]
    l_star: Bound = INF
    u_star: Bound = INF
    b_star: Bound = INF
    wall_time: dict[str, float] = field(default_factory=dict)

    @property
    def timed_out(self) -> bool:
        return any(v is None for v in self.algs.values())

    @property
    def group(self) -> str:
        return group_of(self.instance)


def group_of(name: str) -> str:
    m = re.match(r"[A-Za-z_]+", name)
    return m.group(0) if m else name


def _run_timed(fn, timeout: float | None):
    start = time.monotonic()
    deadline = start + timeout if timeout is not None else None
    try:
        result = fn(deadline)
    except SearchTimeout:
        result = None
    return result, time.monotonic() - start


def bench_instance(inst: Instance, seed: int | None = None, model: CostModel = CostModel(),
                   timeout: float | None = DEFAULT_TIMEOUT) -> BenchRecord:
    ei, t_ei = _run_timed(lambda d: ei_ucs(inst, deadline=d), timeout)
    bs, t_bs = _run_timed(lambda d: beast(inst, deadline=d), timeout)
    bnb, t_bnb = _run_timed(lambda d: beauty_and_beast(inst, deadline=d), timeout)
    rec = BenchRecord(inst.name, seed, {},
                      wall_time={"ei-ucs": t_ei, "beast": t_bs, "bnb": t_bnb})
    rec.algs["ei-ucs"] = AlgStats.from_report(ei, model) if ei else None
    rec.algs["beast"] = AlgStats.from_report(bs, model) if bs else None
    if bnb is None:
        rec.algs["bnb-beauty"] = rec.algs["bnb-beast"] = None
    else:
        rec.algs["bnb-beauty"] = AlgStats.from_report(bnb.slb_report, model)
        rec.algs["bnb-beast"] = AlgStats.from_report(bnb.sub_report, model)
        rec.l_star, rec.u_star, rec.b_star = bnb.l_star, bnb.u_star, bnb.b_star
    if rec.timed_out:
        log.warning("instance %s seed %s: an algorithm timed out", inst.name, seed)
    return rec


def _bench_job(args):
    inst, seed, model, timeout = args
    return bench_instance(inst, seed, model, timeout)


def run_benchmark(corpus: Iterable[tuple[Instance, int | None]], model: CostModel = CostModel(),
                  timeout: float | None = DEFAULT_TIMEOUT, jobs: int = 1) -> list[BenchRecord]:
    """Benchmark every ``(instance, seed)`` pair; output sorted by (instance, seed)."""
    work = [(inst, seed, model, timeout) for inst, seed in corpus]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_bench_job, work))
    else:
        records = [_bench_job(w) for w in work]
    return sorted(records, key=lambda r: (r.instance, -1 if r.seed is None else r.seed))


# ---------------------------------------------------------------------------
# CSV round trip
# ---------------------------------------------------------------------------

def _fmt_num(x) -> str:
    if isinstance(x, float) and x.is_integer():
        return str(int(x))
    return str(x)


def records_to_csv(records: Sequence[BenchRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER.split(","))
    for rec in records:
        seed = "" if rec.seed is None else str(rec.seed)
        bounds = [format_bound(rec.l_star), format_bound(rec.u_star), format_bound(rec.b_star)]
        for alg in ALGS:
            st = rec.algs.get(alg)
            if st is None:
                w.writerow([rec.instance, seed, alg] + [""] * 7 + ["", "", "timeout", ""])
                continue
            l1, l2, l3 = st.level_buckets()
            w.writerow([rec.instance, seed, alg, st.theta_max, l1, l2, l3, st.expanded,
                        st.generated, st.pruned] + bounds + [_fmt_num(st.sim_time)])
    return buf.getvalue()


def records_from_csv(text: str) -> list[BenchRecord]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or ",".join(reader.fieldnames) != CSV_HEADER:
        raise ValueError("unexpected CSV header")
    by_key: dict[tuple[str, str], BenchRecord] = {}
    for row in reader:
        key = (row["instance"], row["seed"])
        rec = by_key.get(key)
        if rec is None:
            seed = int(row["seed"]) if row["seed"] else None
            rec = by_key[key] = BenchRecord(row["instance"], seed, {})
        if row["theta_max"] == "":
            rec.algs[row["alg"]] = None
            continue
        counters = {lv: int(row[f"est_l{lv}"]) for lv in (1, 2, 3) if int(row[f"est_l{lv}"])}
        sim = float(row["sim_time"])
        rec.algs[row["alg"]] = AlgStats(int(row["theta_max"]), counters, int(row["expanded"]),
                                        int(row["generated"]), int(row["pruned"]),
                                        int(sim) if sim.is_integer() else sim)
        rec.l_star = parse_bound(row["l_star"])
        rec.u_star = parse_bound(row["u_star"])
        rec.b_star = parse_bound(row["b_star"])
    return list(by_key.values())


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InstanceMetrics:
    instance: str
    seed: int | None
    group: str
    col3: float | None
    col4: float | None
    col5: float | None
    col6: float | None


@dataclass(frozen=True)
class ColumnStats:
    n: int
    mean: float
    std: float
    min: float
    max: float


@dataclass
class MetricsTable:
    records: list[BenchRecord]
    rows: list[InstanceMetrics]
    groups: dict[str, dict[str, ColumnStats | None]]
    overall: dict[str, ColumnStats | None]
    excluded: int = 0


def _reduction(part: int, whole: int) -> float | None:
    if whole == 0:
        return None
    return 100.0 * (1 - part / whole)


def instance_metrics(rec: BenchRecord) -> InstanceMetrics:
    ei, bs, phase = rec.algs["ei-ucs"], rec.algs["beast"], rec.algs["bnb-beast"]
    col5 = 100.0 * phase.pruned / phase.generated if phase.generated else None
    col6 = None if rec.b_star == INF else float(rec.b_star)
    return InstanceMetrics(rec.instance, rec.seed, rec.group,
                           _reduction(bs.theta_max, ei.theta_max),
                           _reduction(phase.theta_max, bs.theta_max), col5, col6)


def _stats(values: list[float]) -> ColumnStats | None:
    if not values:
        return None
    return ColumnStats(len(values), statistics.fmean(values), statistics.pstdev(values),
                       min(values), max(values))


def _column_stats(rows: list[InstanceMetrics]) -> dict[str, ColumnStats | None]:
    return {c: _stats([getattr(r, c) for r in rows if getattr(r, c) is not None])
            for c in COLUMNS}


def compute_metrics(records: Sequence[BenchRecord]) -> MetricsTable:
    if not records:
        raise ValueError("no benchmark records to aggregate")
    usable = [r for r in records if not r.timed_out]
    rows = [instance_metrics(r) for r in usable]
    groups = {}
    for name in sorted({r.group for r in rows}):
        groups[name] = _column_stats([r for r in rows if r.group == name])
    return MetricsTable(list(records), rows, groups, _column_stats(rows),
                        excluded=len(records) - len(usable))


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def _fmt2(x: float | None) -> str:
    return "n/a" if x is None else f"{x:.2f}"


def _stats_dict(st: ColumnStats | None):
    if st is None:
        return None
    return {"n": st.n, "mean": round(st.mean, 6), "std": round(st.std, 6),
            "min": round(st.min, 6), "max": round(st.max, 6)}


def histogram(values: list[float | None], lo: float, hi: float,
              bins: int = HIST_BINS) -> tuple[list[int], int]:
    """Fixed-width bin counts over [lo, hi]; the last bin is closed. Also returns n/a count."""
    counts = [0] * bins
    missing = 0
    width = (hi - lo) / bins
    for v in values:
        if v is None:
            missing += 1
            continue
        i = int((v - lo) / width) if width > 0 else 0
        counts[min(max(i, 0), bins - 1)] += 1
    return counts, missing


def _render_histogram(title: str, values: list[float | None], lo: float, hi: float) -> list[str]:
    counts, missing = histogram(values, lo, hi)
    width = (hi - lo) / HIST_BINS
    peak = max(counts) or 1
    out = [title]
    for i, c in enumerate(counts):
        a = lo + i * width
        bar = "#" * math.ceil(40 * c / peak) if c else ""
        line = f"  [{a:7.2f}, {a + width:7.2f}{']' if i == HIST_BINS - 1 else ')'} {c:5d} {bar}"
        out.append(line.rstrip())
    out.append(f"  n/a {missing}")
    return out


_TITLES = {"col3": "theta_max reduction, BEAST(inf) vs EI-UCS (%)",
           "col4": "extra theta_max reduction, BEAST(u(pi_SLB)) vs BEAST(inf) (%)",
           "col5": "pruned / generated, BEAST(u(pi_SLB)) (%)",
           "col6": "B*"}


def render_text(table: MetricsTable) -> str:
    lines = [f"instances: {len(table.rows)} (excluded for timeouts: {table.excluded})", ""]
    head = f"{'group':<16}{'n':>5}" + "".join(f"{c:>22}" for c in COLUMNS)
    lines.append(head)

    def row(label: str, stats: dict, kind: str) -> str:
        n = max((s.n for s in stats.values() if s), default=0)
        cells = []
        for c in COLUMNS:
            s = stats[c]
            if s is None:
                cells.append("n/a")
            elif kind == "mean":
                cells.append(f"{s.mean:.2f} ± {s.std:.2f}")
            else:
                cells.append(f"{s.min:.2f} – {s.max:.2f}")
        return f"{label:<16}{n:>5}" + "".join(f"{c:>22}" for c in cells)

    for name, stats in table.groups.items():
        lines.append(row(name, stats, "mean"))
    lines.append(row("all (avg±std)", table.overall, "mean"))
    lines.append(row("all (min–max)", table.overall, "range"))
    lines.append("")
    for c in COLUMNS:
        values = [getattr(r, c) for r in table.rows]
        if c == "col6":
            finite = [v for v in values if v is not None]
            lo, hi = 1.0, max(finite, default=2.0)
            if hi <= lo:
                hi = lo + 1.0
        else:
            lo, hi = 0.0, 100.0
        lines.extend(_render_histogram(_TITLES[c], values, lo, hi))
        lines.append("")
    return "\n".join(lines)


def render_json(table: MetricsTable) -> str:
    doc = {
        "instances": [
            {"instance": r.instance, "seed": r.seed, "group": r.group,
             **{c: None if getattr(r, c) is None else round(getattr(r, c), 6)
                for c in COLUMNS}}
            for r in table.rows
        ],
        "groups": {g: {c: _stats_dict(s) for c, s in st.items()}
                   for g, st in table.groups.items()},
        "overall": {c: _stats_dict(s) for c, s in table.overall.items()},
        "excluded": table.excluded,
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def render_report(table: MetricsTable, fmt: str = "text") -> str:
    if fmt == "csv":
        return records_to_csv(table.records)
    if fmt == "json":
        return render_json(table)
    if fmt == "text":
        return render_text(table)
    raise ValueError(f"unsupported report format {fmt!r}")
