from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings

from tasp.ewdg import INF, Edge, EstimationCache, Instance, Level
from tasp.fixtures import merge, zero_lower
from tasp.generate import GenSpec, exact_instance, generate_instance
from tasp.oracle import check_admissible, combine_bstar, enumerate_simple_paths, solve_oracle
from tasp.search import (FOUND, NO_SOLUTION, beast, beauty, beauty_and_beast,
                         ei_ucs)

from .conftest import instances
from .test_oracle import classic_cost

BEAST_BASE_LOG = [
    "POP v0 0",
    "EST v0->v1 L1 l=3 u=4",
    "INS v1 4",
    "EST v0->v2 L1 l=1 u=6",
    "EST v0->v2 L2 l=2 u=5",
    "INS v2 5",
    "POP v1 4",
    "EST v1->v4 L1 l=1 u=7",
    "EST v1->v4 L2 l=5 u=6",
    "INS v4 10",
    "POP v2 5",
    "EST v2->v3 L1 l=7 u=9",
    "EST v2->v3 L2 l=7 u=8",
    "INS v3 13",
    "EST v2->v4 L1 l=5 u=6",
    "PRUNE v2->v4 dominated",
    "POP v4 10",
    "RET v0->v1,v1->v4 10",
]


def invocations(report):
    """Multiset of (edge, level) applications read off the event log."""
    out = Counter()
    for line in report.trace:
        if line.startswith("EST "):
            _, edge, level, *_ = line.split()
            out[(edge, int(level[1:]))] += 1
    return out


def pops(report):
    return [tuple(line.split()[1:]) for line in report.trace if line.startswith("POP ")]


def labels(path):
    return [e.label for e in path]


def test_beast_base_trace(gex):
    rep = beast(gex, trace=True)
    assert list(rep.trace) == BEAST_BASE_LOG
    assert (rep.status, labels(rep.path), rep.bound) == (FOUND, ["v0->v1", "v1->v4"], 10)
    assert rep.expanded == 4 and rep.generated == 5 and rep.pruned == 0
    assert rep.counters == {1: 5, 2: 3} and rep.theta_max == 5


def test_beast_prune_4(gex):
    rep = beast(gex, 4, trace=True)
    assert (rep.status, rep.path, rep.bound) == (NO_SOLUTION, (), INF)
    assert invocations(rep) == Counter({("v0->v1", 1): 1, ("v0->v2", 1): 1,
                                        ("v0->v2", 2): 1, ("v1->v4", 1): 1})
    assert [line for line in rep.trace if line.startswith("INS")] == ["INS v1 4"]
    assert rep.pruned == 2


def test_beast_prune_11(gex):
    base = beast(gex, trace=True)
    rep = beast(gex, 11, trace=True)
    assert labels(rep.path) == ["v0->v1", "v1->v4"] and rep.bound == 10
    assert invocations(rep) == invocations(base) - Counter({("v2->v3", 2): 1})
    assert pops(rep) == pops(base)
    assert "PRUNE v2->v3 u_prune" in rep.trace


def test_beauty_gex(gex):
    rep = beauty(gex, trace=True)
    assert labels(rep.path) == ["v0->v2", "v2->v4"] and rep.bound == 7
    assert pops(rep) == [("v0", "0"), ("v2", "2"), ("v1", "3"), ("v4", "7")]
    assert "EST v1->v4 L2 l=5 u=6" in rep.trace
    assert "PRUNE v1->v4 dominated" in rep.trace


def test_beauty_l_prune(gex):
    assert beauty(gex, 6).status == NO_SOLUTION
    assert beauty(gex, 7).bound == 7


def test_ei_ucs_gex(gex):
    rep = ei_ucs(gex)
    assert labels(rep.path) == ["v0->v1", "v1->v4"] and rep.bound == 10
    assert rep.theta_max == 5
    # only final levels are applied
    assert rep.counters == {1: 2, 2: 3}


def test_bnb_gex(gex):
    rep = beauty_and_beast(gex, trace=True)
    assert labels(rep.path) == ["v0->v1", "v1->v4"]
    assert (rep.b_star, rep.l_star, rep.u_star) == (Fraction(10, 7), 7, 10)
    assert ("v2->v3", 2) not in invocations(rep.sub_report)
    assert rep.sub_report.theta_max == 4


def test_bnb_share_cache(gex):
    rep = beauty_and_beast(gex, share_cache=True)
    assert rep.b_star == Fraction(10, 7)
    # every BEAST-phase estimate was already memoized by BEAUTY
    assert rep.sub_report.theta_max == 0


def test_bnb_exact_branch():
    inst = exact_instance(GenSpec("layered", 9, 3, 0.6, 7, 0, 3))
    rep = beauty_and_beast(inst)
    assert rep.b_star == 1 and rep.sub_report is None
    assert rep.l_star == rep.u_star == classic_cost(inst)


def test_bnb_zero_lower_bound():
    rep = beauty_and_beast(zero_lower())
    assert rep.l_star == 0 and rep.u_star == 5 and rep.b_star == INF
    assert labels(rep.path) == ["v0->v1", "v1->v2"]


def no_path_instance():
    return Instance.build("np", ["a", "b", "c"], [Edge("a", "b", (Level(1, 2),))], "a", ["c"])


@pytest.mark.parametrize("solver", [ei_ucs, beast, beauty])
def test_no_solution(solver):
    rep = solver(no_path_instance())
    assert (rep.status, rep.path, rep.bound) == (NO_SOLUTION, (), INF)


def test_bnb_no_solution():
    rep = beauty_and_beast(no_path_instance())
    assert rep.path == () and rep.b_star == INF


def test_source_is_goal():
    inst = Instance.build("sg", ["a", "b"], [Edge("a", "b", (Level(1, 2),))], "a", ["a"])
    for solver in (ei_ucs, beast, beauty):
        rep = solver(inst)
        assert rep.status == FOUND and rep.path == () and rep.bound == 0
    assert beauty_and_beast(inst).b_star == 1


def test_merge_fixture_saves_estimates():
    inst = merge()
    assert beast(inst).theta_max < ei_ucs(inst).theta_max


def test_jump_new_keeps_bound(gex):
    rep = beast(gex, jump_new=True)
    assert rep.bound == 10
    assert rep.counters.get(1, 0) < beast(gex).counters[1]


def test_negative_threshold_rejected(gex):
    with pytest.raises(ValueError):
        beast(gex, -1)


def test_determinism(gex):
    assert beast(gex, trace=True).trace == beast(gex, trace=True).trace
    assert beauty(gex, trace=True).trace == beauty(gex, trace=True).trace


def test_shared_cache_counts_only_new_work(gex):
    cache = EstimationCache()
    first = beast(gex, cache=cache)
    second = beast(gex, cache=cache)
    assert first.theta_max == 5 and second.theta_max == 0
    assert second.bound == first.bound


# --- properties against the oracle ----------------------------------------

@settings(max_examples=300)
@given(instances())
def test_oracle_equivalence(inst):
    res = solve_oracle(inst)
    assert beast(inst).bound == res.u_star
    assert ei_ucs(inst).bound == res.u_star
    assert beauty(inst).bound == res.l_star
    bnb = beauty_and_beast(inst)
    assert bnb.b_star == combine_bstar(res.l_star, res.u_star)
    if bnb.path:
        assert sum(e.levels[-1].u for e in bnb.path) == res.u_star


@settings(max_examples=200)
@given(instances())
def test_expansion_order_matches_ei_ucs(inst):
    a = ei_ucs(inst, trace=True)
    b = beast(inst, trace=True)
    assert pops(a) == pops(b)
    assert b.theta_max <= a.theta_max


@settings(max_examples=200)
@given(instances())
def test_u_prune_threshold(inst):
    u_star = solve_oracle(inst).u_star
    if u_star == INF:
        assert beast(inst).status == NO_SOLUTION
        return
    for up in {u_star, u_star + 1, 2 * u_star, INF}:
        assert beast(inst, up).bound == u_star
    for up in {u_star - Fraction(1, 10**12), Fraction(u_star, 2), 0}:
        if up < u_star and up >= 0:
            assert beast(inst, up).status == NO_SOLUTION


@settings(max_examples=150)
@given(instances())
def test_tasp_admissibility(inst):
    rep = beauty_and_beast(inst)
    if rep.b_star == INF:
        return
    assert check_admissible(inst, rep.path, rep.b_star)
    # no solution path is admissible for a smaller factor
    if rep.b_star > 1:
        smaller = Fraction(rep.b_star) - Fraction(1, 10**9)
        for p in enumerate_simple_paths(inst):
            assert not check_admissible(inst, p, smaller)


@settings(max_examples=150)
@given(instances())
def test_bounded_phase_never_costs_more(inst):
    rep = beauty_and_beast(inst)
    if rep.sub_report is not None:
        assert rep.sub_report.theta_max <= beast(inst).theta_max
    assert rep.slb_report.pruned <= rep.slb_report.generated


@pytest.mark.parametrize("seed", range(0, 27, 3))
def test_generated_layered(seed):
    inst = generate_instance(GenSpec("layered", 10, 3, 0.6, 12, seed, 11))
    res = solve_oracle(inst)
    bnb = beauty_and_beast(inst)
    assert bnb.b_star == res.b_star
    assert bnb.sub_report.theta_max <= beast(inst).theta_max <= ei_ucs(inst).theta_max
