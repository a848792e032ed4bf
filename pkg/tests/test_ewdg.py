from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tasp.ewdg import (EscalationExhausted, Edge, EstimationCache, Instance,
                       InstanceFormatError, Level, PathBounds, PathError,
                       apply_next_estimator, format_bound, parse_bound,
                       parse_instance, path_bounds, serialize_instance,
                       tight_edge_bounds, validate_instance)
from tasp.generate import GenSpec, generate_instance

from .conftest import DATA, instances


def single_edge(levels, true_cost=None):
    e = Edge("a", "b", tuple(Level(l, u) for l, u in levels), true_cost)
    return Instance.build("one", ["a", "b"], [e], "a", ["b"])


def test_gex_is_valid(gex):
    assert validate_instance(gex) == []


def test_unnested_levels_rejected():
    problems = validate_instance(single_edge([(2, 5), (1, 6)]))
    assert any("levels not nested" in p for p in problems)


def test_true_cost_outside_tightest_interval():
    problems = validate_instance(single_edge([(6, 8)], true_cost=9))
    assert any("true cost outside tightest interval" in p for p in problems)


def test_structural_violations():
    e = Edge("a", "zz", (Level(3, 1),))
    inst = Instance.build("bad", ["a", "b"], [e, e], "q", ["b", "w"])
    problems = "\n".join(validate_instance(inst))
    for needle in ("source q", "goal w", "endpoint zz", "parallel edge", "l > u"):
        assert needle in problems


def test_apply_next_estimator_sequence(gex):
    cache = EstimationCache()
    e02 = gex.edge("v0", "v2")
    assert apply_next_estimator(cache, e02) == (1, 6)
    assert apply_next_estimator(cache, e02) == (2, 5)
    assert cache.counters == {1: 1, 2: 1}
    assert cache.theta_max == 1
    assert e02.key in cache.maxed


def test_apply_next_estimator_exhausted(gex):
    cache = EstimationCache()
    e01 = gex.edge("v0", "v1")
    apply_next_estimator(cache, e01)
    with pytest.raises(EscalationExhausted):
        apply_next_estimator(cache, e01)


def test_level_zero_sentinel(gex):
    cache = EstimationCache()
    e14 = gex.edge("v1", "v4")
    assert cache.applied_level(e14) == 0
    assert cache.bounds(e14) == (0, 0)


def test_tight_edge_bounds(gex):
    cache = EstimationCache()
    assert tight_edge_bounds(gex.edge("v1", "v4"), cache) == (5, 6)
    assert tight_edge_bounds(gex.edge("v0", "v1"), cache) == (3, 4)
    assert cache.counters == {1: 2, 2: 1}
    before = (dict(cache.counters), cache.theta_max)
    assert tight_edge_bounds(gex.edge("v1", "v4"), cache) == (5, 6)
    assert (dict(cache.counters), cache.theta_max) == before


def test_path_bounds_examples(gex):
    e = gex.edge
    assert path_bounds([e("v0", "v1"), e("v1", "v4")]) == PathBounds(8, 10)
    assert path_bounds([e("v0", "v2"), e("v2", "v4")]) == PathBounds(7, 11)
    assert path_bounds([]) == PathBounds(0, 0)


def test_path_bounds_rejects_gaps(gex):
    with pytest.raises(PathError):
        path_bounds([gex.edge("v0", "v1"), gex.edge("v2", "v4")])


@given(instances())
def test_escalation_is_monotone_and_counted(inst):
    cache = EstimationCache()
    applied = 0
    for e in inst.edges:
        prev = None
        while cache.applied_level(e) < e.k:
            l, u = apply_next_estimator(cache, e)
            applied += 1
            assert l <= u
            if prev is not None:
                assert prev[0] <= l and u <= prev[1]
            prev = (l, u)
            if e.true_cost is not None:
                assert l <= e.true_cost <= u
    assert sum(cache.counters.values()) == applied
    assert cache.theta_max == len(inst.edges)


@given(instances(), st.data())
def test_path_bounds_additive(inst, data):
    # Build a random walk and split it at a random point.
    walk, at = [], inst.source
    for _ in range(data.draw(st.integers(0, 6))):
        out = inst.successors.get(at, ())
        if not out:
            break
        e = data.draw(st.sampled_from(out))
        walk.append(e)
        at = e.dst
    cut = data.draw(st.integers(0, len(walk)))
    whole = path_bounds(walk)
    assert whole == path_bounds(walk[:cut]) + path_bounds(walk[cut:])
    assert whole.l <= whole.u


# --- instance format ------------------------------------------------------

def test_parse_golden_fixture(gex):
    assert parse_instance((DATA / "g_ex.json").read_text()) == gex


def test_serialize_matches_golden_bytes(gex):
    assert serialize_instance(gex).encode() == (DATA / "g_ex.json").read_bytes()
    assert serialize_instance(gex) == serialize_instance(gex)


def test_missing_source_is_schema_error():
    text = (DATA / "g_ex.json").read_text().replace('"source": "v0",', "")
    with pytest.raises(InstanceFormatError) as err:
        parse_instance(text)
    assert err.value.field == "source"


def test_parallel_edge_is_schema_error():
    doc = """{"name": "p", "nodes": ["a", "b"], "source": "a", "goals": ["b"],
    "edges": [{"from": "a", "to": "b", "levels": [{"l": 1, "u": 2}]},
              {"from": "a", "to": "b", "levels": [{"l": 1, "u": 3}]}]}"""
    with pytest.raises(InstanceFormatError) as err:
        parse_instance(doc)
    assert err.value.field == "parallel edge"


def test_syntax_error_reports_position():
    with pytest.raises(InstanceFormatError) as err:
        parse_instance('{"name": "x",\n  "nodes": [}')
    assert err.value.line == 2
    assert err.value.column is not None


def test_negative_number_rejected():
    doc = """{"name": "p", "nodes": ["a", "b"], "source": "a", "goals": ["b"],
    "edges": [{"from": "a", "to": "b", "levels": [{"l": -1, "u": 2}]}]}"""
    with pytest.raises(InstanceFormatError):
        parse_instance(doc)


def test_invalid_content_parses_but_fails_validation():
    doc = """{"name": "p", "nodes": ["a", "b"], "source": "a", "goals": ["b"],
    "edges": [{"from": "a", "to": "b", "levels": [{"l": 2, "u": 5}, {"l": 1, "u": 6}]}]}"""
    assert validate_instance(parse_instance(doc)) != []


def test_fractional_values_round_trip_exactly():
    inst = single_edge([(Fraction(1, 4), Fraction(7, 2)), (Fraction(1, 3), 3)], Fraction(1, 2))
    text = serialize_instance(inst)
    assert '"l": 0.25' in text and '"l": "1/3"' in text
    assert parse_instance(text) == inst


@pytest.mark.parametrize("seed", range(100))
def test_generated_round_trip(seed):
    topo = ("layered", "grid", "random")[seed % 3]
    spec = GenSpec(topo, 6 + seed % 7, 2 + seed % 2 if topo != "grid" else 1,
                   0.4, 9, seed % 27, seed)
    if topo == "grid":
        spec = GenSpec("grid", 2 * (3 + seed % 3), 2, 0.4, 9, seed % 27, seed)
    inst = generate_instance(spec)
    text = serialize_instance(inst)
    assert parse_instance(text) == inst
    assert serialize_instance(parse_instance(text)) == text


@settings(max_examples=50)
@given(instances())
def test_hypothesis_round_trip(inst):
    assert parse_instance(serialize_instance(inst)) == inst


@pytest.mark.parametrize("text,value", [("7", 7), ("10/7", Fraction(10, 7)), ("inf", float("inf")),
                                        ("4/2", 2)])
def test_bound_parse_format(text, value):
    assert parse_bound(text) == value
    assert parse_bound(format_bound(value)) == value
