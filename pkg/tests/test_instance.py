import json

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from popmatch import fixtures
from popmatch.errors import InstanceError
from popmatch.instance import (
    COST_SCALE,
    admits_perfect_matching,
    format_cost,
    generate_instance,
    instance_from_document,
    is_perfect,
    parse_cost,
    parse_instance,
    serialize_instance,
)
from popmatch.solver import enumerate_perfect_matchings


def test_parse_f1(F1):
    assert F1.edge_set == {("a", "b"), ("a", "b'"), ("a'", "b")}
    assert F1.capacity == {"a": 1, "a'": 1, "b": 1, "b'": 1}
    assert F1.preference["a"] == ("b", "b'")


def test_parse_f2(F2):
    assert len(F2.edges) == 4
    assert all(c == 2 for c in F2.capacity.values())


def test_costs_default_to_zero(F1):
    assert set(F1.cost.values()) == {0}


def _doc(**over):
    doc = json.loads(json.dumps(fixtures.F1_DOC))
    doc.update(over)
    return doc


@pytest.mark.parametrize("mutate, message", [
    (lambda d: d["jobs"][0]["preferences"].append("ghost"), "opposite side"),
    (lambda d: d["jobs"][1]["preferences"].append("a'"), "asymmetric"),
    (lambda d: d["agents"][0].__setitem__("capacity", 3), "capacity"),
    (lambda d: d["agents"][0].__setitem__("capacity", 0), "capacity"),
    (lambda d: d["agents"][1].__setitem__("name", "a"), "duplicate vertex"),
    (lambda d: d["jobs"][0].__setitem__("name", "a"), "duplicate vertex"),
    (lambda d: d["agents"][0]["preferences"].append("b"), "duplicate preference"),
    (lambda d: d["agents"][0].pop("capacity"), "missing field"),
    (lambda d: d.__setitem__("costs", [{"agent": "a'", "job": "b'", "cost": 1}]), "non-edge"),
    (lambda d: d.__setitem__("costs", [{"agent": "a", "job": "b", "cost": "0.0000001"}]),
     "fractional"),
])
def test_validation_errors(mutate, message):
    doc = _doc()
    mutate(doc)
    with pytest.raises(InstanceError, match=message):
        instance_from_document(doc)


def test_asymmetric_listing():
    doc = _doc()
    doc["agents"][1]["preferences"] = ["b", "b'"]  # b' does not list a'
    doc["agents"][1]["capacity"] = 1
    with pytest.raises(InstanceError, match="asymmetric"):
        instance_from_document(doc)


def test_syntax_error():
    with pytest.raises(InstanceError, match="syntax"):
        parse_instance("{not json")


def test_is_perfect_examples(F1, F2):
    assert is_perfect(F1, {("a", "b'"), ("a'", "b")})
    assert not is_perfect(F1, {("a", "b")})
    assert is_perfect(F2, F2.edges)


def test_is_perfect_rejects_non_edges(F1):
    with pytest.raises(InstanceError):
        is_perfect(F1, {("a'", "b'")})


@pytest.mark.parametrize("text, scaled", [
    (0, 0), ("5", 5 * COST_SCALE), ("1.25", 1_250_000), ("-0.000001", -1), (3, 3_000_000),
])
def test_cost_scaling(text, scaled):
    assert parse_cost(text) == scaled


@pytest.mark.parametrize("scaled", [0, 1, -1, 1_250_000, 7 * COST_SCALE, -123_456_789])
def test_cost_format_roundtrip(scaled):
    assert parse_cost(format_cost(scaled)) == scaled


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), na=st.integers(1, 4), nb=st.integers(1, 4),
       cap=st.integers(1, 3), density=st.sampled_from([0.5, 0.8, 1.0]))
def test_serialize_roundtrip(seed, na, nb, cap, density):
    assume(na <= nb * cap and nb <= na * cap)
    inst = generate_instance(seed, na, nb, cap, density)
    again = parse_instance(serialize_instance(inst))
    assert again == inst
    assert serialize_instance(again) == serialize_instance(inst)


def test_decimal_costs_roundtrip():
    doc = dict(fixtures.F4_DOC, costs=[{"agent": "a1", "job": "b1", "cost": 0.1},
                                       {"agent": "a2", "job": "b2", "cost": "2.500001"}])
    inst = instance_from_document(doc)
    assert inst.cost["a1", "b1"] == 100_000
    assert parse_instance(serialize_instance(inst)) == inst


def test_generate_deterministic():
    assert generate_instance(1, 3, 3, 2, 0.8) == generate_instance(1, 3, 3, 2, 0.8)


def test_generate_is_perfect_matchable_by_enumeration():
    inst = generate_instance(1, 3, 3, 2, 0.8)
    assert admits_perfect_matching(inst)
    assert next(iter(enumerate_perfect_matchings(inst)), None) is not None


def test_generate_complete_2x2():
    inst = generate_instance(5, 2, 2, 1, 1.0)
    assert len(inst.edges) == 4
    assert set(inst.capacity.values()) == {1}
    assert admits_perfect_matching(inst)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), na=st.integers(1, 4), nb=st.integers(1, 4),
       cap=st.integers(1, 3), density=st.sampled_from([0.4, 0.7, 1.0]))
def test_generated_instances_have_perfect_matchings(seed, na, nb, cap, density):
    assume(na <= nb * cap and nb <= na * cap)
    inst = generate_instance(seed, na, nb, cap, density)
    assert inst.agent_capacity == inst.job_capacity
    assert any(is_perfect(inst, m) for m in enumerate_perfect_matchings(inst))


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_flow_check_matches_enumeration(seed):
    """Unbalanced / unmatchable instances are detected exactly."""
    import random
    rng = random.Random(seed)
    inst = generate_instance(seed, 3, 3, 2, 0.7)
    caps = {v: rng.randint(1, len(inst.preference[v])) for v in inst.vertices}
    other = type(inst)(inst.agents, inst.jobs, caps, inst.preference)
    expected = other.agent_capacity == other.job_capacity and any(
        True for _ in enumerate_perfect_matchings(other))
    assert admits_perfect_matching(other) == expected


def test_unbalanced_capacities_not_matchable(F1):
    doc = _doc()
    doc["agents"][0]["capacity"] = 2
    doc["jobs"][0]["preferences"] = ["a", "a'"]
    assert not admits_perfect_matching(instance_from_document(doc))
