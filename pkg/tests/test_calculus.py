import random

import pytest
from hypothesis import given, strategies as st

from portalkit import predicates as P
from portalkit.calculus import (
    GeneralizedValue,
    Mapping,
    MetaLevel,
    MetaRegistry,
    apply_assignment,
    classify,
    comprehend,
    eval_pair,
    lift_level,
    object_level,
)
from portalkit.errors import EmptyCarrier, LevelMismatch, OutsideDomain, UnknownPoint

from conftest import random_predicate, random_store


def seg_value() -> GeneralizedValue:
    return GeneralizedValue("z", {"higraph": "z_higraph", "mmedia": "z_mmedia"})


def const_value() -> GeneralizedValue:
    return GeneralizedValue("q", {"higraph": "q_i", "mmedia": "q_i"})


# -- pair evaluation ----------------------------------------------------------


def test_eval_pair_identity_and_swap():
    ident = Mapping("d", "d", {"d1": "d1", "d2": "d2"})
    assert eval_pair(ident, "d1") == "d1"
    swap = Mapping("d", "d", {"d1": "d2", "d2": "d1"})
    assert eval_pair(swap, "d2") == "d1"


def test_eval_pair_outside_domain():
    with pytest.raises(OutsideDomain):
        eval_pair(Mapping("d", "d", {"d1": "d1"}), "zz")


def test_eval_pair_graph_lookup_oracle(rng):
    for _ in range(100):
        n = rng.randint(1, 128)
        elems = [f"e{i}" for i in range(n)]
        graph = {e: rng.choice(elems) for e in elems}
        f = Mapping("d", "d", graph)
        for e in elems:
            assert eval_pair(f, e) == graph[e]


# -- assignment application -----------------------------------------------------


def test_single_point_selects_case():
    assert apply_assignment(seg_value(), {"higraph"}) == "z_higraph"
    assert apply_assignment(seg_value(), {"mmedia"}) == "z_mmedia"


def test_saturation_further_points_change_nothing():
    specific = apply_assignment(seg_value(), {"higraph"})
    for point in ("registered", "mmedia", "corporate"):
        assert apply_assignment(specific, {point}) == specific


def test_constant_value_answers_constant_for_any_point():
    q = const_value()
    assert q.is_constant()
    for point in ("higraph", "mmedia", "registered", "unheard-of"):
        assert apply_assignment(q, {point}) == "q_i"


def test_unknown_point_on_nonconstant():
    with pytest.raises(UnknownPoint):
        apply_assignment(seg_value(), {"teletext"})


def test_empty_assignment_set_rejected():
    with pytest.raises(UnknownPoint):
        apply_assignment(seg_value(), set())


def test_multi_point_narrows_without_collapse():
    narrowed = apply_assignment(seg_value(), {"higraph", "mmedia"})
    assert isinstance(narrowed, GeneralizedValue)
    assert set(narrowed.cases) == {"higraph", "mmedia"}
    # then a second, smaller assignment finishes the job
    assert apply_assignment(narrowed, {"mmedia"}) == "z_mmedia"


def test_nested_generalized_values_apply_uniformly():
    inner = GeneralizedValue("inner", {"registered": "r1", "corporate": "r2"})
    outer = GeneralizedValue("outer", {"higraph": inner, "mmedia": "flat"})
    picked = apply_assignment(outer, {"higraph"})
    assert picked == inner
    assert apply_assignment(picked, {"corporate"}) == "r2"


points_st = st.sampled_from(["p0", "p1", "p2", "p3", "p4"])
cases_st = st.dictionaries(points_st, st.text(min_size=1, max_size=6), min_size=1, max_size=5)


@given(cases=cases_st, probe=points_st)
def test_saturation_fixed_point_property(cases, probe):
    g = GeneralizedValue("g", dict(cases))
    point, expected = next(iter(cases.items()))
    value = apply_assignment(g, {point})
    assert value == expected
    # an atomic result is a fixed point of any further application
    assert apply_assignment(value, {probe}) == value


@given(cases=cases_st, a=st.sets(points_st, min_size=1), b=st.sets(points_st, min_size=1))
def test_constant_invariance_property(cases, a, b):
    constant = next(iter(cases.values()))
    g = GeneralizedValue("g", {p: constant for p in cases})
    assert apply_assignment(g, a) == constant
    assert apply_assignment(g, b) == constant


def test_saturation_fixed_point_random(rng):
    points = [f"p{i}" for i in range(8)]
    for _ in range(200):
        cases = {p: f"v_{p}" for p in rng.sample(points, k=rng.randint(1, 8))}
        g = GeneralizedValue("g", cases)
        chosen = rng.choice(list(cases))
        value = apply_assignment(g, {chosen})
        for other in points:
            assert apply_assignment(value, {other}) == value


# -- comprehension -----------------------------------------------------------------


def test_comprehend_even_integers():
    members = [{"id": i, "value": i} for i in range(1, 11)]
    even = P.In("value", (2, 4, 6, 8, 10))
    assert [m["value"] for m in comprehend(members, even)] == [2, 4, 6, 8, 10]


def test_comprehend_true_is_identity():
    members = [{"id": i} for i in range(5)]
    assert comprehend(members, P.Always()) == members


def test_comprehension_extensionality(rng):
    store = random_store(rng, 500)
    members = store.domain_members("things")
    for _ in range(100):
        pred = random_predicate(rng)
        result = comprehend(members, pred)
        assert result == [m for m in members if pred.holds(m)]
        chosen = set(id(m) for m in result)
        for m in members:
            assert (id(m) in chosen) == pred.holds(m)


# -- metadata tower ------------------------------------------------------------------


def level0_of(store) -> MetaLevel:
    return MetaLevel(0, {i.id: i for i in store.individuals.values()})


def test_lift_and_classify_definitional(rng):
    store = random_store(rng, 32)
    base = level0_of(store)
    schema = lift_level(base, P.Eq("color", "red"), "red-things")
    assert schema.level == 1
    for ind in store.individuals.values():
        assert classify(schema, ind) == (ind.attrs["color"] == "red")


def test_lift_twice_builds_level_two(rng):
    store = random_store(rng, 16)
    base = level0_of(store)
    chars = {
        "reds": lift_level(base, P.Eq("color", "red"), "reds"),
        "bigs": lift_level(base, P.In("size", (3, 4)), "bigs"),
    }
    level1 = MetaLevel(1, chars)
    meta_schema = lift_level(level1, P.Eq("id", "reds"), "schemas-named-reds")
    assert meta_schema.level == 2
    assert classify(meta_schema, chars["reds"]) is True
    assert classify(meta_schema, chars["bigs"]) is False


def test_classify_wrong_level_rejected(rng):
    store = random_store(rng, 8)
    base = level0_of(store)
    schema = lift_level(base, P.Always(), "everything")
    with pytest.raises(LevelMismatch):
        classify(schema, schema)  # a level-1 object offered to a level-1 classifier


def test_classify_outside_carrier_rejected(rng):
    from portalkit.model import Individual

    store = random_store(rng, 8)
    schema = lift_level(level0_of(store), P.Always(), "everything")
    stranger = Individual(id="outsider", type="things", attrs={}, state="draft")
    with pytest.raises(LevelMismatch):
        classify(schema, stranger)


def test_lift_over_empty_carrier_rejected():
    with pytest.raises(EmptyCarrier):
        lift_level(MetaLevel(0, {}), P.Always(), "empty")


def test_tower_pointwise_oracle(rng):
    for _ in range(100):
        store = random_store(rng, rng.randint(1, 128))
        base = level0_of(store)
        pred = random_predicate(rng)
        char = lift_level(base, pred, "probe")
        assert char.level == base.level + 1
        for ind in base.members():
            assert classify(char, ind) == pred.holds(ind)


def test_comprehension_works_unchanged_on_lifted_carrier(rng):
    # metadata objects are ordinary carrier members for comprehension
    store = random_store(rng, 64)
    base = level0_of(store)
    chars = {}
    for i in range(16):
        c = lift_level(base, random_predicate(rng), f"schema{i}")
        chars[c.id] = c
    members = list(chars.values())
    pred = P.In("id", tuple(sorted(chars))[:5])
    result = comprehend(members, pred)
    assert result == [m for m in members if pred.holds(m)]
    assert all(object_level(m) == 1 for m in result)


def test_registry_levels_and_lookup(rng):
    store = random_store(rng, 8)
    reg = MetaRegistry()
    for ind in store.individuals.values():
        reg.register(ind.id, ind)
    char = reg.lift(0, P.Eq("color", "blue"), "blues")
    assert reg.lookup(1, "blues") is char
    assert reg.lookup(0, "x0") is store.individual("x0")
    char2 = reg.lift(1, P.Eq("id", "blues"), "blues-schema")
    assert char2.level == 2
    assert classify(char2, char) is True
