import random
from pathlib import Path

import pytest

from portalkit import predicates as P
from portalkit.bundle import load_bundle
from portalkit.model import Concept, Individual, ObjectStore, State, TypeDomain

BUNDLE_PATH = Path(__file__).resolve().parent.parent / "bundles" / "figure1.json"

ATTR_NAMES = ("color", "size", "grade", "active")
ATTR_VALUES = {
    "color": ("red", "green", "blue"),
    "size": (1, 2, 3, 4),
    "grade": ("a", "b"),
    "active": (True, False),
}
STATES = ("draft", "active", "archived")


def random_predicate(rng: random.Random, attrs=ATTR_NAMES, values=ATTR_VALUES, depth: int = 2) -> P.Predicate:
    """A random closed predicate over the standard test attribute space."""
    roll = rng.random()
    if depth <= 0 or roll < 0.45:
        attr = rng.choice(attrs)
        pool = values[attr]
        if rng.random() < 0.5:
            return P.Eq(attr, rng.choice(pool))
        if rng.random() < 0.5:
            return P.Ne(attr, rng.choice(pool))
        return P.In(attr, tuple(rng.sample(pool, k=rng.randint(1, len(pool)))))
    if roll < 0.65:
        return P.And(tuple(random_predicate(rng, attrs, values, depth - 1) for _ in range(2)))
    if roll < 0.85:
        return P.Or(tuple(random_predicate(rng, attrs, values, depth - 1) for _ in range(2)))
    return P.Not(random_predicate(rng, attrs, values, depth - 1))


def random_store(rng: random.Random, n_individuals: int, domain_id: str = "things") -> ObjectStore:
    """A store with one domain populated by ``n_individuals`` random members."""
    store = ObjectStore()
    for sid in STATES:
        store.add_state(State(sid))
    store.add_domain(TypeDomain(id=domain_id, description="test domain"))
    store.add_concept(Concept(id="thing-view", definition_range=domain_id, value_range=domain_id))
    for i in range(n_individuals):
        attrs = {name: rng.choice(ATTR_VALUES[name]) for name in ATTR_NAMES}
        store.add_individual(
            Individual(id=f"x{i}", type=domain_id, attrs=attrs, state=rng.choice(STATES))
        )
    return store


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xC0FFEE)


@pytest.fixture
def engine():
    return load_bundle(BUNDLE_PATH)
