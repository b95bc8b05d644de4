"""Typed object store: domains, concepts, individuals and their states.

The atom of the whole system is the data object, a triple of concept,
individual and state.  Individuals belong to exactly one finite type
domain and carry a flat attribute map; their current state may change
over time, but constructed triples keep the state they were built with
(snapshot semantics, which is what makes the dynamics testable).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import AmbiguousIdentity, NoWitness, TypeMismatch, UnknownRef
from .predicates import Atomic, Predicate


@dataclass
class State:
    id: str
    label: str = ""


@dataclass
class TypeDomain:
    """A finite, enumerable set of individuals sharing one type."""

    id: str
    description: str = ""
    members: list[str] = field(default_factory=list)


@dataclass
class Concept:
    """A named function family with fixed definition and value ranges."""

    id: str
    definition_range: str
    value_range: str


@dataclass
class Individual:
    id: str
    type: str
    attrs: dict[str, Atomic] = field(default_factory=dict)
    state: str = ""

    def attr(self, name: str) -> Atomic:
        if name == "id":
            return self.id
        if name == "type":
            return self.type
        if name == "state":
            return self.state
        return self.attrs.get(name)


@dataclass(frozen=True)
class DataObject:
    """The model's atom.  ``state`` is the individual's state at build time."""

    concept: str
    individual: str
    state: str


@dataclass
class Sort:
    """An assignment-indexed collection of same-typed individuals."""

    type: str
    assignment: str
    members: list[str]


class ObjectStore:
    """Read-mostly registry of domains, concepts, states and individuals.

    Mutation is limited to registration (done once, at bundle load) and
    state transitions; every query is pure over the current snapshot.
    """

    def __init__(self) -> None:
        self.domains: dict[str, TypeDomain] = {}
        self.concepts: dict[str, Concept] = {}
        self.states: dict[str, State] = {}
        self.individuals: dict[str, Individual] = {}

    # -- registration --------------------------------------------------------

    def add_state(self, state: State) -> None:
        self.states[state.id] = state

    def add_domain(self, domain: TypeDomain) -> None:
        self.domains[domain.id] = domain

    def add_concept(self, concept: Concept) -> None:
        for range_id in (concept.definition_range, concept.value_range):
            if range_id not in self.domains:
                raise UnknownRef(f"concept {concept.id}: unknown domain {range_id}")
        self.concepts[concept.id] = concept

    def add_individual(self, ind: Individual) -> None:
        if ind.type not in self.domains:
            raise UnknownRef(f"individual {ind.id}: unknown domain {ind.type}")
        if ind.state and ind.state not in self.states:
            raise UnknownRef(f"individual {ind.id}: unknown state {ind.state}")
        self.individuals[ind.id] = ind
        members = self.domains[ind.type].members
        if ind.id not in members:
            members.append(ind.id)

    # -- lookups ---------------------------------------------------------------

    def domain(self, domain_id: str) -> TypeDomain:
        try:
            return self.domains[domain_id]
        except KeyError:
            raise UnknownRef(f"unknown domain {domain_id}") from None

    def individual(self, ind_id: str) -> Individual:
        try:
            return self.individuals[ind_id]
        except KeyError:
            raise UnknownRef(f"unknown individual {ind_id}") from None

    def domain_members(self, domain_id: str) -> list[Individual]:
        return [self.individual(i) for i in self.domain(domain_id).members]

    # -- operations ------------------------------------------------------------

    def make_data_object(self, concept_id: str, individual_id: str) -> DataObject:
        """Build a concept/individual/state triple.

        The individual must lie in the concept's definition range; the
        triple snapshots the individual's current state.
        """
        concept = self.concepts.get(concept_id)
        if concept is None:
            raise UnknownRef(f"unknown concept {concept_id}")
        ind = self.individual(individual_id)
        if ind.type != concept.definition_range:
            raise TypeMismatch(
                f"{individual_id} has type {ind.type}, outside definition range "
                f"{concept.definition_range} of {concept_id}"
            )
        return DataObject(concept=concept_id, individual=ind.id, state=ind.state)

    def transition_state(self, individual_id: str, new_state: str) -> Individual:
        """Move an individual to ``new_state``.  Existing triples keep theirs."""
        ind = self.individual(individual_id)
        if new_state not in self.states:
            raise UnknownRef(f"unknown state {new_state}")
        ind.state = new_state
        return ind

    def sort_variable(self, type_id: str, assignment: str, pred: Predicate) -> Sort:
        """Collect the individuals of ``type_id`` satisfying ``pred``."""
        members = [ind.id for ind in self.domain_members(type_id) if pred.holds(ind)]
        return Sort(type=type_id, assignment=assignment, members=members)

    def identify(self, domain_id: str, pred: Predicate) -> Individual:
        """Return the unique member satisfying an identifying predicate.

        Raises ``NoWitness`` on zero matches, ``AmbiguousIdentity`` on two
        or more; either way the predicate failed to identify.
        """
        matches = [ind for ind in self.domain_members(domain_id) if pred.holds(ind)]
        if not matches:
            raise NoWitness(f"no member of {domain_id} satisfies the predicate")
        if len(matches) > 1:
            raise AmbiguousIdentity(
                f"{len(matches)} members of {domain_id} satisfy the predicate"
            )
        return matches[0]
