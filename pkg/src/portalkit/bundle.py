"""Portal bundle loading, validation and export.

A bundle is a single JSON document with exactly eleven sections:
types, individuals, frames, gvalues, functionals, users, roles,
sources, templates, navigation and scripts.  Loading is all-or-nothing:
the document is parsed and every cross-reference checked while building
a fresh engine, and the first unresolved reference aborts the load,
naming the section and the offending id.  Source locations are resolved
relative to the bundle file's directory.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Optional, Union

from .access import ProfileFunctional, Role, RoleScope, UserRecord
from .calculus import GeneralizedValue, Value
from .engine import (
    NavEntry,
    PortalEngine,
    Script,
    Slot,
    Template,
    TemplateType,
    binding_from_json,
    binding_to_json,
)
from .errors import DanglingReference, ParseError
from .model import Concept, Individual, State, TypeDomain
from .predicates import predicate_from_json
from .semnet import Constant
from .sources import SourceDescriptor

SECTIONS = (
    "types",
    "individuals",
    "frames",
    "gvalues",
    "functionals",
    "users",
    "roles",
    "sources",
    "templates",
    "navigation",
    "scripts",
)


def _require_keys(entry: dict, allowed: set[str], required: set[str], where: str) -> None:
    if not isinstance(entry, dict):
        raise ParseError(f"{where}: expected an object, got {type(entry).__name__}")
    unknown = set(entry) - allowed
    if unknown:
        raise ParseError(f"{where}: unknown key(s) {sorted(unknown)}")
    missing = required - set(entry)
    if missing:
        raise ParseError(f"{where}: missing key(s) {sorted(missing)}")


def _gvalue_cases(doc: Any, gid: str) -> dict[str, Value]:
    if not isinstance(doc, dict) or not doc:
        raise ParseError(f"gvalues {gid}: cases must be a non-empty object")
    cases: dict[str, Value] = {}
    for point, value in doc.items():
        if isinstance(value, dict):
            cases[point] = GeneralizedValue(id=f"{gid}.{point}", cases=_gvalue_cases(value, gid))
        else:
            cases[point] = value
    return cases


def _gvalue_cases_json(cases: dict[str, Value]) -> dict:
    out: dict[str, Any] = {}
    for point, value in cases.items():
        if isinstance(value, GeneralizedValue):
            out[point] = _gvalue_cases_json(value.cases)
        else:
            out[point] = value
    return out


def load_bundle(path: Union[str, Path]) -> PortalEngine:
    """Parse, validate and instantiate a bundle into a fresh engine."""
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read bundle {path}: {exc}") from None
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bundle {path} is not valid JSON: {exc}") from None
    return build_engine(doc, base_dir=path.parent)


def build_engine(doc: Any, base_dir: Optional[Path] = None) -> PortalEngine:
    """Assemble an engine from a parsed bundle document."""
    if not isinstance(doc, dict):
        raise ParseError("bundle must be a JSON object")
    unknown = set(doc) - set(SECTIONS)
    if unknown:
        raise ParseError(f"unknown bundle section(s) {sorted(unknown)}")
    missing = set(SECTIONS) - set(doc)
    if missing:
        raise ParseError(f"missing bundle section(s) {sorted(missing)}")

    engine = PortalEngine()
    _load_types(engine, doc["types"])
    _load_individuals(engine, doc["individuals"], doc["types"])
    _load_roles(engine, doc["roles"])
    _load_users(engine, doc["users"])
    _load_functionals(engine, doc["functionals"])
    _load_sources(engine, doc["sources"], base_dir)
    _load_frames(engine, doc["frames"])
    _load_gvalues(engine, doc["gvalues"])
    _load_templates(engine, doc["templates"])
    _load_navigation(engine, doc["navigation"])
    _load_scripts(engine, doc["scripts"])

    for ind in engine.objects.individuals.values():
        engine.meta.register(ind.id, ind, level=0)
    for ttype in engine.template_types.values():
        engine.meta.register(ttype.id, ttype, level=1)
    return engine


def _load_types(engine: PortalEngine, section: Any) -> None:
    _require_keys(section, {"domains", "concepts", "states"}, {"domains", "concepts", "states"}, "types")
    for entry in section["states"]:
        _require_keys(entry, {"id", "label"}, {"id"}, "types.states")
        engine.objects.add_state(State(id=entry["id"], label=entry.get("label", "")))
    for entry in section["domains"]:
        _require_keys(entry, {"id", "description", "members"}, {"id"}, "types.domains")
        engine.objects.add_domain(
            TypeDomain(id=entry["id"], description=entry.get("description", ""), members=[])
        )
    for entry in section["concepts"]:
        _require_keys(
            entry, {"id", "definition_range", "value_range"}, {"id", "definition_range", "value_range"}, "types.concepts"
        )
        for range_id in (entry["definition_range"], entry["value_range"]):
            if range_id not in engine.objects.domains:
                raise DanglingReference("types", entry["id"], f"unknown domain {range_id}")
        engine.objects.add_concept(
            Concept(id=entry["id"], definition_range=entry["definition_range"], value_range=entry["value_range"])
        )


def _load_individuals(engine: PortalEngine, section: Any, types_section: Any) -> None:
    for entry in section:
        _require_keys(entry, {"id", "type", "attrs", "state"}, {"id", "type"}, "individuals")
        if entry["type"] not in engine.objects.domains:
            raise DanglingReference("individuals", entry["id"], f"unknown domain {entry['type']}")
        state = entry.get("state", "")
        if state and state not in engine.objects.states:
            raise DanglingReference("individuals", entry["id"], f"unknown state {state}")
        engine.objects.add_individual(
            Individual(id=entry["id"], type=entry["type"], attrs=dict(entry.get("attrs", {})), state=state)
        )
    # declared domain memberships, if present, must agree with the individuals
    for entry in types_section["domains"]:
        declared = entry.get("members")
        if declared is None:
            continue
        actual = engine.objects.domains[entry["id"]].members
        if sorted(declared) != sorted(actual):
            raise DanglingReference("types", entry["id"], "declared members disagree with individuals")


def _load_roles(engine: PortalEngine, section: Any) -> None:
    allowed = {"id", "rank", "read_sources", "write_sources", "meta_read_cap", "meta_write_cap"}
    for entry in section:
        _require_keys(entry, allowed, {"id", "rank"}, "roles")
        engine.access.add_role(
            Role(
                id=entry["id"],
                rank=int(entry["rank"]),
                scope=RoleScope(
                    read_sources=set(entry.get("read_sources", [])),
                    write_sources=set(entry.get("write_sources", [])),
                    meta_read_cap=int(entry.get("meta_read_cap", 0)),
                    meta_write_cap=int(entry.get("meta_write_cap", -1)),
                ),
            )
        )


def _load_users(engine: PortalEngine, section: Any) -> None:
    allowed = {"id", "settings", "status", "device", "browser", "role"}
    for entry in section:
        _require_keys(entry, allowed, {"id", "role"}, "users")
        if entry["role"] not in engine.access.roles:
            raise DanglingReference("users", entry["id"], f"unknown role {entry['role']}")
        engine.access.add_user(
            UserRecord(
                id=entry["id"],
                settings=set(entry.get("settings", [])),
                status=entry.get("status", "unregistered"),
                device=entry.get("device", ""),
                browser=set(entry.get("browser", [])),
                role=entry["role"],
            )
        )


def _load_functionals(engine: PortalEngine, section: Any) -> None:
    for entry in section:
        _require_keys(entry, {"id", "base"}, {"id", "base"}, "functionals")
        base = entry["base"]
        if base == "all":
            base = list(engine.access.users)
        for uid in base:
            if uid not in engine.access.users:
                raise DanglingReference("functionals", entry["id"], f"unknown user {uid}")
        engine.access.add_functional(ProfileFunctional(id=entry["id"], base=list(base)))


def _load_sources(engine: PortalEngine, section: Any, base_dir: Optional[Path]) -> None:
    for entry in section:
        _require_keys(entry, {"id", "kind", "location", "key_field"}, {"id", "kind", "location"}, "sources")
        engine.hub.register_source(
            SourceDescriptor(
                id=entry["id"],
                kind=entry["kind"],
                location=entry["location"],
                key_field=entry.get("key_field"),
            ),
            base_dir=base_dir,
        )


def _load_frames(engine: PortalEngine, section: Any) -> None:
    for entry in section:
        _require_keys(entry, {"rel", "subj", "obj"}, {"rel", "subj", "obj"}, "frames")
        engine.frames.declare_relation(entry["rel"])
        for cid in (entry["subj"], entry["obj"]):
            # a constant binds to the individual of the same id when one
            # exists, and to itself as an atom otherwise
            engine.frames.declare_constant(Constant(id=cid, binding=cid))
        engine.frames.assert_frame(entry["rel"], entry["subj"], entry["obj"])


def _load_gvalues(engine: PortalEngine, section: Any) -> None:
    for entry in section:
        _require_keys(entry, {"id", "cases", "description"}, {"id", "cases"}, "gvalues")
        gv = GeneralizedValue(
            id=entry["id"],
            cases=_gvalue_cases(entry["cases"], entry["id"]),
            description=entry.get("description", ""),
        )
        engine.gvalues[gv.id] = gv
        engine.access.point_vocabulary |= gv.points()


def _load_templates(engine: PortalEngine, section: Any) -> None:
    _require_keys(section, {"types", "instances"}, {"types", "instances"}, "templates")
    for entry in section["types"]:
        _require_keys(entry, {"id", "slot_signature"}, {"id", "slot_signature"}, "templates.types")
        signature = [(name, kind) for name, kind in entry["slot_signature"]]
        engine.add_template_type(TemplateType(id=entry["id"], slot_signature=signature))
    for entry in section["instances"]:
        engine.add_template(parse_template(entry))


def parse_template(entry: Any) -> Template:
    """Parse one template instance; shared with the admin PUT endpoint."""
    _require_keys(entry, {"id", "type", "slots"}, {"id", "type", "slots"}, "templates.instances")
    slots = []
    for slot_doc in entry["slots"]:
        _require_keys(slot_doc, {"name", "kind", "binding", "min_access"}, {"name", "kind", "binding"}, "templates.instances.slots")
        try:
            binding = binding_from_json(slot_doc["binding"])
        except (ValueError, KeyError) as exc:
            raise ParseError(f"templates {entry['id']}: bad binding for slot {slot_doc.get('name')}: {exc}") from None
        min_access = slot_doc.get("min_access", "public")
        if min_access != "public":
            min_access = int(min_access)
        slots.append(Slot(name=slot_doc["name"], kind=slot_doc["kind"], binding=binding, min_access=min_access))
    return Template(id=entry["id"], type=entry["type"], slots=slots)


def _load_navigation(engine: PortalEngine, section: Any) -> None:
    for entry in section:
        _require_keys(entry, {"point", "type", "template"}, {"point", "type", "template"}, "navigation")
        engine.add_navigation(NavEntry(point=entry["point"], type=entry["type"], template=entry["template"]))


def _load_scripts(engine: PortalEngine, section: Any) -> None:
    _require_keys(section, {"events", "handlers"}, {"events", "handlers"}, "scripts")
    engine.script_events = list(section["events"])
    for entry in section["handlers"]:
        _require_keys(entry, {"event", "guard", "action", "slots", "target"}, {"event", "action"}, "scripts")
        try:
            guard = predicate_from_json(entry.get("guard", {"op": "true"}))
        except ValueError as exc:
            raise ParseError(f"scripts: bad guard for event {entry['event']}: {exc}") from None
        action = entry["action"]
        if action not in ("rebuild", "rebind", "transition_state", "noop"):
            raise ParseError(f"scripts: unknown action {action!r}")
        target = entry.get("target", "")
        if action == "transition_state" and target not in engine.objects.states:
            raise DanglingReference("scripts", entry["event"], f"unknown state {target}")
        engine.add_script(
            Script(
                event=entry["event"],
                guard=guard,
                action=action,
                slots=tuple(entry.get("slots", [])),
                target=target,
            )
        )


# -- export ---------------------------------------------------------------------------


def export_bundle(engine: PortalEngine) -> dict:
    """Serialize the engine's declarative model back into bundle form."""
    objects = engine.objects
    return {
        "types": {
            "domains": [
                {"id": d.id, "description": d.description, "members": sorted(d.members)}
                for d in objects.domains.values()
            ],
            "concepts": [
                {"id": c.id, "definition_range": c.definition_range, "value_range": c.value_range}
                for c in objects.concepts.values()
            ],
            "states": [{"id": s.id, "label": s.label} for s in objects.states.values()],
        },
        "individuals": [
            {"id": i.id, "type": i.type, "attrs": dict(i.attrs), "state": i.state}
            for i in objects.individuals.values()
        ],
        "frames": [
            {"rel": f.rel, "subj": f.subj, "obj": f.obj} for f in engine.frames.frames()
        ],
        "gvalues": [
            {"id": g.id, "cases": _gvalue_cases_json(g.cases), "description": g.description}
            for g in engine.gvalues.values()
        ],
        "functionals": [
            {"id": f.id, "base": sorted(f.base)} for f in engine.access.functionals.values()
        ],
        "users": [
            {
                "id": u.id,
                "settings": sorted(u.settings),
                "status": u.status,
                "device": u.device,
                "browser": sorted(u.browser),
                "role": u.role,
            }
            for u in engine.access.users.values()
        ],
        "roles": [
            {
                "id": r.id,
                "rank": r.rank,
                "read_sources": sorted(r.scope.read_sources),
                "write_sources": sorted(r.scope.write_sources),
                "meta_read_cap": r.scope.meta_read_cap,
                "meta_write_cap": r.scope.meta_write_cap,
            }
            for r in engine.access.roles.values()
        ],
        "sources": [
            {
                "id": d.id,
                "kind": d.kind,
                "location": d.location,
                **({"key_field": d.key_field} if d.key_field else {}),
            }
            for d in engine.hub.descriptors.values()
        ],
        "templates": {
            "types": [
                {"id": t.id, "slot_signature": [[n, k] for n, k in t.slot_signature]}
                for t in engine.template_types.values()
            ],
            "instances": [template_to_json(t) for t in engine.templates.values()],
        },
        "navigation": [
            {"point": e.point, "type": e.type, "template": e.template}
            for e in engine.navigation.values()
        ],
        "scripts": {
            "events": list(engine.script_events),
            "handlers": [
                {
                    "event": s.event,
                    "guard": s.guard.to_json(),
                    "action": s.action,
                    **({"slots": list(s.slots)} if s.slots else {}),
                    **({"target": s.target} if s.target else {}),
                }
                for s in engine.scripts
            ],
        },
    }


def template_to_json(template: Template) -> dict:
    return {
        "id": template.id,
        "type": template.type,
        "slots": [
            {
                "name": s.name,
                "kind": s.kind,
                "binding": binding_to_json(s.binding),
                "min_access": s.min_access,
            }
            for s in template.slots
        ],
    }
