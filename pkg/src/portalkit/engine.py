"""Page assembly engine: template resolution, slot binding, rendering,
event scripts and update-driven rebuilds.

Page construction happens in two assignment steps.  First the chosen
navigation point selects a template type and the concrete template of
that type.  Second, each of the template's slots is bound against the
current sources, frames and metadata; slots above the viewer's access
are silently elided, and the page is stamped with the update sequence
number it was built at.

The engine is an abstract machine over states: scripts fire on declared
events in declaration order, source update events invalidate and
rebuild exactly the cached pages whose bindings reach the changed
source, and a simulated clock drives scheduled refreshes.  All state
mutation funnels through one lock; rendering and reports read
snapshots.
"""

from __future__ import annotations

import html as html_escape
import json
import threading
from dataclasses import dataclass, field
from typing import Any, Optional, Union

from .access import AccessControl, AccessView, Session
from .calculus import GeneralizedValue, MetaRegistry
from .errors import (
    DanglingReference,
    MissingKeyField,
    OutOfOrderEvent,
    UnboundSlot,
    UnknownEvent,
    UnknownNavigationPoint,
    UnknownRef,
)
from .model import ObjectStore
from .predicates import Predicate, predicate_from_json
from .semnet import FrameStore
from .sources import SourceHub, UpdateEvent

SLOT_KINDS = (
    "title",
    "header",
    "footer",
    "formatted_text",
    "static_image",
    "video_clip",
    "grid",
    "url_meta",
)

PUBLIC = "public"
SYSTEM_VIEW = AccessView(rank=2, registered=True)


# -- template structure ----------------------------------------------------------


@dataclass(frozen=True)
class SourceQuery:
    source: str
    pred: Predicate


@dataclass(frozen=True)
class SourceJoin:
    left: str
    right: str
    key: str
    projection: tuple[str, ...]


@dataclass(frozen=True)
class FrameQuery:
    rel: str
    subj: str
    obj: str


@dataclass(frozen=True)
class MediaRef:
    asset: str


@dataclass(frozen=True)
class ContentRef:
    key: str


@dataclass(frozen=True)
class GeneratedUrl:
    pass


BindingSpec = Union[SourceQuery, SourceJoin, FrameQuery, MediaRef, ContentRef, GeneratedUrl]


@dataclass
class Slot:
    name: str
    kind: str
    binding: BindingSpec
    min_access: Union[str, int] = PUBLIC  # "public" or a minimum role rank


@dataclass
class TemplateType:
    id: str
    slot_signature: list[tuple[str, str]]  # ordered (name, kind)


@dataclass
class Template:
    id: str
    type: str
    slots: list[Slot]


@dataclass
class NavEntry:
    point: str
    type: str
    template: str


@dataclass
class Script:
    event: str
    guard: Predicate
    action: str  # rebuild | rebind | transition_state | noop
    slots: tuple[str, ...] = ()
    target: str = ""


@dataclass
class Page:
    nav_point: str
    url: str
    bound_slots: list[tuple[str, str, Any]]  # (name, kind, value) in signature order
    built_at_seq: int
    profile_view: int
    view: AccessView
    template: str


def binding_from_json(doc: dict) -> BindingSpec:
    kind = doc.get("bind")
    if kind == "source_query":
        return SourceQuery(source=doc["source"], pred=predicate_from_json(doc["pred"]))
    if kind == "source_join":
        return SourceJoin(
            left=doc["left"],
            right=doc["right"],
            key=doc["key"],
            projection=tuple(doc.get("projection", [])),
        )
    if kind == "frame_query":
        return FrameQuery(rel=doc.get("rel", "*"), subj=doc.get("subj", "*"), obj=doc.get("obj", "*"))
    if kind == "media_ref":
        return MediaRef(asset=doc["asset"])
    if kind == "content_ref":
        return ContentRef(key=doc["key"])
    if kind == "generated_url":
        return GeneratedUrl()
    raise ValueError(f"unknown binding kind {kind!r}")


def binding_to_json(spec: BindingSpec) -> dict:
    if isinstance(spec, SourceQuery):
        return {"bind": "source_query", "source": spec.source, "pred": spec.pred.to_json()}
    if isinstance(spec, SourceJoin):
        return {
            "bind": "source_join",
            "left": spec.left,
            "right": spec.right,
            "key": spec.key,
            "projection": list(spec.projection),
        }
    if isinstance(spec, FrameQuery):
        return {"bind": "frame_query", "rel": spec.rel, "subj": spec.subj, "obj": spec.obj}
    if isinstance(spec, MediaRef):
        return {"bind": "media_ref", "asset": spec.asset}
    if isinstance(spec, ContentRef):
        return {"bind": "content_ref", "key": spec.key}
    return {"bind": "generated_url"}


def url_for(nav_point: str) -> str:
    """Deterministic page URL: slash plus the slugified navigation point."""
    slug = "".join(c if c.isalnum() else "-" for c in nav_point.lower())
    return "/" + slug


class PortalEngine:
    """All stores plus the page cache, script machine and statistics."""

    def __init__(self) -> None:
        self.objects = ObjectStore()
        self.frames = FrameStore()
        self.access = AccessControl()
        self.hub = SourceHub()
        self.meta = MetaRegistry()
        self.gvalues: dict[str, GeneralizedValue] = {}
        self.template_types: dict[str, TemplateType] = {}
        self.templates: dict[str, Template] = {}
        self.navigation: dict[str, NavEntry] = {}
        self.script_events: list[str] = []
        self.scripts: list[Script] = []
        self.cache: dict[str, Page] = {}
        self.stats: dict[tuple[str, str], int] = {}
        self.last_seq = 0
        self.last_rebuilt: list[str] = []
        self.clock = 0.0
        self._schedules: list[dict] = []
        self._lock = threading.RLock()
        self.hub.subscribe(self.on_source_update)

    # -- registration ------------------------------------------------------------

    def add_template_type(self, ttype: TemplateType) -> None:
        for _, kind in ttype.slot_signature:
            if kind not in SLOT_KINDS:
                raise DanglingReference("templates", ttype.id, f"unknown slot kind {kind!r}")
        names = [n for n, _ in ttype.slot_signature]
        if len(names) != len(set(names)):
            raise DanglingReference("templates", ttype.id, "duplicate slot names")
        self.template_types[ttype.id] = ttype

    def validate_template(self, template: Template) -> None:
        """Check signature conformance and that binding targets resolve now."""
        ttype = self.template_types.get(template.type)
        if ttype is None:
            raise DanglingReference("templates", template.id, f"unknown type {template.type}")
        signature = [(s.name, s.kind) for s in template.slots]
        if signature != ttype.slot_signature:
            raise DanglingReference(
                "templates", template.id, f"slots do not conform to signature of {ttype.id}"
            )
        for slot in template.slots:
            self._validate_binding(template.id, slot)

    def _validate_binding(self, template_id: str, slot: Slot) -> None:
        spec = slot.binding
        if isinstance(spec, SourceQuery) and spec.source not in self.hub.descriptors:
            raise DanglingReference("templates", template_id, f"unknown source {spec.source}")
        if isinstance(spec, SourceJoin):
            for sid in (spec.left, spec.right):
                if sid not in self.hub.descriptors:
                    raise DanglingReference("templates", template_id, f"unknown source {sid}")
        if isinstance(spec, FrameQuery):
            if spec.rel != "*" and spec.rel not in self.frames.relations:
                raise DanglingReference("templates", template_id, f"unknown relation {spec.rel}")
            for c in (spec.subj, spec.obj):
                if c != "*" and c not in self.frames.constants:
                    raise DanglingReference("templates", template_id, f"unknown constant {c}")
        if isinstance(spec, MediaRef) and self.hub.media_asset(spec.asset) is None:
            raise DanglingReference("templates", template_id, f"unknown media asset {spec.asset}")
        if isinstance(spec, ContentRef) and self.hub.content_doc(spec.key) is None:
            raise DanglingReference("templates", template_id, f"unknown content key {spec.key}")

    def add_template(self, template: Template) -> None:
        self.validate_template(template)
        self.templates[template.id] = template

    def replace_template(self, template: Template) -> None:
        """Swap in an edited template and drop cached pages built from it."""
        self.validate_template(template)
        with self._lock:
            self.templates[template.id] = template
            self.meta.register(template.type, self.template_types[template.type], level=1)
            for nav in [n for n, p in self.cache.items() if p.template == template.id]:
                page = self.cache[nav]
                self.cache[nav] = self._build_page(nav, page.view)

    def add_navigation(self, entry: NavEntry) -> None:
        ttype = self.template_types.get(entry.type)
        if ttype is None:
            raise DanglingReference("navigation", entry.point, f"unknown type {entry.type}")
        template = self.templates.get(entry.template)
        if template is None:
            raise DanglingReference("navigation", entry.point, f"unknown template {entry.template}")
        if template.type != entry.type:
            raise DanglingReference(
                "navigation", entry.point, f"template {template.id} is not of type {entry.type}"
            )
        self.navigation[entry.point] = entry

    def add_script(self, script: Script) -> None:
        if script.event not in self.script_events:
            raise DanglingReference("scripts", script.event, "event not declared")
        self.scripts.append(script)

    # -- sessions ------------------------------------------------------------------

    def open_session(self, user_id: str) -> Session:
        return self.access.open_session(user_id, self.hub.source_ids())

    # -- step Asg1: navigation point to template -------------------------------------

    def resolve_template(self, nav_point: str) -> Template:
        """Map a navigation point through its template type to the template."""
        entry = self.navigation.get(nav_point)
        if entry is None:
            raise UnknownNavigationPoint(f"unknown navigation point {nav_point}")
        return self.templates[entry.template]

    # -- step Asg2: slot binding -------------------------------------------------------

    def _visible(self, slot: Slot, view: AccessView) -> bool:
        if slot.min_access == PUBLIC:
            return True
        return view.registered and view.rank >= int(slot.min_access)

    def _bind_value(self, nav_point: str, slot: Slot) -> Any:
        spec = slot.binding
        try:
            if isinstance(spec, SourceQuery):
                rows = self.hub.fetch_records(spec.source, spec.pred)
                return [{k: r.fields[k] for k in sorted(r.fields)} for r in rows]
            if isinstance(spec, SourceJoin):
                rows = self.hub.join_records(spec.left, spec.right, spec.key)
                if spec.projection:
                    return [{k: r.fields.get(k) for k in spec.projection} for r in rows]
                return [{k: r.fields[k] for k in sorted(r.fields)} for r in rows]
            if isinstance(spec, FrameQuery):
                frames = self.frames.query_frames(spec.rel, spec.subj, spec.obj)
                frames.sort(key=lambda f: (f.rel, f.subj, f.obj))
                return [{"rel": f.rel, "subj": f.subj, "obj": f.obj} for f in frames]
            if isinstance(spec, MediaRef):
                asset = self.hub.media_asset(spec.asset)
                if asset is None:
                    raise UnboundSlot(f"slot {slot.name}: media asset {spec.asset} is gone")
                value = {"id": asset.id, "category": asset.category, "uri": asset.uri}
                if asset.subcategory is not None:
                    value["subcategory"] = asset.subcategory
                return value
            if isinstance(spec, ContentRef):
                doc = self.hub.content_doc(spec.key)
                if doc is None:
                    raise UnboundSlot(f"slot {slot.name}: content key {spec.key} is gone")
                return doc
            return url_for(nav_point)
        except (UnknownRef, MissingKeyField) as exc:
            raise UnboundSlot(f"slot {slot.name}: {exc}") from None

    def _build_page(self, nav_point: str, view: AccessView) -> Page:
        template = self.resolve_template(nav_point)
        bound: list[tuple[str, str, Any]] = []
        for slot in template.slots:
            if not self._visible(slot, view):
                continue
            bound.append((slot.name, slot.kind, self._bind_value(nav_point, slot)))
        return Page(
            nav_point=nav_point,
            url=url_for(nav_point),
            bound_slots=bound,
            built_at_seq=self.last_seq,
            profile_view=view.rank,
            view=view,
            template=template.id,
        )

    def bind_slots(self, template: Template, session_id: str, nav_point: Optional[str] = None) -> Page:
        """Bind a template's slots for an open session and cache the page."""
        session = self.access.live_session(session_id)
        if nav_point is None:
            nav_point = next(
                (e.point for e in self.navigation.values() if e.template == template.id),
                template.id,
            )
        with self._lock:
            page = self._build_page(nav_point, session.view)
            self.cache[nav_point] = page
        return page

    def page_for(self, nav_point: str, session_id: str) -> Page:
        return self.bind_slots(self.resolve_template(nav_point), session_id, nav_point)

    # -- rendering ------------------------------------------------------------------

    def render_page(self, page: Page, fmt: str = "structured") -> str:
        """Serialize a page; the structured form is loss-free JSON."""
        if fmt == "structured":
            doc = {
                "nav_point": page.nav_point,
                "url": page.url,
                "slots": [
                    {"name": name, "kind": kind, "value": value}
                    for name, kind, value in page.bound_slots
                ],
                "built_at_seq": page.built_at_seq,
            }
            return json.dumps(doc, ensure_ascii=False, separators=(",", ":"))
        if fmt == "html":
            return self._render_html(page)
        raise ValueError(f"unknown render format {fmt!r}")

    def _render_html(self, page: Page) -> str:
        esc = html_escape.escape
        parts = [
            "<!doctype html>",
            "<html>",
            f'<head><meta charset="utf-8"><title>{esc(page.nav_point)}</title></head>',
            "<body>",
            f'<article data-nav="{esc(page.nav_point)}" data-url="{esc(page.url)}" '
            f'data-seq="{page.built_at_seq}">',
        ]
        for name, kind, value in page.bound_slots:
            parts.append(self._render_slot(name, kind, value))
        parts.extend(["</article>", "</body>", "</html>"])
        return "\n".join(parts)

    def _render_slot(self, name: str, kind: str, value: Any) -> str:
        esc = html_escape.escape
        attr = f'data-slot="{esc(name)}" data-kind="{kind}"'
        if kind == "grid":
            rows = value if isinstance(value, list) else []
            cols = list(rows[0].keys()) if rows else []
            head = "".join(f"<th>{esc(str(c))}</th>" for c in cols)
            body = "".join(
                "<tr>" + "".join(f"<td>{esc(str(r.get(c, '')))}</td>" for c in cols) + "</tr>"
                for r in rows
            )
            return f"<table {attr}><tr>{head}</tr>{body}</table>"
        if kind == "static_image":
            uri = value.get("uri", "") if isinstance(value, dict) else str(value)
            alt = value.get("id", name) if isinstance(value, dict) else name
            return f'<img {attr} src="{esc(str(uri))}" alt="{esc(str(alt))}"/>'
        if kind == "video_clip":
            uri = value.get("uri", "") if isinstance(value, dict) else str(value)
            return f'<video {attr} src="{esc(str(uri))}"></video>'
        if kind == "url_meta":
            return f'<a {attr} href="{esc(str(value))}">{esc(str(value))}</a>'
        text = value if isinstance(value, str) else json.dumps(value, ensure_ascii=False)
        tag = {"title": "h1", "header": "header", "footer": "footer"}.get(kind, "div")
        return f"<{tag} {attr}>{esc(text)}</{tag}>"

    # -- event scripts ------------------------------------------------------------------

    def handle_event(self, event: str, payload: Optional[dict] = None) -> "PortalEngine":
        """Fire all declared scripts matching ``event`` whose guard holds."""
        if event not in self.script_events:
            raise UnknownEvent(f"event {event!r} is not declared")
        payload = payload or {}
        namespace = {
            "event": event,
            "last_seq": self.last_seq,
            "cached_pages": len(self.cache),
            **payload,
        }
        with self._lock:
            for script in self.scripts:
                if script.event != event or not script.guard.holds(namespace):
                    continue
                self._run_action(script, payload)
        return self

    def _run_action(self, script: Script, payload: dict) -> None:
        if script.action == "noop":
            return
        if script.action == "transition_state":
            individual = payload.get("individual")
            if individual:
                self.objects.transition_state(str(individual), script.target)
            return
        nav = payload.get("nav_point")
        if script.action == "rebuild":
            targets = [str(nav)] if nav else list(self.cache)
            for point in targets:
                self.manual_refresh(point)
            return
        if script.action == "rebind" and nav and str(nav) in self.cache:
            old = self.cache[str(nav)]
            fresh = self._build_page(str(nav), old.view)
            fresh_by_name = {n: (n, k, v) for n, k, v in fresh.bound_slots}
            merged = [
                fresh_by_name.get(n, (n, k, v)) if n in script.slots else (n, k, v)
                for n, k, v in old.bound_slots
            ]
            # partial rebind keeps the old build stamp: other slots are unchanged
            self.cache[str(nav)] = Page(
                nav_point=old.nav_point,
                url=old.url,
                bound_slots=merged,
                built_at_seq=old.built_at_seq,
                profile_view=old.profile_view,
                view=old.view,
                template=old.template,
            )

    # -- update propagation ---------------------------------------------------------------

    def template_deps(self, template: Template) -> set[str]:
        """Source ids a template's bindings can reach."""
        deps: set[str] = set()
        for slot in template.slots:
            spec = slot.binding
            if isinstance(spec, SourceQuery):
                deps.add(spec.source)
            elif isinstance(spec, SourceJoin):
                deps.update((spec.left, spec.right))
            elif isinstance(spec, MediaRef):
                deps.update(self.hub.sources_of_kind("media"))
            elif isinstance(spec, ContentRef):
                deps.update(self.hub.sources_of_kind("content"))
        return deps

    def on_source_update(self, ev: UpdateEvent) -> list[str]:
        """Advance the sequence and rebuild the pages that depend on the source."""
        with self._lock:
            if ev.seq != self.last_seq + 1:
                raise OutOfOrderEvent(f"expected seq {self.last_seq + 1}, got {ev.seq}")
            self.last_seq = ev.seq
            rebuilt = []
            for nav, page in list(self.cache.items()):
                if ev.source in self.template_deps(self.templates[page.template]):
                    self.cache[nav] = self._build_page(nav, page.view)
                    rebuilt.append(nav)
            self.last_rebuilt = rebuilt
        return rebuilt

    # -- refresh -----------------------------------------------------------------------------

    def manual_refresh(self, nav_point: str) -> Page:
        """Rebuild a page right now, keeping its cached view if it has one."""
        if nav_point not in self.navigation:
            raise UnknownNavigationPoint(f"unknown navigation point {nav_point}")
        with self._lock:
            view = self.cache[nav_point].view if nav_point in self.cache else SYSTEM_VIEW
            page = self._build_page(nav_point, view)
            self.cache[nav_point] = page
        return page

    def schedule_refresh(self, nav_point: str, interval: float) -> None:
        if nav_point not in self.navigation:
            raise UnknownNavigationPoint(f"unknown navigation point {nav_point}")
        self._schedules.append(
            {"nav_point": nav_point, "interval": float(interval), "due": self.clock + float(interval)}
        )

    def advance_clock(self, dt: float) -> list[str]:
        """Move the simulated clock and fire every refresh that came due."""
        fired = []
        with self._lock:
            self.clock += dt
            for entry in self._schedules:
                while entry["due"] <= self.clock:
                    self.manual_refresh(entry["nav_point"])
                    fired.append(entry["nav_point"])
                    entry["due"] += entry["interval"]
        return fired

    # -- statistics -----------------------------------------------------------------------------

    def record_view(self, nav_point: str, session_id: str) -> None:
        if nav_point not in self.navigation:
            raise UnknownNavigationPoint(f"unknown navigation point {nav_point}")
        session = self.access.session(session_id)
        role = self.access.users[session.user].role
        with self._lock:
            self.stats[(nav_point, role)] = self.stats.get((nav_point, role), 0) + 1

    def stats_report(self) -> dict:
        """Counts per navigation point and role, plus totals."""
        rows = [
            {"nav_point": nav, "role": role, "views": count}
            for (nav, role), count in sorted(self.stats.items())
        ]
        by_nav: dict[str, int] = {}
        for (nav, _), count in self.stats.items():
            by_nav[nav] = by_nav.get(nav, 0) + count
        return {
            "rows": rows,
            "totals": {"by_nav_point": dict(sorted(by_nav.items())), "views": sum(self.stats.values())},
        }
