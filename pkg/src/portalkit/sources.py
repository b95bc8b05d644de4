"""Heterogeneous source adapters and the ordered update-event stream.

Three source kinds are supported:

* ``table``   - CSV file, UTF-8, header row, comma separated; the key is
                the first header column unless ``key_field`` overrides.
* ``media``   - JSON manifest, an array of asset records with category
                (audio, video, image) and, for images only, a
                subcategory (photo, logo, catalogue).
* ``content`` - directory of UTF-8 text documents; the filename without
                extension is the key.

Sources load eagerly at registration and live in memory; afterwards the
only way their records change is through update events, so replaying
the event log onto the initial snapshot is the definition of the
current state.  Events carry a strictly increasing sequence number and
are delivered to subscribers in emission order.
"""

from __future__ import annotations

import csv
import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Union

from .errors import (
    DuplicateId,
    InvalidCategory,
    MissingKeyField,
    MissingSubcategory,
    UnknownRef,
    UnreadableLocation,
)
from .predicates import Atomic, Predicate

MEDIA_CATEGORIES = ("audio", "video", "image")
IMAGE_SUBCATEGORIES = ("photo", "logo", "catalogue")


@dataclass
class SourceDescriptor:
    id: str
    kind: str  # table | media | content
    location: str
    key_field: Optional[str] = None


@dataclass
class Record:
    source: str
    key: Atomic
    fields: dict[str, Atomic]

    def attr(self, name: str) -> Atomic:
        if name == "key":
            return self.key
        if name == "source":
            return self.source
        return self.fields.get(name)


@dataclass
class MediaAsset:
    id: str
    category: str
    uri: str
    subcategory: Optional[str] = None


@dataclass(frozen=True)
class Upsert:
    fields: tuple  # sorted (name, value) pairs; hashable form of the dict

    @staticmethod
    def of(fields: dict[str, Atomic]) -> "Upsert":
        return Upsert(tuple(sorted(fields.items())))

    def as_dict(self) -> dict[str, Atomic]:
        return dict(self.fields)


@dataclass(frozen=True)
class Delete:
    pass


Change = Union[Upsert, Delete]


@dataclass(frozen=True)
class UpdateEvent:
    seq: int
    source: str
    key: Atomic
    change: Change


def coerce_cell(text: str) -> Atomic:
    """CSV cells become typed atoms: int, float, bool, else text."""
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def categorize_media(asset: MediaAsset) -> tuple[str, Optional[str]]:
    """Validate and report an asset's category and, for images, subcategory."""
    if asset.category not in MEDIA_CATEGORIES:
        raise InvalidCategory(f"{asset.id}: invalid media category {asset.category!r}")
    if asset.category == "image":
        if asset.subcategory not in IMAGE_SUBCATEGORIES:
            raise MissingSubcategory(
                f"{asset.id}: image asset needs a subcategory from {IMAGE_SUBCATEGORIES}"
            )
        return asset.category, asset.subcategory
    if asset.subcategory is not None:
        raise InvalidCategory(f"{asset.id}: subcategory is only valid for images")
    return asset.category, None


class SourceHub:
    """Registry of sources, their in-memory records, and the event stream.

    Emission is serialized through one lock so sequence numbers are
    strictly increasing and subscribers observe events in order.
    """

    def __init__(self) -> None:
        self.descriptors: dict[str, SourceDescriptor] = {}
        self._records: dict[str, dict[Atomic, Record]] = {}
        self._key_fields: dict[str, str] = {}
        self.events: list[UpdateEvent] = []
        self._subscribers: list[Callable[[UpdateEvent], None]] = []
        self._seq = 0
        self._lock = threading.Lock()

    # -- registration -----------------------------------------------------------

    def register_source(self, desc: SourceDescriptor, base_dir: Optional[Path] = None) -> str:
        """Load a source eagerly and make it fetchable and event-addressable."""
        if desc.id in self.descriptors:
            raise DuplicateId(f"source {desc.id} already registered")
        if desc.kind not in ("table", "media", "content"):
            raise UnreadableLocation(f"{desc.id}: unknown source kind {desc.kind!r}")
        path = Path(desc.location)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        if not path.exists():
            raise UnreadableLocation(f"{desc.id}: cannot read {path}")
        loader = {
            "table": self._load_table,
            "media": self._load_media,
            "content": self._load_content,
        }[desc.kind]
        rows, key_field = loader(desc, path)
        self.descriptors[desc.id] = desc
        self._records[desc.id] = rows
        self._key_fields[desc.id] = key_field
        return desc.id

    def _load_table(self, desc: SourceDescriptor, path: Path) -> tuple[dict, str]:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise UnreadableLocation(f"{desc.id}: empty CSV {path}") from None
            key_field = desc.key_field or header[0]
            if key_field not in header:
                raise MissingKeyField(f"{desc.id}: key field {key_field!r} not in header")
            rows: dict[Atomic, Record] = {}
            for raw in reader:
                fields = {name: coerce_cell(cell) for name, cell in zip(header, raw)}
                key = fields[key_field]
                rows[key] = Record(source=desc.id, key=key, fields=fields)
        return rows, key_field

    def _load_media(self, desc: SourceDescriptor, path: Path) -> tuple[dict, str]:
        try:
            manifest = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise UnreadableLocation(f"{desc.id}: bad media manifest: {exc}") from None
        if not isinstance(manifest, list):
            raise UnreadableLocation(f"{desc.id}: media manifest must be a JSON array")
        rows: dict[Atomic, Record] = {}
        for entry in manifest:
            asset = MediaAsset(
                id=entry["id"],
                category=entry.get("category", ""),
                subcategory=entry.get("subcategory"),
                uri=entry.get("uri", ""),
            )
            categorize_media(asset)  # validates category/subcategory pairing
            fields: dict[str, Atomic] = {
                "id": asset.id,
                "category": asset.category,
                "uri": asset.uri,
            }
            if asset.subcategory is not None:
                fields["subcategory"] = asset.subcategory
            rows[asset.id] = Record(source=desc.id, key=asset.id, fields=fields)
        return rows, "id"

    def _load_content(self, desc: SourceDescriptor, path: Path) -> tuple[dict, str]:
        if not path.is_dir():
            raise UnreadableLocation(f"{desc.id}: content location {path} is not a directory")
        rows: dict[Atomic, Record] = {}
        for doc in sorted(path.iterdir()):
            if not doc.is_file():
                continue
            key = doc.stem
            rows[key] = Record(
                source=desc.id,
                key=key,
                fields={"key": key, "text": doc.read_text(encoding="utf-8")},
            )
        return rows, "key"

    # -- lookups ------------------------------------------------------------------

    def descriptor(self, source_id: str) -> SourceDescriptor:
        try:
            return self.descriptors[source_id]
        except KeyError:
            raise UnknownRef(f"unknown source {source_id}") from None

    def source_ids(self) -> set[str]:
        return set(self.descriptors)

    def sources_of_kind(self, kind: str) -> list[str]:
        return [sid for sid, d in self.descriptors.items() if d.kind == kind]

    def fetch_records(self, source_id: str, pred: Predicate) -> list[Record]:
        """Records of a source satisfying ``pred``, key-sorted for determinism."""
        self.descriptor(source_id)
        rows = self._records[source_id]
        return sorted(
            (r for r in rows.values() if pred.holds(r)),
            key=lambda r: str(r.key),
        )

    def join_records(self, left_id: str, right_id: str, key: str) -> list[Record]:
        """Equi-join two sources on a shared attribute.

        Joined fields are the union of both sides; on a name collision
        the right side's field is prefixed with its source id.  The
        joined record's key is the join attribute's value.
        """
        self.descriptor(left_id)
        self.descriptor(right_id)
        left_rows = list(self._records[left_id].values())
        right_rows = list(self._records[right_id].values())
        for sid, rows in ((left_id, left_rows), (right_id, right_rows)):
            for row in rows:
                if key not in row.fields:
                    raise MissingKeyField(f"{sid}: record {row.key!r} lacks field {key!r}")
        by_value: dict[Atomic, list[Record]] = {}
        for row in right_rows:
            by_value.setdefault(row.fields[key], []).append(row)
        joined: list[Record] = []
        for lrow in left_rows:
            for rrow in by_value.get(lrow.fields[key], []):
                fields = dict(lrow.fields)
                for name, value in rrow.fields.items():
                    if name in fields:
                        fields[f"{right_id}.{name}"] = value
                    else:
                        fields[name] = value
                joined.append(
                    Record(source=f"{left_id}+{right_id}", key=lrow.fields[key], fields=fields)
                )
        joined.sort(key=lambda r: str(r.key))
        return joined

    def media_asset(self, asset_id: str) -> Optional[MediaAsset]:
        """Find an asset by id across media sources, registration order."""
        for sid in self.sources_of_kind("media"):
            row = self._records[sid].get(asset_id)
            if row is not None:
                return MediaAsset(
                    id=asset_id,
                    category=str(row.fields.get("category", "")),
                    subcategory=row.fields.get("subcategory"),  # type: ignore[arg-type]
                    uri=str(row.fields.get("uri", "")),
                )
        return None

    def content_doc(self, key: str) -> Optional[str]:
        """Find a content document by key across content sources."""
        for sid in self.sources_of_kind("content"):
            row = self._records[sid].get(key)
            if row is not None:
                return str(row.fields.get("text", ""))
        return None

    # -- events ---------------------------------------------------------------------

    def subscribe(self, callback: Callable[[UpdateEvent], None]) -> None:
        self._subscribers.append(callback)

    def last_seq(self) -> int:
        return self._seq

    def emit_update(self, source_id: str, key: Atomic, change: Change) -> UpdateEvent:
        """Append an event, apply it, and notify subscribers in order.

        An upsert replaces the record's fields wholesale (the key field is
        filled in if absent); deleting an absent key is recorded but does
        not change state, so replays stay idempotent.
        """
        self.descriptor(source_id)
        with self._lock:
            self._seq += 1
            event = UpdateEvent(seq=self._seq, source=source_id, key=key, change=change)
            self.events.append(event)
            self._apply(event)
        for callback in self._subscribers:
            callback(event)
        return event

    def _apply(self, event: UpdateEvent) -> None:
        rows = self._records[event.source]
        if isinstance(event.change, Delete):
            rows.pop(event.key, None)
            return
        fields = event.change.as_dict()
        fields.setdefault(self._key_fields[event.source], event.key)
        rows[event.key] = Record(source=event.source, key=event.key, fields=fields)
