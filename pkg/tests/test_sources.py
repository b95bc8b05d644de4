import json
import random

import pytest

from portalkit import predicates as P
from portalkit.errors import (
    DuplicateId,
    InvalidCategory,
    MissingKeyField,
    MissingSubcategory,
    UnknownRef,
    UnreadableLocation,
)
from portalkit.sources import (
    Delete,
    MediaAsset,
    SourceDescriptor,
    SourceHub,
    Upsert,
    categorize_media,
    coerce_cell,
)

HR_CSV = 'emp_id,name\n1,"A. Ivanov"\n2,"B. Petrov"\n'
FIN_CSV = "emp_id,shares\n1,4000\n2,1000\n"
MEDIA = [
    {"id": "president-portrait", "category": "image", "subcategory": "photo", "uri": "assets/president.png"},
    {"id": "welcome-speech", "category": "audio", "uri": "assets/welcome.mp3"},
]


@pytest.fixture
def hub(tmp_path) -> SourceHub:
    (tmp_path / "hr.csv").write_text(HR_CSV, encoding="utf-8")
    (tmp_path / "fin.csv").write_text(FIN_CSV, encoding="utf-8")
    (tmp_path / "media.json").write_text(json.dumps(MEDIA), encoding="utf-8")
    docs = tmp_path / "docs"
    docs.mkdir()
    (docs / "press-release-1.txt").write_text("Quarterly results are out.", encoding="utf-8")
    (docs / "about.txt").write_text("A diversified energy group.", encoding="utf-8")
    hub = SourceHub()
    hub.register_source(SourceDescriptor("hr", "table", str(tmp_path / "hr.csv"), "emp_id"))
    hub.register_source(SourceDescriptor("fin", "table", str(tmp_path / "fin.csv")))
    hub.register_source(SourceDescriptor("media", "media", str(tmp_path / "media.json")))
    hub.register_source(SourceDescriptor("content", "content", str(docs)))
    return hub


def test_cell_coercion():
    assert coerce_cell("4000") == 4000
    assert coerce_cell("3.5") == 3.5
    assert coerce_cell("true") is True
    assert coerce_cell("A. Ivanov") == "A. Ivanov"


def test_register_and_fetch_all(hub):
    rows = hub.fetch_records("hr", P.Always())
    assert [(r.key, r.fields["name"]) for r in rows] == [(1, "A. Ivanov"), (2, "B. Petrov")]


def test_register_duplicate_id(hub, tmp_path):
    with pytest.raises(DuplicateId):
        hub.register_source(SourceDescriptor("hr", "table", str(tmp_path / "hr.csv")))


def test_register_unreadable_location(tmp_path):
    hub = SourceHub()
    with pytest.raises(UnreadableLocation):
        hub.register_source(SourceDescriptor("gone", "table", str(tmp_path / "missing.csv")))


def test_all_registered_sources_fetchable(hub):
    for sid in ("hr", "fin", "media", "content"):
        assert hub.fetch_records(sid, P.Always())


def test_fetch_with_predicate(hub):
    rows = hub.fetch_records("hr", P.Eq("emp_id", 2))
    assert [r.key for r in rows] == [2]


def test_fetch_unknown_source(hub):
    with pytest.raises(UnknownRef):
        hub.fetch_records("erp", P.Always())


def test_join_hr_fin_nested_loop_oracle(hub):
    joined = hub.join_records("hr", "fin", "emp_id")
    left = hub.fetch_records("hr", P.Always())
    right = hub.fetch_records("fin", P.Always())
    expected = []
    for lrow in left:
        for rrow in right:
            if lrow.fields["emp_id"] == rrow.fields["emp_id"]:
                fields = dict(lrow.fields)
                for name, value in rrow.fields.items():
                    fields[f"fin.{name}" if name in fields else name] = value
                expected.append(fields)
    assert [r.fields for r in joined] == sorted(expected, key=lambda f: str(f["emp_id"]))
    assert [(r.fields["name"], r.fields["shares"]) for r in joined] == [
        ("A. Ivanov", 4000),
        ("B. Petrov", 1000),
    ]


def test_join_with_empty_right(hub, tmp_path):
    (tmp_path / "empty.csv").write_text("emp_id,bonus\n", encoding="utf-8")
    hub.register_source(SourceDescriptor("bonus", "table", str(tmp_path / "empty.csv")))
    assert hub.join_records("hr", "bonus", "emp_id") == []


def test_self_join_is_identity_per_record(hub):
    joined = hub.join_records("hr", "hr", "emp_id")
    assert len(joined) == len(hub.fetch_records("hr", P.Always()))
    assert all(r.fields["name"] == r.fields["hr.name"] for r in joined)


def test_join_missing_key_field(hub):
    with pytest.raises(MissingKeyField):
        hub.join_records("hr", "fin", "salary")


def test_categorize_media_variants():
    assert categorize_media(MediaAsset("p", "image", "x.png", "photo")) == ("image", "photo")
    assert categorize_media(MediaAsset("a", "audio", "x.mp3")) == ("audio", None)
    with pytest.raises(MissingSubcategory):
        categorize_media(MediaAsset("p", "image", "x.png"))
    with pytest.raises(InvalidCategory):
        categorize_media(MediaAsset("p", "hologram", "x"))
    with pytest.raises(InvalidCategory):
        categorize_media(MediaAsset("a", "audio", "x.mp3", "photo"))


def test_media_manifest_validation(tmp_path):
    bad = [{"id": "x", "category": "image", "uri": "x.png"}]
    (tmp_path / "bad.json").write_text(json.dumps(bad), encoding="utf-8")
    hub = SourceHub()
    with pytest.raises(MissingSubcategory):
        hub.register_source(SourceDescriptor("m", "media", str(tmp_path / "bad.json")))


def test_media_asset_lookup(hub):
    asset = hub.media_asset("president-portrait")
    assert (asset.category, asset.subcategory) == ("image", "photo")
    assert hub.media_asset("nothing") is None


def test_content_doc_lookup(hub):
    assert hub.content_doc("press-release-1") == "Quarterly results are out."
    assert hub.content_doc("missing") is None


def test_emit_updates_increment_seq(hub):
    e1 = hub.emit_update("fin", 1, Upsert.of({"emp_id": 1, "shares": 5000}))
    e2 = hub.emit_update("fin", 2, Delete())
    assert (e1.seq, e2.seq) == (1, 2)
    rows = hub.fetch_records("fin", P.Always())
    assert [(r.key, r.fields["shares"]) for r in rows] == [(1, 5000)]


def test_delete_absent_key_is_recorded_noop(hub):
    before = [r.fields for r in hub.fetch_records("fin", P.Always())]
    event = hub.emit_update("fin", 99, Delete())
    assert event.seq == 1
    assert [r.fields for r in hub.fetch_records("fin", P.Always())] == before


def test_emit_unknown_source(hub):
    with pytest.raises(UnknownRef):
        hub.emit_update("erp", 1, Delete())


def test_subscribers_see_events_in_emission_order(hub, rng):
    seen = []
    hub.subscribe(lambda ev: seen.append(ev.seq))
    for i in range(1000):
        key = rng.randint(1, 20)
        if rng.random() < 0.7:
            hub.emit_update("fin", key, Upsert.of({"emp_id": key, "shares": rng.randint(0, 9999)}))
        else:
            hub.emit_update("fin", key, Delete())
    assert seen == list(range(1, 1001))


def test_event_replay_oracle(hub, rng):
    initial = {r.key: dict(r.fields) for r in hub.fetch_records("fin", P.Always())}
    log = []
    for _ in range(400):
        key = rng.randint(1, 12)
        if rng.random() < 0.65:
            change = Upsert.of({"emp_id": key, "shares": rng.randint(0, 9999)})
        else:
            change = Delete()
        hub.emit_update("fin", key, change)
        log.append((key, change))
    replay = dict(initial)
    for key, change in log:
        if isinstance(change, Delete):
            replay.pop(key, None)
        else:
            fields = change.as_dict()
            fields.setdefault("emp_id", key)
            replay[key] = fields
    got = {r.key: dict(r.fields) for r in hub.fetch_records("fin", P.Always())}
    assert got == replay
