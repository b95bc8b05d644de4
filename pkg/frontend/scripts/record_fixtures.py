#!/usr/bin/env python3
"""Record real gateway responses into tests/fixtures/.

The frontend's contract tests assert that the console renders exactly
what the gateway returned, so the fixtures are captured from the actual
service rather than written by hand.  Re-run after any gateway change:

    python3 frontend/scripts/record_fixtures.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from portalkit.bundle import load_bundle
from portalkit.service import create_app

ROOT = Path(__file__).resolve().parents[2]
OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures"


def snap(name: str, response) -> dict:
    doc = {"status": response.status_code, "body": response.json()}
    (OUT / f"{name}.json").write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    return doc["body"]


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    engine = load_bundle(ROOT / "bundles" / "figure1.json")
    client = TestClient(create_app(engine))

    corporate = snap("session-u3", client.post("/api/sessions", json={"user": "u3"}))["session"]
    unregistered = snap("session-u2", client.post("/api/sessions", json={"user": "u2"}))["session"]
    manager = snap("session-manager1", client.post("/api/sessions", json={"user": "manager1"}))["session"]

    snap("page-press-room-corporate", client.get(f"/api/pages/press-room?session={corporate}"))
    snap("page-press-room-unregistered", client.get(f"/api/pages/press-room?session={unregistered}"))
    snap("page-about", client.get(f"/api/pages/about?session={corporate}"))
    snap("error-unknown-nav", client.get(f"/api/pages/lost?session={corporate}"))

    template = snap("template-press-release-main", client.get(f"/api/admin/templates/press-release-main?session={manager}"))
    snap("error-denied-template-get", client.get(f"/api/admin/templates/press-release-main?session={corporate}"))

    draft = json.loads(json.dumps(template))
    next(s for s in draft["slots"] if s["name"] == "title")["binding"] = {"bind": "content_ref", "key": "about-title"}
    snap("error-denied-put", client.put(f"/api/admin/templates/press-release-main?session={corporate}", json=draft))

    bad = json.loads(json.dumps(draft))
    next(s for s in bad["slots"] if s["name"] == "shareholders")["binding"]["right"] = "erp"
    snap("error-validation-put", client.put(f"/api/admin/templates/press-release-main?session={manager}", json=bad))

    snap("template-put-ok", client.put(f"/api/admin/templates/press-release-main?session={manager}", json=draft))
    snap("page-press-room-after-edit", client.get(f"/api/pages/press-room?session={corporate}"))

    snap(
        "event-post",
        client.post(
            f"/api/sources/fin/events?session={manager}",
            json={"key": 1, "change": {"op": "upsert", "fields": {"emp_id": 1, "shares": 8200}}},
        ),
    )
    snap("page-press-room-after-event", client.get(f"/api/pages/press-room?session={corporate}"))

    snap("stats", client.get(f"/api/stats?session={manager}"))
    print(f"recorded fixtures into {OUT}")


if __name__ == "__main__":
    main()
