import json
import socket
import threading
import time

import pytest
import uvicorn

from portalkit.bundle import load_bundle
from portalkit.cli import main
from portalkit.service import create_app

from conftest import BUNDLE_PATH

BUNDLE = str(BUNDLE_PATH)


def test_load_prints_summary(capsys):
    assert main(["load", BUNDLE]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["sources"] == 5
    assert summary["navigation"] == 2


def test_load_missing_bundle_fails(capsys):
    assert main(["load", "/nonexistent/bundle.json"]) == 1
    assert "ParseError" in capsys.readouterr().err


def test_load_dangling_bundle_fails(tmp_path, capsys):
    doc = json.loads(BUNDLE_PATH.read_text(encoding="utf-8"))
    doc["users"][0]["role"] = "astronaut"
    for source in doc["sources"]:
        source["location"] = str(BUNDLE_PATH.parent / source["location"])
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc), encoding="utf-8")
    assert main(["load", str(bad)]) == 1
    assert "DanglingReference" in capsys.readouterr().err


def test_eval_in_process(capsys):
    assert main(["eval", "z({higraph})", "--bundle", BUNDLE]) == 0
    assert capsys.readouterr().out.strip() == "z_higraph"


def test_eval_validation_error(capsys):
    assert main(["eval", "w({higraph})", "--bundle", BUNDLE]) == 1
    assert main(["eval", "z({higraph}", "--bundle", BUNDLE]) == 1


def test_eval_requires_bundle_or_server():
    with pytest.raises(SystemExit) as exit_info:
        main(["eval", "z({higraph})"])
    assert exit_info.value.code == 2


def test_render_structured_matches_library(capsys):
    assert main(["render", "press-room", "--user", "u3", "--bundle", BUNDLE]) == 0
    out = capsys.readouterr().out.strip()
    engine = load_bundle(BUNDLE_PATH)
    session = engine.open_session("u3")
    page = engine.page_for("press-room", session.id)
    assert out == engine.render_page(page, "structured")


def test_render_html(capsys):
    assert main(["render", "press-room", "--user", "u3", "--format", "html", "--bundle", BUNDLE]) == 0
    assert 'data-slot="shareholders"' in capsys.readouterr().out


def test_render_unknown_user_fails(capsys):
    assert main(["render", "press-room", "--user", "ghost", "--bundle", BUNDLE]) == 1


def test_render_usage_error_missing_user():
    with pytest.raises(SystemExit) as exit_info:
        main(["render", "press-room", "--bundle", BUNDLE])
    assert exit_info.value.code == 2


def test_stats_in_process(capsys):
    assert main(["stats", "--bundle", BUNDLE]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["rows"] == []


@pytest.fixture(scope="module")
def live_server():
    engine = load_bundle(BUNDLE_PATH)
    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
    config = uvicorn.Config(create_app(engine), host="127.0.0.1", port=port, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.02)
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)


def test_render_against_live_server(live_server, capsys):
    assert main(["render", "press-room", "--user", "u3", "--server", live_server]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["nav_point"] == "press-room"
    assert any(s["name"] == "shareholders" for s in doc["slots"])


def test_eval_against_live_server(live_server, capsys):
    assert main(["eval", "F({higraph,mmedia})({corporate})", "--user", "u3", "--server", live_server]) == 0
    assert capsys.readouterr().out.strip() == "{u3}"


def test_stats_against_live_server(live_server, capsys):
    assert main(["stats", "--user", "admin1", "--server", live_server]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["totals"]["views"] >= 1  # the render test above viewed a page
