import random

import pytest

from portalkit.errors import UnknownRef
from portalkit.semnet import Constant, Frame, FrameStore


def store_with(*triples) -> FrameStore:
    store = FrameStore()
    for rel, subj, obj in triples:
        store.declare_relation(rel)
        store.declare_constant(Constant(subj, subj))
        store.declare_constant(Constant(obj, obj))
        store.assert_frame(rel, subj, obj)
    return store


def test_assert_and_idempotence():
    store = store_with(("worksFor", "ivanov", "northgate"))
    before = store.frames()
    store.assert_frame("worksFor", "ivanov", "northgate")
    assert store.frames() == before
    assert len(store) == 1


def test_assert_unknown_ids():
    store = store_with(("worksFor", "ivanov", "northgate"))
    with pytest.raises(UnknownRef):
        store.assert_frame("ownedBy", "ivanov", "northgate")
    with pytest.raises(UnknownRef):
        store.assert_frame("worksFor", "ghost", "northgate")


def test_retract_present_and_absent():
    store = store_with(("worksFor", "ivanov", "northgate"))
    frame = Frame("worksFor", "ivanov", "northgate")
    assert store.retract_frame(frame) is True
    assert len(store) == 0
    assert store.retract_frame(frame) is False


def test_query_patterns():
    store = store_with(
        ("worksFor", "ivanov", "northgate"),
        ("worksFor", "petrov", "northgate"),
        ("authored", "ivanov", "press-release-1"),
    )
    hits = store.query_frames("worksFor", None, "northgate")
    assert {f.subj for f in hits} == {"ivanov", "petrov"}
    assert len(store.query_frames("*", "*", "*")) == 3
    assert store.query_frames("authored", "petrov", None) == []


def test_query_rejects_unknown_nonwildcard():
    store = store_with(("worksFor", "ivanov", "northgate"))
    with pytest.raises(UnknownRef):
        store.query_frames("basedIn", None, None)


def test_eval_frame_membership():
    store = store_with(("worksFor", "ivanov", "northgate"))
    assert store.eval_frame(Frame("worksFor", "ivanov", "northgate")) is True
    assert store.eval_frame(Frame("worksFor", "northgate", "ivanov")) is False


def test_eval_agrees_with_exact_query():
    store = store_with(
        ("worksFor", "ivanov", "northgate"),
        ("authored", "ivanov", "press-release-1"),
    )
    for frame in store.frames():
        assert store.eval_frame(frame)
        assert store.query_frames(frame.rel, frame.subj, frame.obj) == [frame]


def test_characteristic_mapping_consistency():
    # the per-relation characteristic function and frame evaluation are one mechanism
    store = store_with(
        ("worksFor", "ivanov", "northgate"),
        ("worksFor", "petrov", "northgate"),
    )
    graph = store.characteristic("worksFor")
    for frame in store.frames():
        assert graph.get((frame.subj, frame.obj), False) == store.eval_frame(frame)
    assert graph.get(("northgate", "ivanov"), False) is False


def test_monotone_under_assertion():
    store = store_with(("worksFor", "ivanov", "northgate"))
    store.declare_constant(Constant("petrov", "petrov"))
    before = set(store.query_frames("worksFor", None, None))
    store.assert_frame("worksFor", "petrov", "northgate")
    after = set(store.query_frames("worksFor", None, None))
    assert before <= after


def test_store_equals_deduplicated_log(rng):
    rels = [f"r{i}" for i in range(4)]
    consts = [f"c{i}" for i in range(12)]
    store = FrameStore()
    for r in rels:
        store.declare_relation(r)
    for c in consts:
        store.declare_constant(Constant(c, c))
    log = []
    for _ in range(500):
        triple = (rng.choice(rels), rng.choice(consts), rng.choice(consts))
        store.assert_frame(*triple)
        log.append(triple)
    deduped = list(dict.fromkeys(log))
    assert [(f.rel, f.subj, f.obj) for f in store.frames()] == deduped


def test_set_replay_oracle(rng):
    rels = ["r0", "r1"]
    consts = [f"c{i}" for i in range(6)]
    store = FrameStore()
    for r in rels:
        store.declare_relation(r)
    for c in consts:
        store.declare_constant(Constant(c, c))
    shadow: set[Frame] = set()
    for _ in range(1000):
        frame = Frame(rng.choice(rels), rng.choice(consts), rng.choice(consts))
        if rng.random() < 0.6:
            store.assert_frame(frame.rel, frame.subj, frame.obj)
            shadow.add(frame)
        else:
            present = store.retract_frame(frame)
            assert present == (frame in shadow)
            shadow.discard(frame)
    assert set(store.frames()) == shadow


def test_query_equals_linear_scan(rng):
    rels = [f"r{i}" for i in range(3)]
    consts = [f"c{i}" for i in range(10)]
    store = FrameStore()
    for r in rels:
        store.declare_relation(r)
    for c in consts:
        store.declare_constant(Constant(c, c))
    for _ in range(800):
        store.assert_frame(rng.choice(rels), rng.choice(consts), rng.choice(consts))
    everything = store.frames()
    for _ in range(100):
        pattern = (
            rng.choice(rels + ["*"]),
            rng.choice(consts + ["*"]),
            rng.choice(consts + ["*"]),
        )
        got = store.query_frames(*pattern)
        want = [
            f
            for f in everything
            if (pattern[0] == "*" or f.rel == pattern[0])
            and (pattern[1] == "*" or f.subj == pattern[1])
            and (pattern[2] == "*" or f.obj == pattern[2])
        ]
        assert got == want
