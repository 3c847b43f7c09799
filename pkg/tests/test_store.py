import json

import pytest

from conftest import ALICE, BOB, build_fixture_project, commit_next, make_clock, make_ids, standard_members
from fixture_projects import MOVIE_REC
from stageboard.errors import (
    FixtureMissing,
    RevisionConflict,
    UnknownProject,
    UnknownRevision,
    ValidationFailed,
    innermost,
)
from stageboard.scenarios import load_scenarios, scenario_by_id
from stageboard.store import ProjectStore
from stageboard.workflow import Phase


def test_create_project_starts_at_revision_zero(store):
    state = store.create_project("Fresh", standard_members())
    assert state.revision == 0
    assert state.phase is Phase.DRAFTING
    assert store.get_state(state.project_id) == state


def test_unknown_project(store):
    with pytest.raises(UnknownProject):
        store.get_state("nope")


def test_commit_requires_matching_revision(store):
    state = store.create_project("P", standard_members())
    event = {"kind": "add_block", "stage": "Training", "position": [0, 0]}
    store.commit(state.project_id, 0, event, ALICE)
    with pytest.raises(RevisionConflict) as excinfo:
        store.commit(state.project_id, 0, event, ALICE)
    assert excinfo.value.detail == {"expected": 0, "actual": 1}


def test_rejected_event_is_not_logged(store):
    state = store.create_project("P", standard_members())
    pid = state.project_id
    event = {"kind": "add_block", "stage": "Training", "position": [0, 0]}
    with pytest.raises(ValidationFailed):
        store.commit(pid, 0, event, BOB)  # wrong role
    assert store.get_state(pid).revision == 0
    store.commit(pid, 0, event, ALICE)  # revision 1 still available


def test_validation_failure_wraps_domain_error(store):
    state = store.create_project("P", standard_members())
    bad = {"kind": "add_block", "stage": "Training", "position": [float("nan"), 0]}
    with pytest.raises(ValidationFailed) as excinfo:
        store.commit(state.project_id, 0, bad, ALICE)
    assert innermost(excinfo.value).code == "NonFinitePosition"


def test_log_is_gapless_and_self_describing(store):
    pid = build_fixture_project(store, MOVIE_REC)
    log_path = store.projects_dir / pid / "log.jsonl"
    lines = [json.loads(line) for line in log_path.read_text().splitlines()]
    header, records = lines[0], lines[1:]
    assert header["format"] == "project-log"
    assert header["project_id"] == pid
    assert [r["revision"] for r in records] == list(range(1, len(records) + 1))
    assert all(r["actor"] in (ALICE, BOB) for r in records)


def test_fresh_store_replays_to_identical_state(store, tmp_path):
    pid = build_fixture_project(store, MOVIE_REC)
    expected = store.get_state(pid)
    replayed = ProjectStore(store.data_dir).get_state(pid)
    assert replayed == expected


def test_snapshot_returns_each_historical_revision(store):
    state = store.create_project("P", standard_members())
    pid = state.project_id
    for i in range(3):
        commit_next(
            store,
            pid,
            {"kind": "add_block", "stage": "Training", "position": [float(i), 0]},
            ALICE,
        )
    assert store.snapshot(pid, 0).graph.blocks == ()
    assert len(store.snapshot(pid, 2).graph.blocks) == 2
    assert store.snapshot(pid).revision == 3
    with pytest.raises(UnknownRevision):
        store.snapshot(pid, 4)
    with pytest.raises(UnknownRevision):
        store.snapshot(pid, -1)


def test_interval_snapshots_are_written_and_used(tmp_path):
    store = ProjectStore(
        tmp_path / "s", clock=make_clock(), id_factory=make_ids(), snapshot_interval=5
    )
    pid = build_fixture_project(store, MOVIE_REC)
    snapshot_files = sorted((store.projects_dir / pid).glob("snapshot-*.json"))
    assert snapshot_files, "expected periodic snapshots on disk"
    head = store.get_state(pid)
    assert ProjectStore(tmp_path / "s", snapshot_interval=5).snapshot(pid, head.revision) == head


def test_import_preserves_revision_and_id(store, tmp_path):
    pid = build_fixture_project(store, MOVIE_REC)
    exported = store.get_state(pid)
    other = ProjectStore(tmp_path / "other", clock=make_clock(), id_factory=make_ids())
    imported = other.import_state(exported)
    assert imported == exported
    assert other.get_state(pid).revision == exported.revision


def test_import_into_same_store_gets_a_fresh_id(store):
    pid = build_fixture_project(store, MOVIE_REC)
    exported = store.get_state(pid)
    imported = store.import_state(exported)
    assert imported.project_id != pid
    assert imported.revision == exported.revision
    assert imported.graph == exported.graph


def test_imported_history_starts_at_the_imported_revision(store, tmp_path):
    pid = build_fixture_project(store, MOVIE_REC)
    exported = store.get_state(pid)
    other = ProjectStore(tmp_path / "other", clock=make_clock(), id_factory=make_ids())
    other.import_state(exported)
    with pytest.raises(UnknownRevision):
        other.snapshot(pid, exported.revision - 1)
    commit_next(other, pid, {"kind": "transition_phase", "target": "Revision"}, BOB)
    assert other.get_state(pid).revision == exported.revision + 1


def test_list_projects_is_stable(store):
    a = store.create_project("A", standard_members())
    b = store.create_project("B", standard_members())
    listed = store.list_projects()
    assert [s.project_id for s in listed] == [a.project_id, b.project_id]
    assert listed[0].name == "A"


def test_clock_and_ids_are_injected(store):
    state = store.create_project("P", standard_members())
    commit_next(
        store,
        state.project_id,
        {"kind": "add_block", "stage": "Training", "position": [0, 0]},
        ALICE,
    )
    block = store.get_state(state.project_id).graph.blocks[0]
    assert block.block_id.startswith("id")


def test_scenarios_ship_with_the_package():
    scenarios = load_scenarios()
    assert len(scenarios) == 5
    by_id = {s.scenario_id: s for s in scenarios}
    assert by_id["resume-screening"].name == "Resume Screening"
    assert "Law enforcement agencies" in by_id["gunshot-detection"].target_users


def test_scenario_lookup_errors():
    with pytest.raises(FixtureMissing):
        scenario_by_id("time-travel")
    with pytest.raises(FixtureMissing):
        load_scenarios("/nonexistent/path")


def test_scenario_round_trip_dict():
    scenario = scenario_by_id("resume-screening")
    d = scenario.to_dict()
    assert d["scenario_id"] == "resume-screening"
    assert set(d) == {"scenario_id"} | set(
        ("name", "background", "project_goal", "evaluation_metrics",
         "key_features", "requirements", "deployment", "target_users")
    )
