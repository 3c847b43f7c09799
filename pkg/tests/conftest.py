"""Shared fixtures: deterministic stores, a scripted gateway, and helpers for
building the fixture projects through the real event path.
"""
import itertools
import json
import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path
from types import SimpleNamespace

import pytest
from fastapi.testclient import TestClient

from stageboard.llm import GatewayConfig, LlmGateway, MockProvider
from stageboard.personas import PersonaEngine
from stageboard.prompts import default_catalog
from stageboard.service.app import ServiceSettings, create_app
from stageboard.store import ProjectStore
from stageboard.workflow import Member, Role

sys.path.insert(0, str(Path(__file__).parent))

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_DIR = DATA_DIR / "golden"

ALICE = "m-alice"
BOB = "m-bob"

# Verdict lines queued by the acceptance suite; emitted after capture ends so
# they survive pytest's default fd-level capture.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_clock(start=datetime(2026, 1, 1, tzinfo=timezone.utc)):
    """Monotonic fake clock: each call is one millisecond after the last."""
    counter = itertools.count()

    def clock():
        t = start + timedelta(milliseconds=next(counter))
        return t.strftime("%Y-%m-%dT%H:%M:%S.") + f"{t.microsecond // 1000:03d}Z"

    return clock


def make_ids(prefix="id"):
    counter = itertools.count(1)
    return lambda: f"{prefix}{next(counter):06d}"


def standard_members():
    return [
        Member(ALICE, "Alice", Role.TECHNICAL),
        Member(BOB, "Bob", Role.NON_TECHNICAL),
    ]


def block_id_for(stage_key):
    return f"b-{stage_key}"


def commit_next(store, project_id, event, actor):
    """Commit against the current head revision."""
    state = store.get_state(project_id)
    return store.commit(project_id, state.revision, event, actor)


def draft_plan(store, project_id, fixture, actor=ALICE):
    """Add, describe, and link every stage block of a fixture plan."""
    for i, (stage_key, description) in enumerate(fixture["stages"]):
        commit_next(
            store,
            project_id,
            {
                "kind": "add_block",
                "stage": stage_key,
                "position": [140.0 * i, 80.0],
                "block_id": block_id_for(stage_key),
            },
            actor,
        )
        commit_next(
            store,
            project_id,
            {
                "kind": "set_description",
                "block_id": block_id_for(stage_key),
                "text": description,
            },
            actor,
        )
    for from_key, to_key in fixture["links"]:
        commit_next(
            store,
            project_id,
            {
                "kind": "link_blocks",
                "from_block": block_id_for(from_key),
                "to_block": block_id_for(to_key),
            },
            actor,
        )
    return store.get_state(project_id)


def build_fixture_project(store, fixture, *, scenario_ref=None, to_evaluation=True):
    """Create a project, draft the fixture plan, and (optionally) hand it off
    and add the fixture's evaluations and manual personas."""
    state = store.create_project(fixture["name"], standard_members(), scenario_ref=scenario_ref)
    project_id = state.project_id
    draft_plan(store, project_id, fixture)
    if not to_evaluation:
        return project_id
    commit_next(store, project_id, {"kind": "transition_phase", "target": "Evaluation"}, ALICE)
    for stage_key, text in fixture["evaluations"]:
        commit_next(
            store,
            project_id,
            {"kind": "create_evaluation", "block_id": block_id_for(stage_key), "text": text},
            BOB,
        )
    for description in fixture["personas"]:
        commit_next(
            store,
            project_id,
            {"kind": "create_persona", "description": description},
            BOB,
        )
    return project_id


def load_mock_script():
    return json.loads((DATA_DIR / "mock_script.json").read_text(encoding="utf-8"))


def make_gateway(script=None, **config_kwargs):
    script = script if script is not None else load_mock_script()
    config = GatewayConfig(provider="mock", **config_kwargs)
    return LlmGateway(config, provider=MockProvider(script), sleep=lambda seconds: None)


@pytest.fixture
def store(tmp_path):
    return ProjectStore(tmp_path / "store", clock=make_clock(), id_factory=make_ids())


@pytest.fixture
def gateway():
    return make_gateway()


@pytest.fixture
def engine(store, gateway):
    return PersonaEngine(store, gateway, default_catalog())


@pytest.fixture
def service(tmp_path):
    """A wired application with deterministic store and scripted gateway."""
    settings = ServiceSettings(data_dir=tmp_path / "svc", session_secret="test-secret")
    svc_store = ProjectStore(tmp_path / "svc", clock=make_clock(), id_factory=make_ids())
    svc_gateway = make_gateway()
    app = create_app(settings, store=svc_store, gateway=svc_gateway)
    client = TestClient(app, headers={"X-Protocol-Version": "1"})
    return SimpleNamespace(
        app=app, client=client, store=svc_store, gateway=svc_gateway, settings=settings
    )


def login(client, subject, display_name=""):
    """Returns Authorization headers for the given subject."""
    response = client.post(
        "/api/session/login", json={"subject": subject, "display_name": display_name}
    )
    assert response.status_code == 200, response.text
    return {"Authorization": f"Bearer {response.json()['token']}"}
