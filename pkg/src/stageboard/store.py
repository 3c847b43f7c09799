"""File-backed event store with optimistic concurrency.

Each project lives in its own directory as an append-only JSONL log: one
header line holding the base state, then one line per committed event.
Snapshots are written every few commits so historical revisions can be
rebuilt without replaying the whole log. Commits compare the caller's
expected revision against the current one under a per-project lock.
"""
from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

from .errors import (
    DomainError,
    RevisionConflict,
    UnknownProject,
    UnknownRevision,
    ValidationFailed,
)
from .state import ProjectState, apply_event, prepare_event
from .workflow import Member, Phase

LOG_FORMAT = "project-log"
SNAPSHOT_FORMAT = "project-snapshot"
FORMAT_VERSION = 1
DEFAULT_SNAPSHOT_INTERVAL = 20


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds").replace("+00:00", "Z")


def _new_id() -> str:
    return uuid.uuid4().hex


class StorageCorrupt(Exception):
    """A log or snapshot file on disk does not match its declared shape."""


@dataclass(frozen=True)
class ProjectSummary:
    project_id: str
    name: str
    phase: Phase
    revision: int
    scenario_ref: str | None
    created_at: str

    def to_dict(self) -> dict:
        return {
            "project_id": self.project_id,
            "name": self.name,
            "phase": self.phase.value,
            "revision": self.revision,
            "scenario_ref": self.scenario_ref,
            "created_at": self.created_at,
        }


class ProjectStore:
    def __init__(
        self,
        data_dir: str | Path,
        clock=_utc_now,
        id_factory=_new_id,
        snapshot_interval: int = DEFAULT_SNAPSHOT_INTERVAL,
    ):
        self.data_dir = Path(data_dir)
        self.projects_dir = self.data_dir / "projects"
        self.projects_dir.mkdir(parents=True, exist_ok=True)
        self.now = clock
        self.new_id = id_factory
        self.snapshot_interval = snapshot_interval
        self._states: dict[str, ProjectState] = {}
        self._created: dict[str, str] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self._load_existing()

    # -- paths -----------------------------------------------------------

    def _project_dir(self, project_id: str) -> Path:
        return self.projects_dir / project_id

    def _log_path(self, project_id: str) -> Path:
        return self._project_dir(project_id) / "log.jsonl"

    def _snapshot_path(self, project_id: str, revision: int) -> Path:
        return self._project_dir(project_id) / f"snapshot-{revision:08d}.json"

    def _lock_for(self, project_id: str) -> threading.Lock:
        with self._registry_lock:
            if project_id not in self._locks:
                self._locks[project_id] = threading.Lock()
            return self._locks[project_id]

    # -- loading ---------------------------------------------------------

    def _load_existing(self):
        for log_path in sorted(self.projects_dir.glob("*/log.jsonl")):
            project_id = log_path.parent.name
            state, created_at = self._replay(project_id)
            self._states[project_id] = state
            self._created[project_id] = created_at

    def _read_log(self, project_id: str) -> tuple[dict, list[dict]]:
        log_path = self._log_path(project_id)
        try:
            lines = log_path.read_text(encoding="utf-8").splitlines()
        except FileNotFoundError:
            raise UnknownProject(f"no project {project_id!r}")
        if not lines:
            raise StorageCorrupt(f"{log_path} is empty")
        header = json.loads(lines[0])
        if header.get("format") != LOG_FORMAT or header.get("format_version") != FORMAT_VERSION:
            raise StorageCorrupt(f"{log_path} has an unrecognized header")
        records = [json.loads(line) for line in lines[1:] if line.strip()]
        return header, records

    def _replay(self, project_id: str) -> tuple[ProjectState, str]:
        header, records = self._read_log(project_id)
        state = ProjectState.from_dict(header["base"])
        for record in records:
            state = apply_event(state, record["event"], record["actor"])
            if state.revision != record["revision"]:
                raise StorageCorrupt(
                    f"log for {project_id} is not gapless: replay reached revision "
                    f"{state.revision} but the record claims {record['revision']}"
                )
        return state, header["created_at"]

    # -- lifecycle -------------------------------------------------------

    def create_project(
        self,
        name: str,
        members: list[Member],
        scenario_ref: str | None = None,
        project_id: str | None = None,
    ) -> ProjectState:
        project_id = project_id or self.new_id()
        state = ProjectState(
            project_id=project_id,
            name=name,
            scenario_ref=scenario_ref,
            members=tuple(members),
        )
        self._write_base(state)
        return state

    def import_state(self, state: ProjectState) -> ProjectState:
        """Adopt an externally produced state as a new project.

        Revision and content are preserved so export/import round-trips are
        identity; the project id is preserved too unless it already exists
        here, in which case a fresh id is minted.
        """
        if self._project_dir(state.project_id).exists():
            state = replace(state, project_id=self.new_id())
        self._write_base(state)
        return state

    def _write_base(self, state: ProjectState):
        with self._lock_for(state.project_id):
            project_dir = self._project_dir(state.project_id)
            if project_dir.exists():
                raise ValueError(f"project directory {project_dir} already exists")
            project_dir.mkdir(parents=True)
            created_at = self.now()
            header = {
                "format": LOG_FORMAT,
                "format_version": FORMAT_VERSION,
                "project_id": state.project_id,
                "created_at": created_at,
                "base": state.to_dict(),
            }
            self._append_line(self._log_path(state.project_id), header)
            with self._registry_lock:
                self._states[state.project_id] = state
                self._created[state.project_id] = created_at

    # -- reads -----------------------------------------------------------

    def list_projects(self) -> list[ProjectSummary]:
        with self._registry_lock:
            items = [
                ProjectSummary(
                    project_id=s.project_id,
                    name=s.name,
                    phase=s.phase,
                    revision=s.revision,
                    scenario_ref=s.scenario_ref,
                    created_at=self._created[pid],
                )
                for pid, s in self._states.items()
            ]
        return sorted(items, key=lambda s: (s.created_at, s.project_id))

    def get_state(self, project_id: str) -> ProjectState:
        with self._registry_lock:
            state = self._states.get(project_id)
        if state is None:
            raise UnknownProject(f"no project {project_id!r}")
        return state

    def snapshot(self, project_id: str, revision: int | None = None) -> ProjectState:
        current = self.get_state(project_id)
        if revision is None or revision == current.revision:
            return current
        if revision < 0 or revision > current.revision:
            raise UnknownRevision(
                f"revision {revision} does not exist; the project is at {current.revision}"
            )
        return self._state_at(project_id, revision)

    def _state_at(self, project_id: str, revision: int) -> ProjectState:
        state = self._nearest_snapshot(project_id, revision)
        if state is not None and state.revision == revision:
            return state
        header, records = self._read_log(project_id)
        if state is None:
            state = ProjectState.from_dict(header["base"])
            if revision < state.revision:
                raise UnknownRevision(
                    f"revision {revision} predates this project's history, which "
                    f"starts at {state.revision}"
                )
        for record in records:
            if record["revision"] <= state.revision:
                continue
            if record["revision"] > revision:
                break
            state = apply_event(state, record["event"], record["actor"])
        if state.revision != revision:
            raise StorageCorrupt(
                f"could not rebuild revision {revision} of {project_id}"
            )
        return state

    def _nearest_snapshot(self, project_id: str, revision: int) -> ProjectState | None:
        best: tuple[int, Path] | None = None
        for path in self._project_dir(project_id).glob("snapshot-*.json"):
            try:
                rev = int(path.stem.split("-", 1)[1])
            except (IndexError, ValueError):
                continue
            if rev <= revision and (best is None or rev > best[0]):
                best = (rev, path)
        if best is None:
            return None
        body = json.loads(best[1].read_text(encoding="utf-8"))
        if body.get("format") != SNAPSHOT_FORMAT or body.get("format_version") != FORMAT_VERSION:
            raise StorageCorrupt(f"{best[1]} has an unrecognized header")
        return ProjectState.from_dict(body["state"])

    # -- writes ----------------------------------------------------------

    def commit(
        self, project_id: str, expected_revision: int, event: dict, actor: str
    ) -> ProjectState:
        """Apply one event if the project is still at expected_revision."""
        with self._lock_for(project_id):
            current = self.get_state(project_id)
            if expected_revision != current.revision:
                raise RevisionConflict(
                    f"expected revision {expected_revision} but the project is at "
                    f"{current.revision}",
                    expected=expected_revision,
                    actual=current.revision,
                )
            prepared = prepare_event(event, actor, self.now, self.new_id)
            try:
                new_state = apply_event(current, prepared, actor)
            except DomainError as exc:
                raise ValidationFailed(exc)
            record = {
                "revision": new_state.revision,
                "actor": actor,
                "committed_at": self.now(),
                "event": prepared,
            }
            self._append_line(self._log_path(project_id), record)
            with self._registry_lock:
                self._states[project_id] = new_state
            if self.snapshot_interval and new_state.revision % self.snapshot_interval == 0:
                self._write_snapshot(new_state)
            return new_state

    def _write_snapshot(self, state: ProjectState):
        path = self._snapshot_path(state.project_id, state.revision)
        body = {
            "format": SNAPSHOT_FORMAT,
            "format_version": FORMAT_VERSION,
            "state": state.to_dict(),
        }
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(body, sort_keys=True) + "\n", encoding="utf-8")
        os.replace(tmp, path)

    @staticmethod
    def _append_line(path: Path, payload: dict):
        line = json.dumps(payload, sort_keys=True)
        with open(path, "a", encoding="utf-8") as f:
            f.write(line + "\n")
            f.flush()
            os.fsync(f.fileno())
