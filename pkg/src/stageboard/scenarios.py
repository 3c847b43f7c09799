"""Fixed problem scenarios that seed a collaboration session."""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import FixtureMissing
from .textrecords import parse_records_file

SCENARIO_FIELDS = (
    "name",
    "background",
    "project_goal",
    "evaluation_metrics",
    "key_features",
    "requirements",
    "deployment",
    "target_users",
)


@dataclass(frozen=True)
class Scenario:
    scenario_id: str
    name: str
    background: str
    project_goal: str
    evaluation_metrics: str
    key_features: str
    requirements: str
    deployment: str
    target_users: str

    def to_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            **{field: getattr(self, field) for field in SCENARIO_FIELDS},
        }


def default_scenarios_dir() -> Path:
    return Path(resources.files("stageboard") / "data" / "scenarios")


def load_scenarios(fixtures_dir: str | Path | None = None) -> list[Scenario]:
    """All scenario fixtures, in filename order so listings are stable."""
    directory = Path(fixtures_dir) if fixtures_dir else default_scenarios_dir()
    if not directory.is_dir():
        raise FixtureMissing(f"scenario directory {directory} does not exist")
    scenarios = []
    for path in sorted(directory.glob("*.txt")):
        parsed = parse_records_file(path)
        for record in parsed.records:
            scenarios.append(
                Scenario(
                    scenario_id=record["scenario_id"],
                    **{field: record[field] for field in SCENARIO_FIELDS},
                )
            )
    if not scenarios:
        raise FixtureMissing(f"no scenario fixtures found in {directory}")
    return scenarios


def scenario_by_id(scenario_id: str, fixtures_dir: str | Path | None = None) -> Scenario:
    for scenario in load_scenarios(fixtures_dir):
        if scenario.scenario_id == scenario_id:
            return scenario
    raise FixtureMissing(f"no scenario {scenario_id!r}")
