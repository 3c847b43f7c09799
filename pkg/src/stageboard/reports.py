"""Project report export and import.

The structured form is a deterministic JSON document that round-trips the
full project state; the readable form is a plain-text digest ordered by
the serialized plan. Exporters take the export timestamp as an argument
so identical states always produce identical bytes.
"""
from __future__ import annotations

import json
from typing import TYPE_CHECKING

from .errors import UnsupportedFormat
from .harms import HarmEvaluation, Rubric
from .personas import reactions_newest_first
from .plan import STAGE_ORDER
from .state import ProjectState

if TYPE_CHECKING:
    from .prompts import PromptCatalog
    from .scenarios import Scenario

REPORT_FORMAT = "project-report"
REPORT_VERSION = 1

SCENARIO_LABELS = (
    ("background", "Background"),
    ("project_goal", "Project Goal"),
    ("evaluation_metrics", "Evaluation Metrics"),
    ("key_features", "Key Features"),
    ("requirements", "Requirements"),
    ("deployment", "Deployment"),
    ("target_users", "Target Users"),
)


def export_structured(state: ProjectState, rubric_version: str, exported_at: str) -> str:
    body = {
        "format": REPORT_FORMAT,
        "format_version": REPORT_VERSION,
        "exported_at": exported_at,
        "rubric_version": rubric_version,
        "project": state.to_dict(),
    }
    return json.dumps(body, sort_keys=True, indent=2) + "\n"


def parse_structured(text: str) -> tuple[ProjectState, dict]:
    try:
        body = json.loads(text)
    except ValueError:
        raise UnsupportedFormat("report is not valid JSON")
    if not isinstance(body, dict) or body.get("format") != REPORT_FORMAT:
        raise UnsupportedFormat("report is not a project report document")
    if body.get("format_version") != REPORT_VERSION:
        raise UnsupportedFormat(
            f"unsupported report version {body.get('format_version')!r}"
        )
    state = ProjectState.from_dict(body["project"])
    meta = {
        "exported_at": body.get("exported_at"),
        "rubric_version": body.get("rubric_version"),
    }
    return state, meta


def _rating_line(evaluation: HarmEvaluation, rubric: Rubric) -> list[str]:
    rating = evaluation.rating
    if rating is None:
        return ["    Rating: not yet rated"]
    advisory = rubric.check_against_rubric(rating)
    lines = [
        "    Rating: severity {s}/4, likelihood {l}/4 ({t}: {h})".format(
            s=rating.severity,
            l=rating.likelihood,
            t=rating.harm_type.display_name,
            h=rating.specific_harm,
        )
    ]
    for warning in advisory.warnings:
        lines.append(f"    Note: {warning}")
    return lines


def export_readable(
    state: ProjectState,
    catalog: "PromptCatalog",
    rubric: Rubric,
    scenario: "Scenario | None",
    exported_at: str,
) -> str:
    names = {m.member_id: m.display_name for m in state.members}
    lines: list[str] = []
    lines.append(f"PROJECT REPORT: {state.name}")
    lines.append(
        f"Phase: {state.phase.value} | Revision: {state.revision} | Exported: {exported_at}"
    )
    lines.append(f"Rubric version: {rubric.version}")
    lines.append("")

    if scenario is not None:
        lines.append(f"SCENARIO: {scenario.name}")
        for field_name, label in SCENARIO_LABELS:
            lines.append(f"  {label}: {getattr(scenario, field_name)}")
        lines.append("")

    lines.append("PLAN")
    lines.append("----")
    stages = state.graph.serialize_stages()
    kind_by_display = {kind.display_name: kind for kind in STAGE_ORDER}
    if stages:
        for index, (display_name, description) in enumerate(stages, start=1):
            lines.append(f"{index}. {display_name}: {description}")
            lines.append(
                f"   Prompt: {catalog.worksheet_prompt(kind_by_display[display_name])}"
            )
    else:
        lines.append("(no blocks yet)")
    lines.append("")

    lines.append("HARM EVALUATIONS")
    lines.append("----------------")
    any_evaluations = False
    for stage in STAGE_ORDER:
        stage_evaluations = state.evaluations_for_stage(stage)
        if not stage_evaluations:
            continue
        any_evaluations = True
        lines.append(stage.display_name)
        lines.append(f"  Checklist: {catalog.checklist_prompt(stage)}")
        for evaluation in stage_evaluations:
            author = names.get(evaluation.author, evaluation.author)
            lines.append(f"  - [{author}] {evaluation.text}")
            lines.extend(_rating_line(evaluation, rubric))
        lines.append("")
    if not any_evaluations:
        lines.append("(none)")
        lines.append("")

    lines.append("PERSONAS")
    lines.append("--------")
    if state.personas:
        for persona in state.personas:
            lines.append(f"- ({persona.source.value}) {persona.description}")
            reactions = reactions_newest_first(
                r for r in state.reactions if r.persona_id == persona.persona_id
            )
            if reactions:
                latest = reactions[0]
                lines.append(
                    f"  Latest reaction (plan revision {latest.plan_revision}, "
                    f"{latest.created_at}):"
                )
                for text_line in latest.text.splitlines():
                    lines.append(f"    {text_line}")
    else:
        lines.append("(none)")
    lines.append("")

    lines.append("MEMBERS")
    lines.append("-------")
    for member in state.members:
        lines.append(f"- {member.display_name} ({member.role.value})")
    lines.append("")
    return "\n".join(lines)
