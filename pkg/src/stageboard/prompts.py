"""Prompt catalog: per-stage worksheet and checklist strings plus the two
persona-evaluation templates, loaded from the versioned data file.

Rendering is pure string substitution. Placeholder tokens are replaced in a
single pass, so braces occurring inside substituted user text are never
re-expanded.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import EmptyPlan
from .plan import STAGE_ORDER, StageKind
from .textrecords import parse_records

PERSONA_GENERATION = "PersonaGeneration"
REACTION_SIMULATION = "ReactionSimulation"

_GENERATION_PLACEHOLDERS = ("{problem descriptions}", "{personas}")
_REACTION_PLACEHOLDERS = ("{persona description}", "{plan}")

# Sentinel rendered under "Existing Personas:" when no personas exist yet,
# keeping the prompt well-formed for the model.
NO_PERSONAS_SENTINEL = "None"

PERSONA_JOINER = "\n\n"  # one blank line between persona paragraphs
PROBLEM_JOINER = "; "  # between problem-description fragments


@dataclass(frozen=True)
class StagePrompts:
    stage: StageKind
    worksheet: str
    checklist: str
    origin: str  # "canonical" | "supplemental"


@dataclass(frozen=True)
class PromptTemplate:
    template_id: str
    body: str


class PromptCatalog:
    def __init__(self, stages: dict[StageKind, StagePrompts], templates: dict[str, PromptTemplate]):
        missing = [s for s in StageKind if s not in stages]
        if missing:
            raise ValueError(f"catalog missing stages: {[s.value for s in missing]}")
        for tid in (PERSONA_GENERATION, REACTION_SIMULATION):
            if tid not in templates:
                raise ValueError(f"catalog missing template {tid!r}")
        self.stages = stages
        self.templates = templates

    @classmethod
    def from_text(cls, text: str, source: str = "<string>") -> "PromptCatalog":
        parsed = parse_records(text, source=source)
        stages: dict[StageKind, StagePrompts] = {}
        templates: dict[str, PromptTemplate] = {}
        for rec in parsed.records:
            if rec["record"] == "stage":
                stage = StageKind(rec["stage"])
                if stage in stages:
                    raise ValueError(f"duplicate catalog entry for stage {stage.value}")
                stages[stage] = StagePrompts(
                    stage=stage,
                    worksheet=rec["worksheet"],
                    checklist=rec["checklist"],
                    origin=rec["origin"],
                )
            elif rec["record"] == "template":
                templates[rec["template"]] = PromptTemplate(rec["template"], rec["body"])
        return cls(stages, templates)

    @classmethod
    def from_file(cls, path: str | Path) -> "PromptCatalog":
        p = Path(path)
        return cls.from_text(p.read_text(encoding="utf-8"), source=str(p))

    # -- lookups ---------------------------------------------------------

    def worksheet_prompt(self, stage: StageKind) -> str:
        return self.stages[StageKind(stage)].worksheet

    def checklist_prompt(self, stage: StageKind) -> str:
        return self.stages[StageKind(stage)].checklist

    def in_order(self) -> list[StagePrompts]:
        return [self.stages[stage] for stage in STAGE_ORDER]

    # -- rendering -------------------------------------------------------

    def render_persona_generation(
        self, problem_descriptions: str, existing_personas: list[str]
    ) -> str:
        personas = PERSONA_JOINER.join(existing_personas) if existing_personas else NO_PERSONAS_SENTINEL
        return _substitute(
            self.templates[PERSONA_GENERATION].body,
            {
                "{problem descriptions}": problem_descriptions,
                "{personas}": personas,
            },
        )

    def render_reaction(
        self, persona_description: str, plan: list[tuple[str, str]]
    ) -> str:
        if not plan:
            raise EmptyPlan("cannot render a reaction prompt for an empty plan")
        plan_text = "\n".join(f"{name}: {description}" for name, description in plan)
        return _substitute(
            self.templates[REACTION_SIMULATION].body,
            {
                "{persona description}": persona_description,
                "{plan}": plan_text,
            },
        )


def _substitute(template: str, mapping: dict[str, str]) -> str:
    pattern = "|".join(re.escape(token) for token in mapping)
    return re.sub(pattern, lambda m: mapping[m.group(0)], template)


def compose_problem_descriptions(problem_blocks: list[str], evaluation_texts: list[str]) -> str:
    """The {problem descriptions} slot: problem-formulation block text plus all
    harm-evaluation texts authored so far, in creation order."""
    return PROBLEM_JOINER.join([*problem_blocks, *evaluation_texts])


def default_catalog_path() -> Path:
    return Path(resources.files("stageboard") / "data" / "prompt_catalog.txt")


_default: PromptCatalog | None = None


def default_catalog() -> PromptCatalog:
    global _default
    if _default is None:
        _default = PromptCatalog.from_file(default_catalog_path())
    return _default
