"""Personas, their reactions to the plan, and the engine that creates them.

Generated personas come back from the model as blank-line separated
paragraphs; each paragraph becomes one persona. Every model call is kept
as an exchange record alongside its parsed result so sessions can be
audited and replayed.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import TYPE_CHECKING

from .errors import (
    EmptyResponse,
    ParseMismatch,
    PlanIncomplete,
    RevisionConflict,
    UnknownPersona,
    ValidationFailed,
)
from .llm import LlmRequest
from .plan import StageKind
from .prompts import PERSONA_GENERATION, REACTION_SIMULATION, compose_problem_descriptions
from .workflow import Action, check_authorized

if TYPE_CHECKING:
    from .llm import LlmGateway
    from .prompts import PromptCatalog
    from .state import ProjectState
    from .store import ProjectStore

EXPECTED_PERSONA_COUNT = 3
COMMIT_RETRY_LIMIT = 5


class PersonaSource(str, Enum):
    MANUAL = "Manual"
    GENERATED = "Generated"
    HYBRID = "Hybrid"


@dataclass(frozen=True)
class Persona:
    persona_id: str
    description: str
    source: PersonaSource
    created_at: str
    exchange_id: str | None = None

    def to_dict(self) -> dict:
        return {
            "persona_id": self.persona_id,
            "description": self.description,
            "source": self.source.value,
            "created_at": self.created_at,
            "exchange_id": self.exchange_id,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Persona":
        return cls(
            persona_id=d["persona_id"],
            description=d["description"],
            source=PersonaSource(d["source"]),
            created_at=d["created_at"],
            exchange_id=d.get("exchange_id"),
        )


@dataclass(frozen=True)
class PersonaReaction:
    reaction_id: str
    persona_id: str
    plan_revision: int
    text: str
    created_at: str

    def to_dict(self) -> dict:
        return {
            "reaction_id": self.reaction_id,
            "persona_id": self.persona_id,
            "plan_revision": self.plan_revision,
            "text": self.text,
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PersonaReaction":
        return cls(
            reaction_id=d["reaction_id"],
            persona_id=d["persona_id"],
            plan_revision=int(d["plan_revision"]),
            text=d["text"],
            created_at=d["created_at"],
        )


@dataclass(frozen=True)
class LlmExchange:
    exchange_id: str
    template_id: str
    rendered_prompt: str
    raw_response: str
    model_tag: str
    created_at: str

    def to_dict(self) -> dict:
        return {
            "exchange_id": self.exchange_id,
            "template_id": self.template_id,
            "rendered_prompt": self.rendered_prompt,
            "raw_response": self.raw_response,
            "model_tag": self.model_tag,
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LlmExchange":
        return cls(
            exchange_id=d["exchange_id"],
            template_id=d["template_id"],
            rendered_prompt=d["rendered_prompt"],
            raw_response=d["raw_response"],
            model_tag=d["model_tag"],
            created_at=d["created_at"],
        )


def split_paragraphs(text: str) -> list[str]:
    """Maximal runs of non-blank lines, each stripped of outer whitespace."""
    paragraphs = []
    for chunk in re.split(r"\n\s*\n", text):
        cleaned = chunk.strip()
        if cleaned:
            paragraphs.append(cleaned)
    return paragraphs


def reactions_newest_first(reactions) -> list[PersonaReaction]:
    return sorted(reactions, key=lambda r: (r.created_at, r.reaction_id), reverse=True)


@dataclass(frozen=True)
class GenerationResult:
    personas: tuple[Persona, ...]
    exchange: LlmExchange
    warning: str | None


@dataclass(frozen=True)
class ReactionResult:
    reaction: PersonaReaction
    exchange: LlmExchange


class PersonaEngine:
    """Coordinates prompt rendering, model calls, and event commits."""

    def __init__(self, store: "ProjectStore", gateway: "LlmGateway", catalog: "PromptCatalog"):
        self.store = store
        self.gateway = gateway
        self.catalog = catalog

    def generate_personas(self, project_id: str, actor: str) -> GenerationResult:
        state = self.store.get_state(project_id)
        member = state.member_for(actor)
        check_authorized(
            member.role, Action.GENERATE_PERSONAS, state.phase, state.symmetric_evaluation
        )
        prompt = self._render_generation_prompt(state)
        exchange_id = self.store.new_id()
        response = self.gateway.complete(
            LlmRequest(prompt=prompt, idempotency_key=exchange_id)
        )
        exchange = LlmExchange(
            exchange_id=exchange_id,
            template_id=PERSONA_GENERATION,
            rendered_prompt=prompt,
            raw_response=response.text,
            model_tag=response.model_tag,
            created_at=self.store.now(),
        )
        descriptions = split_paragraphs(response.text)
        if not descriptions:
            self._commit_with_retry(
                project_id, {"kind": "record_exchange", "exchange": exchange.to_dict()}, actor
            )
            raise ParseMismatch(
                "model response contained no persona paragraphs", exchange_id=exchange_id
            )
        personas = tuple(
            Persona(
                persona_id=self.store.new_id(),
                description=description,
                source=PersonaSource.GENERATED,
                created_at=exchange.created_at,
                exchange_id=exchange_id,
            )
            for description in descriptions
        )
        self._commit_with_retry(
            project_id,
            {
                "kind": "record_personas",
                "exchange": exchange.to_dict(),
                "personas": [p.to_dict() for p in personas],
            },
            actor,
        )
        warning = None
        if len(personas) != EXPECTED_PERSONA_COUNT:
            warning = (
                f"expected {EXPECTED_PERSONA_COUNT} personas but the response parsed "
                f"into {len(personas)}"
            )
        return GenerationResult(personas=personas, exchange=exchange, warning=warning)

    def simulate_reaction(self, project_id: str, persona_id: str, actor: str) -> ReactionResult:
        state = self.store.get_state(project_id)
        member = state.member_for(actor)
        check_authorized(
            member.role, Action.SIMULATE_REACTION, state.phase, state.symmetric_evaluation
        )
        persona = state.persona(persona_id)
        report = state.graph.validate_for_handoff()
        if not report.ok:
            raise PlanIncomplete(
                "the plan must pass handoff validation before reactions can be simulated",
                **report.to_dict(),
            )
        plan_revision = state.revision
        prompt = self.catalog.render_reaction(
            persona.description, state.graph.serialize_stages()
        )
        exchange_id = self.store.new_id()
        response = self.gateway.complete(
            LlmRequest(prompt=prompt, idempotency_key=exchange_id)
        )
        exchange = LlmExchange(
            exchange_id=exchange_id,
            template_id=REACTION_SIMULATION,
            rendered_prompt=prompt,
            raw_response=response.text,
            model_tag=response.model_tag,
            created_at=self.store.now(),
        )
        text = response.text.strip()
        if not text:
            self._commit_with_retry(
                project_id, {"kind": "record_exchange", "exchange": exchange.to_dict()}, actor
            )
            raise EmptyResponse("model returned an empty reaction", exchange_id=exchange_id)
        reaction = PersonaReaction(
            reaction_id=self.store.new_id(),
            persona_id=persona_id,
            plan_revision=plan_revision,
            text=text,
            created_at=exchange.created_at,
        )
        self._commit_with_retry(
            project_id,
            {
                "kind": "record_reaction",
                "exchange": exchange.to_dict(),
                "reaction": reaction.to_dict(),
            },
            actor,
        )
        return ReactionResult(reaction=reaction, exchange=exchange)

    def _render_generation_prompt(self, state: "ProjectState") -> str:
        problem_texts = [
            block.description.strip()
            for block in sorted(state.graph.blocks, key=lambda b: b.seq)
            if block.stage is StageKind.PROBLEM_FORMULATION and block.description.strip()
        ]
        evaluation_texts = [e.text.strip() for e in state.evaluations_sorted() if e.text.strip()]
        existing = [p.description for p in state.personas]
        return self.catalog.render_persona_generation(
            compose_problem_descriptions(problem_texts, evaluation_texts), existing
        )

    def _commit_with_retry(self, project_id: str, event: dict, actor: str):
        """Model output is kept across revision conflicts; only the commit retries."""
        last: Exception | None = None
        for _ in range(COMMIT_RETRY_LIMIT):
            current = self.store.get_state(project_id)
            try:
                return self.store.commit(project_id, current.revision, event, actor)
            except RevisionConflict as exc:
                last = exc
                continue
            except ValidationFailed:
                raise
        assert last is not None
        raise last
