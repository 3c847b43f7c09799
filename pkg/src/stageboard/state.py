"""Project state and the event fold that advances it.

A project is a pure value: replaying the same event log always rebuilds
the same state. Every committed mutation bumps the revision by exactly
one, so the log revisions are gapless and optimistic concurrency can
compare a single integer. All ids and timestamps are fixed inside the
logged events themselves, never invented during replay.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import (
    EmptyDescription,
    EmptyText,
    ForbiddenRole,
    HandoffValidationFailed,
    NotAMember,
    UnknownBlock,
    UnknownEvaluation,
    UnknownPersona,
)
from .harms import HarmEvaluation, HarmRating, default_rubric, evaluations_sorted
from .personas import LlmExchange, Persona, PersonaReaction, PersonaSource
from .plan import PlanGraph, StageKind
from .prompts import PERSONA_GENERATION
from .workflow import (
    Action,
    Member,
    Phase,
    Role,
    check_authorized,
    transition_needs_validation,
    transition_roles,
)


@dataclass(frozen=True)
class ProjectState:
    project_id: str
    name: str
    phase: Phase = Phase.DRAFTING
    revision: int = 0
    scenario_ref: str | None = None
    symmetric_evaluation: bool = False
    members: tuple[Member, ...] = ()
    graph: PlanGraph = field(default_factory=PlanGraph)
    evaluations: tuple[HarmEvaluation, ...] = ()
    personas: tuple[Persona, ...] = ()
    reactions: tuple[PersonaReaction, ...] = ()
    exchanges: tuple[LlmExchange, ...] = ()

    def member_for(self, member_id: str) -> Member:
        for m in self.members:
            if m.member_id == member_id:
                return m
        raise NotAMember(f"{member_id!r} is not a member of this project")

    def evaluation(self, eval_id: str) -> HarmEvaluation:
        for e in self.evaluations:
            if e.eval_id == eval_id:
                return e
        raise UnknownEvaluation(f"no evaluation {eval_id!r}")

    def persona(self, persona_id: str) -> Persona:
        for p in self.personas:
            if p.persona_id == persona_id:
                return p
        raise UnknownPersona(f"no persona {persona_id!r}")

    def evaluations_sorted(self) -> list[HarmEvaluation]:
        return evaluations_sorted(self.evaluations)

    def evaluations_for_block(self, block_id: str) -> list[HarmEvaluation]:
        return [e for e in self.evaluations_sorted() if e.block_id == block_id]

    def evaluations_for_stage(self, stage: StageKind) -> list[HarmEvaluation]:
        block_ids = {b.block_id for b in self.graph.blocks if b.stage is stage}
        return [e for e in self.evaluations_sorted() if e.block_id in block_ids]

    def to_dict(self) -> dict:
        return {
            "project_id": self.project_id,
            "name": self.name,
            "phase": self.phase.value,
            "revision": self.revision,
            "scenario_ref": self.scenario_ref,
            "symmetric_evaluation": self.symmetric_evaluation,
            "members": [m.to_dict() for m in self.members],
            "graph": self.graph.to_dict(),
            "evaluations": [e.to_dict() for e in self.evaluations],
            "personas": [p.to_dict() for p in self.personas],
            "reactions": [r.to_dict() for r in self.reactions],
            "exchanges": [x.to_dict() for x in self.exchanges],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ProjectState":
        return cls(
            project_id=d["project_id"],
            name=d["name"],
            phase=Phase(d["phase"]),
            revision=int(d["revision"]),
            scenario_ref=d.get("scenario_ref"),
            symmetric_evaluation=bool(d.get("symmetric_evaluation", False)),
            members=tuple(Member.from_dict(m) for m in d.get("members", [])),
            graph=PlanGraph.from_dict(d.get("graph", {})),
            evaluations=tuple(HarmEvaluation.from_dict(e) for e in d.get("evaluations", [])),
            personas=tuple(Persona.from_dict(p) for p in d.get("personas", [])),
            reactions=tuple(PersonaReaction.from_dict(r) for r in d.get("reactions", [])),
            exchanges=tuple(LlmExchange.from_dict(x) for x in d.get("exchanges", [])),
        )


PLAN_EDIT_KINDS = frozenset(
    {"add_block", "link_blocks", "move_block", "set_description", "delete_block"}
)
EVALUATION_KINDS = frozenset({"create_evaluation", "update_evaluation", "delete_evaluation"})
PERSONA_KINDS = frozenset({"create_persona", "update_persona", "delete_persona"})


def prepare_event(event: dict, actor: str, clock, id_factory) -> dict:
    """Fill in ids, author, and timestamps so the logged event is self-contained."""
    prepared = dict(event)
    kind = prepared.get("kind")
    if kind == "add_block" and not prepared.get("block_id"):
        prepared["block_id"] = id_factory()
    if kind == "create_evaluation":
        prepared.setdefault("eval_id", id_factory())
        prepared["author"] = actor
        prepared.setdefault("created_at", clock())
    if kind == "create_persona":
        prepared.setdefault("persona_id", id_factory())
        prepared.setdefault("created_at", clock())
    return prepared


def apply_event(state: ProjectState, event: dict, actor: str) -> ProjectState:
    """Validate and apply one event, returning the next revision's state."""
    member = state.member_for(actor)
    kind = event["kind"]
    if kind in PLAN_EDIT_KINDS:
        new_state = _apply_plan_edit(state, event, member)
    elif kind in EVALUATION_KINDS:
        new_state = _apply_evaluation_edit(state, event, member)
    elif kind == "rate_evaluation":
        new_state = _apply_rating(state, event, member)
    elif kind in PERSONA_KINDS:
        new_state = _apply_persona_edit(state, event, member)
    elif kind == "record_personas":
        new_state = _apply_record_personas(state, event, member)
    elif kind == "record_exchange":
        new_state = _apply_record_exchange(state, event, member)
    elif kind == "record_reaction":
        new_state = _apply_record_reaction(state, event, member)
    elif kind == "transition_phase":
        new_state = _apply_transition(state, event, member)
    elif kind == "set_symmetric_evaluation":
        new_state = _apply_symmetric_flag(state, event, member)
    else:
        raise ValueError(f"unknown event kind {kind!r}")
    return replace(new_state, revision=state.revision + 1)


def _apply_plan_edit(state: ProjectState, event: dict, member: Member) -> ProjectState:
    check_authorized(member.role, Action.EDIT_PLAN, state.phase, state.symmetric_evaluation)
    kind = event["kind"]
    graph = state.graph
    if kind == "add_block":
        graph, _ = graph.add_block(
            StageKind(event["stage"]), tuple(event["position"]), block_id=event["block_id"]
        )
        return replace(state, graph=graph)
    if kind == "link_blocks":
        return replace(state, graph=graph.link_blocks(event["from_block"], event["to_block"]))
    if kind == "move_block":
        return replace(state, graph=graph.move_block(event["block_id"], tuple(event["position"])))
    if kind == "set_description":
        return replace(state, graph=graph.set_description(event["block_id"], event["text"]))
    if kind == "delete_block":
        block_id = event["block_id"]
        graph = graph.delete_block(block_id)
        evaluations = tuple(e for e in state.evaluations if e.block_id != block_id)
        return replace(state, graph=graph, evaluations=evaluations)
    raise AssertionError(kind)


def _apply_evaluation_edit(state: ProjectState, event: dict, member: Member) -> ProjectState:
    check_authorized(
        member.role, Action.CREATE_EVALUATION, state.phase, state.symmetric_evaluation
    )
    kind = event["kind"]
    if kind == "create_evaluation":
        text = event["text"]
        if not text.strip():
            raise EmptyText("evaluation text must not be blank")
        block_id = event["block_id"]
        if not state.graph.has_block(block_id):
            raise UnknownBlock(f"no block {block_id!r}")
        evaluation = HarmEvaluation(
            eval_id=event["eval_id"],
            block_id=block_id,
            author=event["author"],
            text=text,
            created_at=event["created_at"],
        )
        return replace(state, evaluations=state.evaluations + (evaluation,))
    if kind == "update_evaluation":
        text = event["text"]
        if not text.strip():
            raise EmptyText("evaluation text must not be blank")
        target = state.evaluation(event["eval_id"])
        evaluations = tuple(
            replace(e, text=text) if e is target else e for e in state.evaluations
        )
        return replace(state, evaluations=evaluations)
    if kind == "delete_evaluation":
        target = state.evaluation(event["eval_id"])
        evaluations = tuple(e for e in state.evaluations if e is not target)
        return replace(state, evaluations=evaluations)
    raise AssertionError(kind)


def _apply_rating(state: ProjectState, event: dict, member: Member) -> ProjectState:
    check_authorized(member.role, Action.RATE_EVALUATION, state.phase, state.symmetric_evaluation)
    target = state.evaluation(event["eval_id"])
    rating = HarmRating.from_dict(event)
    default_rubric().validate_rating(rating)
    evaluations = tuple(
        e.with_rating(rating) if e is target else e for e in state.evaluations
    )
    return replace(state, evaluations=evaluations)


def _apply_persona_edit(state: ProjectState, event: dict, member: Member) -> ProjectState:
    check_authorized(member.role, Action.CREATE_PERSONA, state.phase, state.symmetric_evaluation)
    kind = event["kind"]
    if kind == "create_persona":
        description = event["description"]
        if not description.strip():
            raise EmptyDescription("persona description must not be blank")
        persona = Persona(
            persona_id=event["persona_id"],
            description=description,
            source=PersonaSource(event.get("source", PersonaSource.MANUAL.value)),
            created_at=event["created_at"],
        )
        return replace(state, personas=state.personas + (persona,))
    if kind == "update_persona":
        description = event["description"]
        if not description.strip():
            raise EmptyDescription("persona description must not be blank")
        target = state.persona(event["persona_id"])
        # Editing a generated description makes the persona a hybrid.
        source = (
            PersonaSource.HYBRID if target.source is PersonaSource.GENERATED else target.source
        )
        personas = tuple(
            replace(p, description=description, source=source) if p is target else p
            for p in state.personas
        )
        return replace(state, personas=personas)
    if kind == "delete_persona":
        target = state.persona(event["persona_id"])
        personas = tuple(p for p in state.personas if p is not target)
        reactions = tuple(r for r in state.reactions if r.persona_id != target.persona_id)
        return replace(state, personas=personas, reactions=reactions)
    raise AssertionError(kind)


def _apply_record_personas(state: ProjectState, event: dict, member: Member) -> ProjectState:
    check_authorized(
        member.role, Action.GENERATE_PERSONAS, state.phase, state.symmetric_evaluation
    )
    exchange = LlmExchange.from_dict(event["exchange"])
    personas = tuple(Persona.from_dict(p) for p in event["personas"])
    for p in personas:
        if not p.description.strip():
            raise EmptyDescription("persona description must not be blank")
    return replace(
        state,
        personas=state.personas + personas,
        exchanges=state.exchanges + (exchange,),
    )


def _apply_record_exchange(state: ProjectState, event: dict, member: Member) -> ProjectState:
    exchange = LlmExchange.from_dict(event["exchange"])
    action = (
        Action.GENERATE_PERSONAS
        if exchange.template_id == PERSONA_GENERATION
        else Action.SIMULATE_REACTION
    )
    check_authorized(member.role, action, state.phase, state.symmetric_evaluation)
    return replace(state, exchanges=state.exchanges + (exchange,))


def _apply_record_reaction(state: ProjectState, event: dict, member: Member) -> ProjectState:
    check_authorized(member.role, Action.SIMULATE_REACTION, state.phase, state.symmetric_evaluation)
    exchange = LlmExchange.from_dict(event["exchange"])
    reaction = PersonaReaction.from_dict(event["reaction"])
    state.persona(reaction.persona_id)
    return replace(
        state,
        reactions=state.reactions + (reaction,),
        exchanges=state.exchanges + (exchange,),
    )


def _apply_transition(state: ProjectState, event: dict, member: Member) -> ProjectState:
    target = Phase(event["target"])
    roles = transition_roles(state.phase, target)
    if member.role not in roles:
        raise ForbiddenRole(
            f"moving from {state.phase.value} to {target.value} requires one of: "
            + ", ".join(sorted(r.value for r in roles))
        )
    if transition_needs_validation(state.phase, target):
        report = state.graph.validate_for_handoff()
        if not report.ok:
            raise HandoffValidationFailed(
                "the plan does not pass handoff validation", **report.to_dict()
            )
    return replace(state, phase=target)


def _apply_symmetric_flag(state: ProjectState, event: dict, member: Member) -> ProjectState:
    if member.role is not Role.TECHNICAL:
        raise ForbiddenRole("changing evaluation symmetry requires the Technical role")
    return replace(state, symmetric_evaluation=bool(event["enabled"]))
