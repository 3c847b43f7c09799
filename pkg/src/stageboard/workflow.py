"""Phases, roles, and the authorization matrix.

The collaboration alternates between plan editing and harm evaluation.
Which actions a member may take depends on both their role and the
project's current phase; phase fit is checked before role fit so error
codes stay stable.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import DomainError, ForbiddenRole, IllegalTransition, WrongPhase


class Phase(str, Enum):
    DRAFTING = "Drafting"
    EVALUATION = "Evaluation"
    REVISION = "Revision"
    FINALIZED = "Finalized"


class Role(str, Enum):
    TECHNICAL = "Technical"
    NON_TECHNICAL = "NonTechnical"


class Action(str, Enum):
    EDIT_PLAN = "EditPlan"
    CREATE_EVALUATION = "CreateEvaluation"
    RATE_EVALUATION = "RateEvaluation"
    CREATE_PERSONA = "CreatePersona"
    GENERATE_PERSONAS = "GeneratePersonas"
    SIMULATE_REACTION = "SimulateReaction"
    READ_SNAPSHOT = "ReadSnapshot"
    EXPORT_REPORT = "ExportReport"


@dataclass(frozen=True)
class Member:
    member_id: str
    display_name: str
    role: Role

    def to_dict(self) -> dict:
        return {
            "member_id": self.member_id,
            "display_name": self.display_name,
            "role": self.role.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Member":
        return cls(
            member_id=d["member_id"],
            display_name=d["display_name"],
            role=Role(d["role"]),
        )


# Transition -> roles that may trigger it.
PHASE_TRANSITIONS: dict[tuple[Phase, Phase], frozenset[Role]] = {
    (Phase.DRAFTING, Phase.EVALUATION): frozenset({Role.TECHNICAL}),
    (Phase.EVALUATION, Phase.REVISION): frozenset({Role.TECHNICAL, Role.NON_TECHNICAL}),
    (Phase.REVISION, Phase.EVALUATION): frozenset({Role.TECHNICAL}),
    (Phase.EVALUATION, Phase.FINALIZED): frozenset({Role.TECHNICAL}),
    (Phase.REVISION, Phase.FINALIZED): frozenset({Role.TECHNICAL}),
}

# Entering Evaluation requires the plan to pass handoff validation.
VALIDATED_TRANSITIONS: frozenset[tuple[Phase, Phase]] = frozenset(
    {
        (Phase.DRAFTING, Phase.EVALUATION),
        (Phase.REVISION, Phase.EVALUATION),
    }
)

READ_ACTIONS = frozenset({Action.READ_SNAPSHOT, Action.EXPORT_REPORT})
EVALUATION_ACTIONS = frozenset(
    {
        Action.CREATE_EVALUATION,
        Action.RATE_EVALUATION,
        Action.CREATE_PERSONA,
        Action.GENERATE_PERSONAS,
        Action.SIMULATE_REACTION,
    }
)
PLAN_EDIT_PHASES = frozenset({Phase.DRAFTING, Phase.REVISION})


def allowed_roles(action: Action, phase: Phase, symmetric_evaluation: bool = False) -> frozenset[Role]:
    """Roles permitted to perform action in phase; empty when the phase forbids it."""
    if action in READ_ACTIONS:
        return frozenset({Role.TECHNICAL, Role.NON_TECHNICAL})
    if action is Action.EDIT_PLAN:
        if phase in PLAN_EDIT_PHASES:
            return frozenset({Role.TECHNICAL})
        return frozenset()
    if action in EVALUATION_ACTIONS:
        if phase is Phase.EVALUATION:
            if symmetric_evaluation:
                return frozenset({Role.TECHNICAL, Role.NON_TECHNICAL})
            return frozenset({Role.NON_TECHNICAL})
        return frozenset()
    raise ValueError(f"unknown action {action!r}")


def authorize(
    role: Role, action: Action, phase: Phase, symmetric_evaluation: bool = False
) -> bool:
    return role in allowed_roles(action, phase, symmetric_evaluation)


def denial_error(
    role: Role, action: Action, phase: Phase, symmetric_evaluation: bool = False
) -> DomainError:
    """Why the action is denied. Phase fit is reported before role fit."""
    roles = allowed_roles(action, phase, symmetric_evaluation)
    if role in roles:
        raise ValueError(f"{action.value} is not denied for {role.value} in {phase.value}")
    if not roles:
        return WrongPhase(f"{action.value} is not available in the {phase.value} phase")
    return ForbiddenRole(f"{action.value} requires one of: " + ", ".join(sorted(r.value for r in roles)))


def check_authorized(
    role: Role, action: Action, phase: Phase, symmetric_evaluation: bool = False
) -> None:
    if not authorize(role, action, phase, symmetric_evaluation):
        raise denial_error(role, action, phase, symmetric_evaluation)


def transition_roles(current: Phase, target: Phase) -> frozenset[Role]:
    try:
        return PHASE_TRANSITIONS[(current, target)]
    except KeyError:
        raise IllegalTransition(
            f"no transition from {current.value} to {target.value}"
        )


def transition_needs_validation(current: Phase, target: Phase) -> bool:
    return (current, target) in VALIDATED_TRANSITIONS
