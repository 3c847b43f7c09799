"""Request and response shapes for the wire surface."""
from __future__ import annotations

from typing import Annotated, Literal, Union

from pydantic import BaseModel, Field

from ..harms import HarmType
from ..plan import StageKind
from ..workflow import Phase, Role


class LoginRequest(BaseModel):
    subject: str = Field(min_length=1)
    display_name: str = ""


class LoginResponse(BaseModel):
    token: str
    expires_at: int
    subject: str


class MemberIn(BaseModel):
    display_name: str = Field(min_length=1)
    role: Role
    member_id: str | None = None


class ProjectCreate(BaseModel):
    name: str = Field(min_length=1)
    members: list[MemberIn] = Field(min_length=1)
    scenario_ref: str | None = None


class AddBlockEvent(BaseModel):
    kind: Literal["add_block"] = "add_block"
    stage: StageKind
    position: tuple[float, float]
    block_id: str | None = None


class LinkBlocksEvent(BaseModel):
    kind: Literal["link_blocks"] = "link_blocks"
    from_block: str
    to_block: str


class MoveBlockEvent(BaseModel):
    kind: Literal["move_block"] = "move_block"
    block_id: str
    position: tuple[float, float]


class SetDescriptionEvent(BaseModel):
    kind: Literal["set_description"] = "set_description"
    block_id: str
    text: str


class DeleteBlockEvent(BaseModel):
    kind: Literal["delete_block"] = "delete_block"
    block_id: str


PlanEditEvent = Annotated[
    Union[AddBlockEvent, LinkBlocksEvent, MoveBlockEvent, SetDescriptionEvent, DeleteBlockEvent],
    Field(discriminator="kind"),
]


class CommitRequest(BaseModel):
    expected_revision: int = Field(ge=0)
    event: PlanEditEvent


class PhaseRequest(BaseModel):
    target: Phase
    expected_revision: int = Field(ge=0)


class SymmetricRequest(BaseModel):
    enabled: bool
    expected_revision: int = Field(ge=0)


class EvaluationCreate(BaseModel):
    block_id: str
    text: str
    expected_revision: int = Field(ge=0)


class EvaluationUpdate(BaseModel):
    text: str
    expected_revision: int = Field(ge=0)


class RatingRequest(BaseModel):
    severity: int
    likelihood: int
    harm_type: HarmType
    specific_harm: str
    expected_revision: int = Field(ge=0)


class PersonaCreate(BaseModel):
    description: str
    expected_revision: int = Field(ge=0)


class PersonaUpdate(BaseModel):
    description: str
    expected_revision: int = Field(ge=0)


class StateResponse(BaseModel):
    revision: int
    state: dict


class CommitResponse(BaseModel):
    revision: int
    state: dict


class EvaluationResponse(BaseModel):
    revision: int
    evaluation: dict


class RatingResponse(BaseModel):
    revision: int
    evaluation: dict
    advisory: dict


class PersonaResponse(BaseModel):
    revision: int
    persona: dict


class GenerateResponse(BaseModel):
    revision: int
    personas: list[dict]
    exchange_id: str
    warning: str | None


class ReactionResponse(BaseModel):
    revision: int
    reaction: dict


class ReactionListResponse(BaseModel):
    reactions: list[dict]


class ProjectListResponse(BaseModel):
    projects: list[dict]


class ScenarioListResponse(BaseModel):
    scenarios: list[dict]


class PromptListResponse(BaseModel):
    stages: list[dict]


class RubricResponse(BaseModel):
    rubric_version: str
    entries: list[dict]


class ImportResponse(BaseModel):
    revision: int
    state: dict
    meta: dict
