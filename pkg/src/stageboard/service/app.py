"""HTTP wire surface.

Every route lives under /api; domain errors cross the boundary as
{"error": <code>, "message": ..., "detail": {...}} with a status chosen
per code. Commit-level wrappers are unwrapped so clients always see the
innermost error code. A built web client, when present, is served from
the same process.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import Body, Depends, FastAPI, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from ..errors import (
    DomainError,
    FixtureMissing,
    ForbiddenRole,
    LlmUnavailable,
    NotAMember,
    ProviderRejected,
    RevisionConflict,
    Timeout,
    Unauthenticated,
    UnknownBlock,
    UnknownEvaluation,
    UnknownPersona,
    UnknownProject,
    UnknownRevision,
    UnknownSpecificHarm,
    UnsupportedFormat,
    UnsupportedProtocolVersion,
    innermost,
)
from ..harms import Rubric, default_rubric
from ..llm import GatewayConfig, LlmGateway
from ..personas import PersonaEngine, reactions_newest_first
from ..plan import StageKind
from ..prompts import PromptCatalog, default_catalog
from ..reports import export_readable, export_structured, parse_structured
from ..scenarios import load_scenarios, scenario_by_id
from ..store import ProjectStore
from ..workflow import Member
from . import schemas
from .auth import DEFAULT_TOKEN_TTL, issue_token, resolve_secret, verify_token

PROTOCOL_VERSION = "1"

STATUS_BY_CODE = {
    Unauthenticated.__name__: 401,
    ForbiddenRole.__name__: 403,
    NotAMember.__name__: 403,
    UnknownProject.__name__: 404,
    UnknownRevision.__name__: 404,
    UnknownBlock.__name__: 404,
    UnknownEvaluation.__name__: 404,
    UnknownPersona.__name__: 404,
    UnknownSpecificHarm.__name__: 404,
    FixtureMissing.__name__: 404,
    RevisionConflict.__name__: 409,
    UnsupportedProtocolVersion.__name__: 400,
    UnsupportedFormat.__name__: 400,
    ProviderRejected.__name__: 502,
    LlmUnavailable.__name__: 503,
    Timeout.__name__: 504,
}
DEFAULT_ERROR_STATUS = 422


@dataclass
class ServiceSettings:
    data_dir: str | Path = "./stageboard-data"
    fixtures_dir: str | Path | None = None
    llm: GatewayConfig = field(default_factory=GatewayConfig)
    session_secret: str | None = None
    token_ttl_seconds: int = DEFAULT_TOKEN_TTL
    static_dir: str | Path | None = None
    snapshot_interval: int = 20


def error_response(err: DomainError) -> JSONResponse:
    root = innermost(err)
    status = STATUS_BY_CODE.get(root.code, DEFAULT_ERROR_STATUS)
    return JSONResponse(
        status_code=status,
        content={"error": root.code, "message": root.message, "detail": root.detail},
    )


def create_app(
    settings: ServiceSettings | None = None,
    store: ProjectStore | None = None,
    gateway: LlmGateway | None = None,
    catalog: PromptCatalog | None = None,
    rubric: Rubric | None = None,
) -> FastAPI:
    settings = settings or ServiceSettings()
    store = store or ProjectStore(settings.data_dir, snapshot_interval=settings.snapshot_interval)
    gateway = gateway or LlmGateway(settings.llm)
    catalog = catalog or default_catalog()
    rubric = rubric or default_rubric()
    engine = PersonaEngine(store, gateway, catalog)
    secret = resolve_secret(settings.session_secret)

    app = FastAPI(title="stageboard", docs_url=None, redoc_url=None, openapi_url=None)

    @app.exception_handler(DomainError)
    async def handle_domain_error(request: Request, exc: DomainError):
        return error_response(exc)

    @app.middleware("http")
    async def check_protocol_version(request: Request, call_next):
        if request.url.path.startswith("/api"):
            version = request.headers.get("x-protocol-version")
            if version is not None and version != PROTOCOL_VERSION:
                return error_response(
                    UnsupportedProtocolVersion(
                        f"protocol version {version!r} is not supported",
                        supported=[PROTOCOL_VERSION],
                    )
                )
        response = await call_next(request)
        response.headers["X-Protocol-Version"] = PROTOCOL_VERSION
        return response

    def subject_of(request: Request) -> str:
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            raise Unauthenticated("missing bearer token")
        payload = verify_token(secret, header[7:].strip())
        return payload["sub"]

    def member_state(project_id: str, subject: str):
        state = store.get_state(project_id)
        state.member_for(subject)
        return state

    # -- session and fixtures -------------------------------------------

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok", "protocol_version": PROTOCOL_VERSION}

    @app.post("/api/session/login", response_model=schemas.LoginResponse)
    def login(body: schemas.LoginRequest):
        token, expires = issue_token(
            secret, body.subject, body.display_name, settings.token_ttl_seconds
        )
        return schemas.LoginResponse(token=token, expires_at=expires, subject=body.subject)

    @app.get("/api/scenarios", response_model=schemas.ScenarioListResponse)
    def list_scenarios():
        scenarios = load_scenarios(settings.fixtures_dir)
        return schemas.ScenarioListResponse(scenarios=[s.to_dict() for s in scenarios])

    @app.get("/api/scenarios/{scenario_id}")
    def get_scenario(scenario_id: str) -> dict:
        return scenario_by_id(scenario_id, settings.fixtures_dir).to_dict()

    @app.get("/api/prompts", response_model=schemas.PromptListResponse)
    def list_prompts():
        stages = [
            {
                "stage": sp.stage.value,
                "display_name": sp.stage.display_name,
                "worksheet": sp.worksheet,
                "checklist": sp.checklist,
                "origin": sp.origin,
            }
            for sp in catalog.in_order()
        ]
        return schemas.PromptListResponse(stages=stages)

    @app.get("/api/prompts/{stage}")
    def get_prompt(stage: StageKind) -> dict:
        sp = catalog.stages[stage]
        return {
            "stage": sp.stage.value,
            "display_name": sp.stage.display_name,
            "worksheet": sp.worksheet,
            "checklist": sp.checklist,
            "origin": sp.origin,
        }

    @app.get("/api/prompt-templates/{template_id}")
    def get_template(template_id: str) -> dict:
        template = catalog.templates.get(template_id)
        if template is None:
            raise FixtureMissing(f"no prompt template {template_id!r}")
        return {"template_id": template.template_id, "body": template.body}

    @app.get("/api/rubric", response_model=schemas.RubricResponse)
    def get_rubric():
        return schemas.RubricResponse(
            rubric_version=rubric.version, entries=[e.to_dict() for e in rubric.entries]
        )

    # -- projects --------------------------------------------------------

    @app.post("/api/projects", response_model=schemas.StateResponse)
    def create_project(body: schemas.ProjectCreate, subject: str = Depends(subject_of)):
        members = [
            Member(
                member_id=m.member_id or store.new_id(),
                display_name=m.display_name,
                role=m.role,
            )
            for m in body.members
        ]
        state = store.create_project(body.name, members, scenario_ref=body.scenario_ref)
        return schemas.StateResponse(revision=state.revision, state=state.to_dict())

    @app.get("/api/projects", response_model=schemas.ProjectListResponse)
    def list_projects(subject: str = Depends(subject_of)):
        mine = []
        for summary in store.list_projects():
            state = store.get_state(summary.project_id)
            if any(m.member_id == subject for m in state.members):
                mine.append(summary.to_dict())
        return schemas.ProjectListResponse(projects=mine)

    @app.get("/api/projects/{project_id}/snapshot", response_model=schemas.StateResponse)
    def snapshot(
        project_id: str, revision: int | None = None, subject: str = Depends(subject_of)
    ):
        member_state(project_id, subject)
        state = store.snapshot(project_id, revision)
        return schemas.StateResponse(revision=state.revision, state=state.to_dict())

    @app.post("/api/projects/{project_id}/commit", response_model=schemas.CommitResponse)
    def commit(project_id: str, body: schemas.CommitRequest, subject: str = Depends(subject_of)):
        event = body.event.model_dump(mode="json")
        state = store.commit(project_id, body.expected_revision, event, subject)
        return schemas.CommitResponse(revision=state.revision, state=state.to_dict())

    @app.post("/api/projects/{project_id}/phase", response_model=schemas.CommitResponse)
    def transition_phase(
        project_id: str, body: schemas.PhaseRequest, subject: str = Depends(subject_of)
    ):
        event = {"kind": "transition_phase", "target": body.target.value}
        state = store.commit(project_id, body.expected_revision, event, subject)
        return schemas.CommitResponse(revision=state.revision, state=state.to_dict())

    @app.post("/api/projects/{project_id}/settings/symmetric", response_model=schemas.CommitResponse)
    def set_symmetric(
        project_id: str, body: schemas.SymmetricRequest, subject: str = Depends(subject_of)
    ):
        event = {"kind": "set_symmetric_evaluation", "enabled": body.enabled}
        state = store.commit(project_id, body.expected_revision, event, subject)
        return schemas.CommitResponse(revision=state.revision, state=state.to_dict())

    @app.post("/api/projects/import", response_model=schemas.ImportResponse)
    def import_project(body: dict = Body(...), subject: str = Depends(subject_of)):
        state, meta = parse_structured(json.dumps(body))
        adopted = store.import_state(state)
        return schemas.ImportResponse(revision=adopted.revision, state=adopted.to_dict(), meta=meta)

    # -- evaluations -----------------------------------------------------

    @app.post(
        "/api/projects/{project_id}/evaluations", response_model=schemas.EvaluationResponse
    )
    def create_evaluation(
        project_id: str, body: schemas.EvaluationCreate, subject: str = Depends(subject_of)
    ):
        event = {"kind": "create_evaluation", "block_id": body.block_id, "text": body.text}
        state = store.commit(project_id, body.expected_revision, event, subject)
        created = state.evaluations[-1]
        return schemas.EvaluationResponse(revision=state.revision, evaluation=created.to_dict())

    @app.put(
        "/api/projects/{project_id}/evaluations/{eval_id}",
        response_model=schemas.EvaluationResponse,
    )
    def update_evaluation(
        project_id: str,
        eval_id: str,
        body: schemas.EvaluationUpdate,
        subject: str = Depends(subject_of),
    ):
        event = {"kind": "update_evaluation", "eval_id": eval_id, "text": body.text}
        state = store.commit(project_id, body.expected_revision, event, subject)
        return schemas.EvaluationResponse(
            revision=state.revision, evaluation=state.evaluation(eval_id).to_dict()
        )

    @app.delete("/api/projects/{project_id}/evaluations/{eval_id}")
    def delete_evaluation(
        project_id: str,
        eval_id: str,
        expected_revision: int,
        subject: str = Depends(subject_of),
    ) -> dict:
        event = {"kind": "delete_evaluation", "eval_id": eval_id}
        state = store.commit(project_id, expected_revision, event, subject)
        return {"revision": state.revision}

    @app.put(
        "/api/projects/{project_id}/evaluations/{eval_id}/rating",
        response_model=schemas.RatingResponse,
    )
    def rate_evaluation(
        project_id: str,
        eval_id: str,
        body: schemas.RatingRequest,
        subject: str = Depends(subject_of),
    ):
        event = {
            "kind": "rate_evaluation",
            "eval_id": eval_id,
            "severity": body.severity,
            "likelihood": body.likelihood,
            "harm_type": body.harm_type.value,
            "specific_harm": body.specific_harm,
        }
        state = store.commit(project_id, body.expected_revision, event, subject)
        evaluation = state.evaluation(eval_id)
        advisory = rubric.check_against_rubric(evaluation.rating)
        return schemas.RatingResponse(
            revision=state.revision,
            evaluation=evaluation.to_dict(),
            advisory=advisory.to_dict(),
        )

    # -- personas and reactions -----------------------------------------

    @app.post("/api/projects/{project_id}/personas", response_model=schemas.PersonaResponse)
    def create_persona(
        project_id: str, body: schemas.PersonaCreate, subject: str = Depends(subject_of)
    ):
        event = {"kind": "create_persona", "description": body.description}
        state = store.commit(project_id, body.expected_revision, event, subject)
        created = state.personas[-1]
        return schemas.PersonaResponse(revision=state.revision, persona=created.to_dict())

    @app.put(
        "/api/projects/{project_id}/personas/{persona_id}",
        response_model=schemas.PersonaResponse,
    )
    def update_persona(
        project_id: str,
        persona_id: str,
        body: schemas.PersonaUpdate,
        subject: str = Depends(subject_of),
    ):
        event = {
            "kind": "update_persona",
            "persona_id": persona_id,
            "description": body.description,
        }
        state = store.commit(project_id, body.expected_revision, event, subject)
        return schemas.PersonaResponse(
            revision=state.revision, persona=state.persona(persona_id).to_dict()
        )

    @app.delete("/api/projects/{project_id}/personas/{persona_id}")
    def delete_persona(
        project_id: str,
        persona_id: str,
        expected_revision: int,
        subject: str = Depends(subject_of),
    ) -> dict:
        event = {"kind": "delete_persona", "persona_id": persona_id}
        state = store.commit(project_id, expected_revision, event, subject)
        return {"revision": state.revision}

    @app.post(
        "/api/projects/{project_id}/personas/generate", response_model=schemas.GenerateResponse
    )
    def generate_personas(project_id: str, subject: str = Depends(subject_of)):
        result = engine.generate_personas(project_id, subject)
        state = store.get_state(project_id)
        return schemas.GenerateResponse(
            revision=state.revision,
            personas=[p.to_dict() for p in result.personas],
            exchange_id=result.exchange.exchange_id,
            warning=result.warning,
        )

    @app.post(
        "/api/projects/{project_id}/personas/{persona_id}/reactions",
        response_model=schemas.ReactionResponse,
    )
    def simulate_reaction(
        project_id: str, persona_id: str, subject: str = Depends(subject_of)
    ):
        result = engine.simulate_reaction(project_id, persona_id, subject)
        state = store.get_state(project_id)
        return schemas.ReactionResponse(
            revision=state.revision, reaction=result.reaction.to_dict()
        )

    @app.get(
        "/api/projects/{project_id}/personas/{persona_id}/reactions",
        response_model=schemas.ReactionListResponse,
    )
    def list_reactions(
        project_id: str, persona_id: str, subject: str = Depends(subject_of)
    ):
        state = member_state(project_id, subject)
        state.persona(persona_id)
        ordered = reactions_newest_first(
            r for r in state.reactions if r.persona_id == persona_id
        )
        return schemas.ReactionListResponse(reactions=[r.to_dict() for r in ordered])

    # -- reports ---------------------------------------------------------

    @app.get("/api/projects/{project_id}/report")
    def export_report(
        project_id: str, format: str = "structured", subject: str = Depends(subject_of)
    ):
        state = member_state(project_id, subject)
        exported_at = store.now()
        if format == "structured":
            text = export_structured(state, rubric.version, exported_at)
            return Response(content=text, media_type="application/json")
        if format == "readable":
            scenario = None
            if state.scenario_ref:
                try:
                    scenario = scenario_by_id(state.scenario_ref, settings.fixtures_dir)
                except FixtureMissing:
                    scenario = None
            text = export_readable(state, catalog, rubric, scenario, exported_at)
            return PlainTextResponse(content=text)
        raise UnsupportedFormat(f"unknown report format {format!r}")

    # -- static web client ----------------------------------------------

    if settings.static_dir and Path(settings.static_dir).is_dir():
        app.mount("/", StaticFiles(directory=settings.static_dir, html=True), name="ui")

    return app
