"""Command-line interface.

`stageboard serve` runs the HTTP service; every other command is a thin
client that talks to a running service over the wire, never to the data
directory directly. Commands that mutate a project fetch the current
revision first unless --expected-revision pins one explicitly.
"""
from __future__ import annotations

import json
import logging
import sys

import click
import httpx

DEFAULT_API = "http://127.0.0.1:8000"
API_ENV = "STAGEBOARD_API"
TOKEN_ENV = "STAGEBOARD_TOKEN"


class Client:
    def __init__(self, api: str, token: str | None):
        self.api = api.rstrip("/")
        headers = {"X-Protocol-Version": "1"}
        if token:
            headers["Authorization"] = f"Bearer {token}"
        self.http = httpx.Client(base_url=self.api, headers=headers, timeout=120.0)

    def request(self, method: str, path: str, **kwargs) -> httpx.Response:
        response = self.http.request(method, path, **kwargs)
        if response.status_code >= 400:
            try:
                body = response.json()
            except ValueError:
                body = {"error": "HttpError", "message": response.text}
            click.echo(
                f"error [{response.status_code}] {body.get('error')}: {body.get('message')}",
                err=True,
            )
            detail = body.get("detail")
            if detail:
                click.echo(json.dumps(detail, indent=2), err=True)
            sys.exit(1)
        return response

    def current_revision(self, project_id: str) -> int:
        body = self.request("GET", f"/api/projects/{project_id}/snapshot").json()
        return body["revision"]


pass_client = click.make_pass_decorator(Client)


def emit(payload) -> None:
    click.echo(json.dumps(payload, indent=2))


@click.group()
@click.option("--api", envvar=API_ENV, default=DEFAULT_API, show_default=True, help="Service base URL.")
@click.option("--token", envvar=TOKEN_ENV, default=None, help="Session token.")
@click.pass_context
def main(ctx: click.Context, api: str, token: str | None):
    """Collaborative planning and harm-evaluation workspace."""
    ctx.obj = Client(api, token)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--data-dir", default="./stageboard-data", show_default=True)
@click.option("--fixtures-dir", default=None, help="Scenario fixtures directory override.")
@click.option("--llm-provider", type=click.Choice(["mock", "http"]), default="mock", show_default=True)
@click.option("--mock-script", default=None, help="JSON script for the mock model provider.")
@click.option("--endpoint", default="", help="Chat-completions endpoint for the http provider.")
@click.option("--model", default="", help="Model name for the http provider.")
@click.option("--retry-max", default=2, show_default=True)
@click.option("--backoff", default=0.5, show_default=True)
@click.option("--timeout", default=30.0, show_default=True)
@click.option("--static-dir", default=None, help="Directory with a built web client to serve.")
@click.option("--log-level", default="info", show_default=True)
def serve(
    host: str,
    port: int,
    data_dir: str,
    fixtures_dir: str | None,
    llm_provider: str,
    mock_script: str | None,
    endpoint: str,
    model: str,
    retry_max: int,
    backoff: float,
    timeout: float,
    static_dir: str | None,
    log_level: str,
):
    """Run the HTTP service."""
    import uvicorn

    from .llm import GatewayConfig
    from .service import ServiceSettings, create_app

    logging.basicConfig(level=log_level.upper())
    settings = ServiceSettings(
        data_dir=data_dir,
        fixtures_dir=fixtures_dir,
        llm=GatewayConfig(
            provider=llm_provider,
            endpoint=endpoint,
            model=model,
            retry_max=retry_max,
            backoff_base=backoff,
            timeout=timeout,
            mock_script=mock_script,
        ),
        static_dir=static_dir,
    )
    uvicorn.run(create_app(settings), host=host, port=port, log_level=log_level)


@main.command()
@click.argument("subject")
@click.option("--name", default="", help="Display name to embed in the token.")
@pass_client
def login(client: Client, subject: str, name: str):
    """Obtain a session token for SUBJECT."""
    body = client.request(
        "POST", "/api/session/login", json={"subject": subject, "display_name": name}
    ).json()
    click.echo(body["token"])
    click.echo(f"export {TOKEN_ENV}={body['token']}", err=True)


@main.group()
def projects():
    """Create, list, and inspect projects."""


@projects.command("list")
@pass_client
def projects_list(client: Client):
    emit(client.request("GET", "/api/projects").json()["projects"])


@projects.command("create")
@click.argument("name")
@click.option(
    "--member",
    "members",
    multiple=True,
    required=True,
    help="member as 'id:Display Name:Role' or 'Display Name:Role'.",
)
@click.option("--scenario", default=None, help="Scenario id to link.")
@pass_client
def projects_create(client: Client, name: str, members: tuple[str, ...], scenario: str | None):
    parsed = []
    for item in members:
        parts = item.split(":")
        if len(parts) == 3:
            parsed.append({"member_id": parts[0], "display_name": parts[1], "role": parts[2]})
        elif len(parts) == 2:
            parsed.append({"display_name": parts[0], "role": parts[1]})
        else:
            raise click.BadParameter(f"cannot parse member {item!r}")
    payload = {"name": name, "members": parsed, "scenario_ref": scenario}
    emit(client.request("POST", "/api/projects", json=payload).json())


@projects.command("show")
@click.argument("project_id")
@click.option("--revision", type=int, default=None, help="Historical revision to show.")
@pass_client
def projects_show(client: Client, project_id: str, revision: int | None):
    params = {} if revision is None else {"revision": revision}
    emit(client.request("GET", f"/api/projects/{project_id}/snapshot", params=params).json())


def _commit(client: Client, project_id: str, event: dict, expected_revision: int | None):
    if expected_revision is None:
        expected_revision = client.current_revision(project_id)
    payload = {"expected_revision": expected_revision, "event": event}
    body = client.request("POST", f"/api/projects/{project_id}/commit", json=payload).json()
    emit({"revision": body["revision"]})


revision_option = click.option(
    "--expected-revision", type=int, default=None, help="Pin the revision to commit against."
)


@main.group()
def block():
    """Edit the plan graph."""


@block.command("add")
@click.argument("project_id")
@click.argument("stage")
@click.argument("x", type=float)
@click.argument("y", type=float)
@revision_option
@pass_client
def block_add(client: Client, project_id: str, stage: str, x: float, y: float, expected_revision):
    _commit(client, project_id, {"kind": "add_block", "stage": stage, "position": [x, y]}, expected_revision)


@block.command("link")
@click.argument("project_id")
@click.argument("from_block")
@click.argument("to_block")
@revision_option
@pass_client
def block_link(client: Client, project_id: str, from_block: str, to_block: str, expected_revision):
    _commit(
        client,
        project_id,
        {"kind": "link_blocks", "from_block": from_block, "to_block": to_block},
        expected_revision,
    )


@block.command("describe")
@click.argument("project_id")
@click.argument("block_id")
@click.argument("text")
@revision_option
@pass_client
def block_describe(client: Client, project_id: str, block_id: str, text: str, expected_revision):
    _commit(
        client,
        project_id,
        {"kind": "set_description", "block_id": block_id, "text": text},
        expected_revision,
    )


@block.command("move")
@click.argument("project_id")
@click.argument("block_id")
@click.argument("x", type=float)
@click.argument("y", type=float)
@revision_option
@pass_client
def block_move(client: Client, project_id: str, block_id: str, x: float, y: float, expected_revision):
    _commit(
        client,
        project_id,
        {"kind": "move_block", "block_id": block_id, "position": [x, y]},
        expected_revision,
    )


@block.command("delete")
@click.argument("project_id")
@click.argument("block_id")
@revision_option
@pass_client
def block_delete(client: Client, project_id: str, block_id: str, expected_revision):
    _commit(client, project_id, {"kind": "delete_block", "block_id": block_id}, expected_revision)


@main.command()
@click.argument("project_id")
@click.argument("target")
@revision_option
@pass_client
def phase(client: Client, project_id: str, target: str, expected_revision):
    """Move the project to a new phase."""
    if expected_revision is None:
        expected_revision = client.current_revision(project_id)
    payload = {"target": target, "expected_revision": expected_revision}
    body = client.request("POST", f"/api/projects/{project_id}/phase", json=payload).json()
    emit({"revision": body["revision"], "phase": body["state"]["phase"]})


@main.command()
@click.argument("stage", required=False)
@pass_client
def prompts(client: Client, stage: str | None):
    """Show worksheet and checklist prompts."""
    if stage:
        emit(client.request("GET", f"/api/prompts/{stage}").json())
    else:
        emit(client.request("GET", "/api/prompts").json()["stages"])


@main.command()
@pass_client
def rubric(client: Client):
    """Show the harm rating rubric."""
    emit(client.request("GET", "/api/rubric").json())


@main.command()
@pass_client
def scenarios(client: Client):
    """List the built-in problem scenarios."""
    emit(client.request("GET", "/api/scenarios").json()["scenarios"])


@main.group(name="eval")
def eval_group():
    """Create and rate harm evaluations."""


@eval_group.command("add")
@click.argument("project_id")
@click.argument("block_id")
@click.argument("text")
@revision_option
@pass_client
def eval_add(client: Client, project_id: str, block_id: str, text: str, expected_revision):
    if expected_revision is None:
        expected_revision = client.current_revision(project_id)
    payload = {"block_id": block_id, "text": text, "expected_revision": expected_revision}
    emit(client.request("POST", f"/api/projects/{project_id}/evaluations", json=payload).json())


@eval_group.command("list")
@click.argument("project_id")
@click.option("--block", default=None, help="Only evaluations attached to this block.")
@pass_client
def eval_list(client: Client, project_id: str, block: str | None):
    state = client.request("GET", f"/api/projects/{project_id}/snapshot").json()["state"]
    evaluations = state["evaluations"]
    if block:
        evaluations = [e for e in evaluations if e["block_id"] == block]
    emit(evaluations)


@eval_group.command("rate")
@click.argument("project_id")
@click.argument("eval_id")
@click.option("--severity", type=int, required=True)
@click.option("--likelihood", type=int, required=True)
@click.option("--harm-type", "harm_type", required=True)
@click.option("--harm", "specific_harm", required=True)
@revision_option
@pass_client
def eval_rate(
    client: Client,
    project_id: str,
    eval_id: str,
    severity: int,
    likelihood: int,
    harm_type: str,
    specific_harm: str,
    expected_revision,
):
    if expected_revision is None:
        expected_revision = client.current_revision(project_id)
    payload = {
        "severity": severity,
        "likelihood": likelihood,
        "harm_type": harm_type,
        "specific_harm": specific_harm,
        "expected_revision": expected_revision,
    }
    emit(
        client.request(
            "PUT", f"/api/projects/{project_id}/evaluations/{eval_id}/rating", json=payload
        ).json()
    )


@main.group()
def persona():
    """Create personas and simulate their reactions."""


@persona.command("add")
@click.argument("project_id")
@click.argument("description")
@revision_option
@pass_client
def persona_add(client: Client, project_id: str, description: str, expected_revision):
    if expected_revision is None:
        expected_revision = client.current_revision(project_id)
    payload = {"description": description, "expected_revision": expected_revision}
    emit(client.request("POST", f"/api/projects/{project_id}/personas", json=payload).json())


@persona.command("generate")
@click.argument("project_id")
@pass_client
def persona_generate(client: Client, project_id: str):
    body = client.request("POST", f"/api/projects/{project_id}/personas/generate").json()
    if body.get("warning"):
        click.echo(f"warning: {body['warning']}", err=True)
    emit(body)


@persona.command("simulate")
@click.argument("project_id")
@click.argument("persona_id")
@pass_client
def persona_simulate(client: Client, project_id: str, persona_id: str):
    emit(
        client.request(
            "POST", f"/api/projects/{project_id}/personas/{persona_id}/reactions"
        ).json()
    )


@persona.command("reactions")
@click.argument("project_id")
@click.argument("persona_id")
@pass_client
def persona_reactions(client: Client, project_id: str, persona_id: str):
    emit(
        client.request(
            "GET", f"/api/projects/{project_id}/personas/{persona_id}/reactions"
        ).json()["reactions"]
    )


@persona.command("delete")
@click.argument("project_id")
@click.argument("persona_id")
@revision_option
@pass_client
def persona_delete(client: Client, project_id: str, persona_id: str, expected_revision):
    if expected_revision is None:
        expected_revision = client.current_revision(project_id)
    emit(
        client.request(
            "DELETE",
            f"/api/projects/{project_id}/personas/{persona_id}",
            params={"expected_revision": expected_revision},
        ).json()
    )


@main.command()
@click.argument("project_id")
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["structured", "readable"]),
    default="structured",
    show_default=True,
)
@click.option("-o", "--output", default=None, help="Write to a file instead of stdout.")
@pass_client
def report(client: Client, project_id: str, fmt: str, output: str | None):
    """Export the project report."""
    response = client.request(
        "GET", f"/api/projects/{project_id}/report", params={"format": fmt}
    )
    if output:
        with open(output, "w", encoding="utf-8") as f:
            f.write(response.text)
        click.echo(f"wrote {output}", err=True)
    else:
        click.echo(response.text, nl=False)


@main.command("import-report")
@click.argument("path", type=click.Path(exists=True))
@pass_client
def import_report(client: Client, path: str):
    """Import a structured report as a new project."""
    with open(path, "r", encoding="utf-8") as f:
        body = json.load(f)
    emit(client.request("POST", "/api/projects/import", json=body).json())


if __name__ == "__main__":
    main()
