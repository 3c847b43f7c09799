import type {
  ErrorEnvelope,
  EvaluationWire,
  LoginWire,
  MemberWire,
  PersonaWire,
  Phase,
  ProjectSummaryWire,
  ReactionWire,
  SnapshotWire,
  StagePromptsWire,
} from "./types.js";

export const PROTOCOL_VERSION = "1";

/** A domain error from the service, carrying the wire error code. */
export class ApiError extends Error {
  readonly code: string;
  readonly status: number;
  readonly detail: Record<string, unknown>;

  constructor(code: string, message: string, status: number, detail: Record<string, unknown> = {}) {
    super(message);
    this.name = "ApiError";
    this.code = code;
    this.status = status;
    this.detail = detail;
  }
}

export function isRevisionConflict(err: unknown): boolean {
  return err instanceof ApiError && err.code === "RevisionConflict";
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

const defaultFetch: FetchLike = (input, init) => fetch(input, init);

/**
 * Thin typed wrapper over the service endpoints. Every request carries the
 * protocol version; failures are surfaced as ApiError with the envelope's
 * error code, never as raw HTTP statuses.
 */
export class ApiClient {
  private token: string | null = null;

  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = defaultFetch,
  ) {}

  setToken(token: string | null): void {
    this.token = token;
  }

  private async request(method: string, path: string, body?: unknown): Promise<unknown> {
    const headers: Record<string, string> = { "X-Protocol-Version": PROTOCOL_VERSION };
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;

    const response = await this.fetchFn(this.base + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });

    if (!response.ok) {
      let envelope: Partial<ErrorEnvelope> = {};
      try {
        envelope = (await response.json()) as ErrorEnvelope;
      } catch {
        // non-JSON failure body; fall through to the generic error
      }
      throw new ApiError(
        envelope.error ?? `Http${response.status}`,
        envelope.message ?? `request failed with status ${response.status}`,
        response.status,
        envelope.detail ?? {},
      );
    }

    const contentType = response.headers.get("content-type") ?? "";
    if (contentType.includes("application/json")) return response.json();
    return response.text();
  }

  async login(subject: string, displayName: string): Promise<LoginWire> {
    const out = (await this.request("POST", "/api/session/login", {
      subject,
      display_name: displayName,
    })) as LoginWire;
    this.token = out.token;
    return out;
  }

  async listProjects(): Promise<ProjectSummaryWire[]> {
    const out = (await this.request("GET", "/api/projects")) as { projects: ProjectSummaryWire[] };
    return out.projects;
  }

  async createProject(
    name: string,
    members: MemberWire[],
    scenarioRef: string | null = null,
  ): Promise<SnapshotWire> {
    const out = (await this.request("POST", "/api/projects", {
      name,
      members,
      scenario_ref: scenarioRef,
    })) as { state: SnapshotWire };
    return out.state;
  }

  async snapshot(projectId: string): Promise<SnapshotWire> {
    const out = (await this.request("GET", `/api/projects/${projectId}/snapshot`)) as {
      state: SnapshotWire;
    };
    return out.state;
  }

  async commit(
    projectId: string,
    expectedRevision: number,
    event: Record<string, unknown>,
  ): Promise<number> {
    const out = (await this.request("POST", `/api/projects/${projectId}/commit`, {
      expected_revision: expectedRevision,
      event,
    })) as { revision: number };
    return out.revision;
  }

  moveBlock(
    projectId: string,
    expectedRevision: number,
    blockId: string,
    position: [number, number],
  ): Promise<number> {
    return this.commit(projectId, expectedRevision, {
      kind: "move_block",
      block_id: blockId,
      position,
    });
  }

  async transitionPhase(projectId: string, target: Phase, expectedRevision: number): Promise<number> {
    const out = (await this.request("POST", `/api/projects/${projectId}/phase`, {
      target,
      expected_revision: expectedRevision,
    })) as { revision: number };
    return out.revision;
  }

  async stagePrompts(stage: string): Promise<StagePromptsWire> {
    return (await this.request("GET", `/api/prompts/${stage}`)) as StagePromptsWire;
  }

  async createEvaluation(
    projectId: string,
    blockId: string,
    text: string,
    expectedRevision: number,
  ): Promise<EvaluationWire> {
    const out = (await this.request("POST", `/api/projects/${projectId}/evaluations`, {
      block_id: blockId,
      text,
      expected_revision: expectedRevision,
    })) as { evaluation: EvaluationWire };
    return out.evaluation;
  }

  async createPersona(
    projectId: string,
    description: string,
    expectedRevision: number,
  ): Promise<PersonaWire> {
    const out = (await this.request("POST", `/api/projects/${projectId}/personas`, {
      description,
      expected_revision: expectedRevision,
    })) as { persona: PersonaWire };
    return out.persona;
  }

  async generatePersonas(projectId: string): Promise<{ personas: PersonaWire[]; warning: string | null }> {
    return (await this.request("POST", `/api/projects/${projectId}/personas/generate`)) as {
      personas: PersonaWire[];
      warning: string | null;
    };
  }

  async simulateReaction(projectId: string, personaId: string): Promise<ReactionWire> {
    const out = (await this.request(
      "POST",
      `/api/projects/${projectId}/personas/${personaId}/reactions`,
    )) as { reaction: ReactionWire };
    return out.reaction;
  }

  async reactions(projectId: string, personaId: string): Promise<ReactionWire[]> {
    const out = (await this.request(
      "GET",
      `/api/projects/${projectId}/personas/${personaId}/reactions`,
    )) as { reactions: ReactionWire[] };
    return out.reactions;
  }
}
