// @vitest-environment happy-dom

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { AppView } from "../src/app.js";
import { STAGE_ORDER } from "../src/palette.js";
import type { MemberWire, SnapshotWire } from "../src/types.js";
import { startServer, until } from "./support/server.js";
import type { RunningServer } from "./support/server.js";

const MEMBERS: MemberWire[] = [
  { member_id: "alice", display_name: "Alice", role: "Technical" },
  { member_id: "bob", display_name: "Bob", role: "NonTechnical" },
];

const DESCRIPTIONS: Record<string, string> = {
  ProblemFormulation: "Rank incoming resumes for recruiters.",
  TaskDefinition: "Score each resume against the job posting.",
  DatasetConstruction: "Collect five years of hiring decisions.",
  ModelDefinition: "Gradient boosted ranker over parsed fields.",
  Training: "Train on past decisions with held-out splits.",
  Testing: "Audit rankings on held-out resumes.",
  Deployment: "Surface top candidates in the recruiter queue.",
  Feedback: "Log recruiter overrides for review.",
};

const REVISED_TESTING = "Audit rankings with bias probes.";

let server: RunningServer;
let alice: ApiClient;
let bob: ApiClient;

let evalProjectId: string;
let draftProjectId: string;

let host: HTMLElement;
let view: AppView;
let draftHost: HTMLElement;
let draftView: AppView;

function findWindowApi(): { setURL(url: string): void } | null {
  const candidate = (globalThis as { happyDOM?: { setURL?(url: string): void } }).happyDOM;
  if (candidate && typeof candidate.setURL === "function") {
    return candidate as { setURL(url: string): void };
  }
  return null;
}

/** Seeds a project with the full eight-stage chain and per-stage descriptions. */
async function seedChain(client: ApiClient, projectId: string, revision: number): Promise<number> {
  let rev = revision;
  for (let i = 0; i < STAGE_ORDER.length; i++) {
    rev = await client.commit(projectId, rev, {
      kind: "add_block",
      stage: STAGE_ORDER[i],
      position: [80 + i * 170, 120],
    });
  }
  const snapshot = await client.snapshot(projectId);
  const bySeq = [...snapshot.graph.blocks].sort((a, b) => a.seq - b.seq);
  for (let i = 1; i < bySeq.length; i++) {
    rev = await client.commit(projectId, rev, {
      kind: "link_blocks",
      from_block: bySeq[i - 1].block_id,
      to_block: bySeq[i].block_id,
    });
  }
  for (const block of bySeq) {
    rev = await client.commit(projectId, rev, {
      kind: "set_description",
      block_id: block.block_id,
      text: DESCRIPTIONS[block.stage],
    });
  }
  return rev;
}

async function blockIdFor(client: ApiClient, projectId: string, stage: string): Promise<string> {
  const snapshot = await client.snapshot(projectId);
  const block = snapshot.graph.blocks.find((b) => b.stage === stage);
  if (!block) throw new Error(`no ${stage} block in ${projectId}`);
  return block.block_id;
}

describe("web client against a live service", () => {
  beforeAll(async () => {
    server = await startServer();
    // Same-origin keeps happy-dom's fetch from applying cross-origin rules.
    findWindowApi()?.setURL(server.base);

    alice = new ApiClient(server.base);
    bob = new ApiClient(server.base);
    await alice.login("alice", "Alice");
    await bob.login("bob", "Bob");

    const evalState: SnapshotWire = await alice.createProject(
      "Resume Screening Assistant",
      MEMBERS,
      "resume-screening",
    );
    evalProjectId = evalState.project_id;
    let rev = await seedChain(alice, evalProjectId, evalState.revision);
    rev = await alice.transitionPhase(evalProjectId, "Evaluation", rev);

    const draftState: SnapshotWire = await alice.createProject(
      "Draft Sandbox",
      MEMBERS,
      "resume-screening",
    );
    draftProjectId = draftState.project_id;
    await seedChain(alice, draftProjectId, draftState.revision);

    host = document.createElement("div");
    document.body.appendChild(host);
    view = new AppView(host, bob, { subject: "bob", pollMs: 0 });
    await view.open(evalProjectId);

    draftHost = document.createElement("div");
    document.body.appendChild(draftHost);
    draftView = new AppView(draftHost, alice, { subject: "alice", pollMs: 0 });
    await draftView.open(draftProjectId);
  });

  afterAll(async () => {
    view?.close();
    draftView?.close();
    await server?.stop();
  });

  it("renders one widget per stage and one edge per dependency", () => {
    expect(host.querySelectorAll(".stage-widget")).toHaveLength(8);
    expect(host.querySelectorAll(".stage-edge")).toHaveLength(7);
  });

  it("shows the catalog checklist verbatim when an evaluator hovers a widget", async () => {
    const popover = host.querySelector(".prompt-popover") as HTMLElement;
    const widgets = Array.from(host.querySelectorAll(".stage-widget"));
    expect(widgets).toHaveLength(8);
    const seen = new Set<string>();
    for (const widget of widgets) {
      const stage = widget.getAttribute("data-stage") ?? "";
      const expected = (await bob.stagePrompts(stage)).checklist;
      widget.dispatchEvent(new MouseEvent("mouseenter"));
      await until(() => !popover.hidden && popover.textContent === expected);
      expect(popover.textContent).toBe(expected);
      widget.dispatchEvent(new MouseEvent("mouseleave"));
      seen.add(stage);
    }
    expect(seen).toEqual(new Set(STAGE_ORDER));
  });

  it("shows the catalog worksheet verbatim when a builder hovers while drafting", async () => {
    const popover = draftHost.querySelector(".prompt-popover") as HTMLElement;
    const widget = draftHost.querySelector('.stage-widget[data-stage="Training"]') as Element;
    const expected = (await alice.stagePrompts("Training")).worksheet;
    widget.dispatchEvent(new MouseEvent("mouseenter"));
    await until(() => !popover.hidden && popover.textContent === expected);
    expect(popover.textContent).toBe(expected);
    widget.dispatchEvent(new MouseEvent("mouseleave"));
  });

  it("puts three minifigures on the rail after one generate click", async () => {
    const button = host.querySelector(".generate-personas") as HTMLButtonElement;
    expect(button.disabled).toBe(false);
    button.click();
    await until(() => host.querySelectorAll(".minifigure").length === 3);
    const snapshot = await bob.snapshot(evalProjectId);
    expect(snapshot.personas).toHaveLength(3);
    const figures = Array.from(host.querySelectorAll(".minifigure"));
    expect(figures.map((f) => f.getAttribute("data-persona"))).toEqual(
      snapshot.personas.map((p) => p.persona_id),
    );
  });

  it("surfaces the newest reaction for a persona on hover", async () => {
    const snapshot = await bob.snapshot(evalProjectId);
    const persona = snapshot.personas[0];

    const first = await bob.simulateReaction(evalProjectId, persona.persona_id);

    let rev = (await bob.snapshot(evalProjectId)).revision;
    rev = await alice.transitionPhase(evalProjectId, "Revision", rev);
    const testingId = await blockIdFor(alice, evalProjectId, "Testing");
    rev = await alice.commit(evalProjectId, rev, {
      kind: "set_description",
      block_id: testingId,
      text: REVISED_TESTING,
    });
    await alice.transitionPhase(evalProjectId, "Evaluation", rev);

    const second = await bob.simulateReaction(evalProjectId, persona.persona_id);
    expect(second.text).not.toBe(first.text);

    await view.refresh();
    const figure = host.querySelector(
      `.minifigure[data-persona="${persona.persona_id}"]`,
    ) as HTMLElement;
    figure.dispatchEvent(new MouseEvent("mouseenter"));
    const panel = host.querySelector(".reaction-panel") as HTMLElement;
    await until(() => !panel.hidden);
    const shown = (panel.querySelector(".reaction-text") as HTMLElement).textContent;
    expect(shown).toBe(second.text);
    expect(shown).not.toBe(first.text);
  });

  it("keeps denied controls visible but disabled", () => {
    const trayButtons = Array.from(
      host.querySelectorAll(".tray-button"),
    ) as HTMLButtonElement[];
    expect(trayButtons).toHaveLength(8);
    for (const button of trayButtons) {
      expect(button.disabled).toBe(true);
      expect(button.hidden).toBe(false);
    }

    const generate = draftHost.querySelector(".generate-personas") as HTMLButtonElement;
    expect(generate.disabled).toBe(true);
    expect(generate.hidden).toBe(false);

    const draftTray = Array.from(
      draftHost.querySelectorAll(".tray-button"),
    ) as HTMLButtonElement[];
    expect(draftTray.every((b) => !b.disabled)).toBe(true);
  });
});
