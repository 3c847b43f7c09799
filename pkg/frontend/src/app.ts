import { ApiClient, ApiError } from "./api.js";
import { canEditPlan, canEvaluate, phaseOptions, promptKindFor, viewerRole } from "./access.js";
import { commitDrop, DragController } from "./drag.js";
import { STAGE_ORDER, stageColor, stageLabel } from "./palette.js";
import { renderScene } from "./scene.js";
import type { RailFigure, Scene, SceneWidget } from "./scene.js";
import { initialView, withSelection, withSidebar, zoomTo } from "./view.js";
import type { CanvasViewState } from "./view.js";
import { startPolling } from "./poll.js";
import type { Role, SnapshotWire, StagePromptsWire } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const DEFAULT_POLL_MS = 3000;

export interface AppOptions {
  /** Login subject; resolved against project membership for the role. */
  subject: string;
  /** Snapshot polling interval; 0 disables polling (tests drive refresh()). */
  pollMs?: number;
}

/**
 * The project canvas: stage widgets with hover prompts, the persona rail,
 * phase controls, and a per-stage sidebar. The screen is a pure function of
 * (server snapshot, view state); every mutation goes through the API and
 * comes back via refresh, so a reload always reproduces the same scene.
 */
export class AppView {
  private readonly doc: Document;
  private readonly dragger = new DragController();

  private snapshot: SnapshotWire | null = null;
  private view: CanvasViewState = initialView();
  private projectId: string | null = null;
  private stopPoll: (() => void) | null = null;
  private promptCache = new Map<string, StagePromptsWire>();
  private promptSeq = 0;
  private pinnedPersona: string | null = null;
  private dragGroup: SVGGElement | null = null;
  private panStart: { x: number; y: number; panX: number; panY: number } | null = null;

  private readonly shell: HTMLElement;
  private readonly projectName: HTMLElement;
  private readonly phaseBadge: HTMLElement;
  private readonly revisionLabel: HTMLElement;
  private readonly phaseControls: HTMLElement;
  private readonly tray: HTMLElement;
  private readonly svg: SVGSVGElement;
  private readonly popover: HTMLElement;
  private readonly railFigures: HTMLElement;
  private readonly reactionPanel: HTMLElement;
  private readonly generateButton: HTMLButtonElement;
  private readonly personaInput: HTMLInputElement;
  private readonly personaAdd: HTMLButtonElement;
  private readonly sidebar: HTMLElement;
  private readonly notices: HTMLElement;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: ApiClient,
    private readonly options: AppOptions,
  ) {
    this.doc = root.ownerDocument;
    const doc = this.doc;

    this.shell = doc.createElement("div");
    this.shell.className = "app";

    const topbar = doc.createElement("header");
    topbar.className = "topbar";
    this.projectName = doc.createElement("span");
    this.projectName.className = "project-name";
    this.phaseBadge = doc.createElement("span");
    this.phaseBadge.className = "phase-badge";
    this.revisionLabel = doc.createElement("span");
    this.revisionLabel.className = "revision-label";
    this.phaseControls = doc.createElement("span");
    this.phaseControls.className = "phase-controls";
    topbar.append(this.projectName, this.phaseBadge, this.revisionLabel, this.phaseControls);

    this.tray = doc.createElement("div");
    this.tray.className = "tray";

    const canvasWrap = doc.createElement("div");
    canvasWrap.className = "canvas-wrap";
    this.svg = doc.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    this.svg.setAttribute("class", "canvas");
    this.popover = doc.createElement("div");
    this.popover.className = "prompt-popover";
    this.popover.hidden = true;

    const rail = doc.createElement("aside");
    rail.className = "persona-rail";
    const railHeader = doc.createElement("div");
    railHeader.className = "rail-header";
    this.generateButton = doc.createElement("button");
    this.generateButton.className = "generate-personas";
    this.generateButton.textContent = "Generate personas";
    railHeader.append(this.generateButton);
    this.railFigures = doc.createElement("div");
    this.railFigures.className = "rail-figures";
    this.reactionPanel = doc.createElement("div");
    this.reactionPanel.className = "reaction-panel";
    this.reactionPanel.hidden = true;
    const personaForm = doc.createElement("div");
    personaForm.className = "persona-form";
    this.personaInput = doc.createElement("input");
    this.personaInput.className = "persona-input";
    this.personaInput.setAttribute("placeholder", "Describe a persona");
    this.personaAdd = doc.createElement("button");
    this.personaAdd.className = "persona-add";
    this.personaAdd.textContent = "Add";
    personaForm.append(this.personaInput, this.personaAdd);
    rail.append(railHeader, this.railFigures, this.reactionPanel, personaForm);

    canvasWrap.append(this.svg, this.popover, rail);

    this.sidebar = doc.createElement("aside");
    this.sidebar.className = "sidebar";
    this.sidebar.hidden = true;

    this.notices = doc.createElement("div");
    this.notices.className = "notices";

    this.shell.append(topbar, this.tray, canvasWrap, this.sidebar, this.notices);
    root.append(this.shell);

    this.generateButton.addEventListener("click", () => {
      void this.generatePersonas();
    });
    this.personaAdd.addEventListener("click", () => {
      void this.addPersona();
    });
    this.svg.addEventListener("pointerdown", (ev) => this.onCanvasPointerDown(ev as PointerEvent));
    this.svg.addEventListener("pointermove", (ev) => this.onCanvasPointerMove(ev as PointerEvent));
    this.svg.addEventListener("pointerup", (ev) => {
      void this.onCanvasPointerUp(ev as PointerEvent);
    });
    this.svg.addEventListener("wheel", (ev) => this.onWheel(ev as WheelEvent));
  }

  async open(projectId: string): Promise<void> {
    this.close();
    this.projectId = projectId;
    this.view = initialView();
    await this.refresh();
    const pollMs = this.options.pollMs ?? DEFAULT_POLL_MS;
    if (pollMs > 0) {
      this.stopPoll = startPolling(() => this.refresh(), pollMs);
    }
  }

  close(): void {
    if (this.stopPoll) {
      this.stopPoll();
      this.stopPoll = null;
    }
  }

  current(): SnapshotWire | null {
    return this.snapshot;
  }

  async refresh(): Promise<void> {
    if (!this.projectId) return;
    this.snapshot = await this.client.snapshot(this.projectId);
    const live = new Set(this.snapshot.graph.blocks.map((b) => b.block_id));
    this.view = withSelection(this.view, this.view.selected, live);
    if (this.pinnedPersona && !this.snapshot.personas.some((p) => p.persona_id === this.pinnedPersona)) {
      this.pinnedPersona = null;
      this.reactionPanel.hidden = true;
    }
    this.render();
  }

  private role(): Role {
    if (!this.snapshot) return "NonTechnical";
    return viewerRole(this.snapshot, this.options.subject);
  }

  private render(): void {
    const snapshot = this.snapshot;
    if (!snapshot) return;
    const scene = renderScene(snapshot, this.view);
    this.renderTopbar(snapshot);
    this.renderTray(snapshot);
    this.renderCanvas(scene);
    this.renderRail(scene, snapshot);
    this.renderSidebar(snapshot);
  }

  private renderTopbar(snapshot: SnapshotWire): void {
    this.projectName.textContent = snapshot.name;
    this.phaseBadge.textContent = snapshot.phase;
    this.revisionLabel.textContent = `rev ${snapshot.revision}`;
    clear(this.phaseControls);
    for (const option of phaseOptions(snapshot.phase, this.role())) {
      const button = this.doc.createElement("button");
      button.className = "phase-button";
      button.setAttribute("data-target", option.target);
      button.textContent = `To ${option.target}`;
      button.disabled = !option.enabled;
      button.addEventListener("click", () => {
        void this.transition(option.target);
      });
      this.phaseControls.append(button);
    }
  }

  private renderTray(snapshot: SnapshotWire): void {
    clear(this.tray);
    const editable = canEditPlan(this.role(), snapshot.phase);
    for (const stage of STAGE_ORDER) {
      const button = this.doc.createElement("button");
      button.className = "tray-button";
      button.setAttribute("data-stage", stage);
      button.textContent = stageLabel(stage);
      button.style.setProperty("--stage-color", stageColor(stage));
      button.disabled = !editable;
      button.addEventListener("click", () => {
        void this.addBlock(stage);
      });
      this.tray.append(button);
    }
  }

  private renderCanvas(scene: Scene): void {
    clear(this.svg);
    for (const edge of scene.edges) {
      const line = this.doc.createElementNS(SVG_NS, "line");
      line.setAttribute("class", "stage-edge");
      line.setAttribute("data-from", edge.fromBlock);
      line.setAttribute("data-to", edge.toBlock);
      line.setAttribute("x1", String(edge.x1));
      line.setAttribute("y1", String(edge.y1));
      line.setAttribute("x2", String(edge.x2));
      line.setAttribute("y2", String(edge.y2));
      this.svg.append(line);
    }
    for (const widget of scene.widgets) {
      this.svg.append(this.buildWidget(widget));
    }
  }

  private buildWidget(widget: SceneWidget): SVGGElement {
    const editable = this.snapshot !== null && canEditPlan(this.role(), this.snapshot.phase);
    const group = this.doc.createElementNS(SVG_NS, "g") as SVGGElement;
    let className = "stage-widget";
    if (widget.selected) className += " selected";
    if (!editable) className += " locked";
    group.setAttribute("class", className);
    group.setAttribute("data-block", widget.blockId);
    group.setAttribute("data-stage", widget.stage);
    group.setAttribute("transform", `translate(${widget.x},${widget.y})`);

    const rect = this.doc.createElementNS(SVG_NS, "rect");
    rect.setAttribute("width", String(widget.width));
    rect.setAttribute("height", String(widget.height));
    rect.setAttribute("rx", "6");
    rect.setAttribute("fill", widget.color);
    const label = this.doc.createElementNS(SVG_NS, "text");
    label.setAttribute("class", "widget-label");
    label.setAttribute("x", "8");
    label.setAttribute("y", "22");
    label.textContent = widget.label;
    const previewText = this.doc.createElementNS(SVG_NS, "text");
    previewText.setAttribute("class", "widget-preview");
    previewText.setAttribute("x", "8");
    previewText.setAttribute("y", "44");
    previewText.textContent = widget.preview;
    group.append(rect, label, previewText);

    group.addEventListener("mouseenter", () => {
      void this.showPrompt(widget);
    });
    group.addEventListener("mouseleave", () => {
      this.hidePrompt();
    });
    group.addEventListener("click", () => {
      this.selectBlock(widget.blockId);
    });
    group.addEventListener("pointerdown", (ev) => {
      this.beginWidgetDrag(widget, ev as PointerEvent, group);
    });
    return group;
  }

  /**
   * Prompt text always comes from the server catalog; the client caches per
   * stage but never hardcodes a string. A failed fetch leaves a retryable
   * placeholder instead of a broken popover.
   */
  private async showPrompt(widget: SceneWidget): Promise<void> {
    if (!this.snapshot) return;
    const seq = ++this.promptSeq;
    const pop = this.popover;
    pop.hidden = false;
    pop.style.left = `${Math.max(0, widget.x)}px`;
    pop.style.top = `${Math.max(0, widget.y - 72)}px`;
    pop.textContent = "Loading prompt...";
    const kind = promptKindFor(this.role(), this.snapshot.phase);
    try {
      const prompts = await this.promptFor(widget.stage);
      if (seq !== this.promptSeq) return;
      pop.textContent = prompts[kind];
    } catch {
      if (seq !== this.promptSeq) return;
      clear(pop);
      const message = this.doc.createElement("span");
      message.textContent = "Prompt unavailable. ";
      const retry = this.doc.createElement("button");
      retry.className = "prompt-retry";
      retry.textContent = "Retry";
      retry.addEventListener("click", () => {
        void this.showPrompt(widget);
      });
      pop.append(message, retry);
    }
  }

  private hidePrompt(): void {
    this.promptSeq++;
    this.popover.hidden = true;
  }

  private async promptFor(stage: string): Promise<StagePromptsWire> {
    const cached = this.promptCache.get(stage);
    if (cached) return cached;
    const prompts = await this.client.stagePrompts(stage);
    this.promptCache.set(stage, prompts);
    return prompts;
  }

  private renderRail(scene: Scene, snapshot: SnapshotWire): void {
    const evaluator = canEvaluate(this.role(), snapshot.phase, snapshot.symmetric_evaluation);
    this.generateButton.disabled = !evaluator;
    this.personaAdd.disabled = !evaluator;
    clear(this.railFigures);
    for (const figure of scene.rail) {
      const button = this.doc.createElement("button");
      button.className = "minifigure";
      button.setAttribute("data-persona", figure.personaId);
      button.setAttribute("title", figure.description);
      button.textContent = figure.initial;
      button.addEventListener("mouseenter", () => {
        this.showReaction(figure, evaluator);
      });
      button.addEventListener("mouseleave", () => {
        if (this.pinnedPersona !== figure.personaId) this.reactionPanel.hidden = true;
      });
      button.addEventListener("click", () => {
        this.pinnedPersona = figure.personaId;
        this.showReaction(figure, evaluator);
      });
      this.railFigures.append(button);
    }
  }

  private showReaction(figure: RailFigure, evaluator: boolean): void {
    const panel = this.reactionPanel;
    clear(panel);
    panel.hidden = false;
    panel.setAttribute("data-persona", figure.personaId);
    const description = this.doc.createElement("div");
    description.className = "reaction-persona";
    description.textContent = figure.description;
    const text = this.doc.createElement("div");
    text.className = "reaction-text";
    text.textContent = figure.newestReaction ?? "No reactions yet.";
    const inquire = this.doc.createElement("button");
    inquire.className = "inquire";
    inquire.textContent = "Inquire";
    inquire.disabled = !evaluator;
    inquire.addEventListener("click", () => {
      void this.inquire(figure.personaId);
    });
    panel.append(description, text, inquire);
  }

  private renderSidebar(snapshot: SnapshotWire): void {
    const selected = this.view.selected;
    if (!selected) {
      this.sidebar.hidden = true;
      clear(this.sidebar);
      return;
    }
    const block = snapshot.graph.blocks.find((b) => b.block_id === selected);
    if (!block) {
      this.sidebar.hidden = true;
      clear(this.sidebar);
      return;
    }
    this.sidebar.hidden = false;
    clear(this.sidebar);

    const heading = this.doc.createElement("h2");
    heading.textContent = stageLabel(block.stage);
    this.sidebar.append(heading);

    const promptBox = this.doc.createElement("p");
    promptBox.className = "sidebar-prompt";
    promptBox.textContent = "Loading prompt...";
    this.sidebar.append(promptBox);
    const kind = promptKindFor(this.role(), snapshot.phase);
    void this.promptFor(block.stage)
      .then((prompts) => {
        promptBox.textContent = prompts[kind];
      })
      .catch(() => {
        promptBox.textContent = "Prompt unavailable.";
      });

    if (canEditPlan(this.role(), snapshot.phase)) {
      const editor = this.doc.createElement("textarea");
      editor.className = "description-editor";
      editor.value = block.description;
      const save = this.doc.createElement("button");
      save.className = "description-save";
      save.textContent = "Save description";
      save.addEventListener("click", () => {
        void this.saveDescription(block.block_id, editor.value);
      });
      this.sidebar.append(editor, save);
    } else {
      const description = this.doc.createElement("p");
      description.className = "sidebar-description";
      description.textContent = block.description || "(no description yet)";
      this.sidebar.append(description);
    }

    const list = this.doc.createElement("ul");
    list.className = "evaluation-list";
    for (const evaluation of snapshot.evaluations) {
      if (evaluation.block_id !== block.block_id) continue;
      const item = this.doc.createElement("li");
      item.className = "evaluation-item";
      const rating = evaluation.rating
        ? ` [severity ${evaluation.rating.severity}/4, likelihood ${evaluation.rating.likelihood}/4]`
        : "";
      item.textContent = `${evaluation.text}${rating}`;
      list.append(item);
    }
    this.sidebar.append(list);

    if (canEvaluate(this.role(), snapshot.phase, snapshot.symmetric_evaluation)) {
      const editor = this.doc.createElement("textarea");
      editor.className = "evaluation-editor";
      editor.setAttribute("placeholder", "What could go wrong at this stage?");
      const save = this.doc.createElement("button");
      save.className = "evaluation-save";
      save.textContent = "Add evaluation";
      save.addEventListener("click", () => {
        void this.saveEvaluation(block.block_id, editor.value);
      });
      this.sidebar.append(editor, save);
    }
  }

  private selectBlock(blockId: string): void {
    if (!this.snapshot) return;
    const live = new Set(this.snapshot.graph.blocks.map((b) => b.block_id));
    this.view = withSelection(this.view, blockId, live);
    const evaluator = canEvaluate(this.role(), this.snapshot.phase, this.snapshot.symmetric_evaluation);
    this.view = withSidebar(this.view, evaluator ? "StageEvaluation" : "Worksheet");
    this.render();
  }

  // -- mutations ---------------------------------------------------------

  private async addBlock(stage: string): Promise<void> {
    if (!this.projectId || !this.snapshot) return;
    const count = this.snapshot.graph.blocks.length;
    const position: [number, number] = [
      -this.view.panX + 60 + count * 28,
      -this.view.panY + 60 + count * 20,
    ];
    try {
      await this.client.commit(this.projectId, this.snapshot.revision, {
        kind: "add_block",
        stage,
        position,
      });
      await this.refresh();
    } catch (err) {
      this.noticeError(err);
    }
  }

  private async saveDescription(blockId: string, text: string): Promise<void> {
    if (!this.projectId || !this.snapshot) return;
    try {
      await this.client.commit(this.projectId, this.snapshot.revision, {
        kind: "set_description",
        block_id: blockId,
        text,
      });
      await this.refresh();
    } catch (err) {
      this.noticeError(err);
    }
  }

  private async saveEvaluation(blockId: string, text: string): Promise<void> {
    if (!this.projectId || !this.snapshot) return;
    try {
      await this.client.createEvaluation(this.projectId, blockId, text, this.snapshot.revision);
      await this.refresh();
    } catch (err) {
      this.noticeError(err);
    }
  }

  private async transition(target: SnapshotWire["phase"]): Promise<void> {
    if (!this.projectId || !this.snapshot) return;
    try {
      await this.client.transitionPhase(this.projectId, target, this.snapshot.revision);
      await this.refresh();
    } catch (err) {
      this.noticeError(err);
    }
  }

  private async generatePersonas(): Promise<void> {
    if (!this.projectId) return;
    this.generateButton.disabled = true;
    try {
      const out = await this.client.generatePersonas(this.projectId);
      if (out.warning) this.notice("PersonaParseWarning", out.warning);
      await this.refresh();
    } catch (err) {
      this.noticeError(err);
      this.render();
    }
  }

  private async addPersona(): Promise<void> {
    if (!this.projectId || !this.snapshot) return;
    const description = this.personaInput.value.trim();
    if (!description) return;
    try {
      await this.client.createPersona(this.projectId, description, this.snapshot.revision);
      this.personaInput.value = "";
      await this.refresh();
    } catch (err) {
      this.noticeError(err);
    }
  }

  private async inquire(personaId: string): Promise<void> {
    if (!this.projectId || !this.snapshot) return;
    try {
      await this.client.simulateReaction(this.projectId, personaId);
      await this.refresh();
      const scene = renderScene(this.snapshot!, this.view);
      const figure = scene.rail.find((f) => f.personaId === personaId);
      if (figure) {
        const evaluator = canEvaluate(
          this.role(),
          this.snapshot!.phase,
          this.snapshot!.symmetric_evaluation,
        );
        this.showReaction(figure, evaluator);
      }
    } catch (err) {
      this.noticeError(err);
    }
  }

  // -- drag --------------------------------------------------------------

  private beginWidgetDrag(widget: SceneWidget, ev: PointerEvent, group: SVGGElement): void {
    if (!this.snapshot || !canEditPlan(this.role(), this.snapshot.phase)) return;
    const block = this.snapshot.graph.blocks.find((b) => b.block_id === widget.blockId);
    if (!block) return;
    ev.stopPropagation();
    this.dragger.begin(widget.blockId, [block.position[0], block.position[1]], ev.clientX, ev.clientY);
    this.dragGroup = group;
  }

  private onCanvasPointerDown(ev: PointerEvent): void {
    if (ev.target === this.svg) {
      this.panStart = {
        x: ev.clientX,
        y: ev.clientY,
        panX: this.view.panX,
        panY: this.view.panY,
      };
    }
  }

  private onCanvasPointerMove(ev: PointerEvent): void {
    if (this.dragger.active() && this.dragGroup) {
      const pos = this.dragger.positionAt(ev.clientX, ev.clientY, this.view.zoom);
      const x = (pos[0] + this.view.panX) * this.view.zoom;
      const y = (pos[1] + this.view.panY) * this.view.zoom;
      this.dragGroup.setAttribute("transform", `translate(${x},${y})`);
      return;
    }
    if (this.panStart) {
      const dx = (ev.clientX - this.panStart.x) / this.view.zoom;
      const dy = (ev.clientY - this.panStart.y) / this.view.zoom;
      this.view = {
        ...this.view,
        panX: this.panStart.panX + dx,
        panY: this.panStart.panY + dy,
      };
      this.render();
    }
  }

  private async onCanvasPointerUp(ev: PointerEvent): Promise<void> {
    this.panStart = null;
    const drop = this.dragger.drop(ev.clientX, ev.clientY, this.view.zoom);
    this.dragGroup = null;
    if (!drop || !this.projectId) return;
    try {
      const outcome = await commitDrop(
        {
          expectedRevision: () => this.snapshot?.revision ?? 0,
          refetch: async () => {
            await this.refresh();
            return this.snapshot?.revision ?? 0;
          },
          commitMove: (expectedRevision, blockId, position) =>
            this.client.moveBlock(this.projectId!, expectedRevision, blockId, position),
        },
        drop.blockId,
        drop.from,
        drop.to,
      );
      if (outcome !== "unchanged") await this.refresh();
    } catch (err) {
      this.noticeError(err);
      await this.refresh();
    }
  }

  private onWheel(ev: WheelEvent): void {
    ev.preventDefault();
    const factor = ev.deltaY < 0 ? 1.1 : 1 / 1.1;
    this.view = zoomTo(this.view, this.view.zoom * factor);
    this.render();
  }

  // -- notices -----------------------------------------------------------

  private noticeError(err: unknown): void {
    if (err instanceof ApiError) {
      this.notice(err.code, err.message);
    } else {
      this.notice("Error", String(err));
    }
  }

  private notice(code: string, message: string): void {
    const item = this.doc.createElement("div");
    item.className = "notice";
    item.setAttribute("data-code", code);
    const text = this.doc.createElement("span");
    text.textContent = `${code}: ${message}`;
    const dismiss = this.doc.createElement("button");
    dismiss.className = "notice-dismiss";
    dismiss.textContent = "Dismiss";
    dismiss.addEventListener("click", () => {
      item.remove();
    });
    item.append(text, dismiss);
    this.notices.append(item);
  }
}

function clear(node: Element): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}
