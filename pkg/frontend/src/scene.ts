import { stageColor, stageLabel } from "./palette.js";
import type { CanvasViewState } from "./view.js";
import type { ReactionWire, SnapshotWire } from "./types.js";

/**
 * Pure projection of (server snapshot, view state) onto drawable geometry.
 * No DOM, no network: the same inputs always yield the same scene, which is
 * what lets a reload mid-session reproduce the screen exactly.
 */

export const WIDGET_WIDTH = 150;
export const WIDGET_HEIGHT = 64;
const PREVIEW_LIMIT = 60;

export interface SceneWidget {
  blockId: string;
  stage: string;
  label: string;
  color: string;
  x: number;
  y: number;
  width: number;
  height: number;
  preview: string;
  selected: boolean;
}

export interface SceneEdge {
  fromBlock: string;
  toBlock: string;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export interface RailFigure {
  personaId: string;
  initial: string;
  description: string;
  newestReaction: string | null;
}

export interface Scene {
  widgets: SceneWidget[];
  edges: SceneEdge[];
  rail: RailFigure[];
}

function preview(description: string): string {
  const flat = description.replace(/\s+/g, " ").trim();
  if (flat.length <= PREVIEW_LIMIT) return flat;
  return flat.slice(0, PREVIEW_LIMIT - 3) + "...";
}

/** Newest reaction per persona; the snapshot lists reactions in commit order. */
function newestReactionFor(personaId: string, reactions: ReactionWire[]): string | null {
  for (let i = reactions.length - 1; i >= 0; i--) {
    if (reactions[i].persona_id === personaId) return reactions[i].text;
  }
  return null;
}

export function renderScene(snapshot: SnapshotWire, view: CanvasViewState): Scene {
  const { panX, panY, zoom } = view;
  const widgets: SceneWidget[] = [];
  const byId = new Map<string, SceneWidget>();

  for (const block of snapshot.graph.blocks) {
    const widget: SceneWidget = {
      blockId: block.block_id,
      stage: block.stage,
      label: stageLabel(block.stage),
      color: stageColor(block.stage),
      x: (block.position[0] + panX) * zoom,
      y: (block.position[1] + panY) * zoom,
      width: WIDGET_WIDTH * zoom,
      height: WIDGET_HEIGHT * zoom,
      preview: preview(block.description),
      selected: view.selected === block.block_id,
    };
    widgets.push(widget);
    byId.set(widget.blockId, widget);
  }

  const edges: SceneEdge[] = [];
  for (const link of snapshot.graph.links) {
    const from = byId.get(link.from_block);
    const to = byId.get(link.to_block);
    if (!from || !to) continue;
    edges.push({
      fromBlock: from.blockId,
      toBlock: to.blockId,
      x1: from.x + from.width,
      y1: from.y + from.height / 2,
      x2: to.x,
      y2: to.y + to.height / 2,
    });
  }

  const rail: RailFigure[] = snapshot.personas.map((persona) => ({
    personaId: persona.persona_id,
    initial: (persona.description.trim()[0] ?? "?").toUpperCase(),
    description: persona.description,
    newestReaction: newestReactionFor(persona.persona_id, snapshot.reactions),
  }));

  return { widgets, edges, rail };
}
