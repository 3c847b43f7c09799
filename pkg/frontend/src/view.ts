/**
 * Client-only view state. Pan and zoom are unbounded in position (the canvas
 * extends in every direction); zoom stays positive; a selection always names
 * an existing block or nothing.
 */

export type SidebarMode = "None" | "Worksheet" | "StageEvaluation" | "Persona";

export interface CanvasViewState {
  panX: number;
  panY: number;
  zoom: number;
  selected: string | null;
  sidebar: SidebarMode;
}

export const MIN_ZOOM = 0.1;
export const MAX_ZOOM = 8;

export function initialView(): CanvasViewState {
  return { panX: 0, panY: 0, zoom: 1, selected: null, sidebar: "None" };
}

export function panBy(view: CanvasViewState, dx: number, dy: number): CanvasViewState {
  return { ...view, panX: view.panX + dx, panY: view.panY + dy };
}

export function zoomTo(view: CanvasViewState, zoom: number): CanvasViewState {
  const clamped = Math.min(MAX_ZOOM, Math.max(MIN_ZOOM, zoom));
  return { ...view, zoom: Number.isFinite(clamped) ? clamped : view.zoom };
}

/**
 * Select a block, or clear the selection when the id is absent from the
 * given set of live block ids (e.g. the block was deleted under us).
 */
export function withSelection(
  view: CanvasViewState,
  blockId: string | null,
  liveBlockIds: ReadonlySet<string>,
): CanvasViewState {
  if (blockId !== null && liveBlockIds.has(blockId)) {
    return { ...view, selected: blockId };
  }
  return { ...view, selected: null };
}

export function withSidebar(view: CanvasViewState, sidebar: SidebarMode): CanvasViewState {
  return { ...view, sidebar };
}
