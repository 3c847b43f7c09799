import { isRevisionConflict } from "./api.js";

/**
 * Commit-on-drop with optimistic visuals. The block follows the pointer
 * locally; nothing is sent until the drop, which commits one move_block
 * against the revision we last saw. A stale revision gets exactly one
 * transparent refetch-and-retry; a second conflict propagates to the caller.
 */

export interface DropDeps {
  expectedRevision: () => number;
  /** Refresh the local snapshot from the server; resolves to its revision. */
  refetch: () => Promise<number>;
  commitMove: (
    expectedRevision: number,
    blockId: string,
    position: [number, number],
  ) => Promise<unknown>;
}

export type DropOutcome = "unchanged" | "committed" | "committed-after-retry";

export async function commitDrop(
  deps: DropDeps,
  blockId: string,
  from: [number, number],
  to: [number, number],
): Promise<DropOutcome> {
  if (from[0] === to[0] && from[1] === to[1]) return "unchanged";
  try {
    await deps.commitMove(deps.expectedRevision(), blockId, to);
    return "committed";
  } catch (err) {
    if (!isRevisionConflict(err)) throw err;
    const fresh = await deps.refetch();
    await deps.commitMove(fresh, blockId, to);
    return "committed-after-retry";
  }
}

export interface ActiveDrag {
  blockId: string;
  origin: [number, number];
  startScreenX: number;
  startScreenY: number;
}

/**
 * Tracks one pointer drag and converts screen deltas back to canvas
 * coordinates (screen distance shrinks by the zoom factor).
 */
export class DragController {
  private drag: ActiveDrag | null = null;

  begin(blockId: string, origin: [number, number], screenX: number, screenY: number): void {
    this.drag = { blockId, origin, startScreenX: screenX, startScreenY: screenY };
  }

  active(): boolean {
    return this.drag !== null;
  }

  /** Canvas position of the dragged block for the given pointer location. */
  positionAt(screenX: number, screenY: number, zoom: number): [number, number] {
    if (!this.drag) throw new Error("no drag in progress");
    return [
      this.drag.origin[0] + (screenX - this.drag.startScreenX) / zoom,
      this.drag.origin[1] + (screenY - this.drag.startScreenY) / zoom,
    ];
  }

  /** End the drag, reporting where the block started and where it landed. */
  drop(
    screenX: number,
    screenY: number,
    zoom: number,
  ): { blockId: string; from: [number, number]; to: [number, number] } | null {
    if (!this.drag) return null;
    const result = {
      blockId: this.drag.blockId,
      from: this.drag.origin,
      to: this.positionAt(screenX, screenY, zoom),
    };
    this.drag = null;
    return result;
  }

  cancel(): void {
    this.drag = null;
  }
}
