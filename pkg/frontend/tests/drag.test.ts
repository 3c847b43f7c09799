import { describe, expect, it } from "vitest";

import { ApiError } from "../src/api.js";
import { commitDrop, DragController } from "../src/drag.js";
import type { DropDeps } from "../src/drag.js";

function conflict(): ApiError {
  return new ApiError("RevisionConflict", "expected 3, actual 5", 409, {
    expected: 3,
    actual: 5,
  });
}

interface ScriptedDeps extends DropDeps {
  commits: Array<{ expectedRevision: number; blockId: string; position: [number, number] }>;
  refetches: number;
}

function scriptedDeps(failures: number, startRevision = 3): ScriptedDeps {
  let revision = startRevision;
  let remainingFailures = failures;
  const deps: ScriptedDeps = {
    commits: [],
    refetches: 0,
    expectedRevision: () => revision,
    refetch: async () => {
      deps.refetches += 1;
      revision += 2;
      return revision;
    },
    commitMove: async (expectedRevision, blockId, position) => {
      deps.commits.push({ expectedRevision, blockId, position });
      if (remainingFailures > 0) {
        remainingFailures -= 1;
        throw conflict();
      }
    },
  };
  return deps;
}

describe("commit-on-drop", () => {
  it("commits once when the revision is current", async () => {
    const deps = scriptedDeps(0);
    const outcome = await commitDrop(deps, "b3", [0, 0], [50, 60]);
    expect(outcome).toBe("committed");
    expect(deps.commits).toEqual([{ expectedRevision: 3, blockId: "b3", position: [50, 60] }]);
    expect(deps.refetches).toBe(0);
  });

  it("suppresses the commit entirely when the block did not move", async () => {
    const deps = scriptedDeps(0);
    const outcome = await commitDrop(deps, "b3", [50, 60], [50, 60]);
    expect(outcome).toBe("unchanged");
    expect(deps.commits).toHaveLength(0);
    expect(deps.refetches).toBe(0);
  });

  it("retries exactly once after a stale-revision conflict", async () => {
    const deps = scriptedDeps(1);
    const outcome = await commitDrop(deps, "b3", [0, 0], [50, 60]);
    expect(outcome).toBe("committed-after-retry");
    expect(deps.refetches).toBe(1);
    expect(deps.commits.map((c) => c.expectedRevision)).toEqual([3, 5]);
  });

  it("propagates a second conflict instead of retrying again", async () => {
    const deps = scriptedDeps(2);
    await expect(commitDrop(deps, "b3", [0, 0], [50, 60])).rejects.toMatchObject({
      code: "RevisionConflict",
    });
    expect(deps.refetches).toBe(1);
    expect(deps.commits).toHaveLength(2);
  });

  it("does not retry non-conflict failures", async () => {
    const deps = scriptedDeps(0);
    deps.commitMove = async () => {
      deps.commits.push({ expectedRevision: 0, blockId: "x", position: [0, 0] });
      throw new ApiError("ForbiddenRole", "not yours to move", 403);
    };
    await expect(commitDrop(deps, "b3", [0, 0], [50, 60])).rejects.toMatchObject({
      code: "ForbiddenRole",
    });
    expect(deps.refetches).toBe(0);
    expect(deps.commits).toHaveLength(1);
  });
});

describe("drag controller", () => {
  it("converts screen deltas to canvas deltas through the zoom factor", () => {
    const dragger = new DragController();
    dragger.begin("b1", [100, 40], 300, 200);
    expect(dragger.positionAt(340, 260, 2)).toEqual([120, 70]);
    const drop = dragger.drop(340, 260, 2)!;
    expect(drop.blockId).toBe("b1");
    expect(drop.from).toEqual([100, 40]);
    expect(drop.to).toEqual([120, 70]);
    expect(dragger.active()).toBe(false);
  });

  it("reports no drop when nothing was being dragged", () => {
    const dragger = new DragController();
    expect(dragger.drop(10, 10, 1)).toBeNull();
  });
});
