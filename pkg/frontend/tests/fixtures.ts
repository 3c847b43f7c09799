import type { BlockWire, LinkWire, SnapshotWire } from "../src/types.js";

export const STAGES = [
  "ProblemFormulation",
  "TaskDefinition",
  "DatasetConstruction",
  "ModelDefinition",
  "Training",
  "Testing",
  "Deployment",
  "Feedback",
] as const;

/** An eight-block chained plan snapshot, as the service would serve it. */
export function chainedSnapshot(): SnapshotWire {
  const blocks: BlockWire[] = STAGES.map((stage, i) => ({
    block_id: `b${i}`,
    stage,
    position: [i * 140, 80] as [number, number],
    seq: i + 1,
    description: `About ${stage}.`,
  }));
  const links: LinkWire[] = STAGES.slice(0, -1).map((_, i) => ({
    from_block: `b${i}`,
    to_block: `b${i + 1}`,
  }));
  return {
    project_id: "p1",
    name: "Fixture",
    phase: "Drafting",
    revision: 23,
    scenario_ref: null,
    symmetric_evaluation: false,
    members: [
      { member_id: "alice", display_name: "Alice", role: "Technical" },
      { member_id: "bob", display_name: "Bob", role: "NonTechnical" },
    ],
    graph: { next_seq: 9, blocks, links },
    evaluations: [],
    personas: [],
    reactions: [],
  };
}

export function emptySnapshot(): SnapshotWire {
  const snapshot = chainedSnapshot();
  return { ...snapshot, graph: { next_seq: 1, blocks: [], links: [] } };
}
