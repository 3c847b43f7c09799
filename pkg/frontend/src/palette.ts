/** Stage order for the tray, matching the server's canonical sequence. */
export const STAGE_ORDER = [
  "ProblemFormulation",
  "TaskDefinition",
  "DatasetConstruction",
  "ModelDefinition",
  "Training",
  "Testing",
  "Deployment",
  "Feedback",
] as const;

export type StageName = (typeof STAGE_ORDER)[number];

/**
 * Fixed eight-entry palette, one color per stage. The assignment is part of
 * the visual contract and never varies at runtime.
 */
export const STAGE_COLORS: Record<StageName, string> = {
  ProblemFormulation: "#e05252",
  TaskDefinition: "#e88f3a",
  DatasetConstruction: "#d9b430",
  ModelDefinition: "#6aa84f",
  Training: "#3f9e9a",
  Testing: "#4a7fd4",
  Deployment: "#8b6fc4",
  Feedback: "#c95f9f",
};

const UNKNOWN_STAGE_COLOR = "#9aa0a6";

export function stageColor(stage: string): string {
  return STAGE_COLORS[stage as StageName] ?? UNKNOWN_STAGE_COLOR;
}

/** "DatasetConstruction" -> "Dataset Construction", mirroring the server. */
export function stageLabel(stage: string): string {
  return stage.replace(/([a-z])([A-Z])/g, "$1 $2");
}
