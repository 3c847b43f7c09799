import type { Phase, Role, SnapshotWire } from "./types.js";

/**
 * Client-side mirror of the server's authorization rules, used only to
 * decide what renders enabled. The server remains the authority; a stale
 * mirror costs one rejected request, never a forged acceptance.
 */

export function canEditPlan(role: Role, phase: Phase): boolean {
  return role === "Technical" && (phase === "Drafting" || phase === "Revision");
}

export function canEvaluate(role: Role, phase: Phase, symmetric: boolean): boolean {
  if (phase !== "Evaluation") return false;
  return role === "NonTechnical" || symmetric;
}

/**
 * Which catalog prompt a viewer sees when focusing a block: evaluators get
 * the checklist, as does anyone looking at a plan under evaluation; authors
 * drafting or revising get the worksheet.
 */
export function promptKindFor(role: Role, phase: Phase): "worksheet" | "checklist" {
  if (role === "NonTechnical" || phase === "Evaluation") return "checklist";
  return "worksheet";
}

export interface PhaseOption {
  target: Phase;
  enabled: boolean;
}

/** Transitions offered from the current phase, flagged per the viewer's role. */
export function phaseOptions(phase: Phase, role: Role): PhaseOption[] {
  const technical = role === "Technical";
  switch (phase) {
    case "Drafting":
      return [{ target: "Evaluation", enabled: technical }];
    case "Evaluation":
      return [
        { target: "Revision", enabled: true },
        { target: "Finalized", enabled: technical },
      ];
    case "Revision":
      return [
        { target: "Evaluation", enabled: technical },
        { target: "Finalized", enabled: technical },
      ];
    case "Finalized":
      return [];
  }
}

export function viewerRole(snapshot: SnapshotWire, subject: string): Role {
  const member = snapshot.members.find((m) => m.member_id === subject);
  return member ? member.role : "NonTechnical";
}
