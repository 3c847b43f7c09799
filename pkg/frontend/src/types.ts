/**
 * Wire shapes for protocol version 1 of the planning service API.
 * The client holds no domain state of its own; everything below is the
 * server's vocabulary, mirrored field for field.
 */

export type Phase = "Drafting" | "Evaluation" | "Revision" | "Finalized";
export type Role = "Technical" | "NonTechnical";

export interface MemberWire {
  member_id: string;
  display_name: string;
  role: Role;
}

export interface BlockWire {
  block_id: string;
  stage: string;
  position: [number, number];
  seq: number;
  description: string;
}

export interface LinkWire {
  from_block: string;
  to_block: string;
}

export interface GraphWire {
  next_seq: number;
  blocks: BlockWire[];
  links: LinkWire[];
}

export interface RatingWire {
  severity: number;
  likelihood: number;
  harm_type: string;
  specific_harm: string;
}

export interface EvaluationWire {
  eval_id: string;
  block_id: string;
  author: string;
  text: string;
  created_at: string;
  rating: RatingWire | null;
}

export interface PersonaWire {
  persona_id: string;
  description: string;
  source: string;
  created_at: string;
  exchange_id?: string;
}

export interface ReactionWire {
  reaction_id: string;
  persona_id: string;
  plan_revision: number;
  text: string;
  created_at: string;
}

export interface SnapshotWire {
  project_id: string;
  name: string;
  phase: Phase;
  revision: number;
  scenario_ref: string | null;
  symmetric_evaluation: boolean;
  members: MemberWire[];
  graph: GraphWire;
  evaluations: EvaluationWire[];
  personas: PersonaWire[];
  reactions: ReactionWire[];
}

export interface ProjectSummaryWire {
  project_id: string;
  name: string;
  phase: Phase;
  revision: number;
  scenario_ref: string | null;
  created_at: string;
}

export interface StagePromptsWire {
  stage: string;
  display_name: string;
  worksheet: string;
  checklist: string;
  origin: string;
}

export interface LoginWire {
  token: string;
  expires_at: number;
  subject: string;
}

export interface ErrorEnvelope {
  error: string;
  message: string;
  detail: Record<string, unknown>;
}
