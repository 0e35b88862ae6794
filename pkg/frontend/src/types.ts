export type EventKind = "turn" | "verdict" | "alert" | "label_request" | "kb_updated";

export interface EventEnvelope {
  seq: number;
  kind: EventKind;
  body: Record<string, unknown>;
}

export type VerdictKind = "ethical" | "unethical" | "unknown";

export interface VerdictBody {
  verdict: VerdictKind;
  subject: string | null;
  reason: string;
  text: string;
  justification: string;
  caseId?: string;
}

export interface TurnBody {
  sessionId: string;
  question: string;
  answer: string;
  caseId: string;
}

export interface AlertBody {
  caseId: string;
  subject: string;
  justification: string;
}

export interface LabelRequestBody {
  caseId: string;
  facts: string[];
  candidates: string[];
}

export interface KbBody {
  ontology: string;
  codeRules: string;
  learnedRules: string;
  version: number;
}

export interface MessageResponse {
  answer: string;
  caseId: string;
  verdict: VerdictBody;
  pending: boolean;
}

export interface LabelResponse {
  verdict: VerdictBody;
  learnedRules: string;
  kbVersion: number;
}

export interface CaseRecord {
  caseId: string;
  sessionId: string;
  question: string;
  answer: string;
  facts: string[];
  status: string;
  verdict: VerdictBody | null;
  candidates: string[];
}
