import { ApiError, type EthichatApi } from "./api.js";
import { parseGroundAtom } from "./atoms.js";
import type {
  AlertBody,
  EventEnvelope,
  KbBody,
  LabelRequestBody,
  TurnBody,
  VerdictBody,
  VerdictKind,
} from "./types.js";

export type BadgeKind = "ethical" | "unethical" | "pending" | "no facts";

export interface Badge {
  kind: BadgeKind;
  text: string;
  justification: string;
  alerted: boolean;
}

export interface TurnEntry {
  speaker: "client" | "agent";
  text: string;
  caseId?: string;
  badge?: Badge;
}

export interface PendingCase {
  caseId: string;
  facts: string[];
  candidates: string[];
}

export interface ViewState {
  sessionId: string | null;
  transcript: TurnEntry[];
  pendingCases: PendingCase[];
  kb: KbBody | null;
  eventCursor: number;
  lastLearnedRules: string;
  lastError: string | null;
}

function initialState(): ViewState {
  return {
    sessionId: null,
    transcript: [],
    pendingCases: [],
    kb: null,
    eventCursor: 0,
    lastLearnedRules: "",
    lastError: null,
  };
}

function badgeFor(verdict: VerdictBody, pending: boolean): Badge {
  const kind: BadgeKind =
    verdict.verdict === "unknown" ? (pending ? "pending" : "no facts") : verdict.verdict;
  return { kind, text: verdict.text, justification: verdict.justification, alerted: false };
}

/** Single source of truth for the console.  All state transitions run on
 * one thread of control: HTTP actions are fire-and-reconcile, and the
 * event stream is the authority for badges and the supervisor queue. */
export class ConsoleStore {
  state: ViewState = initialState();
  private listeners = new Set<() => void>();

  constructor(private api: EthichatApi) {}

  subscribe(listener: () => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private notify(): void {
    this.listeners.forEach((fn) => fn());
  }

  async openSession(): Promise<void> {
    this.state.sessionId = await this.api.openSession();
    this.state.kb = await this.api.getKb();
    this.notify();
  }

  /** Applies one stream event.  Events at or below the cursor have
   * already been rendered and are ignored (monotonicity invariant). */
  applyEvent(event: EventEnvelope): void {
    if (event.seq <= this.state.eventCursor) return;
    this.state.eventCursor = event.seq;
    switch (event.kind) {
      case "turn":
        this.applyTurn(event.body as unknown as TurnBody);
        break;
      case "verdict":
        this.applyVerdict(event.body as unknown as VerdictBody);
        break;
      case "alert": {
        const alert = event.body as unknown as AlertBody;
        const entry = this.agentTurn(alert.caseId);
        if (entry?.badge) entry.badge.alerted = true;
        break;
      }
      case "label_request": {
        const request = event.body as unknown as LabelRequestBody;
        if (!this.state.pendingCases.some((c) => c.caseId === request.caseId)) {
          this.state.pendingCases.push({
            caseId: request.caseId,
            facts: request.facts,
            candidates: request.candidates,
          });
        }
        {
          // the verdict event precedes the label request: upgrade the badge
          const entry = this.agentTurn(request.caseId);
          if (entry?.badge?.kind === "no facts") entry.badge.kind = "pending";
        }
        break;
      }
      case "kb_updated":
        this.state.kb = event.body as unknown as KbBody;
        break;
    }
    this.notify();
  }

  private agentTurn(caseId: string): TurnEntry | undefined {
    return this.state.transcript.find((t) => t.speaker === "agent" && t.caseId === caseId);
  }

  private applyTurn(turn: TurnBody): void {
    // caseId dedupe: the POST response may already have appended this turn
    if (this.agentTurn(turn.caseId)) return;
    this.state.transcript.push({ speaker: "client", text: turn.question });
    this.state.transcript.push({ speaker: "agent", text: turn.answer, caseId: turn.caseId });
  }

  private applyVerdict(verdict: VerdictBody): void {
    const caseId = verdict.caseId;
    if (!caseId) return;
    const stillPending = this.state.pendingCases.some((c) => c.caseId === caseId);
    const entry = this.agentTurn(caseId);
    if (entry) {
      const alerted = entry.badge?.alerted ?? false;
      entry.badge = badgeFor(verdict, stillPending && verdict.verdict === "unknown");
      entry.badge.alerted = alerted;
    }
    // external resolution: a decided verdict retires the queue entry
    if (verdict.verdict !== "unknown" && stillPending) {
      this.state.pendingCases = this.state.pendingCases.filter((c) => c.caseId !== caseId);
    }
  }

  async chatSend(text: string): Promise<void> {
    if (!this.state.sessionId) throw new Error("no open session");
    this.state.lastError = null;
    let response;
    try {
      response = await this.api.sendMessage(this.state.sessionId, text);
    } catch (err) {
      this.state.lastError = `send failed: ${(err as Error).message} — retry to resend`;
      this.notify();
      return;
    }
    // append eagerly; the matching turn event is deduped by caseId
    if (!this.agentTurn(response.caseId)) {
      this.state.transcript.push({ speaker: "client", text });
      this.state.transcript.push({
        speaker: "agent",
        text: response.answer,
        caseId: response.caseId,
        badge: badgeFor(response.verdict, response.pending),
      });
    }
    this.notify();
  }

  async labelCase(caseId: string, label: VerdictKind, target: string): Promise<void> {
    this.state.lastError = null;
    if (!target.trim()) {
      this.state.lastError = "select a target literal before labeling";
      this.notify();
      return;
    }
    try {
      const result = await this.api.labelCase(caseId, label, target);
      this.state.lastLearnedRules = result.learnedRules;
      this.state.pendingCases = this.state.pendingCases.filter((c) => c.caseId !== caseId);
      this.applyVerdict(result.verdict);
    } catch (err) {
      if (err instanceof ApiError && err.statusCode === 409) {
        this.state.lastError = `case ${caseId} was already labeled — refreshing the queue`;
        await this.refreshQueue();
      } else {
        this.state.lastError = `label failed: ${(err as Error).message}`;
      }
    }
    this.notify();
  }

  private async refreshQueue(): Promise<void> {
    const cases = await this.api.listCases("pending");
    this.state.pendingCases = cases.map((c) => ({
      caseId: c.caseId,
      facts: c.facts,
      candidates: c.candidates,
    }));
  }

  async editFact(fact: string, action: "add" | "remove"): Promise<void> {
    this.state.lastError = null;
    let canonical: string;
    try {
      canonical = parseGroundAtom(fact);
    } catch (err) {
      this.state.lastError = `not a ground atom: ${(err as Error).message}`;
      this.notify();
      return;
    }
    try {
      this.state.kb =
        action === "add"
          ? await this.api.addFact(canonical)
          : await this.api.removeFact(canonical);
    } catch (err) {
      this.state.lastError = `KB edit failed: ${(err as Error).message}`;
    }
    this.notify();
  }
}
