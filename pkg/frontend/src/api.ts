import type {
  CaseRecord,
  KbBody,
  LabelResponse,
  MessageResponse,
  VerdictKind,
} from "./types.js";

export class ApiError extends Error {
  constructor(message: string, public statusCode: number) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchFn = typeof fetch;

/** The slice of the service API the console depends on; the store is
 * written against this interface so tests can substitute a stub. */
export interface EthichatApi {
  openSession(): Promise<string>;
  sendMessage(sessionId: string, text: string): Promise<MessageResponse>;
  listCases(status?: string): Promise<CaseRecord[]>;
  labelCase(caseId: string, label: VerdictKind, target: string): Promise<LabelResponse>;
  getKb(): Promise<KbBody>;
  addFact(fact: string): Promise<KbBody>;
  removeFact(fact: string): Promise<KbBody>;
}

export class ApiClient implements EthichatApi {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchFn = (...args) => fetch(...args),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const payload = await resp.json();
        detail = payload.error ?? payload.detail ?? detail;
      } catch {
        // non-JSON error body: keep the status text
      }
      throw new ApiError(detail, resp.status);
    }
    return (await resp.json()) as T;
  }

  async openSession(): Promise<string> {
    const body = await this.request<{ sessionId: string }>("POST", "/api/session");
    return body.sessionId;
  }

  sendMessage(sessionId: string, text: string): Promise<MessageResponse> {
    return this.request("POST", `/api/session/${sessionId}/message`, { text });
  }

  listCases(status?: string): Promise<CaseRecord[]> {
    const query = status ? `?status=${encodeURIComponent(status)}` : "";
    return this.request("GET", `/api/cases${query}`);
  }

  labelCase(caseId: string, label: VerdictKind, target: string): Promise<LabelResponse> {
    return this.request("POST", "/api/supervisor/label", { caseId, label, target });
  }

  getKb(): Promise<KbBody> {
    return this.request("GET", "/api/kb");
  }

  addFact(fact: string): Promise<KbBody> {
    return this.request("POST", "/api/kb/facts", { fact });
  }

  removeFact(fact: string): Promise<KbBody> {
    return this.request("DELETE", "/api/kb/facts", { fact });
  }
}
