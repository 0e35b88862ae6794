import type { EventEnvelope } from "./types.js";
import type { FetchFn } from "./api.js";

const RECONNECT_DELAY_MS = 250;

/** Reads the service's line-delimited event stream.  Keeps a cursor of
 * the last seq seen and resumes with ?since=cursor after a drop, so a
 * reconnect never replays or skips events. */
export class EventStream {
  cursor = 0;
  connects = 0;
  private stopped = false;
  private controller: AbortController | null = null;

  constructor(
    private baseUrl: string,
    private onEvent: (event: EventEnvelope) => void,
    private fetchFn: FetchFn = (...args) => fetch(...args),
  ) {}

  /** Runs until stop(); resolves only after the final disconnect. */
  async run(since = 0): Promise<void> {
    this.cursor = since;
    while (!this.stopped) {
      this.controller = new AbortController();
      this.connects++;
      try {
        await this.consumeOnce(this.controller.signal);
      } catch {
        // dropped or aborted; fall through to the reconnect check
      }
      if (this.stopped) break;
      await new Promise((resolve) => setTimeout(resolve, RECONNECT_DELAY_MS));
    }
  }

  stop(): void {
    this.stopped = true;
    this.controller?.abort();
  }

  private async consumeOnce(signal: AbortSignal): Promise<void> {
    const resp = await this.fetchFn(`${this.baseUrl}/api/events?since=${this.cursor}`, {
      signal,
    });
    if (!resp.ok || !resp.body) throw new Error(`event stream HTTP ${resp.status}`);
    const reader = resp.body.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    for (;;) {
      const { done, value } = await reader.read();
      if (done) break;
      buffer += decoder.decode(value, { stream: true });
      let newline;
      while ((newline = buffer.indexOf("\n")) >= 0) {
        const line = buffer.slice(0, newline).trim();
        buffer = buffer.slice(newline + 1);
        if (!line) continue; // keep-alive blank
        const envelope = JSON.parse(line) as EventEnvelope;
        this.cursor = Math.max(this.cursor, envelope.seq);
        this.onEvent(envelope);
      }
    }
  }
}
