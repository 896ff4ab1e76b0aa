/**
 * Typed client for the GSB judging service.
 * The server owns all state; the client never learns which side is which system.
 */

export interface QueueItem {
  done: false;
  item_id: string;
  prompt: string;
  left_image_url: string;
  right_image_url: string;
  dimension: string;
  /** 1-based position in this evaluator's personal queue. */
  position: number;
  total: number;
}

export interface QueueDone {
  done: true;
  judged: number;
  total: number;
}

export type QueueResponse = QueueItem | QueueDone;

export type Choice = "left" | "right" | "same";

export interface DimensionSummary {
  good: number;
  same: number;
  bad: number;
  excluded: number;
  win_rate: number | null;
}

export interface SessionSummary {
  session_id: string;
  dimensions: Record<string, DimensionSummary>;
  incomplete_items: number;
}

export class DuplicateJudgmentError extends Error {}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    readonly sessionId: string,
  ) {}

  private url(path: string, params?: Record<string, string>): string {
    const u = new URL(`${this.baseUrl}${path}`);
    for (const [k, v] of Object.entries(params ?? {})) u.searchParams.set(k, v);
    return u.toString();
  }

  async fetchQueue(evaluator: string, dimension: string, offset = 0): Promise<QueueResponse> {
    const res = await fetch(
      this.url(`/v1/sessions/${this.sessionId}/queue`, {
        evaluator,
        dimension,
        offset: String(offset),
      }),
    );
    if (!res.ok) throw new Error(`queue request failed: ${res.status}`);
    return (await res.json()) as QueueResponse;
  }

  async submitJudgment(evaluator: string, itemId: string, dimension: string, choice: Choice): Promise<void> {
    const res = await fetch(this.url(`/v1/sessions/${this.sessionId}/judgments`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ evaluator, item_id: itemId, dimension, choice }),
    });
    if (res.status === 409) throw new DuplicateJudgmentError(`duplicate judgment for ${itemId}`);
    if (!res.ok) throw new Error(`judgment rejected: ${res.status}`);
  }

  async fetchSummary(allowPartial = false): Promise<SessionSummary> {
    const params = allowPartial ? { allow_partial: "true" } : undefined;
    const res = await fetch(this.url(`/v1/sessions/${this.sessionId}/summary`, params));
    if (!res.ok) throw new Error(`summary unavailable: ${res.status}`);
    return (await res.json()) as SessionSummary;
  }
}
