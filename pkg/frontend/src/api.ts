/**
 * Typed client for the trace service JSON API.
 *
 * The explorer displays only what the server rendered: every value shown in
 * the UI arrives here as a finished string and is passed through verbatim.
 * Step responses keep their raw body text alongside the parsed form so the
 * UI state can be compared byte-for-byte against the server's answer.
 */

export interface Summary {
  event_count: number;
  top_frames: number[];
  truncated_count: number;
}

export interface MatchInfo {
  site_id: number;
  event_idx: number;
  ts: number;
  location: string;
  value: string;
}

export type OutcomeKind = 'returned' | 'raised' | 'truncated';

export interface FrameDetail {
  id: number;
  fn_id: number;
  name: string;
  location: string;
  args: string[];
  outcome: string | null;
  outcome_kind: OutcomeKind;
  parent: number | null;
  children: number[];
  matches: MatchInfo[];
  begin_event: number;
  end_event: number | null;
  begin_ts: number;
  end_ts: number | null;
}

export interface ClosedChild {
  function: string;
  outcome: string;
}

export interface StackEntry {
  frame_id: number;
  function: string;
  args: string[];
  location: string;
  closed_child: ClosedChild | null;
}

export interface StepResponse {
  cursor: number;
  stack: StackEntry[];
  location: string | null;
}

export interface EventDescriptor {
  idx: number;
  kind: 'call' | 'return' | 'raise' | 'match';
  ts: number;
  name?: string;
  frame_id?: number;
  args?: string[];
  value?: string;
  site_id?: number;
  location?: string;
}

export type StepOp = 'next' | 'prev' | 'over' | 'back_over' | 'out' | 'back_out';

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

type FetchLike = (url: string) => Promise<Response>;

export class ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(readonly baseUrl: string = '', fetchFn?: FetchLike) {
    this.fetchFn = fetchFn ?? ((url) => fetch(url));
  }

  private async getRaw(path: string): Promise<string> {
    const resp = await this.fetchFn(this.baseUrl + path);
    const body = await resp.text();
    if (!resp.ok) {
      let message = `HTTP ${resp.status}`;
      try {
        message = (JSON.parse(body) as { error?: string }).error ?? message;
      } catch {
        /* non-JSON error body; keep the status text */
      }
      throw new ApiError(resp.status, message);
    }
    return body;
  }

  private async get<T>(path: string): Promise<T> {
    return JSON.parse(await this.getRaw(path)) as T;
  }

  summary(): Promise<Summary> {
    return this.get<Summary>('/api/summary');
  }

  frame(id: number): Promise<FrameDetail> {
    return this.get<FrameDetail>(`/api/frames/${id}`);
  }

  events(from: number, to: number): Promise<{ events: EventDescriptor[] }> {
    return this.get(`/api/events?from=${from}&to=${to}`);
  }

  /** Raw body included so callers can verify state against server bytes. */
  async step(at: number, op: StepOp): Promise<{ raw: string; data: StepResponse }> {
    const raw = await this.getRaw(`/api/step?at=${at}&op=${op}`);
    return { raw, data: JSON.parse(raw) as StepResponse };
  }

  search(fn: string): Promise<{ frames: number[] }> {
    return this.get(`/api/search?fn=${encodeURIComponent(fn)}`);
  }

  /** Fetch every frame reachable from the summary's top frames. */
  async allFrames(summary: Summary): Promise<Map<number, FrameDetail>> {
    const frames = new Map<number, FrameDetail>();
    const queue = [...summary.top_frames];
    while (queue.length > 0) {
      const batch = queue.splice(0, queue.length);
      const fetched = await Promise.all(batch.map((id) => this.frame(id)));
      for (const frame of fetched) {
        frames.set(frame.id, frame);
        for (const child of frame.children) {
          if (!frames.has(child)) queue.push(child);
        }
      }
    }
    return frames;
  }
}
