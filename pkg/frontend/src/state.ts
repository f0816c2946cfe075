/**
 * Explorer state and transitions.
 *
 * The client owns the cursor (the server is stateless); stepping sends the
 * current cursor plus an op and adopts whatever comes back. Stack entries,
 * argument strings, and outcomes are stored exactly as the server rendered
 * them -- the UI never re-renders values. At most one step request is in
 * flight; keys pressed meanwhile queue up in order.
 */

import { ApiClient, ApiError } from './api.js';
import type { FrameDetail, StackEntry, StepOp, Summary } from './api.js';
import type { Viewport } from './layout.js';

export interface ExplorerState {
  cursor: number;
  eventCount: number;
  truncatedCount: number;
  topFrames: number[];
  stack: StackEntry[];
  /** Verbatim body of the last /api/step response. */
  stackRaw: string | null;
  location: string | null;
  selected: number | null;
  selectedDetail: FrameDetail | null;
  notice: string | null;
  viewport: Viewport;
}

const KEY_BINDINGS: Record<string, StepOp> = {
  n: 'next',
  p: 'prev',
  o: 'over',
  b: 'back_over',
  u: 'out',
  U: 'back_out',
};

export class Explorer {
  readonly state: ExplorerState = {
    cursor: 0,
    eventCount: 0,
    truncatedCount: 0,
    topFrames: [],
    stack: [],
    stackRaw: null,
    location: null,
    selected: null,
    selectedDetail: null,
    notice: null,
    viewport: { x0: 0, x1: 1 },
  };

  frames = new Map<number, FrameDetail>();
  /** Timestamp of each event, for placing the cursor marker on the timeline. */
  eventTs: number[] = [];
  /** Raw step responses in the order they were applied (oldest first). */
  readonly stepLog: string[] = [];

  private queue: Promise<void> = Promise.resolve();
  private listeners: Array<() => void> = [];

  constructor(private readonly api: ApiClient) {}

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private changed(): void {
    for (const listener of this.listeners) listener();
  }

  async load(): Promise<void> {
    const summary: Summary = await this.api.summary();
    this.state.eventCount = summary.event_count;
    this.state.truncatedCount = summary.truncated_count;
    this.state.topFrames = summary.top_frames;
    this.frames = await this.api.allFrames(summary);
    const { events } = await this.api.events(0, summary.event_count);
    this.eventTs = events.map((e) => e.ts);
    this.state.viewport = { x0: this.minTs(), x1: this.maxTs() };
    this.changed();
  }

  minTs(): number {
    return this.eventTs.length > 0 ? this.eventTs[0] : 0;
  }

  maxTs(): number {
    return this.eventTs.length > 0 ? this.eventTs[this.eventTs.length - 1] : 1;
  }

  /** Timeline position of the cursor: the ts of the last replayed event. */
  cursorTs(): number {
    if (this.state.cursor === 0) return this.minTs();
    return this.eventTs[this.state.cursor - 1] ?? this.maxTs();
  }

  /** Queue one step; resolves after this step has been applied. */
  step(op: StepOp): Promise<void> {
    const run = this.queue.then(() => this.performStep(op));
    this.queue = run.catch(() => undefined); // keep the chain alive on errors
    return run;
  }

  private async performStep(op: StepOp): Promise<void> {
    try {
      const { raw, data } = await this.api.step(this.state.cursor, op);
      this.state.cursor = data.cursor;
      this.state.stack = data.stack;
      this.state.stackRaw = raw;
      this.state.location = data.location;
      this.state.notice = null;
      this.stepLog.push(raw);
    } catch (err) {
      if (err instanceof ApiError && err.status === 422) {
        this.state.notice = err.message; // no enclosing frame: cursor stands
      } else {
        this.state.notice = err instanceof Error ? err.message : String(err);
      }
    }
    this.changed();
  }

  /** Returns true when the key maps to a step op (and consumes it). */
  handleKey(key: string): boolean {
    const op = KEY_BINDINGS[key];
    if (op === undefined) return false;
    void this.step(op);
    return true;
  }

  async select(frameId: number): Promise<void> {
    try {
      const detail = await this.api.frame(frameId);
      this.state.selected = frameId;
      this.state.selectedDetail = detail;
      this.state.notice = null;
    } catch (err) {
      this.state.notice = err instanceof Error ? err.message : String(err);
    }
    this.changed();
  }

  deselect(): void {
    this.state.selected = null;
    this.state.selectedDetail = null;
    this.changed();
  }

  setViewport(viewport: Viewport): void {
    this.state.viewport = viewport;
    this.changed();
  }
}
