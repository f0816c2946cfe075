/**
 * Explorer state and transitions.
 *
 * The client owns the cursor (the server is stateless); stepping sends the
 * current cursor plus an op and adopts whatever comes back. Stack entries,
 * argument strings, and outcomes are stored exactly as the server rendered
 * them -- the UI never re-renders values. At most one step request is in
 * flight; keys pressed meanwhile queue up in order.
 */
import { ApiError } from './api.js';
const KEY_BINDINGS = {
    n: 'next',
    p: 'prev',
    o: 'over',
    b: 'back_over',
    u: 'out',
    U: 'back_out',
};
export class Explorer {
    constructor(api) {
        this.api = api;
        this.state = {
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
        this.frames = new Map();
        /** Timestamp of each event, for placing the cursor marker on the timeline. */
        this.eventTs = [];
        /** Raw step responses in the order they were applied (oldest first). */
        this.stepLog = [];
        this.queue = Promise.resolve();
        this.listeners = [];
    }
    onChange(listener) {
        this.listeners.push(listener);
    }
    changed() {
        for (const listener of this.listeners)
            listener();
    }
    async load() {
        const summary = await this.api.summary();
        this.state.eventCount = summary.event_count;
        this.state.truncatedCount = summary.truncated_count;
        this.state.topFrames = summary.top_frames;
        this.frames = await this.api.allFrames(summary);
        const { events } = await this.api.events(0, summary.event_count);
        this.eventTs = events.map((e) => e.ts);
        this.state.viewport = { x0: this.minTs(), x1: this.maxTs() };
        this.changed();
    }
    minTs() {
        return this.eventTs.length > 0 ? this.eventTs[0] : 0;
    }
    maxTs() {
        return this.eventTs.length > 0 ? this.eventTs[this.eventTs.length - 1] : 1;
    }
    /** Timeline position of the cursor: the ts of the last replayed event. */
    cursorTs() {
        if (this.state.cursor === 0)
            return this.minTs();
        return this.eventTs[this.state.cursor - 1] ?? this.maxTs();
    }
    /** Queue one step; resolves after this step has been applied. */
    step(op) {
        const run = this.queue.then(() => this.performStep(op));
        this.queue = run.catch(() => undefined); // keep the chain alive on errors
        return run;
    }
    async performStep(op) {
        try {
            const { raw, data } = await this.api.step(this.state.cursor, op);
            this.state.cursor = data.cursor;
            this.state.stack = data.stack;
            this.state.stackRaw = raw;
            this.state.location = data.location;
            this.state.notice = null;
            this.stepLog.push(raw);
        }
        catch (err) {
            if (err instanceof ApiError && err.status === 422) {
                this.state.notice = err.message; // no enclosing frame: cursor stands
            }
            else {
                this.state.notice = err instanceof Error ? err.message : String(err);
            }
        }
        this.changed();
    }
    /** Returns true when the key maps to a step op (and consumes it). */
    handleKey(key) {
        const op = KEY_BINDINGS[key];
        if (op === undefined)
            return false;
        void this.step(op);
        return true;
    }
    async select(frameId) {
        try {
            const detail = await this.api.frame(frameId);
            this.state.selected = frameId;
            this.state.selectedDetail = detail;
            this.state.notice = null;
        }
        catch (err) {
            this.state.notice = err instanceof Error ? err.message : String(err);
        }
        this.changed();
    }
    deselect() {
        this.state.selected = null;
        this.state.selectedDetail = null;
        this.changed();
    }
    setViewport(viewport) {
        this.state.viewport = viewport;
        this.changed();
    }
}
