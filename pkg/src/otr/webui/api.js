/**
 * Typed client for the trace service JSON API.
 *
 * The explorer displays only what the server rendered: every value shown in
 * the UI arrives here as a finished string and is passed through verbatim.
 * Step responses keep their raw body text alongside the parsed form so the
 * UI state can be compared byte-for-byte against the server's answer.
 */
export class ApiError extends Error {
    constructor(status, message) {
        super(message);
        this.status = status;
    }
}
export class ApiClient {
    constructor(baseUrl = '', fetchFn) {
        this.baseUrl = baseUrl;
        this.fetchFn = fetchFn ?? ((url) => fetch(url));
    }
    async getRaw(path) {
        const resp = await this.fetchFn(this.baseUrl + path);
        const body = await resp.text();
        if (!resp.ok) {
            let message = `HTTP ${resp.status}`;
            try {
                message = JSON.parse(body).error ?? message;
            }
            catch {
                /* non-JSON error body; keep the status text */
            }
            throw new ApiError(resp.status, message);
        }
        return body;
    }
    async get(path) {
        return JSON.parse(await this.getRaw(path));
    }
    summary() {
        return this.get('/api/summary');
    }
    frame(id) {
        return this.get(`/api/frames/${id}`);
    }
    events(from, to) {
        return this.get(`/api/events?from=${from}&to=${to}`);
    }
    /** Raw body included so callers can verify state against server bytes. */
    async step(at, op) {
        const raw = await this.getRaw(`/api/step?at=${at}&op=${op}`);
        return { raw, data: JSON.parse(raw) };
    }
    search(fn) {
        return this.get(`/api/search?fn=${encodeURIComponent(fn)}`);
    }
    /** Fetch every frame reachable from the summary's top frames. */
    async allFrames(summary) {
        const frames = new Map();
        const queue = [...summary.top_frames];
        while (queue.length > 0) {
            const batch = queue.splice(0, queue.length);
            const fetched = await Promise.all(batch.map((id) => this.frame(id)));
            for (const frame of fetched) {
                frames.set(frame.id, frame);
                for (const child of frame.children) {
                    if (!frames.has(child))
                        queue.push(child);
                }
            }
        }
        return frames;
    }
}
