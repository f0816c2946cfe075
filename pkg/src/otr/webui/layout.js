/**
 * Flame-graph layout: pure geometry from frame event/ts ranges.
 *
 * Time moves right, the stack grows downwards: a frame's rect spans its
 * begin..end timestamps on the row equal to its call depth, children sit one
 * row below inside the parent's span, and matches become chevron glyphs at
 * their timestamp inside the owning frame's rect. Frames the stream never
 * closed extend to the end of the timeline and carry the truncated badge.
 */
export function layoutFlame(frames, roots, maxTs, viewport) {
    const rects = [];
    const chevrons = [];
    let rows = 0;
    const visible = (x0, x1) => x1 >= viewport.x0 && x0 <= viewport.x1;
    const place = (frameId, row) => {
        const frame = frames.get(frameId);
        if (frame === undefined)
            return;
        const x0 = frame.begin_ts;
        const x1 = frame.end_ts ?? maxTs;
        if (!visible(x0, x1))
            return; // children lie inside: clipped with it
        rows = Math.max(rows, row + 1);
        rects.push({
            frameId,
            row,
            x0,
            x1,
            label: frame.name,
            badge: frame.outcome_kind,
        });
        for (const match of frame.matches) {
            if (visible(match.ts, match.ts)) {
                chevrons.push({
                    frameId,
                    row,
                    x: match.ts,
                    value: match.value,
                    location: match.location,
                });
            }
        }
        for (const child of frame.children) {
            place(child, row + 1);
        }
    };
    for (const root of roots) {
        place(root, 0);
    }
    return { rects, chevrons, rows };
}
/** Innermost rect covering timeline position x on the given row, if any. */
export function hitTest(layout, x, row) {
    let hit = null;
    for (const rect of layout.rects) {
        if (rect.row === row && rect.x0 <= x && x <= rect.x1) {
            hit = rect;
        }
    }
    return hit;
}
export function zoom(viewport, focus, factor) {
    const x0 = focus - (focus - viewport.x0) * factor;
    const x1 = focus + (viewport.x1 - focus) * factor;
    return x1 - x0 < 1e-9 ? viewport : { x0, x1 };
}
export function pan(viewport, delta) {
    return { x0: viewport.x0 + delta, x1: viewport.x1 + delta };
}
