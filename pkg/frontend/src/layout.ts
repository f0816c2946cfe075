/**
 * Flame-graph layout: pure geometry from frame event/ts ranges.
 *
 * Time moves right, the stack grows downwards: a frame's rect spans its
 * begin..end timestamps on the row equal to its call depth, children sit one
 * row below inside the parent's span, and matches become chevron glyphs at
 * their timestamp inside the owning frame's rect. Frames the stream never
 * closed extend to the end of the timeline and carry the truncated badge.
 */

import type { FrameDetail, OutcomeKind } from './api.js';

export interface FlameRect {
  frameId: number;
  row: number;
  x0: number;
  x1: number;
  label: string;
  badge: OutcomeKind;
}

export interface Chevron {
  frameId: number;
  row: number;
  x: number;
  value: string;
  location: string;
}

/** Visible timeline range, in the same units as frame timestamps. */
export interface Viewport {
  x0: number;
  x1: number;
}

export interface FlameLayout {
  rects: FlameRect[];
  chevrons: Chevron[];
  rows: number;
}

export function layoutFlame(
  frames: Map<number, FrameDetail>,
  roots: number[],
  maxTs: number,
  viewport: Viewport,
): FlameLayout {
  const rects: FlameRect[] = [];
  const chevrons: Chevron[] = [];
  let rows = 0;

  const visible = (x0: number, x1: number) => x1 >= viewport.x0 && x0 <= viewport.x1;

  const place = (frameId: number, row: number): void => {
    const frame = frames.get(frameId);
    if (frame === undefined) return;
    const x0 = frame.begin_ts;
    const x1 = frame.end_ts ?? maxTs;
    if (!visible(x0, x1)) return; // children lie inside: clipped with it
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
export function hitTest(layout: FlameLayout, x: number, row: number): FlameRect | null {
  let hit: FlameRect | null = null;
  for (const rect of layout.rects) {
    if (rect.row === row && rect.x0 <= x && x <= rect.x1) {
      hit = rect;
    }
  }
  return hit;
}

export function zoom(viewport: Viewport, focus: number, factor: number): Viewport {
  const x0 = focus - (focus - viewport.x0) * factor;
  const x1 = focus + (viewport.x1 - focus) * factor;
  return x1 - x0 < 1e-9 ? viewport : { x0, x1 };
}

export function pan(viewport: Viewport, delta: number): Viewport {
  return { x0: viewport.x0 + delta, x1: viewport.x1 + delta };
}
