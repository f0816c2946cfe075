import { ApiClient } from './api.js';
import { hitTest, layoutFlame, pan, zoom } from './layout.js';
import {
  drawFlame,
  renderNotice,
  renderSelectionPanel,
  renderStackPanel,
  rowAt,
  xScale,
} from './render.js';
import { Explorer } from './state.js';

const canvas = document.getElementById('flame') as HTMLCanvasElement;
const stackPanel = document.getElementById('stack') as HTMLElement;
const selectionPanel = document.getElementById('selection') as HTMLElement;
const noticeBar = document.getElementById('notice') as HTMLElement;

const explorer = new Explorer(new ApiClient(''));

function currentLayout() {
  return layoutFlame(
    explorer.frames,
    explorer.state.topFrames,
    explorer.maxTs(),
    explorer.state.viewport,
  );
}

function timelineX(px: number): number {
  const { viewport } = explorer.state;
  return viewport.x0 + (px / canvas.width) * (viewport.x1 - viewport.x0);
}

function redraw(): void {
  const parent = canvas.parentElement;
  if (parent !== null) {
    canvas.width = parent.clientWidth;
    canvas.height = parent.clientHeight;
  }
  drawFlame(
    canvas,
    currentLayout(),
    explorer.state.viewport,
    explorer.cursorTs(),
    explorer.state.selected,
  );
  renderStackPanel(stackPanel, explorer);
  renderSelectionPanel(selectionPanel, explorer);
  renderNotice(noticeBar, explorer.state.notice);
}

explorer.onChange(redraw);

canvas.addEventListener('click', (ev) => {
  const rect = hitTest(currentLayout(), timelineX(ev.offsetX), rowAt(ev.offsetY));
  if (rect !== null) {
    void explorer.select(rect.frameId);
  } else {
    explorer.deselect();
  }
});

canvas.addEventListener('wheel', (ev) => {
  ev.preventDefault();
  const factor = ev.deltaY > 0 ? 1.2 : 1 / 1.2;
  explorer.setViewport(zoom(explorer.state.viewport, timelineX(ev.offsetX), factor));
});

let dragFrom: number | null = null;
canvas.addEventListener('mousedown', (ev) => {
  dragFrom = ev.offsetX;
});
window.addEventListener('mouseup', () => {
  dragFrom = null;
});
canvas.addEventListener('mousemove', (ev) => {
  if (dragFrom === null || ev.buttons === 0) return;
  const { viewport } = explorer.state;
  const scale = (viewport.x1 - viewport.x0) / canvas.width;
  explorer.setViewport(pan(viewport, (dragFrom - ev.offsetX) * scale));
  dragFrom = ev.offsetX;
});

window.addEventListener('keydown', (ev) => {
  if (ev.ctrlKey || ev.metaKey || ev.altKey) return;
  if (explorer.handleKey(ev.key)) ev.preventDefault();
});

for (const button of document.querySelectorAll<HTMLButtonElement>('button[data-op]')) {
  button.addEventListener('click', () => {
    void explorer.step(button.dataset.op as never);
  });
}

window.addEventListener('resize', redraw);

void explorer.load().catch((err) => {
  renderNotice(noticeBar, `failed to load trace: ${err}`);
});

// handy for the browser console
(window as unknown as { explorer: Explorer; xScale: typeof xScale }).explorer = explorer;
(window as unknown as { explorer: Explorer; xScale: typeof xScale }).xScale = xScale;
