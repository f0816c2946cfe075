/**
 * Canvas flame rendering and DOM panel updates.
 *
 * Custom drawing rather than an embedded viewer: match chevrons and the
 * distinct tint for raised frames are bespoke, and the cursor marker has to
 * track time-travel positions.
 */
export const ROW_HEIGHT = 26;
export const TOP_PAD = 6;
const BADGE_FILL = {
    returned: '#4f8fd0',
    raised: '#d06a5f',
    truncated: '#9a9a9a',
};
const BADGE_EDGE = {
    returned: '#2f6aa8',
    raised: '#a83a2f',
    truncated: '#6f6f6f',
};
export function xScale(viewport, width) {
    const span = Math.max(viewport.x1 - viewport.x0, 1e-9);
    return (t) => ((t - viewport.x0) / span) * width;
}
export function drawFlame(canvas, layout, viewport, cursorTs, selected) {
    const ctx = canvas.getContext('2d');
    if (ctx === null)
        return;
    const { width, height } = canvas;
    ctx.clearRect(0, 0, width, height);
    const sx = xScale(viewport, width);
    for (const rect of layout.rects) {
        const x = sx(rect.x0);
        const w = Math.max(sx(rect.x1) - x, 3); // keep instant frames clickable
        const y = TOP_PAD + rect.row * ROW_HEIGHT;
        ctx.fillStyle = BADGE_FILL[rect.badge] ?? '#888';
        ctx.fillRect(x, y, w, ROW_HEIGHT - 4);
        ctx.strokeStyle = rect.frameId === selected ? '#ffd54a' : BADGE_EDGE[rect.badge] ?? '#555';
        ctx.lineWidth = rect.frameId === selected ? 2.5 : 1;
        ctx.strokeRect(x, y, w, ROW_HEIGHT - 4);
        if (w > 30) {
            ctx.fillStyle = '#ffffff';
            ctx.font = '12px system-ui, sans-serif';
            ctx.save();
            ctx.beginPath();
            ctx.rect(x, y, w, ROW_HEIGHT - 4);
            ctx.clip();
            ctx.fillText(rect.label, x + 4, y + 15);
            ctx.restore();
        }
    }
    ctx.fillStyle = '#fff2a8';
    for (const chevron of layout.chevrons) {
        const x = sx(chevron.x);
        const y = TOP_PAD + chevron.row * ROW_HEIGHT;
        ctx.beginPath();
        ctx.moveTo(x - 4, y + ROW_HEIGHT - 8);
        ctx.lineTo(x, y + ROW_HEIGHT - 16);
        ctx.lineTo(x + 4, y + ROW_HEIGHT - 8);
        ctx.closePath();
        ctx.fill();
    }
    const cx = sx(cursorTs);
    ctx.strokeStyle = '#222';
    ctx.lineWidth = 1.5;
    ctx.setLineDash([5, 3]);
    ctx.beginPath();
    ctx.moveTo(cx, 0);
    ctx.lineTo(cx, height);
    ctx.stroke();
    ctx.setLineDash([]);
}
export function rowAt(py) {
    return Math.floor((py - TOP_PAD) / ROW_HEIGHT);
}
function el(tag, className, text) {
    const node = document.createElement(tag);
    node.className = className;
    if (text !== undefined)
        node.textContent = text;
    return node;
}
export function renderStackPanel(container, explorer) {
    const { state } = explorer;
    container.replaceChildren();
    container.append(el('div', 'panel-title', `cursor ${state.cursor} / ${state.eventCount}`));
    if (state.location !== null) {
        container.append(el('div', 'location', state.location));
    }
    if (state.stack.length === 0) {
        container.append(el('div', 'empty', '(no open frames)'));
        return;
    }
    for (const entry of state.stack) {
        const row = el('div', 'stack-entry');
        row.append(el('div', 'fn', `${entry.function} ${entry.args.join(' ')}`));
        row.append(el('div', 'loc', entry.location));
        if (entry.closed_child !== null) {
            row.append(el('div', 'closed-child', `↳ ${entry.closed_child.function} ${entry.closed_child.outcome}`));
        }
        container.append(row);
    }
}
export function renderSelectionPanel(container, explorer) {
    const detail = explorer.state.selectedDetail;
    container.replaceChildren();
    if (detail === null) {
        container.append(el('div', 'empty', 'click a bar to inspect a call'));
        return;
    }
    container.append(el('div', 'panel-title', detail.name));
    container.append(el('div', 'location', detail.location));
    const badge = el('span', `badge badge-${detail.outcome_kind}`, detail.outcome_kind);
    container.append(badge);
    const args = el('div', 'kv');
    for (const [i, arg] of detail.args.entries()) {
        const row = el('div', 'kv-row');
        row.append(el('span', 'k', `arg ${i}`), el('span', 'v', arg));
        args.append(row);
    }
    container.append(args);
    const outcomeRow = el('div', 'kv-row');
    outcomeRow.append(el('span', 'k', 'outcome'), el('span', 'v', detail.outcome ?? '(truncated)'));
    container.append(outcomeRow);
    if (detail.matches.length > 0) {
        const matches = el('div', 'kv');
        for (const match of detail.matches) {
            const row = el('div', 'kv-row');
            row.append(el('span', 'k', 'match'), el('span', 'v', match.value));
            matches.append(row);
        }
        container.append(matches);
    }
}
export function renderNotice(container, notice) {
    container.textContent = notice ?? '';
    container.classList.toggle('visible', notice !== null);
}
