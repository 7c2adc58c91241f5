// Canvas renderer: 3x3 grid, hand cursor, dwell progress ring, selection flash.

import { UiState } from "./state";

const GRID_LINE = "#445";
const LABEL_COLOR = "#dde";
const CELL_FLASH = "rgba(120, 220, 140, 0.5)";
const CELL_HOVER = "rgba(90, 120, 200, 0.18)";
const CURSOR_LEFT = "#ffb347";
const CURSOR_RIGHT = "#6ec6ff";
const RING_BG = "rgba(255,255,255,0.25)";

export function draw(
  ctx: CanvasRenderingContext2D,
  state: UiState,
  nowMs: number,
): void {
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#11131a";
  ctx.fillRect(0, 0, width, height);

  const cellW = width / 3;
  const cellH = height / 3;

  if (state.hoveredCell !== null) {
    const col = state.hoveredCell % 3;
    const row = Math.floor(state.hoveredCell / 3);
    ctx.fillStyle = CELL_HOVER;
    ctx.fillRect(col * cellW, row * cellH, cellW, cellH);
  }
  if (state.flashCell !== null && nowMs < state.flashUntilMs) {
    const col = state.flashCell % 3;
    const row = Math.floor(state.flashCell / 3);
    ctx.fillStyle = CELL_FLASH;
    ctx.fillRect(col * cellW, row * cellH, cellW, cellH);
  }

  ctx.strokeStyle = GRID_LINE;
  ctx.lineWidth = 2;
  for (let k = 1; k < 3; k++) {
    ctx.beginPath();
    ctx.moveTo(k * cellW, 0);
    ctx.lineTo(k * cellW, height);
    ctx.stroke();
    ctx.beginPath();
    ctx.moveTo(0, k * cellH);
    ctx.lineTo(width, k * cellH);
    ctx.stroke();
  }

  ctx.fillStyle = LABEL_COLOR;
  ctx.font = `${Math.round(cellH / 6)}px sans-serif`;
  ctx.textAlign = "center";
  ctx.textBaseline = "middle";
  state.labels.forEach((label, cell) => {
    const col = cell % 3;
    const row = Math.floor(cell / 3);
    ctx.fillText(label, (col + 0.5) * cellW, (row + 0.5) * cellH);
  });

  if (state.cursor) {
    // Server cursor coordinates are in the engine's screen space (1366x768);
    // scale into the canvas.
    const x = (state.cursor.x / 1366) * width;
    const y = (state.cursor.y / 768) * height;

    // Dwell ring around the hand cursor.
    const radius = Math.max(12, cellH / 12);
    ctx.strokeStyle = RING_BG;
    ctx.lineWidth = 4;
    ctx.beginPath();
    ctx.arc(x, y, radius, 0, 2 * Math.PI);
    ctx.stroke();
    if (state.dwellFraction > 0) {
      ctx.strokeStyle = "#7ae58a";
      ctx.beginPath();
      ctx.arc(x, y, radius, -Math.PI / 2,
        -Math.PI / 2 + 2 * Math.PI * state.dwellFraction);
      ctx.stroke();
    }

    ctx.fillStyle = state.primaryHand === "left" ? CURSOR_LEFT : CURSOR_RIGHT;
    ctx.beginPath();
    ctx.arc(x, y, 7, 0, 2 * Math.PI);
    ctx.fill();
  }
}

export function renderLog(table: HTMLTableSectionElement, state: UiState): void {
  // Append-only view: only rows beyond what is already rendered are added.
  for (let k = table.rows.length; k < state.log.length; k++) {
    const entry = state.log[k];
    const row = table.insertRow();
    row.insertCell().textContent = entry.label;
    row.insertCell().textContent = entry.channel;
    const status = row.insertCell();
    status.textContent = entry.reason ? `${entry.status} (${entry.reason})` : entry.status;
    status.className = `status-${entry.status}`;
  }
}
