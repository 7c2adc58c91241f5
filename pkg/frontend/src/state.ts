// UI state is server truth only: every field mirrors the last received event.

import { DEFAULT_LABELS, Hand, ServerEvent } from "./protocol";

export type ConnectionStatus = "connecting" | "open" | "closed";
export type InputMode = "mouse_hand" | "replay";

export interface DispatchLogEntry {
  label: string;
  channel: string;
  status: string;
  reason: string | null;
}

export interface UiState {
  connection: ConnectionStatus;
  labels: string[];
  cursor: { x: number; y: number } | null;
  primaryHand: Hand | null;
  hoveredCell: number | null;
  dwellFraction: number;
  flashCell: number | null;
  flashUntilMs: number;
  log: DispatchLogEntry[]; // append-only
  inputMode: InputMode;
  lastError: string | null;
}

export const FLASH_MS = 900;

export function initialState(): UiState {
  return {
    connection: "connecting",
    labels: [...DEFAULT_LABELS],
    cursor: null,
    primaryHand: null,
    hoveredCell: null,
    dwellFraction: 0,
    flashCell: null,
    flashUntilMs: 0,
    log: [],
    inputMode: "mouse_hand",
    lastError: null,
  };
}

function clamp01(value: number): number {
  return value < 0 ? 0 : value > 1 ? 1 : value;
}

// Pure reducer: returns a new state, never mutates, never drops log rows.
export function applyEvent(state: UiState, event: ServerEvent, nowMs: number): UiState {
  switch (event.type) {
    case "cursor_out":
      return {
        ...state,
        cursor: { x: event.x, y: event.y },
        primaryHand: event.hand,
        hoveredCell: event.cell,
      };
    case "dwell_out":
      return { ...state, dwellFraction: clamp01(event.fraction) };
    case "selection_out":
      return {
        ...state,
        flashCell: event.cell,
        flashUntilMs: nowMs + FLASH_MS,
      };
    case "dispatch_out":
      return {
        ...state,
        log: [...state.log, {
          label: event.label,
          channel: event.channel ?? "-",
          status: event.status,
          reason: event.reason ?? null,
        }],
      };
    case "error_out":
      return { ...state, lastError: event.reason };
  }
}

export function setConnection(state: UiState, connection: ConnectionStatus): UiState {
  return { ...state, connection };
}

// Latest-state mailbox: message handling writes, the render loop reads.
// Rendering never lags behind more than one frame and never re-renders
// an unchanged state.
export class Mailbox<T> {
  private value: T;
  private dirty = true;

  constructor(initial: T) {
    this.value = initial;
  }

  put(value: T): void {
    this.value = value;
    this.dirty = true;
  }

  peek(): T {
    return this.value;
  }

  takeIfChanged(): T | null {
    if (!this.dirty) return null;
    this.dirty = false;
    return this.value;
  }
}
