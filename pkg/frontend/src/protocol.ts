// Wire protocol types and codecs. One JSON object per message, "v": 1.

export type Channel = "phone" | "email" | "sms" | "voice";
export type Hand = "left" | "right";
export type HandPreference = "left" | "right" | "auto_nearness" | "auto_activity";
export type Proximity = "near" | "far";

export const CHANNELS: Channel[] = ["phone", "email", "sms", "voice"];

// Default grid labels, row-major; must match the engine's defaults.
export const DEFAULT_LABELS = [
  "Doctor", "Family", "Fruits",
  "Nurse", "Emergency", "Food",
  "Bathroom", "Water", "Medicine",
];

export interface JointIn {
  id: string;
  x: number;
  y: number;
  z: number;
  tr: boolean;
}

export interface FrameIn {
  i: number;
  t: number;
  joints: JointIn[];
}

export interface CursorOut {
  v: number;
  type: "cursor_out";
  i: number;
  t: number;
  x: number;
  y: number;
  hand: Hand | null;
  cell: number | null;
}

export interface DwellOut {
  v: number;
  type: "dwell_out";
  i: number;
  cell: number | null;
  count: number;
  threshold: number;
  fraction: number;
}

export interface SelectionOut {
  v: number;
  type: "selection_out";
  i: number;
  t: number;
  cell: number;
  label: string;
}

export interface DispatchOut {
  v: number;
  type: "dispatch_out";
  label: string;
  status: "queued" | "sent" | "failed" | "rejected";
  channel?: Channel;
  reason?: string | null;
  id?: string;
  request_id?: string;
  attempts?: number;
  i?: number;
}

export interface ErrorOut {
  v: number;
  type: "error_out";
  reason: string;
}

export type ServerEvent = CursorOut | DwellOut | SelectionOut | DispatchOut | ErrorOut;

const EVENT_TYPES = new Set([
  "cursor_out", "dwell_out", "selection_out", "dispatch_out", "error_out",
]);

export function parseServerEvent(data: string): ServerEvent | null {
  let obj: unknown;
  try {
    obj = JSON.parse(data);
  } catch {
    return null;
  }
  if (typeof obj !== "object" || obj === null) return null;
  const type = (obj as { type?: unknown }).type;
  if (typeof type !== "string" || !EVENT_TYPES.has(type)) return null;
  return obj as ServerEvent;
}

export function frameMessage(frame: FrameIn): string {
  return JSON.stringify({ v: 1, type: "frame_in", frame });
}

// The control strip state, exactly what round-trips through config_in.
export interface SessionControls {
  channels: Channel[];
  proximity: Proximity;
  handPreference: HandPreference;
  dwellSeconds?: number;
}

export function configMessage(controls: SessionControls): string {
  const config: Record<string, unknown> = {
    channels: controls.channels,
    proximity: controls.proximity,
    hand_preference: controls.handPreference,
  };
  if (controls.dwellSeconds !== undefined) {
    config.dwell_seconds = controls.dwellSeconds;
  }
  return JSON.stringify({ v: 1, type: "config_in", config });
}
