// Mouse-as-virtual-hand: pointer position letterboxed into the 640x480 image
// plane, depth from a slider, emitted as frame_in at the configured rate.

import { FrameIn, JointIn } from "./protocol";

export const IMAGE_W = 640;
export const IMAGE_H = 480;

export interface Letterbox {
  scale: number;
  offsetX: number;
  offsetY: number;
}

// Largest centered 4:3 region that fits the canvas.
export function computeLetterbox(canvasW: number, canvasH: number): Letterbox {
  const scale = Math.min(canvasW / IMAGE_W, canvasH / IMAGE_H);
  return {
    scale,
    offsetX: (canvasW - IMAGE_W * scale) / 2,
    offsetY: (canvasH - IMAGE_H * scale) / 2,
  };
}

export function pointerToImage(
  px: number, py: number, canvasW: number, canvasH: number,
): { x: number; y: number } {
  const box = computeLetterbox(canvasW, canvasH);
  const x = (px - box.offsetX) / box.scale;
  const y = (py - box.offsetY) / box.scale;
  return {
    x: Math.min(Math.max(x, 0), IMAGE_W - 1),
    y: Math.min(Math.max(y, 0), IMAGE_H - 1),
  };
}

// The paper's guidance: beyond 3 m the FAR proximity mode should be active.
export const FAR_DISTANCE_M = 3.0;

export function farHint(depthM: number, proximity: "near" | "far"): boolean {
  return proximity === "near" && depthM > FAR_DISTANCE_M;
}

export interface ParkedHand {
  x: number;
  y: number;
  z: number;
}

export interface MouseHandOptions {
  frameRate: number;
  drivenHand: "left" | "right";
  readPointer: () => { x: number; y: number } | null; // image coords, or null
  readDepth: () => number;
  readParked: () => ParkedHand | null; // optional second hand for arbitration
  send: (frame: FrameIn) => void;
}

export function buildFrame(
  index: number, tMs: number, options: MouseHandOptions,
): FrameIn {
  const joints: JointIn[] = [];
  const pointer = options.readPointer();
  if (pointer !== null) {
    joints.push({
      id: options.drivenHand === "left" ? "left_hand" : "right_hand",
      x: pointer.x, y: pointer.y, z: options.readDepth(), tr: true,
    });
  }
  const parked = options.readParked();
  if (parked !== null) {
    joints.push({
      id: options.drivenHand === "left" ? "right_hand" : "left_hand",
      x: parked.x, y: parked.y, z: parked.z, tr: true,
    });
  }
  return { i: index, t: tMs, joints };
}

export class MouseHandSource {
  private timer: ReturnType<typeof setInterval> | null = null;
  private index = 0;

  constructor(private options: MouseHandOptions) {}

  start(): void {
    if (this.timer !== null) return;
    const periodMs = 1000 / this.options.frameRate;
    this.timer = setInterval(() => {
      this.options.send(buildFrame(this.index, this.index * periodMs, this.options));
      this.index += 1;
    }, periodMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}

// Replay mode: a recorded trace file played back with its own timestamps.
export function parseTraceText(text: string): FrameIn[] {
  const frames: FrameIn[] = [];
  for (const line of text.split("\n")) {
    const trimmed = line.trim();
    if (!trimmed) continue;
    const obj = JSON.parse(trimmed) as FrameIn;
    if (typeof obj.i !== "number" || typeof obj.t !== "number"
        || !Array.isArray(obj.joints)) {
      throw new Error(`bad trace record: ${trimmed.slice(0, 60)}`);
    }
    frames.push(obj);
  }
  return frames;
}

export class TraceReplaySource {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private position = 0;

  constructor(
    private frames: FrameIn[],
    private send: (frame: FrameIn) => void,
    private onDone: () => void,
  ) {}

  start(): void {
    this.position = 0;
    this.step();
  }

  private step(): void {
    if (this.position >= this.frames.length) {
      this.timer = null;
      this.onDone();
      return;
    }
    const frame = this.frames[this.position];
    this.send(frame);
    this.position += 1;
    if (this.position < this.frames.length) {
      const delay = Math.max(0, this.frames[this.position].t - frame.t);
      this.timer = setTimeout(() => this.step(), delay);
    } else {
      this.timer = null;
      this.onDone();
    }
  }

  stop(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }
}
