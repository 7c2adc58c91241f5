// Wires the controls, the canvas, the session client and the frame sources.

import { connectSession, SessionClient } from "./client";
import {
  buildFrame,
  farHint,
  MouseHandSource,
  parseTraceText,
  pointerToImage,
  TraceReplaySource,
} from "./mousehand";
import {
  Channel,
  CHANNELS,
  configMessage,
  frameMessage,
  HandPreference,
  Proximity,
  SessionControls,
} from "./protocol";
import { applyEvent, initialState, Mailbox, setConnection, UiState } from "./state";
import { draw, renderLog } from "./render";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const canvas = $<HTMLCanvasElement>("grid-canvas");
const ctx = canvas.getContext("2d")!;
const banner = $<HTMLDivElement>("banner");
const handIndicator = $<HTMLSpanElement>("primary-hand");
const farHintEl = $<HTMLSpanElement>("far-hint");
const depthSlider = $<HTMLInputElement>("depth");
const depthValue = $<HTMLSpanElement>("depth-value");
const proximitySelect = $<HTMLSelectElement>("proximity");
const logBody = $<HTMLTableSectionElement>("log-body");
const errorLine = $<HTMLDivElement>("error-line");
const parkToggle = $<HTMLInputElement>("park-hand");
const traceFile = $<HTMLInputElement>("trace-file");
const replayButton = $<HTMLButtonElement>("replay-button");

const mailbox = new Mailbox<UiState>(initialState());
let client: SessionClient | null = null;
let pointer: { x: number; y: number } | null = null;
let replay: TraceReplaySource | null = null;

function readControls(): SessionControls {
  const channels = CHANNELS.filter(
    (channel) => $<HTMLInputElement>(`chan-${channel}`).checked,
  ) as Channel[];
  const hand = (document.querySelector(
    'input[name="hand"]:checked',
  ) as HTMLInputElement).value as HandPreference;
  return {
    channels,
    proximity: proximitySelect.value as Proximity,
    handPreference: hand,
  };
}

function pushConfig(): void {
  client?.send(configMessage(readControls()));
  updateFarHint();
}

function updateFarHint(): void {
  const show = farHint(Number(depthSlider.value),
    proximitySelect.value as Proximity);
  farHintEl.style.display = show ? "inline" : "none";
}

// --- session -----------------------------------------------------------

function connect(): void {
  client?.close();
  const url = $<HTMLInputElement>("server-url").value;
  client = connectSession(
    url,
    (event) => mailbox.put(applyEvent(mailbox.peek(), event, performance.now())),
    (status) => mailbox.put(setConnection(mailbox.peek(), status)),
    pushConfig,
  );
}

// --- input sources ------------------------------------------------------

canvas.addEventListener("pointermove", (event) => {
  const rect = canvas.getBoundingClientRect();
  pointer = pointerToImage(
    (event.clientX - rect.left) * (canvas.width / rect.width),
    (event.clientY - rect.top) * (canvas.height / rect.height),
    canvas.width, canvas.height,
  );
});
canvas.addEventListener("pointerleave", () => {
  pointer = null;
});

const mouseHand = new MouseHandSource({
  frameRate: 30,
  drivenHand: "right",
  readPointer: () => pointer,
  readDepth: () => Number(depthSlider.value),
  // A parked second hand at image center, nearer than the slider by 0.3 m,
  // for exercising nearness arbitration by eye.
  readParked: () => parkToggle.checked
    ? { x: 320, y: 240, z: Math.max(0.5, Number(depthSlider.value) - 0.3) }
    : null,
  send: (frame) => client?.send(frameMessage(frame)),
});

function setMode(mode: "mouse_hand" | "replay"): void {
  mailbox.put({ ...mailbox.peek(), inputMode: mode });
  if (mode === "mouse_hand") {
    replay?.stop();
    mouseHand.start();
  } else {
    mouseHand.stop();
  }
}

replayButton.addEventListener("click", async () => {
  const file = traceFile.files?.[0];
  if (!file) return;
  setMode("replay");
  replay?.stop();
  replay = new TraceReplaySource(
    parseTraceText(await file.text()),
    (frame) => client?.send(frameMessage(frame)),
    () => setMode("mouse_hand"),
  );
  replay.start();
});

// --- control strip ------------------------------------------------------

for (const channel of CHANNELS) {
  $<HTMLInputElement>(`chan-${channel}`).addEventListener("change", pushConfig);
}
proximitySelect.addEventListener("change", pushConfig);
for (const radio of document.querySelectorAll('input[name="hand"]')) {
  radio.addEventListener("change", pushConfig);
}
depthSlider.addEventListener("input", () => {
  depthValue.textContent = `${Number(depthSlider.value).toFixed(1)} m`;
  updateFarHint();
});
$<HTMLButtonElement>("connect-button").addEventListener("click", connect);

// --- render loop (decoupled from message arrival via the mailbox) --------

function renderFrame(): void {
  const state = mailbox.takeIfChanged();
  if (state) {
    draw(ctx, state, performance.now());
    renderLog(logBody, state);
    banner.textContent = state.connection === "open"
      ? "" : `connection ${state.connection}… retrying`;
    banner.style.display = state.connection === "open" ? "none" : "block";
    handIndicator.textContent = state.primaryHand ?? "none";
    errorLine.textContent = state.lastError ?? "";
  } else if (mailbox.peek().flashCell !== null) {
    draw(ctx, mailbox.peek(), performance.now()); // let the flash decay
  }
  requestAnimationFrame(renderFrame);
}

depthValue.textContent = `${Number(depthSlider.value).toFixed(1)} m`;
connect();
mouseHand.start();
requestAnimationFrame(renderFrame);
