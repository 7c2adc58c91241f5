import { describe, expect, it } from "vitest";

import { ServerEvent } from "../src/protocol";
import { applyEvent, FLASH_MS, initialState, Mailbox, setConnection } from "../src/state";

const cursor = (x: number, y: number, hand: "left" | "right" | null, cell: number | null): ServerEvent => ({
  v: 1, type: "cursor_out", i: 0, t: 0, x, y, hand, cell,
});

describe("applyEvent", () => {
  it("mirrors the last cursor event exactly", () => {
    let state = initialState();
    state = applyEvent(state, cursor(100, 50, "left", 0), 0);
    state = applyEvent(state, cursor(1138, 128, "right", 2), 0);
    expect(state.cursor).toEqual({ x: 1138, y: 128 });
    expect(state.primaryHand).toBe("right");
    expect(state.hoveredCell).toBe(2);
  });

  it("keeps the dwell fraction inside [0, 1]", () => {
    let state = initialState();
    for (const fraction of [-0.5, 0, 0.4, 1, 1.7]) {
      state = applyEvent(state, {
        v: 1, type: "dwell_out", i: 0, cell: 1, count: 0, threshold: 60, fraction,
      }, 0);
      expect(state.dwellFraction).toBeGreaterThanOrEqual(0);
      expect(state.dwellFraction).toBeLessThanOrEqual(1);
    }
  });

  it("selection sets a timed flash on the selected cell", () => {
    const state = applyEvent(initialState(), {
      v: 1, type: "selection_out", i: 59, t: 1966, cell: 2, label: "Fruits",
    }, 5000);
    expect(state.flashCell).toBe(2);
    expect(state.flashUntilMs).toBe(5000 + FLASH_MS);
  });

  it("dispatch events append to the log without touching earlier rows", () => {
    let state = initialState();
    state = applyEvent(state, {
      v: 1, type: "dispatch_out", label: "Fruits", channel: "sms", status: "queued",
    }, 0);
    const firstRow = state.log[0];
    state = applyEvent(state, {
      v: 1, type: "dispatch_out", label: "Fruits", channel: "sms", status: "sent",
    }, 0);
    state = applyEvent(state, {
      v: 1, type: "dispatch_out", label: "Water", status: "rejected", reason: "queue-full",
    }, 0);
    expect(state.log).toHaveLength(3);
    expect(state.log[0]).toBe(firstRow); // append-only
    expect(state.log[2].channel).toBe("-");
    expect(state.log[2].reason).toBe("queue-full");
  });

  it("errors surface without clobbering the rest of the view", () => {
    let state = applyEvent(initialState(), cursor(10, 10, "left", 0), 0);
    state = applyEvent(state, { v: 1, type: "error_out", reason: "bad frame" }, 0);
    expect(state.lastError).toBe("bad frame");
    expect(state.cursor).toEqual({ x: 10, y: 10 });
  });

  it("never mutates the previous state", () => {
    const before = initialState();
    const snapshot = JSON.stringify(before);
    applyEvent(before, cursor(1, 2, "left", 0), 0);
    applyEvent(before, { v: 1, type: "dispatch_out", label: "X", status: "sent" }, 0);
    expect(JSON.stringify(before)).toBe(snapshot);
  });
});

describe("connection status", () => {
  it("transitions are explicit", () => {
    let state = initialState();
    expect(state.connection).toBe("connecting");
    state = setConnection(state, "open");
    expect(state.connection).toBe("open");
    state = setConnection(state, "closed");
    expect(state.connection).toBe("closed");
  });
});

describe("Mailbox", () => {
  it("hands out the latest state exactly once", () => {
    const mailbox = new Mailbox(1);
    expect(mailbox.takeIfChanged()).toBe(1);
    expect(mailbox.takeIfChanged()).toBeNull();
    mailbox.put(2);
    mailbox.put(3); // renders only the latest
    expect(mailbox.takeIfChanged()).toBe(3);
    expect(mailbox.takeIfChanged()).toBeNull();
    expect(mailbox.peek()).toBe(3);
  });
});
