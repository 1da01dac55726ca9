import { describe, expect, it } from "vitest";

import { InputTracker } from "../src/input.js";
import { ACTIONS } from "../src/protocol.js";

describe("keyboard input", () => {
  it("sends one action per tick while a key is held", () => {
    const tracker = new InputTracker();
    tracker.keyDown("ArrowRight");
    const sent = [tracker.actionForTick(), tracker.actionForTick(), tracker.actionForTick()];
    expect(sent).toEqual([ACTIONS.right, ACTIONS.right, ACTIONS.right]);
  });

  it("latest keydown wins under simultaneous keys", () => {
    const tracker = new InputTracker();
    tracker.keyDown("ArrowRight");
    tracker.keyDown("ArrowUp");
    expect(tracker.actionForTick()).toBe(ACTIONS.up);
    tracker.keyUp("ArrowUp");
    expect(tracker.actionForTick()).toBe(ACTIONS.right);
  });

  it("stays silent with no key (server defaults to wait)", () => {
    const tracker = new InputTracker();
    expect(tracker.actionForTick()).toBeNull();
  });

  it("counts a quick press-release once", () => {
    const tracker = new InputTracker();
    tracker.keyDown(" ");
    tracker.keyUp(" ");
    expect(tracker.actionForTick()).toBe(ACTIONS.interact);
    expect(tracker.actionForTick()).toBeNull();
  });

  it("ignores unmapped keys", () => {
    const tracker = new InputTracker();
    expect(tracker.keyDown("q")).toBe(false);
    expect(tracker.actionForTick()).toBeNull();
  });
});
