// Keyboard capture with per-tick coalescing: arrows move, space
// interacts, releasing everything sends nothing (the server defaults
// to wait).  The most recent keydown wins when several keys are held,
// and at most one action message is produced per server tick.

import { ACTIONS } from "./protocol.js";

const KEY_ACTIONS: Record<string, number> = {
  ArrowUp: ACTIONS.up,
  ArrowDown: ACTIONS.down,
  ArrowLeft: ACTIONS.left,
  ArrowRight: ACTIONS.right,
  " ": ACTIONS.interact,
  Space: ACTIONS.interact,
};

export class InputTracker {
  private order: string[] = []; // held keys, most recent last
  private tapped: string | null = null; // pressed and released within a tick

  keyDown(key: string): boolean {
    if (!(key in KEY_ACTIONS)) return false;
    this.order = this.order.filter((k) => k !== key);
    this.order.push(key);
    this.tapped = key;
    return true;
  }

  keyUp(key: string): void {
    this.order = this.order.filter((k) => k !== key);
  }

  /** The action to send for this tick, or null to stay silent.  Resets
   * the tap memory so a quick press-release still counts once. */
  actionForTick(): number | null {
    const key = this.order.length > 0 ? this.order[this.order.length - 1] : this.tapped;
    this.tapped = null;
    return key === null ? null : KEY_ACTIONS[key];
  }

  clear(): void {
    this.order = [];
    this.tapped = null;
  }
}

export function bindKeyboard(tracker: InputTracker, target: EventTarget = window): () => void {
  const down = (event: Event) => {
    if (tracker.keyDown((event as KeyboardEvent).key)) event.preventDefault();
  };
  const up = (event: Event) => tracker.keyUp((event as KeyboardEvent).key);
  target.addEventListener("keydown", down);
  target.addEventListener("keyup", up);
  return () => {
    target.removeEventListener("keydown", down);
    target.removeEventListener("keyup", up);
  };
}
