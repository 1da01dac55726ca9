import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

import { computeOverlayElements } from "../src/overlay.js";
import { StateMessage, WirePrediction } from "../src/protocol.js";

const here = dirname(fileURLToPath(import.meta.url));
const fixtures = JSON.parse(readFileSync(join(here, "fixtures", "wire.json"), "utf-8"));

function stateMessages(group: string): StateMessage[] {
  return fixtures[group].filter((m: { type: string }) => m.type === "state");
}

describe("prediction overlay", () => {
  it("renders exactly 3 elements at the projected cells", () => {
    const filled = stateMessages("random").filter(
      (m) => m.prediction && !m.prediction.warming_up,
    );
    expect(filled.length).toBeGreaterThan(0);
    for (const message of filled) {
      const elements = computeOverlayElements(message.prediction);
      expect(elements).toHaveLength(3);
      elements.forEach((element, i) => {
        expect(element.cell).toEqual(message.prediction!.cells[i]);
        expect(element.step).toBe(i + 1);
      });
    }
  });

  it("uses strictly decreasing opacity and size across the steps", () => {
    const message = stateMessages("random").find(
      (m) => m.prediction && !m.prediction.warming_up,
    )!;
    const elements = computeOverlayElements(message.prediction);
    for (let i = 1; i < elements.length; i += 1) {
      expect(elements[i].opacity).toBeLessThan(elements[i - 1].opacity);
      expect(elements[i].scale).toBeLessThan(elements[i - 1].scale);
    }
  });

  it("draws moves as arrows and interact/wait as icons", () => {
    const prediction: WirePrediction = {
      warming_up: false,
      actions: [3, 4, 5],
      cells: [
        [2, 1],
        [2, 1],
        [2, 1],
      ],
      confidence: [0.9, 0.8, 0.7],
    };
    const [right, interact, wait] = computeOverlayElements(prediction);
    expect(right.kind).toBe("arrow");
    expect(right.glyph).toBe("right");
    expect(interact.kind).toBe("icon");
    expect(interact.glyph).toBe("interact");
    expect(wait.kind).toBe("icon");
    expect(wait.glyph).toBe("wait");
  });

  it("renders zero elements for the no-predictor group", () => {
    const messages = stateMessages("no_predictor");
    expect(messages.length).toBeGreaterThan(0);
    for (const message of messages) {
      expect(message.prediction).toBeNull();
      expect(computeOverlayElements(message.prediction)).toHaveLength(0);
    }
  });

  it("renders zero elements while the window warms up", () => {
    const warming = stateMessages("random").filter(
      (m) => m.prediction && m.prediction.warming_up,
    );
    expect(warming.length).toBeGreaterThan(0);
    for (const message of warming) {
      expect(computeOverlayElements(message.prediction)).toHaveLength(0);
    }
  });

  it("renders nothing for a null prediction", () => {
    expect(computeOverlayElements(null)).toHaveLength(0);
    expect(computeOverlayElements(undefined)).toHaveLength(0);
  });
});
