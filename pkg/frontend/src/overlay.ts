// Prediction overlay geometry.  Pure: the renderer draws exactly what
// this module computes, so tests can assert on the elements directly.

import { ACTIONS, WirePrediction } from "./protocol.js";

export interface OverlayElement {
  cell: [number, number];
  // moves render as direction arrows, interact/wait as icons
  kind: "arrow" | "icon";
  glyph: "up" | "down" | "left" | "right" | "interact" | "wait";
  opacity: number;
  scale: number;
  step: number; // 1-based prediction position
}

// Strictly decreasing across the three steps.
const OPACITIES = [0.9, 0.62, 0.38];
const SCALES = [0.92, 0.74, 0.56];

const GLYPHS: Record<number, OverlayElement["glyph"]> = {
  [ACTIONS.up]: "up",
  [ACTIONS.down]: "down",
  [ACTIONS.left]: "left",
  [ACTIONS.right]: "right",
  [ACTIONS.interact]: "interact",
  [ACTIONS.wait]: "wait",
};

export function computeOverlayElements(
  prediction: WirePrediction | null | undefined,
): OverlayElement[] {
  if (!prediction || prediction.warming_up || prediction.actions.length === 0) {
    return [];
  }
  const elements: OverlayElement[] = [];
  prediction.actions.forEach((action, i) => {
    const glyph = GLYPHS[action];
    if (glyph === undefined || i >= prediction.cells.length) return;
    elements.push({
      cell: prediction.cells[i],
      kind: action === ACTIONS.interact || action === ACTIONS.wait ? "icon" : "arrow",
      glyph,
      opacity: OPACITIES[Math.min(i, OPACITIES.length - 1)],
      scale: SCALES[Math.min(i, SCALES.length - 1)],
      step: i + 1,
    });
  });
  return elements;
}
