// Canvas renderer.  Pure view: it draws only what the last server
// message said; nothing here feeds back into the messages we send.

import { computeOverlayElements, OverlayElement } from "./overlay.js";
import { EpisodeStartMessage, StateMessage } from "./protocol.js";

const TILE_COLORS: Record<string, string> = {
  ".": "#f3ead8",
  X: "#b9a488",
  O: "#e7c25e",
  D: "#cfd8dc",
  P: "#6d4c41",
  S: "#8bc34a",
};

const TILE_LABELS: Record<string, string> = { O: "O", D: "D", P: "P", S: "S" };

const HOLD_COLORS: Record<string, string> = {
  onion: "#e7aa22",
  dish: "#eceff1",
  soup: "#d84315",
};

const ORIENT_VECTORS: Record<string, [number, number]> = {
  N: [0, -1],
  S: [0, 1],
  E: [1, 0],
  W: [-1, 0],
};

export class GameView {
  private cell = 48;
  private layout: EpisodeStartMessage["layout"] | null = null;

  constructor(private canvas: HTMLCanvasElement) {}

  setLayout(layout: EpisodeStartMessage["layout"]): void {
    this.layout = layout;
    this.canvas.width = layout.width * this.cell;
    this.canvas.height = layout.height * this.cell + 28;
  }

  render(state: StateMessage): void {
    if (!this.layout) return;
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const c = this.cell;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);

    this.layout.tiles.forEach((row, y) => {
      [...row].forEach((tile, x) => {
        ctx.fillStyle = TILE_COLORS[tile] ?? "#999";
        ctx.fillRect(x * c, y * c, c, c);
        ctx.strokeStyle = "rgba(0,0,0,0.12)";
        ctx.strokeRect(x * c, y * c, c, c);
        const label = TILE_LABELS[tile];
        if (label) {
          ctx.fillStyle = "rgba(0,0,0,0.55)";
          ctx.font = `${c * 0.4}px sans-serif`;
          ctx.textAlign = "center";
          ctx.textBaseline = "middle";
          ctx.fillText(label, x * c + c / 2, y * c + c / 2);
        }
      });
    });

    for (const [[x, y], item] of state.counters) {
      this.drawItem(ctx, x, y, item, 0.3);
    }

    for (const pot of state.pots) {
      const [x, y] = pot.pos;
      ctx.fillStyle = "#ffb300";
      for (let k = 0; k < pot.onions; k += 1) {
        ctx.beginPath();
        ctx.arc(x * c + c * (0.3 + 0.2 * k), y * c + c * 0.3, c * 0.08, 0, Math.PI * 2);
        ctx.fill();
      }
      if (pot.onions === 3) {
        const progress = (20 - pot.cook_timer) / 20;
        ctx.fillStyle = pot.cook_timer === 0 ? "#4caf50" : "#ef5350";
        ctx.fillRect(x * c + c * 0.15, y * c + c * 0.72, c * 0.7 * progress, c * 0.12);
      }
    }

    state.players.forEach((player, index) => {
      const [x, y] = player.pos;
      // the human is always the blue character, the agent the green one
      ctx.fillStyle = index === 0 ? "#1e66d0" : "#2e9e44";
      ctx.beginPath();
      ctx.arc(x * c + c / 2, y * c + c / 2, c * 0.33, 0, Math.PI * 2);
      ctx.fill();
      const [dx, dy] = ORIENT_VECTORS[player.orientation];
      ctx.strokeStyle = "#fff";
      ctx.lineWidth = 3;
      ctx.beginPath();
      ctx.moveTo(x * c + c / 2, y * c + c / 2);
      ctx.lineTo(x * c + c / 2 + dx * c * 0.3, y * c + c / 2 + dy * c * 0.3);
      ctx.stroke();
      if (player.holding) {
        this.drawItem(ctx, x, y, player.holding, 0.16, 0.72, 0.28);
      }
    });

    for (const element of computeOverlayElements(state.prediction)) {
      this.drawOverlayElement(ctx, element);
    }

    ctx.fillStyle = "#222";
    ctx.font = "14px sans-serif";
    ctx.textAlign = "left";
    ctx.textBaseline = "top";
    const seconds = (state.time_left_ticks / 5).toFixed(0);
    ctx.fillText(
      `score ${state.score}   time left ${seconds}s`,
      6,
      this.layout.height * c + 6,
    );
  }

  private drawItem(
    ctx: CanvasRenderingContext2D,
    x: number,
    y: number,
    item: string,
    radius: number,
    ox = 0.5,
    oy = 0.5,
  ): void {
    const c = this.cell;
    ctx.fillStyle = HOLD_COLORS[item] ?? "#777";
    ctx.beginPath();
    ctx.arc(x * c + c * ox, y * c + c * oy, c * radius, 0, Math.PI * 2);
    ctx.fill();
    ctx.strokeStyle = "rgba(0,0,0,0.4)";
    ctx.lineWidth = 1;
    ctx.stroke();
  }

  private drawOverlayElement(ctx: CanvasRenderingContext2D, element: OverlayElement): void {
    const c = this.cell;
    const [x, y] = element.cell;
    const cx = x * c + c / 2;
    const cy = y * c + c / 2;
    const size = c * 0.42 * element.scale;
    ctx.save();
    ctx.globalAlpha = element.opacity;
    if (element.kind === "arrow") {
      const angle = { up: -Math.PI / 2, down: Math.PI / 2, left: Math.PI, right: 0 }[
        element.glyph as "up" | "down" | "left" | "right"
      ];
      ctx.translate(cx, cy);
      ctx.rotate(angle);
      ctx.fillStyle = "#7b1fa2";
      ctx.beginPath();
      ctx.moveTo(size, 0);
      ctx.lineTo(-size * 0.6, size * 0.6);
      ctx.lineTo(-size * 0.25, 0);
      ctx.lineTo(-size * 0.6, -size * 0.6);
      ctx.closePath();
      ctx.fill();
    } else {
      ctx.fillStyle = "#7b1fa2";
      ctx.beginPath();
      ctx.arc(cx, cy, size * 0.8, 0, Math.PI * 2);
      ctx.fill();
      ctx.fillStyle = "#fff";
      ctx.font = `${size}px sans-serif`;
      ctx.textAlign = "center";
      ctx.textBaseline = "middle";
      ctx.fillText(element.glyph === "interact" ? "!" : "⏸", cx, cy);
    }
    ctx.restore();
  }
}
