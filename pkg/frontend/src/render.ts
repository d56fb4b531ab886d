// World rendering against a minimal 2D-context interface so tests can
// rasterize into a pixel buffer. During a blackout the canvas is a single
// uniform fill and nothing else.

import { CanvasGeometry } from "./geom.js";
import type { Alert, Snapshot, Welcome } from "./protocol.js";

export interface Draw2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  fillRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
}

export const COLORS = {
  background: "#f4f4f0",
  gridline: "#ddddd6",
  obstacle: "#4a4a4a",
  marked: "#d03030",
  target: "#18a018",
  robotActive: "#2060d0",
  robotDeactivated: "#9a9a9a",
  blackout: "#101014",
  banner: "#e0a000",
  text: "#202020",
};

export const STALE_AFTER_MS = 2000;

export function formatTimer(remainingS: number): string {
  const s = Math.max(0, Math.floor(remainingS));
  const mm = String(Math.floor(s / 60)).padStart(2, "0");
  const ss = String(s % 60).padStart(2, "0");
  return `${mm}:${ss}`;
}

export interface LiveView {
  welcome: Welcome;
  snapshot: Snapshot | null;
  alerts: Alert[];
  stale: boolean;
}

export function renderBlackout(ctx: Draw2D, geom: CanvasGeometry): void {
  ctx.fillStyle = COLORS.blackout;
  ctx.fillRect(0, 0, geom.widthPx, geom.heightPx);
}

export function renderLive(view: LiveView, ctx: Draw2D, geom: CanvasGeometry): void {
  ctx.fillStyle = COLORS.background;
  ctx.fillRect(0, 0, geom.widthPx, geom.heightPx);

  // thin separators between cells
  ctx.fillStyle = COLORS.gridline;
  for (let c = 1; c < geom.gridWidth; c++) {
    ctx.fillRect((c * geom.widthPx) / geom.gridWidth, 0, 1, geom.heightPx);
  }
  for (let r = 1; r < geom.gridHeight; r++) {
    ctx.fillRect(0, (r * geom.heightPx) / geom.gridHeight, geom.widthPx, 1);
  }

  ctx.fillStyle = COLORS.obstacle;
  for (const cell of view.welcome.obstacles) {
    const [x, y, w, h] = geom.cellToPixelRect(cell);
    ctx.fillRect(x, y, w, h);
  }

  if (view.snapshot) {
    ctx.fillStyle = COLORS.marked;
    for (const cell of view.snapshot.marked) {
      const [x, y, w, h] = geom.cellToPixelRect(cell);
      ctx.fillRect(x, y, w, h);
    }
  }

  const [tx, ty] = geom.worldToPixel(view.welcome.target[0], view.welcome.target[1]);
  ctx.fillStyle = COLORS.target;
  ctx.fillRect(tx - 4, ty - 4, 8, 8);

  if (view.snapshot) {
    for (const [, x, y, status] of view.snapshot.robots) {
      const [px, py] = geom.worldToPixel(x, y);
      ctx.fillStyle = status === "active" ? COLORS.robotActive
                                          : COLORS.robotDeactivated;
      ctx.fillRect(px - 3, py - 3, 6, 6);
    }
    ctx.fillStyle = COLORS.text;
    ctx.fillText(formatTimer(view.snapshot.remaining_s), geom.widthPx - 52, 16);
  }

  const feed = view.alerts.slice(-4);
  ctx.fillStyle = COLORS.text;
  feed.forEach((alert, i) => {
    ctx.fillText(alert.text, 6, geom.heightPx - 8 - 14 * (feed.length - 1 - i));
  });

  if (view.stale) {
    ctx.fillStyle = COLORS.banner;
    ctx.fillRect(0, 0, geom.widthPx, 22);
    ctx.fillStyle = COLORS.text;
    ctx.fillText("connection lost: no recent snapshot", 6, 15);
  }
}
