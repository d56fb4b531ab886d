// Pointer gesture classification. Thresholds: release under 400 ms with
// movement under 10 px is a tap; a stationary hold of 500 ms or more is a
// long-press; movement of 24 px or more is a swipe. Anything between is
// deliberately dead space and classifies as nothing.

export const TAP_MAX_MS = 400;
export const LONG_PRESS_MIN_MS = 500;
export const STATIONARY_MAX_PX = 10;
export const SWIPE_MIN_PX = 24;

export type Gesture =
  | { kind: "tap"; x: number; y: number }
  | { kind: "longpress"; x: number; y: number }
  | { kind: "swipe"; startX: number; startY: number; dx: number; dy: number };

interface PressState {
  startX: number;
  startY: number;
  startT: number;
  lastX: number;
  lastY: number;
  maxDisp: number;
}

export class GestureRecognizer {
  private press: PressState | null = null;

  pointerDown(x: number, y: number, t: number): void {
    this.press = { startX: x, startY: y, startT: t, lastX: x, lastY: y, maxDisp: 0 };
  }

  pointerMove(x: number, y: number, _t: number): void {
    const p = this.press;
    if (!p) return;
    p.lastX = x;
    p.lastY = y;
    p.maxDisp = Math.max(p.maxDisp, Math.hypot(x - p.startX, y - p.startY));
  }

  pointerUp(x: number, y: number, t: number): Gesture | null {
    const p = this.press;
    this.press = null;
    if (!p) return null;
    const disp = Math.max(p.maxDisp, Math.hypot(x - p.startX, y - p.startY));
    const duration = t - p.startT;
    if (disp >= SWIPE_MIN_PX) {
      return { kind: "swipe", startX: p.startX, startY: p.startY,
               dx: x - p.startX, dy: y - p.startY };
    }
    if (disp < STATIONARY_MAX_PX && duration < TAP_MAX_MS) {
      return { kind: "tap", x: p.startX, y: p.startY };
    }
    if (disp < STATIONARY_MAX_PX && duration >= LONG_PRESS_MIN_MS) {
      return { kind: "longpress", x: p.startX, y: p.startY };
    }
    return null;
  }

  cancel(): void {
    this.press = null;
  }
}
