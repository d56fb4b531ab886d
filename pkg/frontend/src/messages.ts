// Gesture -> wire message mapping. Taps mark avoidance cells, long presses
// unmark them, swipes push nearby robots. The swipe magnitude normalizes
// against a reference length of a quarter of the canvas width.

import { CanvasGeometry } from "./geom.js";
import type { ConsoleMessage } from "./protocol.js";
import type { Gesture } from "./gestures.js";

export const REFERENCE_LENGTH_FRACTION = 0.25;

export function gestureToMessage(
  gesture: Gesture,
  geom: CanvasGeometry,
): ConsoleMessage | null {
  switch (gesture.kind) {
    case "tap":
      return { type: "Mark", cell: geom.pixelToCell(gesture.x, gesture.y) };
    case "longpress":
      return { type: "Unmark", cell: geom.pixelToCell(gesture.x, gesture.y) };
    case "swipe": {
      const lengthPx = Math.hypot(gesture.dx, gesture.dy);
      if (lengthPx === 0) return null;
      const reference = REFERENCE_LENGTH_FRACTION * geom.widthPx;
      const origin = geom.pixelToWorld(gesture.startX, gesture.startY);
      // canvas y points down, world y points up
      const direction: [number, number] = [
        gesture.dx / lengthPx,
        -gesture.dy / lengthPx,
      ];
      return {
        type: "Swipe",
        origin,
        direction,
        magnitude: Math.min(1, lengthPx / reference),
      };
    }
  }
}
