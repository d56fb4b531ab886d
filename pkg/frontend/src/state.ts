// Console view-state machine. Modes: live (world visible, gestures on),
// blackout-quiz (world hidden, gestures suppressed), sart (post-task form),
// done. Wire messages drive every transition.

import type {
  Alert, ConsoleMessage, EngineMessage, Snapshot, Welcome,
} from "./protocol.js";
import { QuizController } from "./quiz.js";
import { SartFormState } from "./sart.js";
import { STALE_AFTER_MS } from "./render.js";
import type { Gesture } from "./gestures.js";
import { CanvasGeometry } from "./geom.js";
import { gestureToMessage } from "./messages.js";

export type Mode = "connecting" | "live" | "blackout-quiz" | "sart" | "done";

export class ConsoleState {
  mode: Mode = "connecting";
  welcome: Welcome | null = null;
  snapshot: Snapshot | null = null;
  alerts: Alert[] = [];
  quiz: QuizController | null = null;
  sart: SartFormState | null = null;
  report: Record<string, unknown> | null = null;
  rejections: string[] = [];
  private lastSnapshotAt = 0;

  /** Handle one engine message; returns messages to send back (if any). */
  handleMessage(msg: EngineMessage, now: number): ConsoleMessage[] {
    switch (msg.type) {
      case "Welcome":
        this.welcome = msg;
        this.quiz = new QuizController(msg.grid.width, msg.grid.height);
        this.mode = "live";
        return [];
      case "Snapshot":
        if (this.mode === "live") {
          this.snapshot = msg;
          this.lastSnapshotAt = now;
        }
        return [];
      case "Alert":
        this.alerts.push(msg);
        return [];
      case "PauseBegin":
        this.mode = "blackout-quiz";
        this.quiz?.beginPause(msg.n_queries);
        return [];
      case "QueryPrompt":
        this.quiz?.present(msg, now);
        return [];
      case "PauseEnd":
        this.mode = "live";
        this.lastSnapshotAt = now; // suppress a spurious stale banner
        return [];
      case "SartForm":
        this.mode = "sart";
        this.sart = new SartFormState(msg.constructs);
        return [];
      case "SessionEnd":
        this.mode = "done";
        this.report = msg.report;
        return [];
      case "Rejection":
        this.rejections.push(msg.reason);
        return [];
    }
  }

  /** Gestures map to at most one message, and only while live. */
  handleGesture(gesture: Gesture, geom: CanvasGeometry): ConsoleMessage | null {
    if (this.mode !== "live") return null;
    return gestureToMessage(gesture, geom);
  }

  isStale(now: number): boolean {
    return (this.mode === "live" && this.snapshot !== null
            && now - this.lastSnapshotAt > STALE_AFTER_MS);
  }
}
