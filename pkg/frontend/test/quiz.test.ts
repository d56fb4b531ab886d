import { describe, expect, it } from "vitest";

import { CanvasGeometry } from "../src/geom.js";
import { COLORS, renderBlackout } from "../src/render.js";
import { ConsoleState } from "../src/state.js";
import { IDK_LABEL, NA_LABEL } from "../src/quiz.js";
import type { EngineMessage, QueryPrompt, Welcome } from "../src/protocol.js";
import { SoftCanvas } from "./softcanvas.js";

const geom = new CanvasGeometry(200, 200, 20, 20, 1.0);

const welcome: Welcome = {
  type: "Welcome", wire_version: 1,
  grid: { width: 20, height: 20, cell_size: 1.0 },
  obstacles: [], target: [17.5, 17.5], duration_s: 300, n_robots: 20,
};

function prompt(index: number, kind: "MCQ" | "CMQ", id = `q${index}`): QueryPrompt {
  return {
    type: "QueryPrompt", index,
    query: {
      id, kind, prompt: `question ${index}`,
      options: kind === "MCQ" ? ["a", "b", "c", "d", "e"] : undefined,
    },
  };
}

function freshState(): ConsoleState {
  const state = new ConsoleState();
  state.handleMessage(welcome, 0);
  return state;
}

describe("quiz protocol", () => {
  it("walks 14 questions strictly forward with no back navigation", () => {
    const state = freshState();
    state.handleMessage({ type: "PauseBegin", pause: 1, n_queries: 14,
                          query_ids: [] } as EngineMessage, 1000);
    expect(state.mode).toBe("blackout-quiz");
    const sent: string[] = [];
    for (let i = 1; i <= 14; i++) {
      state.handleMessage(prompt(i, i % 3 === 0 ? "CMQ" : "MCQ"), 1000 + i);
      const screen = state.quiz!.screen()!;
      expect(screen.index).toBe(i);
      expect(screen.total).toBe(14);
      expect(state.quiz!.back()).toBeNull();
      const msg = screen.kind === "MCQ"
        ? state.quiz!.answerOption(0, 2000 + i)
        : state.quiz!.answerNotApplicable(2000 + i);
      expect(msg).not.toBeNull();
      if (msg && msg.type === "SagatAnswer") sent.push(msg.query_id);
      // once answered there is no current question to re-answer
      expect(state.quiz!.answerOption(1, 2500 + i)).toBeNull();
    }
    expect(sent).toEqual(Array.from({ length: 14 }, (_, i) => `q${i + 1}`));
    expect(state.quiz!.answered).toBe(14);
    state.handleMessage({ type: "PauseEnd", pause: 1 } as EngineMessage, 4000);
    expect(state.mode).toBe("live");
  });

  it("MCQ screens offer exactly five options plus I-don't-know", () => {
    const state = freshState();
    state.handleMessage({ type: "PauseBegin", pause: 1, n_queries: 14,
                          query_ids: [] } as EngineMessage, 0);
    state.handleMessage(prompt(1, "MCQ"), 10);
    const screen = state.quiz!.screen()!;
    expect(screen.controls).toHaveLength(6);
    expect(screen.controls[5]).toBe(IDK_LABEL);
    const msg = state.quiz!.answerOption(5, 500);
    expect(msg && msg.type === "SagatAnswer" && msg.answer).toEqual({ idk: true });
  });

  it("CMQ screens offer a grid, cell toggling and Not-applicable", () => {
    const state = freshState();
    state.handleMessage({ type: "PauseBegin", pause: 1, n_queries: 14,
                          query_ids: [] } as EngineMessage, 0);
    state.handleMessage(prompt(1, "CMQ"), 10);
    const screen = state.quiz!.screen()!;
    expect(screen.grid).toEqual({ width: 20, height: 20 });
    expect(screen.controls).toContain(NA_LABEL);
    state.quiz!.toggleCell([3, 4]);
    state.quiz!.toggleCell([5, 6]);
    state.quiz!.toggleCell([3, 4]); // toggled back off
    const msg = state.quiz!.answerCells(600);
    expect(msg && msg.type === "SagatAnswer" && msg.answer)
      .toEqual({ cells: [[5, 6]] });
  });

  it("reports answer latency from prompt display to answer", () => {
    const state = freshState();
    state.handleMessage({ type: "PauseBegin", pause: 1, n_queries: 14,
                          query_ids: [] } as EngineMessage, 0);
    state.handleMessage(prompt(1, "MCQ"), 1000);
    const msg = state.quiz!.answerOption(2, 3500);
    expect(msg && msg.type === "SagatAnswer" && msg.latency_ms).toBe(2500);
  });
});

describe("blackout behaviour", () => {
  it("suppresses every gesture while the screen is hidden", () => {
    const state = freshState();
    state.handleMessage({ type: "PauseBegin", pause: 1, n_queries: 14,
                          query_ids: [] } as EngineMessage, 0);
    expect(state.handleGesture({ kind: "tap", x: 50, y: 50 }, geom)).toBeNull();
    expect(state.handleGesture({ kind: "longpress", x: 50, y: 50 }, geom)).toBeNull();
    expect(state.handleGesture(
      { kind: "swipe", startX: 0, startY: 0, dx: 60, dy: 0 }, geom)).toBeNull();
  });

  it("ignores stray snapshots while hidden and resumes cleanly", () => {
    const state = freshState();
    state.handleMessage({ type: "Snapshot", t: 1, remaining_s: 299,
                          robots: [], marked: [] } as EngineMessage, 10);
    state.handleMessage({ type: "PauseBegin", pause: 1, n_queries: 14,
                          query_ids: [] } as EngineMessage, 20);
    state.handleMessage({ type: "Snapshot", t: 2, remaining_s: 298,
                          robots: [], marked: [] } as EngineMessage, 30);
    expect(state.snapshot!.t).toBe(1);
    state.handleMessage({ type: "PauseEnd", pause: 1 } as EngineMessage, 40);
    expect(state.mode).toBe("live");
    const live = state.handleGesture({ kind: "tap", x: 50, y: 50 }, geom);
    expect(live).not.toBeNull();
  });

  it("paints the canvas uniformly during the quiz", () => {
    const ctx = new SoftCanvas(200, 200);
    renderBlackout(ctx, geom);
    expect(ctx.uniqueColors()).toEqual(new Set([COLORS.blackout]));
  });
});

describe("session flow", () => {
  it("transitions live -> quiz -> live -> sart -> done", () => {
    const state = freshState();
    expect(state.mode).toBe("live");
    state.handleMessage({ type: "PauseBegin", pause: 1, n_queries: 14,
                          query_ids: [] } as EngineMessage, 0);
    expect(state.mode).toBe("blackout-quiz");
    state.handleMessage({ type: "PauseEnd", pause: 1 } as EngineMessage, 10);
    expect(state.mode).toBe("live");
    state.handleMessage({ type: "SartForm",
                          constructs: Array(10).fill("c") } as EngineMessage, 20);
    expect(state.mode).toBe("sart");
    const form = state.sart!;
    for (let i = 0; i < 10; i++) expect(form.setRating(i, 4)).toBe(true);
    const msg = form.submitMessage();
    expect(msg && msg.type === "SartSubmit" && msg.ratings)
      .toEqual(Array(10).fill(4));
    state.handleMessage({ type: "SessionEnd", report: {} } as EngineMessage, 30);
    expect(state.mode).toBe("done");
  });

  it("flags stale snapshots after two seconds", () => {
    const state = freshState();
    state.handleMessage({ type: "Snapshot", t: 1, remaining_s: 299,
                          robots: [], marked: [] } as EngineMessage, 1000);
    expect(state.isStale(2500)).toBe(false);
    expect(state.isStale(3200)).toBe(true);
  });

  it("rejects out-of-range sart ratings", () => {
    const state = freshState();
    state.handleMessage({ type: "SartForm",
                          constructs: Array(10).fill("c") } as EngineMessage, 0);
    expect(state.sart!.setRating(0, 0)).toBe(false);
    expect(state.sart!.setRating(0, 8)).toBe(false);
    expect(state.sart!.submitMessage()).toBeNull();
  });
});
