// Blackout quiz flow: one question at a time, strictly forward. MCQs show
// five substantive options plus "I don't know"; CMQs show a blank grid
// plus "Not applicable". There is no way back to an answered question.

import type { Cell, ConsoleMessage, QueryPrompt, SagatAnswerValue } from "./protocol.js";

export const IDK_LABEL = "I don't know";
export const NA_LABEL = "Not applicable";

export interface QuizScreen {
  index: number;
  total: number;
  prompt: string;
  kind: "MCQ" | "CMQ";
  controls: string[];          // selectable controls, in display order
  grid: { width: number; height: number } | null;
}

export class QuizController {
  private total = 0;
  private current: QueryPrompt | null = null;
  private shownAt = 0;
  private selectedCells = new Set<string>();
  answered = 0;

  constructor(private gridWidth: number, private gridHeight: number) {}

  beginPause(nQueries: number): void {
    this.total = nQueries;
    this.answered = 0;
    this.current = null;
  }

  present(prompt: QueryPrompt, now: number): void {
    this.current = prompt;
    this.shownAt = now;
    this.selectedCells.clear();
  }

  screen(): QuizScreen | null {
    if (!this.current) return null;
    const q = this.current.query;
    if (q.kind === "MCQ") {
      return {
        index: this.current.index,
        total: this.total,
        prompt: q.prompt,
        kind: "MCQ",
        controls: [...(q.options ?? []), IDK_LABEL],
        grid: null,
      };
    }
    return {
      index: this.current.index,
      total: this.total,
      prompt: q.prompt,
      kind: "CMQ",
      controls: [NA_LABEL, "Submit marked cells"],
      grid: { width: this.gridWidth, height: this.gridHeight },
    };
  }

  toggleCell(cell: Cell): void {
    if (!this.current || this.current.query.kind !== "CMQ") return;
    const key = `${cell[0]},${cell[1]}`;
    if (this.selectedCells.has(key)) this.selectedCells.delete(key);
    else this.selectedCells.add(key);
  }

  selectedCellList(): Cell[] {
    return [...this.selectedCells].sort().map((key) => {
      const [c, r] = key.split(",").map(Number);
      return [c, r] as Cell;
    });
  }

  /** Answer the current question; returns the wire message to send. */
  answer(value: SagatAnswerValue, now: number): ConsoleMessage | null {
    if (!this.current) return null;
    const message: ConsoleMessage = {
      type: "SagatAnswer",
      query_id: this.current.query.id,
      answer: value,
      latency_ms: Math.max(0, Math.round(now - this.shownAt)),
    };
    this.current = null;
    this.answered += 1;
    return message;
  }

  answerOption(optionIndex: number, now: number): ConsoleMessage | null {
    if (!this.current || this.current.query.kind !== "MCQ") return null;
    const options = this.current.query.options ?? [];
    if (optionIndex === options.length) return this.answer({ idk: true }, now);
    if (optionIndex < 0 || optionIndex > options.length) return null;
    return this.answer({ option: optionIndex }, now);
  }

  answerCells(now: number): ConsoleMessage | null {
    if (!this.current || this.current.query.kind !== "CMQ") return null;
    return this.answer({ cells: this.selectedCellList() }, now);
  }

  answerNotApplicable(now: number): ConsoleMessage | null {
    if (!this.current || this.current.query.kind !== "CMQ") return null;
    return this.answer({ na: true }, now);
  }

  /** The survey has no back button; this is always a refusal. */
  back(): null {
    return null;
  }
}
