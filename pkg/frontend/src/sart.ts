// Post-task self-rating form: ten constructs, one 1..7 scale each,
// anchored 1 = Low and 7 = High, all on one page.

import type { ConsoleMessage } from "./protocol.js";

export const SCALE_MIN = 1;
export const SCALE_MAX = 7;
export const ANCHORS = { low: "1 = Low", high: "7 = High" };

export class SartFormState {
  readonly ratings: (number | null)[];

  constructor(readonly constructs: string[]) {
    this.ratings = constructs.map(() => null);
  }

  setRating(index: number, value: number): boolean {
    if (index < 0 || index >= this.ratings.length) return false;
    if (!Number.isInteger(value) || value < SCALE_MIN || value > SCALE_MAX) {
      return false;
    }
    this.ratings[index] = value;
    return true;
  }

  get complete(): boolean {
    return this.ratings.every((r) => r !== null);
  }

  submitMessage(): ConsoleMessage | null {
    if (!this.complete) return null;
    return { type: "SartSubmit", ratings: this.ratings.map(Number) };
  }
}
