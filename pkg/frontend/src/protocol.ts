// Wire message types shared with the gateway. One JSON object per frame;
// field names match the session-log payload schema.

export type Cell = [number, number];

export interface Welcome {
  type: "Welcome";
  wire_version: number;
  grid: { width: number; height: number; cell_size: number };
  obstacles: Cell[];
  target: [number, number];
  duration_s: number;
  n_robots: number;
}

export interface Snapshot {
  type: "Snapshot";
  t: number;
  remaining_s: number;
  robots: [number, number, number, string][]; // id, x, y, status
  marked: Cell[];
}

export interface Alert {
  type: "Alert";
  t: number;
  hazard_kind: string;
  cells: Cell[];
  text: string;
}

export interface PauseBegin {
  type: "PauseBegin";
  pause: number;
  n_queries: number;
  query_ids: string[];
}

export interface QueryPrompt {
  type: "QueryPrompt";
  index: number;
  query: { id: string; kind: "MCQ" | "CMQ"; prompt: string; options?: string[] };
}

export interface PauseEnd {
  type: "PauseEnd";
  pause: number;
}

export interface SartForm {
  type: "SartForm";
  constructs: string[];
}

export interface SessionEnd {
  type: "SessionEnd";
  report: Record<string, unknown>;
}

export interface Rejection {
  type: "Rejection";
  reason: string;
}

export type EngineMessage =
  | Welcome | Snapshot | Alert | PauseBegin | QueryPrompt
  | PauseEnd | SartForm | SessionEnd | Rejection;

export type SagatAnswerValue =
  | { option: number }
  | { idk: true }
  | { cells: Cell[] }
  | { na: true };

export type ConsoleMessage =
  | { type: "Hello"; version: number }
  | { type: "Mark"; cell: Cell }
  | { type: "Unmark"; cell: Cell }
  | { type: "Swipe"; origin: [number, number]; direction: [number, number]; magnitude: number }
  | { type: "SagatAnswer"; query_id: string; answer: SagatAnswerValue; latency_ms: number }
  | { type: "SartSubmit"; ratings: number[] };

export const WIRE_VERSION = 1;

export function parseEngineMessage(raw: string): EngineMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const msg = data as { type?: unknown };
  if (typeof msg.type !== "string") return null;
  return data as EngineMessage;
}
