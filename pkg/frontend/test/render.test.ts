import { describe, expect, it } from "vitest";

import { CanvasGeometry } from "../src/geom.js";
import { COLORS, formatTimer, renderBlackout, renderLive } from "../src/render.js";
import type { Snapshot, Welcome } from "../src/protocol.js";
import { SoftCanvas } from "./softcanvas.js";

const geom = new CanvasGeometry(200, 200, 20, 20, 1.0);

const welcome: Welcome = {
  type: "Welcome", wire_version: 1,
  grid: { width: 20, height: 20, cell_size: 1.0 },
  obstacles: [[5, 5], [6, 5]],
  target: [17.5, 17.5],
  duration_s: 300, n_robots: 20,
};

function snapshot(partial: Partial<Snapshot> = {}): Snapshot {
  return {
    type: "Snapshot", t: 100, remaining_s: 125,
    robots: [[0, 2.5, 2.5, "active"], [1, 3.5, 2.5, "deactivated"]],
    marked: [[3, 4]],
    ...partial,
  };
}

describe("timer formatting", () => {
  it("renders remaining seconds as MM:SS", () => {
    expect(formatTimer(125)).toBe("02:05");
    expect(formatTimer(0)).toBe("00:00");
    expect(formatTimer(599.9)).toBe("09:59");
  });
});

describe("live rendering", () => {
  it("fills marked cells red and obstacle cells dark", () => {
    const ctx = new SoftCanvas(200, 200);
    renderLive({ welcome, snapshot: snapshot(), alerts: [], stale: false },
               ctx, geom);
    // cell (3,4): x in [30,40), y in [200 - 50, 200 - 40) = [150,160)
    expect(ctx.pixelAt(35, 155)).toBe(COLORS.marked);
    // obstacle cell (5,5): x in [50,60), y in [140,150)
    expect(ctx.pixelAt(55, 145)).toBe(COLORS.obstacle);
  });

  it("draws active robots in color and deactivated robots gray", () => {
    const ctx = new SoftCanvas(200, 200);
    renderLive({ welcome, snapshot: snapshot(), alerts: [], stale: false },
               ctx, geom);
    // robot 0 at world (2.5, 2.5) -> pixel (25, 175)
    expect(ctx.pixelAt(25, 175)).toBe(COLORS.robotActive);
    // robot 1 at world (3.5, 2.5) -> pixel (35, 175)
    expect(ctx.pixelAt(35, 175)).toBe(COLORS.robotDeactivated);
  });

  it("shows the countdown timer top right", () => {
    const ctx = new SoftCanvas(200, 200);
    renderLive({ welcome, snapshot: snapshot(), alerts: [], stale: false },
               ctx, geom);
    const timer = ctx.textDraws.find((d) => d.text === "02:05");
    expect(timer).toBeDefined();
    expect(timer!.x).toBeGreaterThan(100);
    expect(timer!.y).toBeLessThan(40);
  });

  it("raises a warning banner on stale snapshots", () => {
    const ctx = new SoftCanvas(200, 200);
    renderLive({ welcome, snapshot: snapshot(), alerts: [], stale: true },
               ctx, geom);
    expect(ctx.pixelAt(100, 5)).toBe(COLORS.banner);
    expect(ctx.textDraws.some((d) => d.text.includes("connection"))).toBe(true);
  });

  it("renders the alert feed text", () => {
    const ctx = new SoftCanvas(200, 200);
    renderLive({
      welcome, snapshot: snapshot(), stale: false,
      alerts: [{ type: "Alert", t: 5, hazard_kind: "spr", cells: [[3, 4]],
                 text: "Fire reported spreading at cell (3,4)" }],
    }, ctx, geom);
    expect(ctx.textDraws.some((d) => d.text.includes("Fire reported"))).toBe(true);
  });
});

describe("blackout integrity", () => {
  it("renders a uniform canvas with no world-derived pixels or text", () => {
    const ctx = new SoftCanvas(200, 200);
    renderBlackout(ctx, geom);
    expect(ctx.uniqueColors()).toEqual(new Set([COLORS.blackout]));
    expect(ctx.textDraws).toHaveLength(0);
  });
});
