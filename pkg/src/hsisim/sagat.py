"""Objective situation-awareness assessment: freeze-probe queries.

Pauses freeze the task and blank the display; the operator answers a fixed
bank of questions per pause. Ground truth for perception/comprehension
questions comes straight from the frozen state; projection questions roll
an isolated fork of the simulation forward and read the queried quantity.
Every question scores 0..100.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

from .engine import EngineState, ForkProbe, fork_probe
from .rng import RandomStream
from .swarm import ACTIVE, DEACTIVATED
from .world import REGION_LABELS, cell_of, quadrant_regions

LEVELS = ("L1", "L2", "L3")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SagatQuery:
    id: str
    tag: str          # DimX.Y requirement label
    level: str
    dimension: int
    kind: str         # "MCQ" | "CMQ"
    pause: int
    prompt: str
    extractor: str
    options: tuple | None = None
    bins: tuple | None = None
    unit: str | None = None
    horizon_s: float | None = None


@dataclass
class ScoringConfig:
    cmq_rubric: str = "f1"       # or "exact"
    idk_mode: str = "zero"       # or "exclude"

    def __post_init__(self):
        if self.cmq_rubric not in ("f1", "exact"):
            raise ConfigError(f"unknown cmq_rubric {self.cmq_rubric!r}")
        if self.idk_mode not in ("zero", "exclude"):
            raise ConfigError(f"unknown idk_mode {self.idk_mode!r}")


@dataclass
class QueryBank:
    queries: list
    near_radius: float = 5.0
    converge_radius: float = 2.0

    def for_pause(self, pause_index: int) -> list:
        return [q for q in self.queries if q.pause == pause_index]

    def by_id(self, qid: str) -> SagatQuery:
        for q in self.queries:
            if q.id == qid:
                return q
        raise KeyError(qid)

    @property
    def n_pauses(self) -> int:
        return max(q.pause for q in self.queries)


def _validate_query(q: SagatQuery) -> None:
    if q.level not in LEVELS:
        raise ConfigError(f"{q.id}: level must be one of {LEVELS}")
    if not (1 <= q.dimension <= 6):
        raise ConfigError(f"{q.id}: dimension must be 1..6")
    if q.kind == "MCQ":
        n = len(q.options) if q.options else (len(q.bins) + 1 if q.bins else 0)
        if n != 5:
            raise ConfigError(f"{q.id}: MCQ needs exactly 5 substantive options")
    elif q.kind == "CMQ":
        if q.options or q.bins:
            raise ConfigError(f"{q.id}: CMQ takes no options")
    else:
        raise ConfigError(f"{q.id}: kind must be MCQ or CMQ")
    if q.level == "L3" and q.extractor != "time_to_converge":
        if not q.horizon_s or q.horizon_s <= 0:
            raise ConfigError(f"{q.id}: projection query needs horizon_s > 0")


def load_bank(path=None) -> QueryBank:
    """Load a query bank file; the packaged default bank when path is None."""
    if path is None:
        text = resources.files("hsisim").joinpath("data/query_bank.json").read_text()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    raw = json.loads(text)
    queries = []
    seen = set()
    for item in raw["queries"]:
        q = SagatQuery(
            id=item["id"], tag=item["tag"], level=item["level"],
            dimension=int(item["dimension"]), kind=item["kind"],
            pause=int(item["pause"]), prompt=item["prompt"],
            extractor=item["extractor"],
            options=tuple(item["options"]) if item.get("options") else None,
            bins=tuple(item["bins"]) if item.get("bins") else None,
            unit=item.get("unit"),
            horizon_s=item.get("horizon_s"),
        )
        if q.id in seen:
            raise ConfigError(f"duplicate query id {q.id}")
        seen.add(q.id)
        _validate_query(q)
        queries.append(q)
    if not queries:
        raise ConfigError("query bank is empty")
    return QueryBank(queries,
                     near_radius=float(raw.get("near_radius", 5.0)),
                     converge_radius=float(raw.get("converge_radius", 2.0)))


def option_labels(query: SagatQuery) -> list:
    """The five substantive option labels (bin queries render ranges)."""
    if query.options:
        return list(query.options)
    t = query.bins
    unit = f" {query.unit}" if query.unit else ""
    if query.unit is None:  # integer count bins
        labels = ["0" if t[0] == 1 else f"0 to {t[0] - 1}"]
        for a, b in zip(t, t[1:]):
            labels.append(str(a) if b == a + 1 else f"{a} to {b - 1}")
        labels.append(f"{t[-1]} or more")
        return labels
    labels = [f"under {t[0]}{unit}"]
    for a, b in zip(t, t[1:]):
        labels.append(f"{a} to {b}{unit}")
    labels.append(f"{t[-1]}{unit} or more")
    return labels


def bin_index(value: float, bins) -> int:
    """Index of the contiguous bin containing value (bins are thresholds)."""
    i = 0
    for t in bins:
        if value >= t:
            i += 1
    return i


# -- pause scheduling ---------------------------------------------------------


def schedule_pauses(duration_s: float, dt: float, stream: RandomStream,
                    windows=((0.30, 0.45), (0.65, 0.80)),
                    min_gap_s: float = 20.0, max_tries: int = 1000) -> list:
    """Pause ticks drawn uniformly from per-pause windows.

    Pauses keep at least min_gap_s between each other and before task end;
    deterministic for a given stream state.
    """
    total = int(round(duration_s / dt))
    gap = int(round(min_gap_s / dt))
    ranges = []
    for lo_f, hi_f in windows:
        lo = max(1, math.ceil(lo_f * total))
        hi = min(total - gap, math.floor(hi_f * total))
        if lo > hi:
            raise ConfigError(
                f"pause window [{lo_f}, {hi_f}] infeasible for {duration_s}s task")
        ranges.append((lo, hi))
    for _ in range(max_tries):
        ticks = sorted(lo + stream.randrange(hi - lo + 1) for lo, hi in ranges)
        if all(b - a >= gap for a, b in zip(ticks, ticks[1:])):
            return ticks
    raise ConfigError("could not schedule pauses under the gap constraint")


# -- ground truth extraction --------------------------------------------------


class ExtractionContext:
    """Frozen pause-time state plus memoized projection forks."""

    def __init__(self, state: EngineState, bank: QueryBank):
        self.state = state
        self.bank = bank
        self.regions = quadrant_regions(state.world)
        self._probes: dict = {}

    def probe(self, horizon_ticks: int) -> ForkProbe:
        if horizon_ticks not in self._probes:
            self._probes[horizon_ticks] = fork_probe(
                self.state, horizon_ticks, self.bank.converge_radius)
        return self._probes[horizon_ticks]

    def horizon_ticks(self, query: SagatQuery) -> int:
        if query.horizon_s is None:
            return self.state.duration_ticks - self.state.tick
        return int(round(query.horizon_s / self.state.params.dt))


def _active(robots):
    return [r for r in robots if r.status == ACTIVE]


def _cells_of(robots, world):
    return sorted({cell_of(r.pos, world) for r in robots})


def _target_distances(robots, world):
    tx, ty = world.target
    return [math.sqrt((r.pos[0] - tx) ** 2 + (r.pos[1] - ty) ** 2)
            for r in robots]


def _region_argmax(cells, regions):
    """Index (REGION_LABELS order) of the region holding the most cells."""
    if not cells:
        return None
    counts = {label: 0 for label in REGION_LABELS}
    for cell in cells:
        for label in REGION_LABELS:
            if cell in regions[label]:
                counts[label] += 1
                break
    best = max(REGION_LABELS, key=lambda lbl: (counts[lbl], -REGION_LABELS.index(lbl)))
    return REGION_LABELS.index(best)


def _dispersion(robots):
    if not robots:
        return None
    cx = sum(r.pos[0] for r in robots) / len(robots)
    cy = sum(r.pos[1] for r in robots) / len(robots)
    return math.sqrt(sum((r.pos[0] - cx) ** 2 + (r.pos[1] - cy) ** 2
                         for r in robots) / len(robots))


def _centroid_vs_target(robots, world, near_radius):
    """0 near, 1 NW, 2 NE, 3 SW, 4 SE of the target."""
    if not robots:
        return None
    cx = sum(r.pos[0] for r in robots) / len(robots)
    cy = sum(r.pos[1] for r in robots) / len(robots)
    dx, dy = cx - world.target[0], cy - world.target[1]
    if math.sqrt(dx * dx + dy * dy) <= near_radius:
        return 0
    if dy >= 0:
        return 1 if dx < 0 else 2
    return 3 if dx < 0 else 4


def _dominant_direction(robots):
    """0 N, 1 E, 2 S, 3 W, 4 stationary; dominant axis of mean velocity."""
    if not robots:
        return 4
    vx = sum(r.vel[0] for r in robots) / len(robots)
    vy = sum(r.vel[1] for r in robots) / len(robots)
    if math.sqrt(vx * vx + vy * vy) < 0.05:
        return 4
    if abs(vx) >= abs(vy):
        return 1 if vx > 0 else 3
    return 0 if vy > 0 else 2


def _near_target_count(robots, world, radius):
    return sum(1 for d in _target_distances(robots, world) if d <= radius)


def extract_ground_truth(query: SagatQuery, ctx: ExtractionContext) -> dict:
    """Ground truth for one query from the frozen state (or a fork for L3)."""
    fn = _EXTRACTORS.get(query.extractor)
    if fn is None:
        raise ConfigError(f"unknown extractor {query.extractor!r}")
    return fn(query, ctx)


def _mcq(value_or_index, query=None) -> dict:
    if value_or_index is None:
        return {"option": None}
    if query is not None and query.bins:
        return {"option": bin_index(value_or_index, query.bins)}
    return {"option": int(value_or_index)}


def _cmq(cells) -> dict:
    return {"cells": [list(c) for c in sorted(cells)]}


def _x_active_robot_cells(q, ctx):
    return _cmq(_cells_of(_active(ctx.state.robots), ctx.state.world))


def _x_target_region(q, ctx):
    cell = cell_of(ctx.state.world.target, ctx.state.world)
    return _mcq(_region_argmax([cell], ctx.regions))


def _x_remaining_time(q, ctx):
    return _mcq(ctx.state.remaining_s, q)


def _x_elapsed_time(q, ctx):
    return _mcq(ctx.state.elapsed_s, q)


def _x_hazard_cells(q, ctx):
    return _cmq(ctx.state.hazard.active)


def _x_marked_cells(q, ctx):
    return _cmq(ctx.state.marked.cells)


def _x_deactivated_robot_cells(q, ctx):
    gone = [r for r in ctx.state.robots if r.status == DEACTIVATED]
    return _cmq(_cells_of(gone, ctx.state.world))


def _x_trapped_robot_cells(q, ctx):
    ids = ctx.state.trapped_ids()
    stuck = [r for r in ctx.state.robots if r.id in ids]
    return _cmq(_cells_of(stuck, ctx.state.world))


def _x_mean_active_target_distance(q, ctx):
    robots = _active(ctx.state.robots)
    if not robots:
        return _mcq(None)
    ds = _target_distances(robots, ctx.state.world)
    return _mcq(sum(ds) / len(ds), q)


def _x_active_near_target_count(q, ctx):
    return _mcq(_near_target_count(_active(ctx.state.robots), ctx.state.world,
                                   ctx.bank.near_radius), q)


def _x_most_active_region(q, ctx):
    cells = _cells_of(_active(ctx.state.robots), ctx.state.world)
    counted = [cell_of(r.pos, ctx.state.world)
               for r in _active(ctx.state.robots)]
    return _mcq(_region_argmax(counted, ctx.regions)) if cells else _mcq(None)


def _x_mean_active_speed(q, ctx):
    robots = _active(ctx.state.robots)
    if not robots:
        return _mcq(None)
    speed = sum(math.sqrt(r.vel[0] ** 2 + r.vel[1] ** 2) for r in robots)
    return _mcq(speed / len(robots), q)


def _x_dominant_direction(q, ctx):
    return _mcq(_dominant_direction(_active(ctx.state.robots)))


def _x_dispersion(q, ctx):
    return _mcq(_dispersion(_active(ctx.state.robots)), q)


def _x_centroid_relative_to_target(q, ctx):
    return _mcq(_centroid_vs_target(_active(ctx.state.robots), ctx.state.world,
                                    ctx.bank.near_radius))


def _x_most_deactivated_region(q, ctx):
    gone = [r for r in ctx.state.robots if r.status == DEACTIVATED]
    counted = [cell_of(r.pos, ctx.state.world) for r in gone]
    return _mcq(_region_argmax(counted, ctx.regions))


def _x_most_trapped_region(q, ctx):
    ids = ctx.state.trapped_ids()
    counted = [cell_of(r.pos, ctx.state.world)
               for r in ctx.state.robots if r.id in ids]
    return _mcq(_region_argmax(counted, ctx.regions))


def _x_active_count(q, ctx):
    return _mcq(len(_active(ctx.state.robots)), q)


def _x_hazard_cell_count(q, ctx):
    return _mcq(len(ctx.state.hazard.active), q)


def _x_marked_count(q, ctx):
    return _mcq(len(ctx.state.marked.cells), q)


def _x_future_near_target_count(q, ctx):
    probe = ctx.probe(ctx.horizon_ticks(q))
    robots = _active(probe.final_state.robots)
    return _mcq(_near_target_count(robots, ctx.state.world,
                                   ctx.bank.near_radius), q)


def _x_future_dispersion(q, ctx):
    probe = ctx.probe(ctx.horizon_ticks(q))
    return _mcq(_dispersion(_active(probe.final_state.robots)), q)


def _x_future_centroid_relative_to_target(q, ctx):
    probe = ctx.probe(ctx.horizon_ticks(q))
    return _mcq(_centroid_vs_target(_active(probe.final_state.robots),
                                    ctx.state.world, ctx.bank.near_radius))


def _x_time_to_converge(q, ctx):
    probe = ctx.probe(ctx.horizon_ticks(q))
    if probe.first_converge_offset is None:
        return _mcq(math.inf, q)
    return _mcq(probe.first_converge_offset * ctx.state.params.dt, q)


def _x_future_new_hazard_cells(q, ctx):
    return _mcq(len(ctx.probe(ctx.horizon_ticks(q)).new_hazard_cells), q)


def _x_removable_marked_count(q, ctx):
    probe = ctx.probe(ctx.horizon_ticks(q))
    safe = [c for c in ctx.state.marked.cells if c not in probe.hazard_union]
    return _mcq(len(safe), q)


def _x_future_deactivation_count(q, ctx):
    return _mcq(ctx.probe(ctx.horizon_ticks(q)).deactivations, q)


def _x_future_trapped_count(q, ctx):
    return _mcq(len(ctx.probe(ctx.horizon_ticks(q)).newly_trapped), q)


_EXTRACTORS = {
    name[3:]: fn for name, fn in list(globals().items())
    if name.startswith("_x_")
}


# -- scoring and aggregation ---------------------------------------------------


def score_response(query: SagatQuery, response: dict, truth: dict,
                   scoring: ScoringConfig | None = None):
    """Score one answer 0..100 (None when excluded from means).

    MCQ: exact option match scores 100; "I don't know" scores 0, except
    when no substantive option is correct, where it is the honest answer
    and scores 100. CMQ: F1 overlap with the truth cells (or exact match
    under the strict rubric); "Not applicable" scores 100 exactly when the
    truth is empty.
    """
    scoring = scoring or ScoringConfig()
    if query.kind == "MCQ":
        if "cells" in response or "na" in response:
            raise ValueError(f"{query.id}: cell answer for an MCQ")
        if response.get("idk"):
            if scoring.idk_mode == "exclude":
                return None
            return 100.0 if truth.get("option") is None else 0.0
        chosen = response.get("option")
        if chosen is None:
            raise ValueError(f"{query.id}: MCQ answer missing option")
        return 100.0 if truth.get("option") == int(chosen) else 0.0

    if query.kind == "CMQ":
        if "option" in response or "idk" in response:
            raise ValueError(f"{query.id}: option answer for a CMQ")
        truth_cells = {tuple(c) for c in truth.get("cells", [])}
        if response.get("na"):
            return 100.0 if not truth_cells else 0.0
        marked = {tuple(c) for c in response.get("cells", [])}
        if not truth_cells:
            return 0.0
        if scoring.cmq_rubric == "exact":
            return 100.0 if marked == truth_cells else 0.0
        if not marked:
            return 0.0
        hit = len(marked & truth_cells)
        precision = hit / len(marked)
        recall = hit / len(truth_cells)
        if precision + recall == 0:
            return 0.0
        return 100.0 * 2 * precision * recall / (precision + recall)

    raise ValueError(f"unknown query kind {query.kind!r}")


@dataclass
class SagatReport:
    per_question: dict
    level_means: dict
    dimension_means: dict
    overall: float
    n_scored: int


def aggregate_sagat(scored) -> SagatReport:
    """Unweighted means per level, per dimension, and overall.

    `scored` is a list of (query, score) pairs; None scores (excluded
    answers) are dropped from every mean.
    """
    kept = [(q, s) for q, s in scored if s is not None]
    if not kept:
        raise ValueError("no scored responses to aggregate")
    per_question = {q.id: s for q, s in kept}
    levels = {}
    dims = {}
    for q, s in kept:
        levels.setdefault(q.level, []).append(s)
        dims.setdefault(q.dimension, []).append(s)
    return SagatReport(
        per_question=per_question,
        level_means={lvl: sum(v) / len(v) for lvl, v in sorted(levels.items())},
        dimension_means={d: sum(v) / len(v) for d, v in sorted(dims.items())},
        overall=sum(s for _, s in kept) / len(kept),
        n_scored=len(kept),
    )
