"""Core simulation state and tick stepping.

One EngineState owns everything the deterministic loop touches: world,
robots, hazard process, marked cells and the alert pipeline. The session
runtime layers logging, pauses and reporting on top; assessment forks copy
the state and roll it forward in isolation.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .hazards import HazardEvent, HazardField, jitter_cells, render_alert
from .intervention import MarkedSet, OperatorView, swipe_impulses
from .rng import RandomStream
from .swarm import (ACTIVE, PsoParams, apply_hazards, step_swarm,
                    trapped_robots)
from .world import GridWorld


@dataclass
class EngineState:
    world: GridWorld
    params: PsoParams
    robots: list
    hazard: HazardField
    marked: MarkedSet
    swarm_stream: RandomStream
    tick: int = 0
    duration_ticks: int = 3000
    alert_latency_ticks: int = 0
    swipe_radius: float = 3.0
    k_impulse: float | None = None     # default 2 * vmax
    pending_alerts: deque = field(default_factory=deque)  # (due tick, alert)
    alert_feed: list = field(default_factory=list)

    def __post_init__(self):
        if self.k_impulse is None:
            self.k_impulse = 2.0 * self.params.vmax

    @property
    def remaining_s(self) -> float:
        return (self.duration_ticks - self.tick) * self.params.dt

    @property
    def elapsed_s(self) -> float:
        return self.tick * self.params.dt

    def trapped_ids(self) -> set:
        window = int(round(self.params.trapped_window_s / self.params.dt))
        return trapped_robots(self.robots, window, self.params.trapped_epsilon,
                              self.tick)

    def copy(self) -> "EngineState":
        dup = EngineState(
            world=self.world,
            params=self.params,
            robots=[r.copy() for r in self.robots],
            hazard=self.hazard.copy(),
            marked=MarkedSet(self.marked.cells),
            swarm_stream=self.swarm_stream.clone(),
            tick=self.tick,
            duration_ticks=self.duration_ticks,
            alert_latency_ticks=self.alert_latency_ticks,
            swipe_radius=self.swipe_radius,
            k_impulse=self.k_impulse,
        )
        dup.pending_alerts = deque(self.pending_alerts)
        dup.alert_feed = list(self.alert_feed)
        return dup

    def operator_view(self, new_alerts=()) -> OperatorView:
        return OperatorView(
            tick=self.tick,
            remaining_s=self.remaining_s,
            robots=[(r.id, r.pos[0], r.pos[1], r.status) for r in self.robots],
            marked=self.marked.frozen(),
            new_alerts=list(new_alerts),
            alert_feed=list(self.alert_feed),
        )

    def state_token(self) -> str:
        """Canonical text of the full deterministic state, for hashing."""
        parts = [f"t={self.tick}"]
        for r in self.robots:
            parts.append(f"r{r.id}:{r.status}:{r.pos!r}:{r.vel!r}"
                         f":{r.pbest_pos!r}:{r.pbest_fitness!r}")
        parts.append("h:" + self.hazard.state_token())
        parts.append("m:" + ";".join(f"{c},{r}" for c, r in sorted(self.marked.cells)))
        return "|".join(parts)


@dataclass
class TickResult:
    tick: int
    hazard_events: list
    alerts: list          # delivered this tick
    rejections: list      # (action, reason)
    deactivated: list     # robot ids deactivated this tick
    applied_actions: list


def step_engine(state: EngineState, actions=()) -> TickResult:
    """Advance one tick: actions, hazards, impulses, movement, deactivation.

    Mark/Unmark actions apply before swipes at equal arrival order.
    """
    state.tick += 1
    tick = state.tick

    rejections = []
    applied = []
    swipes = []
    ordered = ([a for a in actions if a.kind in ("mark", "unmark")]
               + [a for a in actions if a.kind == "swipe"])
    for action in ordered:
        if action.kind == "swipe":
            swipes.append(action)
            applied.append(action)
        else:
            reason = state.marked.apply(action, state.world)
            if reason is None:
                applied.append(action)
            else:
                rejections.append((action, reason))

    events = state.hazard.step(tick)
    noise = state.hazard.params.alert_noise_cells
    for ev in events:
        if ev.activated:
            if noise:
                cells = jitter_cells(ev.activated, noise, state.world,
                                     state.hazard.stream)
                ev = HazardEvent(ev.tick, ev.kind, activated=cells)
            alert = render_alert(ev)
            state.pending_alerts.append((tick + state.alert_latency_ticks, alert))

    delivered = []
    while state.pending_alerts and state.pending_alerts[0][0] <= tick:
        _, alert = state.pending_alerts.popleft()
        delivered.append(alert)
        state.alert_feed.append(alert)

    impulses: dict = {}
    for swipe in swipes:
        for rid, (dx, dy) in swipe_impulses(swipe, state.robots,
                                            state.swipe_radius,
                                            state.k_impulse).items():
            ox, oy = impulses.get(rid, (0.0, 0.0))
            impulses[rid] = (ox + dx, oy + dy)

    step_swarm(state.robots, state.world, state.marked.frozen(), impulses,
               state.params, state.swarm_stream, tick)
    deactivated = apply_hazards(state.robots, state.hazard.active, state.world)
    return TickResult(tick, events, delivered, rejections, deactivated, applied)


@dataclass
class ForkProbe:
    """Observations from rolling a state copy forward with no operator."""
    horizon_ticks: int
    final_state: EngineState
    deactivations: int
    new_hazard_cells: set
    hazard_union: set
    first_converge_offset: int | None   # ticks until NA < converge_radius
    newly_trapped: set


def fork_probe(state: EngineState, horizon_ticks: int,
               converge_radius: float) -> ForkProbe:
    """Roll an isolated copy forward horizon_ticks with a passive operator."""
    fork = state.copy()
    start_active = set(fork.hazard.active)
    trapped_before = fork.trapped_ids()
    union = set(start_active)
    new_cells: set = set()
    deactivations = 0
    converge_offset = _converge_offset(fork, converge_radius, 0)
    for offset in range(1, horizon_ticks + 1):
        if fork.tick >= fork.duration_ticks:
            break
        result = step_engine(fork)
        deactivations += len(result.deactivated)
        union.update(fork.hazard.active)
        for ev in result.hazard_events:
            new_cells.update(ev.activated)
        if converge_offset is None:
            converge_offset = _converge_offset(fork, converge_radius, offset)
    newly_trapped = fork.trapped_ids() - trapped_before
    return ForkProbe(horizon_ticks, fork, deactivations,
                     new_cells - start_active, union, converge_offset,
                     newly_trapped)


def _converge_offset(state: EngineState, radius: float, offset: int):
    tx, ty = state.world.target
    for r in state.robots:
        if r.status != ACTIVE:
            continue
        if math.sqrt((r.pos[0] - tx) ** 2 + (r.pos[1] - ty) ** 2) < radius:
            return offset
    return None
