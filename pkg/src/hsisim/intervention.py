"""Operator actions and scripted operator policies.

Operators influence the task only through avoidance marks (cells the swarm
treats as blocked) and swipe velocity impulses; they never touch hazard
ground truth, personal bests, or the target. Scripted policies drive
headless runs and see exactly the operator-observable state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .rng import RandomStream
from .swarm import ACTIVE
from .world import GridWorld, valid_cell


@dataclass(frozen=True)
class Mark:
    cell: tuple
    kind: str = "mark"


@dataclass(frozen=True)
class Unmark:
    cell: tuple
    kind: str = "unmark"


@dataclass(frozen=True)
class Swipe:
    origin: tuple
    direction: tuple   # unit vector
    magnitude: float   # normalized [0, 1]
    kind: str = "swipe"

    def __post_init__(self):
        n = math.sqrt(self.direction[0] ** 2 + self.direction[1] ** 2)
        if not math.isclose(n, 1.0, rel_tol=1e-6):
            raise ValueError("swipe direction must be a unit vector")
        if not (0.0 <= self.magnitude <= 1.0):
            raise ValueError("swipe magnitude must be in [0, 1]")


class MarkedSet:
    """Operator-drawn avoidance cells; marking obstacles is rejected."""

    def __init__(self, cells=()):
        self.cells: set = set(cells)

    def apply(self, action, world: GridWorld) -> str | None:
        """Apply a Mark/Unmark; returns a rejection reason or None."""
        cell = tuple(action.cell)
        if not valid_cell(cell, world):
            return "cell outside grid"
        if action.kind == "mark":
            if cell in world.static_obstacles:
                return "cell is a static obstacle"
            self.cells.add(cell)
            return None
        if action.kind == "unmark":
            self.cells.discard(cell)
            return None
        raise ValueError(f"not a mark action: {action.kind}")

    def frozen(self) -> frozenset:
        return frozenset(self.cells)


def swipe_impulses(action: Swipe, robots, swipe_radius: float,
                   k_impulse: float) -> dict:
    """Velocity impulse per robot id, linear falloff with distance.

    dv = k_impulse * magnitude * direction * (1 - dist / swipe_radius) for
    active robots within swipe_radius of the swipe origin.
    """
    out = {}
    ox, oy = action.origin
    for robot in robots:
        if robot.status != ACTIVE:
            continue
        dx = robot.pos[0] - ox
        dy = robot.pos[1] - oy
        dist = math.sqrt(dx * dx + dy * dy)
        if dist > swipe_radius:
            continue
        scale = k_impulse * action.magnitude * (1.0 - dist / swipe_radius)
        out[robot.id] = (scale * action.direction[0], scale * action.direction[1])
    return out


@dataclass
class OperatorView:
    """Everything an operator is allowed to observe at one tick.

    Hazard ground truth never appears here; hazards are visible only
    through the alert feed.
    """
    tick: int
    remaining_s: float
    robots: list           # (id, x, y, status)
    marked: frozenset
    new_alerts: list       # AlertMessage delivered this tick
    alert_feed: list       # all alerts delivered so far


# -- scripted policies -------------------------------------------------------


class PassivePolicy:
    """Never intervenes."""

    name = "passive"

    def act(self, view: OperatorView, stream: RandomStream) -> list:
        return []


class OracleMarkerPolicy:
    """Marks every alerted cell as soon as the alert arrives."""

    name = "oracle-marker"

    def act(self, view: OperatorView, stream: RandomStream) -> list:
        actions = []
        for alert in view.new_alerts:
            for cell in alert.cells:
                if cell not in view.marked:
                    actions.append(Mark(cell))
        return actions


class NoisyMarkerPolicy:
    """Marks each alerted cell with probability accuracy, after a delay."""

    name = "noisy-marker"

    def __init__(self, accuracy: float, delay_ticks: int = 10):
        if not (0.0 <= accuracy <= 1.0):
            raise ValueError("accuracy must be in [0, 1]")
        if delay_ticks < 0:
            raise ValueError("delay must be >= 0")
        self.accuracy = accuracy
        self.delay_ticks = delay_ticks
        self._pending: list = []   # (due tick, cell)

    def act(self, view: OperatorView, stream: RandomStream) -> list:
        for alert in view.new_alerts:
            for cell in alert.cells:
                if stream.u01() < self.accuracy:
                    self._pending.append((view.tick + self.delay_ticks, cell))
        actions = []
        keep = []
        for due, cell in self._pending:
            if due <= view.tick:
                if cell not in view.marked:
                    actions.append(Mark(cell))
            else:
                keep.append((due, cell))
        self._pending = keep
        return actions


class RandomSwiperPolicy:
    """Seeded random swipe at a fixed interval."""

    name = "random-swiper"

    def __init__(self, interval_ticks: int = 100):
        if interval_ticks < 1:
            raise ValueError("interval must be >= 1")
        self.interval_ticks = interval_ticks

    def act(self, view: OperatorView, stream: RandomStream) -> list:
        if view.tick == 0 or view.tick % self.interval_ticks != 0:
            return []
        if not view.robots:
            return []
        _, x, y, _status = stream.choice(view.robots)
        # direction from a normalized random vector (no trig, fully portable)
        while True:
            dx = stream.u01() - 0.5
            dy = stream.u01() - 0.5
            n = math.sqrt(dx * dx + dy * dy)
            if n > 1e-9:
                break
        return [Swipe((x, y), (dx / n, dy / n), stream.u01())]


POLICIES = {
    "passive": PassivePolicy,
    "oracle-marker": OracleMarkerPolicy,
    "noisy-marker": NoisyMarkerPolicy,
    "random-swiper": RandomSwiperPolicy,
}


def make_policy(name: str, **kwargs):
    if name not in POLICIES:
        raise ValueError(f"unknown policy {name!r}; choose from {sorted(POLICIES)}")
    return POLICIES[name](**kwargs)
