"""Task-performance metrics over swarm snapshots.

All four metrics are distances to the target, lower is better: CA uses the
centroid of active robots, NA the nearest active robot, NAQ1/NAQ2 the mean
of the nearest ceil(n/4) / ceil(n/2) active-robot distances (an alternative
"boundary" reading uses the distance at the quartile rank itself).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .swarm import ACTIVE
from .world import GridWorld


@dataclass(frozen=True)
class MetricSample:
    tick: int
    ca: float | None
    na: float | None
    naq1: float | None
    naq2: float | None
    active_count: int
    deactivated_count: int
    trapped_count: int
    all_deactivated: bool = False


def compute_metrics(robots, world: GridWorld, tick: int,
                    trapped_count: int = 0,
                    naq_mode: str = "prefix_mean") -> MetricSample:
    """Metric sample at one tick; flagged undefined when no robot is active."""
    tx, ty = world.target
    distances = []
    sx = sy = 0.0
    n_active = 0
    for robot in robots:
        if robot.status != ACTIVE:
            continue
        n_active += 1
        x, y = robot.pos
        sx += x
        sy += y
        distances.append(math.sqrt((x - tx) ** 2 + (y - ty) ** 2))
    n_deact = len(robots) - n_active
    if n_active == 0:
        return MetricSample(tick, None, None, None, None, 0, n_deact,
                            trapped_count, all_deactivated=True)
    distances.sort()
    cx, cy = sx / n_active, sy / n_active
    ca = math.sqrt((cx - tx) ** 2 + (cy - ty) ** 2)
    k1 = math.ceil(n_active / 4)
    k2 = math.ceil(n_active / 2)
    if naq_mode == "prefix_mean":
        naq1 = sum(distances[:k1]) / k1
        naq2 = sum(distances[:k2]) / k2
    elif naq_mode == "boundary":
        naq1 = distances[k1 - 1]
        naq2 = distances[k2 - 1]
    else:
        raise ValueError(f"unknown naq_mode {naq_mode!r}")
    return MetricSample(tick, ca, distances[0], naq1, naq2,
                        n_active, n_deact, trapped_count)
