"""PSO LBEST swarm: fitness sensing, neighborhood best, movement.

Robots maximize the source-intensity fitness P / max(d, d_min)^2 using the
local-best velocity update, restricted to neighbors within a metric
communication range. Obstacle avoidance is an axis-projection fallback;
robots entering hazardous cells are permanently deactivated.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .rng import RandomStream
from .world import GridWorld, SpawnArea, cell_center, cell_of, is_blocked, in_bounds

ACTIVE = "active"
DEACTIVATED = "deactivated"


@dataclass
class PsoParams:
    n_robots: int = 20
    w: float = 0.729
    c1: float = 1.49445
    c2: float = 1.49445
    vmax: float = 1.5
    comm_range: float = 5.0
    dt: float = 0.1
    # velocity recomputation cadence; movement integrates every tick.
    # Updating at every physics tick over-damps the swarm and freezes it
    # short of the target, so the search iterates at waypoint pace (1 Hz).
    pso_interval_ticks: int = 10
    source_power: float = 100.0
    d_min: float = 0.25
    trapped_window_s: float = 10.0
    trapped_epsilon: float = 0.25

    def __post_init__(self):
        if not (0 < self.w < 1):
            raise ValueError("inertia weight must be in (0, 1)")
        if self.c1 <= 0 or self.c2 <= 0 or self.vmax <= 0:
            raise ValueError("c1, c2, vmax must be positive")
        if self.comm_range <= 0 or self.d_min <= 0 or self.dt <= 0:
            raise ValueError("comm_range, d_min, dt must be positive")
        if self.pso_interval_ticks < 1:
            raise ValueError("pso_interval_ticks must be >= 1")


@dataclass
class RobotState:
    id: int
    pos: tuple
    vel: tuple = (0.0, 0.0)
    pbest_pos: tuple = (0.0, 0.0)
    pbest_fitness: float = 0.0
    status: str = ACTIVE
    # trapped detection: recent positions plus ticks of blocked-avoidance events
    history: deque = field(default_factory=deque)
    blocked_ticks: deque = field(default_factory=deque)

    def copy(self) -> "RobotState":
        r = RobotState(self.id, self.pos, self.vel, self.pbest_pos,
                       self.pbest_fitness, self.status)
        r.history = deque(self.history, maxlen=self.history.maxlen)
        r.blocked_ticks = deque(self.blocked_ticks)
        return r


def fitness(pos, world: GridWorld, power: float, d_min: float) -> float:
    """Source intensity at pos: power / max(d, d_min)^2, d Euclidean to target."""
    dx = pos[0] - world.target[0]
    dy = pos[1] - world.target[1]
    d = math.sqrt(dx * dx + dy * dy)
    if d < d_min:
        d = d_min
    return power / (d * d)


def lbest_of(robot: RobotState, robots, comm_range: float) -> tuple:
    """Personal best of the fittest active neighbor within comm_range.

    The robot itself always qualifies; ties break to the lowest id.
    Deactivated robots do not relay their personal bests.
    """
    rr = comm_range * comm_range
    px, py = robot.pos
    best = robot
    for other in robots:
        if other.status != ACTIVE or other.id == robot.id:
            continue
        dx = other.pos[0] - px
        dy = other.pos[1] - py
        if dx * dx + dy * dy > rr:
            continue
        if (other.pbest_fitness > best.pbest_fitness
                or (other.pbest_fitness == best.pbest_fitness
                    and other.id < best.id)):
            best = other
    return best.pbest_pos


def avoid(candidate, robot_pos, world: GridWorld, marked):
    """Axis-projection obstacle avoidance.

    Returns (position, blocked, stuck): if the candidate cell is blocked or
    out of bounds, try the x-only then y-only projected moves; if all three
    are blocked the robot stays put (stuck -> velocity zeroed this tick).
    """

    def ok(p):
        return in_bounds(p, world) and not is_blocked(cell_of(p, world), world, marked)

    if ok(candidate):
        return candidate, False, False
    x_only = (candidate[0], robot_pos[1])
    if ok(x_only):
        return x_only, True, False
    y_only = (robot_pos[0], candidate[1])
    if ok(y_only):
        return y_only, True, False
    return robot_pos, True, True


def spawn_swarm(params: PsoParams, world: GridWorld, spawn: SpawnArea,
                stream: RandomStream) -> list:
    """Robots at distinct unblocked cell centers inside the spawn block."""
    free = [c for c in spawn.cells() if not is_blocked(c, world)]
    if len(free) < params.n_robots:
        raise ValueError("spawn area has too few free cells for the swarm")
    cells = stream.sample(sorted(free), params.n_robots)
    window = int(round(params.trapped_window_s / params.dt))
    robots = []
    for rid, cell in enumerate(cells):
        pos = cell_center(cell, world)
        fit = fitness(pos, world, params.source_power, params.d_min)
        r = RobotState(rid, pos, (0.0, 0.0), pos, fit)
        r.history = deque([pos], maxlen=window + 1)
        robots.append(r)
    return robots


def step_swarm(robots, world: GridWorld, marked, impulses: dict,
               params: PsoParams, stream: RandomStream, tick: int) -> None:
    """Advance every active robot by one tick (in place).

    On velocity-update ticks the LBEST rule recomputes headings from the
    pre-step personal bests; between updates robots coast on their current
    velocity. The per-robot uniform draws come from a (tick, id)-keyed
    substream, so the result does not depend on update order. Swipe
    impulses apply at whatever tick they arrive.
    """
    update = (tick - 1) % params.pso_interval_ticks == 0
    lbests = {}
    if update:
        for robot in robots:
            if robot.status == ACTIVE:
                lbests[robot.id] = lbest_of(robot, robots, params.comm_range)

    for robot in robots:
        if robot.status != ACTIVE:
            continue
        vx, vy = robot.vel
        ix, iy = impulses.get(robot.id, (0.0, 0.0))
        if update:
            draws = stream.at(tick, robot.id)
            r1 = draws.u01()
            r2 = draws.u01()
            px, py = robot.pos
            lx, ly = lbests[robot.id]
            vx = (params.w * vx
                  + params.c1 * r1 * (robot.pbest_pos[0] - px)
                  + params.c2 * r2 * (lx - px) + ix)
            vy = (params.w * vy
                  + params.c1 * r1 * (robot.pbest_pos[1] - py)
                  + params.c2 * r2 * (ly - py) + iy)
        else:
            vx += ix
            vy += iy
        speed = math.sqrt(vx * vx + vy * vy)
        if speed > params.vmax:
            scale = params.vmax / speed
            vx *= scale
            vy *= scale
        candidate = (robot.pos[0] + vx * params.dt, robot.pos[1] + vy * params.dt)
        pos, blocked, stuck = avoid(candidate, robot.pos, world, marked)
        robot.pos = pos
        robot.vel = (0.0, 0.0) if stuck else (vx, vy)
        fit = fitness(pos, world, params.source_power, params.d_min)
        if fit > robot.pbest_fitness:
            robot.pbest_fitness = fit
            robot.pbest_pos = pos
        robot.history.append(pos)
        if blocked:
            robot.blocked_ticks.append(tick)
        window = (robot.history.maxlen or 1) - 1
        while robot.blocked_ticks and robot.blocked_ticks[0] <= tick - window:
            robot.blocked_ticks.popleft()


def apply_hazards(robots, hazard_cells, world: GridWorld) -> list:
    """Deactivate active robots standing in hazardous cells; absorbing."""
    hit = []
    for robot in robots:
        if robot.status == ACTIVE and cell_of(robot.pos, world) in hazard_cells:
            robot.status = DEACTIVATED
            robot.vel = (0.0, 0.0)
            hit.append(robot.id)
    return hit


def trapped_robots(robots, window_ticks: int, epsilon_m: float, tick: int) -> set:
    """Active robots pinned in place by obstacles.

    A robot is trapped when the bounding-box diagonal of its last
    window_ticks positions is below epsilon_m and it had at least one
    blocked-avoidance event in that window. Empty before the window fills.
    """
    if tick < window_ticks:
        return set()
    trapped = set()
    for robot in robots:
        if robot.status != ACTIVE or len(robot.history) < window_ticks + 1:
            continue
        if not robot.blocked_ticks:
            continue
        xs = [p[0] for p in robot.history]
        ys = [p[1] for p in robot.history]
        span = math.sqrt((max(xs) - min(xs)) ** 2 + (max(ys) - min(ys)) ** 2)
        if span < epsilon_m:
            trapped.add(robot.id)
    return trapped
