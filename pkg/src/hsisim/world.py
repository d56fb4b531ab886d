"""Grid world shared by the swarm, hazards and assessment modules.

Cells are (col, row) integer pairs addressing half-open squares of side
cell_size; positions are continuous (x, y) in meters. Positions exactly on
the max boundary map to the last cell so cell_of is total over the closed
bounds rectangle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .rng import RandomStream

Cell = tuple  # (col, row)


class WorldError(ValueError):
    pass


@dataclass(frozen=True)
class GridWorld:
    width: int
    height: int
    cell_size: float
    static_obstacles: frozenset = field(default_factory=frozenset)
    target: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise WorldError("grid must be at least 1x1")
        if self.cell_size <= 0:
            raise WorldError("cell_size must be positive")
        for (c, r) in self.static_obstacles:
            if not (0 <= c < self.width and 0 <= r < self.height):
                raise WorldError(f"obstacle cell {(c, r)} outside grid")
        tx, ty = self.target
        if not (0 <= tx <= self.width * self.cell_size
                and 0 <= ty <= self.height * self.cell_size):
            raise WorldError("target outside world bounds")
        if cell_of(self.target, self) in self.static_obstacles:
            raise WorldError("target lies inside a static obstacle cell")

    @property
    def bounds(self) -> tuple:
        return (self.width * self.cell_size, self.height * self.cell_size)

    @property
    def diagonal(self) -> float:
        w, h = self.bounds
        return math.sqrt(w * w + h * h)


def in_bounds(pos, world: GridWorld) -> bool:
    x, y = pos
    w, h = world.bounds
    return 0 <= x <= w and 0 <= y <= h


def cell_of(pos, world: GridWorld) -> Cell:
    """Cell containing pos; max-boundary positions clamp to the last cell."""
    if not in_bounds(pos, world):
        raise WorldError(f"position {pos} outside world bounds")
    col = min(int(pos[0] / world.cell_size), world.width - 1)
    row = min(int(pos[1] / world.cell_size), world.height - 1)
    return (col, row)


def cell_center(cell: Cell, world: GridWorld) -> tuple:
    cs = world.cell_size
    return ((cell[0] + 0.5) * cs, (cell[1] + 0.5) * cs)


def valid_cell(cell: Cell, world: GridWorld) -> bool:
    c, r = cell
    return 0 <= c < world.width and 0 <= r < world.height


def is_blocked(cell: Cell, world: GridWorld, marked=frozenset()) -> bool:
    """True iff cell is a static obstacle or operator-marked avoidance cell."""
    return cell in world.static_obstacles or cell in marked


REGION_LABELS = ("NW", "NE", "SW", "SE", "C")


def quadrant_regions(world: GridWorld) -> dict:
    """Partition of the grid into four quadrants plus a center block.

    The center block is the middle ceil(w/2) x ceil(h/2) cells and takes
    priority over the quadrants; row 0 is south (y = 0).
    """
    w, h = world.width, world.height
    if w < 2 or h < 2:
        raise WorldError("quadrant regions need a grid of at least 2x2")
    cw, ch = (w + 1) // 2, (h + 1) // 2
    c0, r0 = (w - cw) // 2, (h - ch) // 2
    regions = {label: set() for label in REGION_LABELS}
    for col in range(w):
        for row in range(h):
            if c0 <= col < c0 + cw and r0 <= row < r0 + ch:
                regions["C"].add((col, row))
            else:
                west = col < (w + 1) // 2
                south = row < (h + 1) // 2
                label = ("S" if south else "N") + ("W" if west else "E")
                regions[label].add((col, row))
    return regions


def region_of(cell: Cell, regions: dict) -> str:
    for label in REGION_LABELS:
        if cell in regions[label]:
            return label
    raise WorldError(f"cell {cell} not covered by regions")


@dataclass(frozen=True)
class SpawnArea:
    """Rectangular block of cells where the swarm starts (one corner)."""
    col0: int = 0
    row0: int = 0
    cols: int = 5
    rows: int = 5

    def cells(self) -> list:
        return [(self.col0 + c, self.row0 + r)
                for c in range(self.cols) for r in range(self.rows)]

    def centroid(self, world: GridWorld) -> tuple:
        cs = world.cell_size
        return ((self.col0 + self.cols / 2.0) * cs,
                (self.row0 + self.rows / 2.0) * cs)


def generate_world(width: int, height: int, cell_size: float,
                   obstacle_fraction: float, spawn: SpawnArea,
                   stream: RandomStream, target_cell=None,
                   min_target_dist_frac: float = 0.5) -> GridWorld:
    """Build a world with seeded obstacles and target placement.

    The target defaults to a uniformly sampled cell center at least
    min_target_dist_frac of the grid diagonal away from the spawn centroid;
    obstacles are then sampled from the remaining cells, excluding the
    target cell and the spawn area.
    """
    all_cells = [(c, r) for c in range(width) for r in range(height)]
    spawn_cells = set(spawn.cells())
    base = GridWorld(width, height, cell_size,
                     target=(width * cell_size / 2.0, height * cell_size / 2.0))
    sx, sy = spawn.centroid(base)
    min_dist = min_target_dist_frac * base.diagonal

    if target_cell is None:
        def far_enough(cell):
            x, y = cell_center(cell, base)
            return math.sqrt((x - sx) ** 2 + (y - sy) ** 2) >= min_dist

        candidates = [c for c in all_cells
                      if c not in spawn_cells and far_enough(c)]
        if not candidates:
            raise WorldError("no target cell satisfies the distance constraint")
        target_cell = stream.choice(sorted(candidates))
    target = cell_center(target_cell, base)

    n_obstacles = int(obstacle_fraction * width * height)
    eligible = sorted(c for c in all_cells
                      if c != tuple(target_cell) and c not in spawn_cells)
    if n_obstacles > len(eligible):
        raise WorldError("obstacle fraction leaves no room for spawn/target")
    obstacles = frozenset(stream.sample(eligible, n_obstacles))
    return GridWorld(width, height, cell_size, obstacles, target)
