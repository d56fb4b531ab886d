"""Dynamic hazard processes and operator alert rendering.

Three hazard kinds over grid cells: distributed (random cells appear at
intervals and expire), moving (a fixed-size footprint walks the grid), and
spreading (a region grows monotonically from an origin). Hazard cells never
lie on static obstacles. Every activation event yields an alert message;
the process itself is invisible to the operator except through alerts.
"""

from __future__ import annotations

from dataclasses import dataclass

from .rng import RandomStream
from .world import GridWorld, valid_cell

DIS = "dis"
MOV = "mov"
SPR = "spr"
KINDS = (DIS, MOV, SPR)

# 4-neighborhood; configurable to 8 via neighborhood=8
_OFFSETS_4 = ((1, 0), (-1, 0), (0, 1), (0, -1))
_OFFSETS_8 = _OFFSETS_4 + ((1, 1), (1, -1), (-1, 1), (-1, -1))


@dataclass
class HazardParams:
    kind: str = SPR
    # dis
    interval_ticks: int = 150
    cells_per_event: int = 3
    duration_ticks: int = 300
    # mov
    footprint_size: int = 4
    step_interval_ticks: int = 50
    walk_policy: str = "random-walk"  # or "patrol-cycle"
    patrol_leg: int = 5
    # spr
    origin_cell: tuple | None = None
    spread_interval_ticks: int = 100
    spread_probability: float = 0.35
    neighborhood: int = 4
    # alert imprecision hook: cells in alert text jittered by up to this
    # many cells per axis; 0 keeps alerts exact (the default)
    alert_noise_cells: int = 0

    def __post_init__(self):
        if self.kind not in KINDS and self.kind != "none":
            raise ValueError(f"unknown hazard kind {self.kind!r}")
        for name in ("interval_ticks", "duration_ticks", "step_interval_ticks",
                     "spread_interval_ticks"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not (0.0 <= self.spread_probability <= 1.0):
            raise ValueError("spread_probability must be in [0, 1]")
        if self.neighborhood not in (4, 8):
            raise ValueError("neighborhood must be 4 or 8")
        if self.alert_noise_cells < 0:
            raise ValueError("alert_noise_cells must be >= 0")

    @property
    def offsets(self):
        return _OFFSETS_4 if self.neighborhood == 4 else _OFFSETS_8


@dataclass
class HazardEvent:
    tick: int
    kind: str
    activated: tuple = ()
    deactivated: tuple = ()
    exhausted: bool = False


@dataclass
class AlertMessage:
    tick: int
    hazard_kind: str
    cells: tuple
    text: str


ALERT_THEMES = {
    DIS: ("falling objects", "Falling objects reported at {cells}"),
    MOV: ("natural disaster", "Strong winds reported moving at {cells}"),
    SPR: ("fire", "Fire reported spreading at {cells}"),
    "none": ("hazard", "Hazard reported at {cells}"),
}


def render_alert(event: HazardEvent, theme_key: str | None = None) -> AlertMessage:
    """Deterministic alert text naming the theme and exact affected cells."""
    if not event.activated:
        raise ValueError("cannot render an alert for an event with no new cells")
    key = theme_key if theme_key is not None else event.kind
    _, template = ALERT_THEMES.get(key, ALERT_THEMES["none"])
    cells = tuple(sorted(event.activated))
    text = template.format(cells=", ".join(f"cell ({c},{r})" for c, r in cells))
    return AlertMessage(event.tick, event.kind, cells, text)


def jitter_cells(cells, radius: int, world: GridWorld,
                 stream: RandomStream) -> tuple:
    """Displace each cell uniformly by up to radius per axis, clamped to
    the grid. Alerts rendered from jittered cells are imprecise on purpose
    and may name cells that never became hazardous."""
    out = []
    span = 2 * radius + 1
    for c, r in sorted(cells):
        nc = min(world.width - 1, max(0, c + stream.randrange(span) - radius))
        nr = min(world.height - 1, max(0, r + stream.randrange(span) - radius))
        out.append((nc, nr))
    return tuple(sorted(set(out)))


class HazardField:
    """Hazard ground truth, stepped once per tick by the session loop."""

    def __init__(self, params: HazardParams, world: GridWorld,
                 stream: RandomStream):
        self.params = params
        self.world = world
        self.stream = stream
        self.active: set = set()
        self.expiries: dict = {}       # dis: cell -> expiry tick
        self.footprint: list = []      # mov: ordered cells
        self._patrol_index = 0
        self._announced = False
        if params.kind == MOV:
            self._init_footprint()
        elif params.kind == SPR:
            origin = params.origin_cell
            if origin is None:
                origin = self._sample_free_cell()
            origin = tuple(origin)
            if not valid_cell(origin, world) or origin in world.static_obstacles:
                raise ValueError(f"invalid spread origin {origin}")
            self.active.add(origin)

    # -- helpers -----------------------------------------------------------

    def _free_cells(self, exclude=frozenset()) -> list:
        w = self.world
        return sorted((c, r) for c in range(w.width) for r in range(w.height)
                      if (c, r) not in w.static_obstacles and (c, r) not in exclude)

    def _sample_free_cell(self) -> tuple:
        return self.stream.choice(self._free_cells())

    def _init_footprint(self) -> None:
        """Grow a connected footprint from a sampled free origin."""
        size = self.params.footprint_size
        for _ in range(50):
            origin = self._sample_free_cell()
            cells = [origin]
            taken = {origin}
            while len(cells) < size:
                frontier = sorted(
                    n for c in cells for n in self._neighbors(c)
                    if n not in taken)
                if not frontier:
                    break
                pick = self.stream.choice(frontier)
                cells.append(pick)
                taken.add(pick)
            if len(cells) == size:
                self.footprint = cells
                self.active = set(cells)
                return
        raise ValueError("could not place the moving hazard footprint")

    def _neighbors(self, cell) -> list:
        out = []
        for dc, dr in self.params.offsets:
            n = (cell[0] + dc, cell[1] + dr)
            if valid_cell(n, self.world) and n not in self.world.static_obstacles:
                out.append(n)
        return out

    # -- stepping ----------------------------------------------------------

    def step(self, tick: int) -> list:
        """Advance the process to tick; returns the events that occurred."""
        events = []
        if not self._announced:
            # hazards that exist from the start are alerted like any other
            self._announced = True
            if self.active:
                events.append(HazardEvent(tick, self.params.kind,
                                          activated=tuple(sorted(self.active))))
        if self.params.kind == DIS:
            events.extend(self._step_dis(tick))
        elif self.params.kind == MOV:
            events.extend(self._step_mov(tick))
        elif self.params.kind == SPR:
            events.extend(self._step_spr(tick))
        return events

    def _step_dis(self, tick: int) -> list:
        events = []
        expired = tuple(sorted(c for c, e in self.expiries.items() if e <= tick))
        if expired:
            for c in expired:
                self.active.discard(c)
                del self.expiries[c]
            events.append(HazardEvent(tick, DIS, deactivated=expired))
        if tick > 0 and tick % self.params.interval_ticks == 0:
            eligible = self._free_cells(exclude=self.active)
            n = min(self.params.cells_per_event, len(eligible))
            if n == 0:
                events.append(HazardEvent(tick, DIS, exhausted=True))
            else:
                chosen = tuple(sorted(self.stream.sample(eligible, n)))
                for c in chosen:
                    self.active.add(c)
                    self.expiries[c] = tick + self.params.duration_ticks
                events.append(HazardEvent(tick, DIS, activated=chosen))
        return events

    def _step_mov(self, tick: int) -> list:
        if tick == 0 or tick % self.params.step_interval_ticks != 0:
            return []
        directions = self._directions_for_step()
        for dc, dr in directions:
            moved = [(c + dc, r + dr) for c, r in self.footprint]
            if all(valid_cell(m, self.world)
                   and m not in self.world.static_obstacles for m in moved):
                old = set(self.footprint)
                new = set(moved)
                self.footprint = moved
                self.active = new
                return [HazardEvent(tick, MOV,
                                    activated=tuple(sorted(new - old)),
                                    deactivated=tuple(sorted(old - new)))]
        return [HazardEvent(tick, MOV, exhausted=True)]

    def _directions_for_step(self) -> list:
        offsets = list(self.params.offsets[:4])
        if self.params.walk_policy == "patrol-cycle":
            # fixed E,N,W,S legs of patrol_leg steps; on rejection fall
            # through to the remaining directions in cycle order
            cycle = [(1, 0), (0, 1), (-1, 0), (0, -1)]
            leg = self._patrol_index // max(1, self.params.patrol_leg) % 4
            self._patrol_index += 1
            return cycle[leg:] + cycle[:leg]
        order = list(offsets)
        self.stream.shuffle(order)
        return order

    def _step_spr(self, tick: int) -> list:
        if tick == 0 or tick % self.params.spread_interval_ticks != 0:
            return []
        frontier = sorted({n for c in self.active for n in self._neighbors(c)
                           if n not in self.active})
        if not frontier:
            return [HazardEvent(tick, SPR, exhausted=True)]
        grown = tuple(c for c in frontier
                      if self.stream.u01() < self.params.spread_probability)
        if not grown:
            return []
        self.active.update(grown)
        return [HazardEvent(tick, SPR, activated=grown)]

    # -- state inspection ---------------------------------------------------

    def copy(self) -> "HazardField":
        dup = HazardField.__new__(HazardField)
        dup.params = self.params
        dup.world = self.world
        dup.stream = self.stream.clone()
        dup.active = set(self.active)
        dup.expiries = dict(self.expiries)
        dup.footprint = list(self.footprint)
        dup._patrol_index = self._patrol_index
        dup._announced = self._announced
        return dup

    def state_token(self) -> str:
        """Canonical text of the process state, for state hashing."""
        parts = ["A" + ";".join(f"{c},{r}" for c, r in sorted(self.active))]
        if self.params.kind == DIS:
            parts.append("E" + ";".join(
                f"{c},{r}:{e}" for (c, r), e in sorted(self.expiries.items())))
        if self.params.kind == MOV:
            parts.append("F" + ";".join(f"{c},{r}" for c, r in self.footprint))
        return "|".join(parts)


class NullHazardField(HazardField):
    """Hazard-free task variant (kind 'none')."""

    def __init__(self, world: GridWorld, stream: RandomStream):
        self.params = HazardParams(kind="none")
        self.world = world
        self.stream = stream
        self.active = set()
        self.expiries = {}
        self.footprint = []
        self._patrol_index = 0
        self._announced = True

    def step(self, tick: int) -> list:
        return []


def make_hazard_field(kind: str, params: HazardParams, world: GridWorld,
                      stream: RandomStream) -> HazardField:
    if kind == "none":
        return NullHazardField(world, stream)
    if kind not in KINDS:
        raise ValueError(f"unknown hazard kind {kind!r}")
    p = HazardParams(**{**params.__dict__, "kind": kind})
    return HazardField(p, world, stream)
