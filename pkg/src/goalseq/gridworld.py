"""Grid environment whose controllers see different slices of the state.

The waypoint navigator works in global coordinates; the local greedy
controller only ever sees a small occupancy window around the agent and
cannot tell where it is. Neither can finish the task alone.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .core import Controller, ControllerLibrary, PerStepProbability, Predicate
from .dynamics import DynamicsModel
from .goalscore import Demonstration
from .chain import jittered_times
from .world import World

UP, DOWN, LEFT, RIGHT = "up", "down", "left", "right"
MOVES = {UP: (0, -1), DOWN: (0, 1), LEFT: (-1, 0), RIGHT: (1, 0)}

FREE, WALL, GOAL = 0, 1, 2

DEFAULT_MAP = """\
#########
#S......#
#.......#
#.......#
######W##
#....G..#
#.......#
#########
"""


class InvalidGridSpec(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec(World):
    width: int
    height: int
    walls: frozenset
    start_cell: tuple
    goal: tuple
    waypoint: tuple
    radius: int = 1

    kind = "gridworld"
    metric = "manhattan"
    actions = (UP, DOWN, LEFT, RIGHT)

    def __post_init__(self):
        object.__setattr__(self, "walls", frozenset(map(tuple, self.walls)))
        cells = [self.start_cell, self.goal, self.waypoint]
        if len(set(cells)) != 3:
            raise InvalidGridSpec("start, waypoint and goal must be distinct")
        for c in cells:
            if not self.inside(c) or c in self.walls:
                raise InvalidGridSpec(f"cell {c} is a wall or off the grid")
        if self.radius < 1:
            raise InvalidGridSpec("observation radius must be >= 1")
        if shortest_path(self, self.start_cell, self.waypoint) is None or \
                shortest_path(self, self.waypoint, self.goal) is None:
            raise InvalidGridSpec("spec violates path precondition")

    @classmethod
    def from_ascii(cls, text: str, radius: int = 1) -> "GridSpec":
        rows = [r for r in text.splitlines() if r.strip()]
        if not rows:
            raise InvalidGridSpec("empty map")
        width = max(len(r) for r in rows)
        walls, marks = set(), {}
        for y, row in enumerate(rows):
            for x, ch in enumerate(row.ljust(width, "#")):
                if ch == "#":
                    walls.add((x, y))
                elif ch in "SWG":
                    if ch in marks:
                        raise InvalidGridSpec(f"map has more than one {ch!r}")
                    marks[ch] = (x, y)
                elif ch != ".":
                    raise InvalidGridSpec(f"unknown map character {ch!r}")
        missing = set("SWG") - set(marks)
        if missing:
            raise InvalidGridSpec(f"map lacks {''.join(sorted(missing))}")
        return cls(width, len(rows), frozenset(walls), marks["S"], marks["G"], marks["W"], radius)

    def to_ascii(self) -> str:
        marks = {self.start_cell: "S", self.waypoint: "W", self.goal: "G"}
        lines = []
        for y in range(self.height):
            lines.append("".join(
                "#" if (x, y) in self.walls else marks.get((x, y), ".") for x in range(self.width)
            ))
        return "\n".join(lines) + "\n"

    def translated(self, dx: int, dy: int, width: int, height: int) -> "GridSpec":
        """Same layout shifted by (dx, dy) inside a larger walled grid."""
        shift = lambda c: (c[0] + dx, c[1] + dy)
        walls = {shift(w) for w in self.walls}
        for x in range(width):
            for y in range(height):
                if not (0 <= x - dx < self.width and 0 <= y - dy < self.height):
                    walls.add((x, y))
        return GridSpec(width, height, frozenset(walls), shift(self.start_cell), shift(self.goal),
                        shift(self.waypoint), self.radius)

    # -- World protocol ------------------------------------------------------

    @property
    def start(self):
        return self.start_cell

    @property
    def states(self) -> tuple:
        return tuple((x, y) for y in range(self.height) for x in range(self.width)
                     if (x, y) not in self.walls)

    def inside(self, c) -> bool:
        return 0 <= c[0] < self.width and 0 <= c[1] < self.height

    def blocked(self, c) -> bool:
        return not self.inside(c) or c in self.walls

    def step(self, s, a):
        nxt, done = grid_step(self, s, a)
        return nxt, done

    def is_goal(self, s) -> bool:
        return s == self.goal

    def neighborhood(self, s) -> tuple:
        return (s,) + tuple(n for n in _adjacent(s) if not self.blocked(n))

    def distance(self, s, t) -> int:
        return abs(s[0] - t[0]) + abs(s[1] - t[1])

    def encode(self, s):
        return [int(s[0]), int(s[1])]

    def decode(self, obj):
        if not isinstance(obj, (list, tuple)) or len(obj) != 2:
            raise ValueError(f"not a grid cell: {obj!r}")
        cell = (int(obj[0]), int(obj[1]))
        if self.blocked(cell):
            raise ValueError(f"not a free cell: {obj!r}")
        return cell

    def describe(self) -> dict:
        return {"kind": "gridworld", "map": self.to_ascii().splitlines(), "radius": self.radius}


def _adjacent(c):
    return [(c[0] + dx, c[1] + dy) for dx, dy in MOVES.values()]


def grid_step(spec: GridSpec, s: tuple, a: str) -> tuple[tuple, bool]:
    if spec.blocked(s):
        raise ValueError(f"cell {s} is a wall")
    dx, dy = MOVES[a]
    nxt = (s[0] + dx, s[1] + dy)
    if spec.blocked(nxt):
        nxt = s
    return nxt, nxt == spec.goal


def shortest_path(spec: GridSpec, a: tuple, b: tuple) -> list | None:
    """BFS path from ``a`` to ``b`` inclusive, or None when unreachable."""
    prev = {a: None}
    queue = deque([a])
    while queue:
        c = queue.popleft()
        if c == b:
            path = []
            while c is not None:
                path.append(c)
                c = prev[c]
            return path[::-1]
        for n in _adjacent(c):
            if not spec.blocked(n) and n not in prev:
                prev[n] = c
                queue.append(n)
    return None


# --------------------------------------------------------------------------
# Controllers
# --------------------------------------------------------------------------


def _one_hot(action):
    return tuple(1.0 if a == action else 0.0 for a in GridSpec.actions)


def local_window(spec: GridSpec, s: tuple) -> tuple:
    """Occupancy codes of the (2r+1)^2 window centred on ``s``, row-major.

    Off-grid cells read as walls. This is all the local controller gets.
    """
    r = spec.radius
    out = []
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            c = (s[0] + dx, s[1] + dy)
            out.append(WALL if spec.blocked(c) else GOAL if c == spec.goal else FREE)
    return tuple(out)


def goal_offset(window: tuple) -> tuple | None:
    side = int(round(len(window) ** 0.5))
    r = side // 2
    for i, code in enumerate(window):
        if code == GOAL:
            return (i % side - r, i // side - r)
    return None


def local_greedy_policy(window: tuple):
    side = int(round(len(window) ** 0.5))
    r = side // 2
    off = goal_offset(window)
    if off is None:
        return _one_hot(UP)
    for a in (RIGHT, LEFT, DOWN, UP):
        dx, dy = MOVES[a]
        if abs(off[0] - dx) + abs(off[1] - dy) < abs(off[0]) + abs(off[1]):
            if window[(r + dy) * side + (r + dx)] != WALL:
                return _one_hot(a)
    return _one_hot(UP)


def waypoint_policy(spec: GridSpec):
    target = spec.waypoint

    def policy(cell):
        here = spec.distance(cell, target)
        for a in (DOWN, UP, RIGHT, LEFT):
            dx, dy = MOVES[a]
            nxt = (cell[0] + dx, cell[1] + dy)
            if not spec.blocked(nxt) and spec.distance(nxt, target) < here:
                return _one_hot(a)
        # at the waypoint (or stuck): step to the first open neighbour
        for a in (UP, DOWN, LEFT, RIGHT):
            dx, dy = MOVES[a]
            if not spec.blocked((cell[0] + dx, cell[1] + dy)):
                return _one_hot(a)
        return _one_hot(UP)

    return policy


def _random_policy(s):
    return (0.25, 0.25, 0.25, 0.25)


WAYPOINT, LOCAL, RANDOM = 1, 2, 3


def gridworld_library(spec: GridSpec, p_d: float = 0.0, corruption: str = "local",
                      random_beta: float = 0.5) -> ControllerLibrary:
    model = DynamicsModel(spec, p_d, corruption)
    navigator = Controller(
        WAYPOINT, "waypoint_navigator", waypoint_policy(spec),
        Predicate(lambda s: s == spec.waypoint, "at_waypoint"), model,
    )
    window = lambda s: local_window(spec, s)
    greedy = Controller(
        LOCAL, "local_greedy", local_greedy_policy,
        Predicate(lambda s: s == spec.goal, "at_goal"), model,
        project=window,
        initiation=lambda s: GOAL in window(s),
    )
    walker = Controller(RANDOM, "random_walk", _random_policy, PerStepProbability(random_beta), model)
    return ControllerLibrary((navigator, greedy, walker))


def generate_grid_demos(spec: GridSpec, count: int, dither: float = 0.0,
                        rng: np.random.Generator | None = None) -> list[Demonstration]:
    """Shortest walks start -> waypoint -> goal, optionally with jittered timing."""
    if count < 1:
        raise ValueError("count must be >= 1")
    first = shortest_path(spec, spec.start_cell, spec.waypoint)
    second = shortest_path(spec, spec.waypoint, spec.goal)
    path = tuple(first + second[1:])
    return [Demonstration(path, id=i, times=jittered_times(len(path), dither, rng)) for i in range(count)]
