"""The random-walk chain benchmark with its five-controller library.

States are 1..n_states plus the absorbing success state n_states + 1,
reached by moving right from the last chain state. The left end clamps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Controller, ControllerLibrary, PerStepProbability
from .dynamics import DynamicsModel
from .goalscore import Demonstration
from .world import World

LEFT = "left"
RIGHT = "right"

BETA_SEMANTICS = ("terminate", "continue")


@dataclass(frozen=True)
class ChainSpec(World):
    n_states: int = 19
    start_state: int = 1

    kind = "chain"
    metric = "abs"
    actions = (LEFT, RIGHT)

    def __post_init__(self):
        if self.n_states < 2:
            raise ValueError("chain needs at least 2 states")
        if not 1 <= self.start_state <= self.n_states:
            raise ValueError(f"start state {self.start_state} outside 1..{self.n_states}")

    @property
    def goal(self) -> int:
        return self.n_states + 1

    @property
    def start(self) -> int:
        return self.start_state

    @property
    def states(self) -> tuple:
        return tuple(range(1, self.n_states + 2))

    def step(self, s, a):
        nxt, _, done = chain_step(self, s, a)
        return nxt, done

    def is_goal(self, s) -> bool:
        return s == self.goal

    def neighborhood(self, s) -> tuple:
        return tuple(t for t in (s - 1, s, s + 1) if 1 <= t <= self.goal)

    def distance(self, s, t) -> int:
        return abs(s - t)

    def encode(self, s):
        return int(s)

    def decode(self, obj):
        if isinstance(obj, bool) or not isinstance(obj, int) or not 1 <= obj <= self.goal:
            raise ValueError(f"not a chain state: {obj!r}")
        return obj

    def describe(self) -> dict:
        return {"kind": "chain", "n_states": self.n_states, "start_state": self.start_state}


def chain_step(spec: ChainSpec, s: int, a: str) -> tuple[int, int, bool]:
    """One true environment transition: (next state, reward, done)."""
    if not 1 <= s <= spec.n_states:
        raise ValueError(f"state {s} outside 1..{spec.n_states}")
    if a == RIGHT:
        if s == spec.n_states:
            return spec.goal, 1, True
        return s + 1, 0, False
    if a == LEFT:
        return max(s - 1, 1), 0, False
    raise ValueError(f"unknown chain action {a!r}")


def _always(action):
    probs = tuple(1.0 if a == action else 0.0 for a in ChainSpec.actions)
    return lambda s: probs


def _uniform(s):
    return (0.5, 0.5)


def termination_probability(beta: float, semantics: str = "terminate") -> float:
    """Per-step termination probability for a nominal ``beta``.

    ``continue`` reads ``beta`` as the probability of carrying on.
    """
    if semantics == "terminate":
        return beta
    if semantics == "continue":
        return 1.0 - beta
    raise ValueError(f"unknown beta semantics {semantics!r}")


def benchmark_library(spec: ChainSpec, p_d: float = 0.0, *, beta_semantics: str = "terminate",
                      random_beta: float = 0.5, corruption: str = "local") -> ControllerLibrary:
    """Three right-movers (beta 0.9, 0.5, 0.2), a random mover and a left-mover."""
    model = DynamicsModel(spec, p_d, corruption)
    rows = [
        (1, "right_b0.9", _always(RIGHT), 0.9),
        (2, "right_b0.5", _always(RIGHT), 0.5),
        (3, "right_b0.2", _always(RIGHT), 0.2),
        (4, "random", _uniform, random_beta),
        (5, "left_b0.5", _always(LEFT), 0.5),
    ]
    return ControllerLibrary(tuple(
        Controller(cid, name, policy,
                   PerStepProbability(termination_probability(beta, beta_semantics)), model)
        for cid, name, policy, beta in rows
    ))


def jittered_times(n: int, dither: float, rng: np.random.Generator | None) -> tuple | None:
    """Timestamps for ``n`` frames whose spacing varies by up to ``dither``/2.

    Returns None (implicit 0..n-1) when ``dither`` is 0.
    """
    if not dither:
        return None
    if rng is None:
        raise ValueError("dithering needs an rng")
    gaps = rng.uniform(1.0 - dither / 2, 1.0 + dither / 2, size=n - 1)
    return (0.0,) + tuple(float(t) for t in np.cumsum(gaps))


def generate_chain_demos(spec: ChainSpec, count: int, dither: float = 0.0,
                         rng: np.random.Generator | None = None) -> list[Demonstration]:
    """Rightward walks start -> goal.

    With ``dither`` > 0 the demonstrator moves at an uneven pace: the walk is
    the same but its timestamps are jittered, so progress labels differ
    between demos while staying ordered within each one.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    walk = tuple(range(spec.start_state, spec.goal + 1))
    return [Demonstration(walk, id=i, times=jittered_times(len(walk), dither, rng)) for i in range(count)]
