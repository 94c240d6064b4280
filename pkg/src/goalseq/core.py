"""Controller abstraction shared by every environment and the selector.

A controller bundles a policy over its own local view of the world, an
initiation predicate, a termination model and a forward dynamics model.
All controllers act on states of one shared super-space; the ``project``
callable maps a super-space state to whatever the policy consumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, Any, Callable, Sequence, Union

import numpy as np

if TYPE_CHECKING:
    from .dynamics import DynamicsModel

GlobalState = Any
Action = str


class NonTerminatingController(ValueError):
    pass


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator derived from ``seed`` and an integer key path.

    The same (seed, key) always yields the same stream, and distinct keys
    yield statistically independent streams.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


# --------------------------------------------------------------------------
# Termination models
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PerStepProbability:
    """Terminate after each primitive step with probability ``beta``."""

    beta: float

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")

    def describe(self) -> dict:
        return {"kind": "per_step", "beta": self.beta}


@dataclass(frozen=True)
class Predicate:
    """Terminate as soon as ``condition`` holds on the state just reached."""

    condition: Callable[[GlobalState], bool]
    name: str = "predicate"

    def describe(self) -> dict:
        return {"kind": "predicate", "name": self.name}


@dataclass(frozen=True)
class MaxSteps:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("MaxSteps needs n >= 1")

    def describe(self) -> dict:
        return {"kind": "max_steps", "n": self.n}


TerminationModel = Union[PerStepProbability, Predicate, MaxSteps]


def sample_activation_length(t: TerminationModel, rng: np.random.Generator) -> int | None:
    """Number of primitive steps one activation lasts.

    Returns ``None`` for predicate termination, whose length is only known
    while stepping through the rollout.
    """
    if isinstance(t, MaxSteps):
        return t.n
    if isinstance(t, Predicate):
        return None
    if t.beta == 0.0:
        raise NonTerminatingController("non-terminating controller: beta = 0")
    return int(rng.geometric(t.beta))


# --------------------------------------------------------------------------
# Controllers
# --------------------------------------------------------------------------


def _identity(s):
    return s


def _everywhere(s) -> bool:
    return True


@dataclass(frozen=True)
class ControllerTables:
    """Controller behaviour tabulated over the world's state index."""

    policy_cdf: np.ndarray  # (S, A) float64, cumulative action probabilities
    initiation: np.ndarray  # (S,) bool
    stop: np.ndarray  # (S,) bool, only meaningful for Predicate termination


@dataclass(frozen=True, eq=False)
class Controller:
    """One sub-controller of the library.

    ``policy`` maps the projected local state to action probabilities over
    ``world.actions`` (in that order). Deterministic policies return a
    one-hot tuple.
    """

    id: int
    name: str
    policy: Callable[[Any], Sequence[float]]
    termination: TerminationModel
    dynamics: "DynamicsModel"
    project: Callable[[GlobalState], Any] = _identity
    initiation: Callable[[GlobalState], bool] = _everywhere

    def __post_init__(self):
        if self.id < 0:
            raise ValueError("controller ids are non-negative")

    @property
    def world(self):
        return self.dynamics.world

    def action_probs(self, s: GlobalState) -> np.ndarray:
        probs = np.asarray(self.policy(self.project(s)), dtype=float)
        if probs.shape != (len(self.world.actions),) or np.any(probs < 0):
            raise ValueError(f"{self.name}: bad action distribution {probs!r}")
        return probs / probs.sum()

    def act(self, s: GlobalState, rng: np.random.Generator) -> Action:
        world = self.world
        cdf = self.tables.policy_cdf[world.index[s]]
        u = rng.random()
        a = 0
        while a < len(cdf) - 1 and u >= cdf[a]:
            a += 1
        return world.actions[a]

    @cached_property
    def tables(self) -> ControllerTables:
        world = self.world
        cdf = np.array([np.cumsum(self.action_probs(s)) for s in world.states])
        cdf[:, -1] = 1.0
        init = np.array([bool(self.initiation(s)) for s in world.states])
        if isinstance(self.termination, Predicate):
            stop = np.array([bool(self.termination.condition(s)) for s in world.states])
        else:
            stop = np.zeros(len(world.states), dtype=bool)
        return ControllerTables(cdf, init, stop)

    def describe(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "termination": self.termination.describe(),
            "dynamics": self.dynamics.describe(),
        }


def applicable(controller: Controller, s: GlobalState) -> bool:
    return bool(controller.initiation(s))


@dataclass(frozen=True)
class ControllerLibrary:
    controllers: tuple[Controller, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "controllers", tuple(self.controllers))
        ids = [c.id for c in self.controllers]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate controller ids: {ids}")

    def __iter__(self):
        return iter(self.controllers)

    def __len__(self):
        return len(self.controllers)

    def __getitem__(self, cid: int) -> Controller:
        for c in self.controllers:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def subset(self, *ids: int) -> "ControllerLibrary":
        return ControllerLibrary(tuple(self[i] for i in ids))

    def describe(self) -> list[dict]:
        return [c.describe() for c in self.controllers]
