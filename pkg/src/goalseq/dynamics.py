"""Per-controller forward models, n-step chaining and goal-score lookahead."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from . import _kernel
from .core import (
    Controller,
    GlobalState,
    MaxSteps,
    PerStepProbability,
    Predicate,
    applicable,
)

CORRUPTIONS = ("local", "global")

# UntilTermination rollouts draw randomness in blocks that start at
# FIRST_BLOCK steps and double up to MAX_BLOCK.
FIRST_BLOCK = 8
MAX_BLOCK = 64


class UnsupportedEnvironment(TypeError):
    pass


@dataclass(frozen=True)
class DynamicsModel:
    """Nominal transition of ``world`` with a per-step corruption probability.

    ``local`` corruption replaces the prediction with a uniform draw from the
    neighbourhood of the state the step was taken from (itself included);
    ``global`` draws uniformly from the whole state set.
    """

    world: object
    noise_p: float = 0.0
    corruption: str = "local"

    def __post_init__(self):
        if not 0.0 <= self.noise_p <= 1.0:
            raise ValueError(f"noise_p must lie in [0, 1], got {self.noise_p}")
        if self.corruption not in CORRUPTIONS:
            raise ValueError(f"unknown corruption {self.corruption!r}")

    def true_step(self, s, a):
        return self.world.model_step(s, a)

    def describe(self) -> dict:
        return {"noise_p": self.noise_p, "corruption": self.corruption}


@dataclass(frozen=True)
class FixedSteps:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("FixedSteps needs n >= 1")


@dataclass(frozen=True)
class UntilTermination:
    cap: int = 200

    def __post_init__(self):
        if self.cap < 1:
            raise ValueError("UntilTermination needs cap >= 1")


HorizonMode = Union[FixedSteps, UntilTermination]


@dataclass(frozen=True)
class RolloutSample:
    terminal: GlobalState
    steps: int
    states: tuple
    truncated: bool = False


def predict_step(m: DynamicsModel, s: GlobalState, a, rng: np.random.Generator) -> GlobalState:
    nominal = m.true_step(s, a)
    if rng.random() >= m.noise_p:
        return nominal
    if m.corruption == "local":
        hood = m.world.neighborhood(s)
        return hood[int(rng.random() * len(hood))]
    states = m.world.states
    return states[int(rng.random() * len(states))]


def _stop_params(c: Controller, h: HorizonMode):
    if isinstance(h, FixedSteps):
        return _kernel.STOP_COUNT, 0.0, h.n, h.n
    t = c.termination
    if isinstance(t, PerStepProbability):
        return _kernel.STOP_PROB, t.beta, 0, h.cap
    if isinstance(t, Predicate):
        return _kernel.STOP_PREDICATE, 0.0, 0, h.cap
    if isinstance(t, MaxSteps):
        return _kernel.STOP_COUNT, 0.0, t.n, min(t.n, h.cap)
    raise TypeError(f"unknown termination model {t!r}")


def simulate(m: DynamicsModel, c: Controller, s0: int, h: HorizonMode, k: int,
             rng: np.random.Generator, record: bool = False):
    """Run ``k`` independent rollouts from state index ``s0``.

    Returns ``(terminal, steps, truncated, trace)`` as arrays over samples;
    ``trace`` is a (steps, k) index array (-1 once a sample has stopped)
    when ``record`` is set, else ``None``.
    """
    world = m.world
    step_tab = world.step_table
    nbr, deg = world.neighbor_table
    tables = c.tables
    corruption = _kernel.LOCAL if m.corruption == "local" else _kernel.GLOBAL
    stop_kind, beta, max_steps, cap = _stop_params(c, h)
    fixed = isinstance(h, FixedSteps)

    state = np.full(k, s0, dtype=np.int64)
    alive = np.ones(k, dtype=np.bool_)
    steps = np.zeros(k, dtype=np.int64)
    pieces = []
    done = 0
    live = True
    size = FIRST_BLOCK
    while done < cap and live:
        block = cap if fixed else min(size, cap - done)
        size = min(2 * size, MAX_BLOCK)
        u = rng.random((block, 4, k))
        trace = np.empty((block, k) if record else (1, 1), dtype=np.int64)
        used = _kernel.advance(state, alive, steps, u, step_tab, tables.policy_cdf, nbr, deg,
                               m.noise_p, corruption, stop_kind, beta, tables.stop,
                               max_steps, trace, record)
        done += block
        live = used == block and alive.any()
        if record:
            pieces.append(trace[:used])
    if fixed:
        truncated = np.zeros(k, dtype=bool)
    elif isinstance(c.termination, MaxSteps):
        truncated = alive & (steps < c.termination.n)
    else:
        truncated = alive
    full = np.concatenate(pieces) if record else None
    return state, steps, truncated, full


def rollout(m: DynamicsModel, c: Controller, s0: GlobalState, h: HorizonMode,
            rng: np.random.Generator) -> RolloutSample:
    """One predicted activation of ``c`` from ``s0`` under model ``m``."""
    if not applicable(c, s0):
        raise ValueError(f"controller {c.name} is not applicable at {s0!r}")
    world = m.world
    terminal, steps, truncated, trace = simulate(m, c, world.index[s0], h, 1, rng, record=True)
    seq = [s0] + [world.states[i] for i in trace[:, 0] if i >= 0]
    return RolloutSample(world.states[terminal[0]], int(steps[0]), tuple(seq), bool(truncated[0]))


def goal_samples(m: DynamicsModel, c: Controller, g, s0: GlobalState, h: HorizonMode, k: int,
                 rng: np.random.Generator):
    """Scores of ``k`` predicted terminal states plus their state indices."""
    if k < 1:
        raise ValueError("need at least one sample")
    world = m.world
    terminal, _, _, _ = simulate(m, c, world.index[s0], h, k, rng)
    return g.score_indices(world, terminal, rng), terminal


def expected_goal(m: DynamicsModel, c: Controller, g, s0: GlobalState, h: HorizonMode, k: int,
                  rng: np.random.Generator) -> tuple[float, float]:
    """Monte-Carlo estimate of the goal score after one lookahead.

    Returns the sample mean and its standard error.
    """
    if not applicable(c, s0):
        raise ValueError(f"controller {c.name} is not applicable at {s0!r}")
    scores, _ = goal_samples(m, c, g, s0, h, k, rng)
    return summarize(scores)


def summarize(scores: np.ndarray) -> tuple[float, float]:
    """Sample mean and standard error (0 for a single sample)."""
    n = len(scores)
    lo, hi = scores.min(), scores.max()
    if lo == hi:
        # constant sample: report it exactly rather than a rounded average
        return float(lo), 0.0
    mean = scores.sum() / n
    dev = scores - mean
    return float(mean), float(np.sqrt(dev @ dev / (n - 1) / n))


# --------------------------------------------------------------------------
# Exact propagation (test oracle)
# --------------------------------------------------------------------------


def transition_matrix(m: DynamicsModel, c: Controller) -> np.ndarray:
    """Row-stochastic one-step matrix of ``c`` under ``m``, built state by state."""
    world = m.world
    idx = world.index
    n = len(world.states)
    out = np.zeros((n, n))
    for s in world.states:
        i = idx[s]
        probs = c.action_probs(s)
        for a, pa in zip(world.actions, probs):
            if pa:
                out[i, idx[m.true_step(s, a)]] += (1.0 - m.noise_p) * pa
        if m.noise_p:
            if m.corruption == "local":
                hood = world.neighborhood(s)
                for t in hood:
                    out[i, idx[t]] += m.noise_p / len(hood)
            else:
                out[i, :] += m.noise_p / n
    return out


def terminal_distribution(c: Controller, s0: GlobalState, h: HorizonMode, m: DynamicsModel | None = None,
                          tol: float = 1e-12) -> np.ndarray:
    """Exact distribution over the state index where one activation ends."""
    m = m or c.dynamics
    world = m.world
    M = transition_matrix(m, c)
    alive = np.zeros(len(world.states))
    alive[world.index[s0]] = 1.0
    ended = np.zeros_like(alive)
    t = c.termination
    if isinstance(h, FixedSteps):
        for _ in range(h.n):
            alive = alive @ M
        return alive
    stop_mask = np.array([bool(t.condition(s)) for s in world.states]) if isinstance(t, Predicate) else None
    for step in range(1, h.cap + 1):
        alive = alive @ M
        if isinstance(t, PerStepProbability):
            ended += t.beta * alive
            alive = (1.0 - t.beta) * alive
        elif isinstance(t, Predicate):
            ended += np.where(stop_mask, alive, 0.0)
            alive = np.where(stop_mask, 0.0, alive)
        elif step >= t.n:
            ended += alive
            alive = np.zeros_like(alive)
        if alive.sum() < tol:
            break
    return ended + alive


def exact_expected_score(c: Controller, g, s0: GlobalState, h: HorizonMode, env=None) -> float:
    """Exact expected terminal goal score on the chain benchmark.

    Scorer noise is folded in analytically, so ``g`` may be a noisy wrapper.
    """
    from .chain import ChainSpec

    world = env if env is not None else c.world
    if not isinstance(world, ChainSpec):
        raise UnsupportedEnvironment(f"exact scoring supports the chain only, got {type(world).__name__}")
    dist = terminal_distribution(c, s0, h)
    return float(dist @ g.expected_point_table(world))
