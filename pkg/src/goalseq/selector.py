"""Greedy model-predictive selection over a controller library.

At each planning step every applicable controller is rolled forward in its
own dynamics model, the predicted end states are scored by the goal scorer,
and the controller with the best expected score is executed in the true
environment until it terminates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .core import (
    ControllerLibrary,
    MaxSteps,
    PerStepProbability,
    Predicate,
    applicable,
    substream,
)
from .dynamics import (
    FixedSteps,
    HorizonMode,
    UntilTermination,
    exact_expected_score,
    goal_samples,
    summarize,
)

# Sub-stream key reserved for true-environment execution within a planning step.
EXECUTION_KEY = 2**31

# Exact scores closer than this count as tied.
TIE_TOL = 1e-12


class NoApplicableController(RuntimeError):
    pass


@dataclass(frozen=True)
class SelectorConfig:
    horizon: HorizonMode = field(default_factory=UntilTermination)
    k: int = 32
    max_planning_steps: int = 100
    replan_every_step: bool = False
    record_terminals: bool = True
    # safety cap on primitive steps of one executed activation
    execution_cap: int = 200

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.max_planning_steps < 1:
            raise ValueError("max_planning_steps must be >= 1")


@dataclass(frozen=True)
class CandidateEvaluation:
    controller_id: int
    applicable: bool
    mean: float | None = None
    stderr: float | None = None
    k: int = 0
    terminals: tuple = ()

    @property
    def key(self) -> float:
        return self.mean if self.applicable else -np.inf


@dataclass
class PlanningStep:
    state: object
    candidates: list
    chosen: int
    executed: list
    post_state: object


@dataclass
class SelectionTrace:
    seed: int
    steps: list = field(default_factory=list)
    success: bool = False
    diagnostic: str | None = None

    @property
    def activations(self) -> int:
        return len(self.steps)

    @property
    def primitive_steps(self) -> int:
        return sum(len(s.executed) - 1 for s in self.steps)

    def states_visited(self) -> list:
        if not self.steps:
            return []
        out = [self.steps[0].state]
        for s in self.steps:
            out.extend(s.executed[1:])
        return out

    def to_dict(self, world, header: dict | None = None) -> dict:
        enc = world.encode
        return {
            "header": {**(header or {}), "seed": self.seed},
            "steps": [
                {
                    "index": i,
                    "state": enc(st.state),
                    "candidates": [
                        {
                            "id": c.controller_id,
                            "applicable": c.applicable,
                            "mean": c.mean,
                            "stderr": c.stderr,
                            "k": c.k,
                            "terminals": [enc(t) for t in c.terminals],
                        }
                        for c in st.candidates
                    ],
                    "chosen": st.chosen,
                    "executed": [enc(s) for s in st.executed],
                    "post_state": enc(st.post_state),
                }
                for i, st in enumerate(self.steps)
            ],
            "summary": {
                "activations": self.activations,
                "primitive_steps": self.primitive_steps,
                "success": self.success,
                "diagnostic": self.diagnostic,
            },
        }

    def to_json(self, world, header: dict | None = None) -> str:
        return json.dumps(self.to_dict(world, header), indent=1)


def evaluate_candidates(s, lib: ControllerLibrary, g, cfg: SelectorConfig, seed: int,
                        step: int = 0) -> list[CandidateEvaluation]:
    """Score every controller of ``lib`` at ``s``.

    Controller ``c`` at planning step ``step`` draws from the sub-stream
    ``(seed, step, c.id)`` so results do not depend on library order.
    """
    if len(lib) == 0:
        raise ValueError("empty controller library")
    out = []
    for c in lib:
        if not applicable(c, s):
            out.append(CandidateEvaluation(c.id, False))
            continue
        rng = substream(seed, step, c.id)
        scores, terminal = goal_samples(c.dynamics, c, g, s, cfg.horizon, cfg.k, rng)
        mean, err = summarize(scores)
        terminals = tuple(c.world.states[i] for i in terminal) if cfg.record_terminals else ()
        out.append(CandidateEvaluation(c.id, True, mean, err, cfg.k, terminals))
    return out


def select(evals: list[CandidateEvaluation]) -> int:
    """Applicable candidate with the largest mean; ties go to the lowest id."""
    live = [e for e in evals if e.applicable]
    if not live:
        raise NoApplicableController("no applicable controller")
    best = max(e.mean for e in live)
    return min(e.controller_id for e in live if e.mean == best)


def oracle_select(s, lib: ControllerLibrary, g, cfg: SelectorConfig) -> int:
    """Exact-expectation counterpart of ``select`` (chain only)."""
    exact = {c.id: exact_expected_score(c, g, s, cfg.horizon) for c in lib if applicable(c, s)}
    if not exact:
        raise NoApplicableController("no applicable controller")
    best = max(exact.values())
    return min(cid for cid, v in exact.items() if v >= best - TIE_TOL)


def _run_controller(world, c, s, rng: np.random.Generator, cfg: SelectorConfig):
    """Execute ``c`` from ``s`` in the true environment until it terminates."""
    seq = [s]
    t = c.termination
    limit = 1 if cfg.replan_every_step else cfg.execution_cap
    if isinstance(t, MaxSteps):
        limit = min(limit, t.n)
    for _ in range(limit):
        s, done = world.step(s, c.act(s, rng))
        seq.append(s)
        if done:
            break
        if isinstance(t, PerStepProbability) and rng.random() < t.beta:
            break
        if isinstance(t, Predicate) and t.condition(s):
            break
    return seq


def execute_episode(world, lib: ControllerLibrary, g, cfg: SelectorConfig, seed: int) -> SelectionTrace:
    trace = SelectionTrace(seed)
    s = world.start
    for step in range(cfg.max_planning_steps):
        evals = evaluate_candidates(s, lib, g, cfg, seed, step)
        try:
            cid = select(evals)
        except NoApplicableController as exc:
            trace.diagnostic = f"{exc} at {world.encode(s)} (planning step {step})"
            return trace
        seq = _run_controller(world, lib[cid], s, substream(seed, step, EXECUTION_KEY), cfg)
        trace.steps.append(PlanningStep(s, evals, cid, seq, seq[-1]))
        s = seq[-1]
        if world.is_goal(s):
            trace.success = True
            return trace
    trace.diagnostic = "max planning steps reached"
    return trace
