"""Experiment drivers shared by the CLI and the scripts."""

from __future__ import annotations

import statistics
from dataclasses import dataclass, replace

import numpy as np

from .chain import ChainSpec, benchmark_library, generate_chain_demos
from .config import ConfigError, ExperimentConfig, SweepCell, SweepResult
from .core import ControllerLibrary, PerStepProbability
from .goalscore import GoalScorer, fit_from_demos, noisy_wrap
from .gridworld import LOCAL, WAYPOINT, GridSpec, generate_grid_demos, gridworld_library
from .selector import SelectorConfig, execute_episode


def episode_seed(base: int, index: int) -> int:
    """Seed of episode ``index`` in a run with base seed ``base``.

    Derived through SeedSequence spawning, so runs with different bases do
    not share episodes while every sweep cell replays the same seeds.
    """
    ss = np.random.SeedSequence(base, spawn_key=(index,))
    return int(ss.generate_state(1, np.uint64)[0])


def build_library(cfg: ExperimentConfig, world, p_dyn: float | None = None) -> ControllerLibrary:
    p = cfg.p_dyn if p_dyn is None else p_dyn
    if isinstance(world, ChainSpec):
        return benchmark_library(world, p, beta_semantics=cfg.beta_semantics,
                                 random_beta=cfg.random_beta, corruption=cfg.corruption)
    return gridworld_library(world, p, cfg.corruption, cfg.random_beta)


def make_demos(cfg: ExperimentConfig, world, count: int | None = None):
    count = count or cfg.demo_count
    rng = np.random.default_rng(cfg.seed) if cfg.demo_dither else None
    if isinstance(world, ChainSpec):
        return generate_chain_demos(world, count, cfg.demo_dither, rng)
    return generate_grid_demos(world, count, cfg.demo_dither, rng)


def build_scorer(cfg: ExperimentConfig, world, p_goal: float | None = None) -> GoalScorer:
    if cfg.scorer_path:
        try:
            with open(cfg.scorer_path) as fh:
                base = GoalScorer.from_json(fh.read(), world.decode)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"cannot load scorer {cfg.scorer_path}: {exc}") from None
    else:
        base = fit_from_demos(make_demos(cfg, world), world.metric)
    p = cfg.p_goal if p_goal is None else p_goal
    return noisy_wrap(base, p, cfg.goal_noise_kind)


def selector_config(cfg: ExperimentConfig, **overrides) -> SelectorConfig:
    base = SelectorConfig(
        horizon=cfg.horizon_mode(),
        k=cfg.k,
        max_planning_steps=cfg.planning_steps(),
        replan_every_step=cfg.replan_every_step,
    )
    return replace(base, **overrides)


def run_episodes(world, lib, g, scfg: SelectorConfig, base_seed: int, n: int):
    return [execute_episode(world, lib, g, scfg, episode_seed(base_seed, i)) for i in range(n)]


# --------------------------------------------------------------------------
# Noise sweep
# --------------------------------------------------------------------------


def summarize_cell(p_dyn: float, p_goal: float, traces) -> SweepCell:
    counts = [t.activations for t in traces]
    return SweepCell(
        p_dyn=float(p_dyn),
        p_goal=float(p_goal),
        episodes=len(counts),
        mean_activations=float(statistics.fmean(counts)),
        median_activations=float(statistics.median(counts)),
        stdev=float(statistics.pstdev(counts)),
        success_rate=sum(t.success for t in traces) / len(traces),
    )


def run_sweep(cfg: ExperimentConfig, progress=None) -> SweepResult:
    """Activation-count statistics over the (p_dyn, p_goal) grid.

    Uses a chain of ``cfg.sweep.n_states`` states with the chain settings of
    ``cfg``; rows come out in grid order (p_dyn outer, p_goal inner).
    """
    sw = cfg.sweep
    start = int(cfg.env.get("start_state", 1)) if cfg.env_kind == "chain" else 1
    world = ChainSpec(sw.n_states, start)
    base_scorer = build_scorer(replace(cfg, scorer_path=None), world, 0.0)
    scfg = selector_config(cfg, max_planning_steps=sw.max_planning_steps, record_terminals=False)
    cells = []
    for p_dyn in sw.p_dyn:
        lib = build_library(cfg, world, p_dyn)
        for p_goal in sw.p_goal:
            g = noisy_wrap(base_scorer, p_goal, cfg.goal_noise_kind)
            traces = run_episodes(world, lib, g, scfg, cfg.seed, sw.episodes)
            cells.append(summarize_cell(p_dyn, p_goal, traces))
            if progress:
                progress(cells[-1])
    return SweepResult(cells)


def expected_activations(distance: int, stop_p: float) -> float:
    """Expected activations to cover ``distance`` steps with one right-mover.

    The controller terminates after each step with probability ``stop_p``;
    this is the renewal count E[N] with N the first n whose summed
    activation lengths reach ``distance``.
    """
    if distance <= 0:
        return 0.0
    if stop_p <= 0.0:
        return 1.0
    # f[d] = 1 + sum_{l<d} P(L = l) f[d - l]
    f = np.zeros(distance + 1)
    pl = stop_p * (1.0 - stop_p) ** np.arange(distance)  # P(L = l + 1)
    for d in range(1, distance + 1):
        f[d] = 1.0 + float(pl[: d - 1] @ f[d - 1:0:-1]) if d > 1 else 1.0
    return float(f[distance])


def noiseless_optimum(spec: ChainSpec, lib: ControllerLibrary) -> float:
    """Expected activations when always running the longest right-mover."""
    movers = [c for c in lib if isinstance(c.termination, PerStepProbability)
              and c.action_probs(spec.start)[-1] == 1.0]
    stop_p = min(c.termination.beta for c in movers)
    return expected_activations(spec.goal - spec.start, stop_p)


# --------------------------------------------------------------------------
# Gridworld composition table
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CompositionRow:
    name: str
    successes: int
    episodes: int
    mean_activations: float


def gridworld_table(cfg: ExperimentConfig, episodes: int | None = None):
    """Full-task successes for the composed library and each single controller."""
    world = cfg.world()
    if not isinstance(world, GridSpec):
        raise TypeError("gridworld_table needs a gridworld config")
    n = episodes or cfg.episodes
    lib = build_library(cfg, world)
    g = build_scorer(cfg, world)
    scfg = selector_config(cfg, record_terminals=False)
    rows, first_composed = [], None
    for name, sub in (("WaypointOnly", lib.subset(WAYPOINT)),
                      ("LocalOnly", lib.subset(LOCAL)),
                      ("Composed", lib)):
        traces = run_episodes(world, sub, g, scfg, cfg.seed, n)
        if name == "Composed":
            first_composed = traces[0]
        rows.append(CompositionRow(name, sum(t.success for t in traces), n,
                                   float(statistics.fmean(t.activations for t in traces))))
    return rows, first_composed
