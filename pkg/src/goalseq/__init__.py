"""Goal-driven sequencing of sub-controllers via model-predictive selection."""

from .chain import ChainSpec, benchmark_library, chain_step, generate_chain_demos
from .config import ConfigError, ExperimentConfig, SweepCell, SweepResult
from .core import (
    Controller,
    ControllerLibrary,
    MaxSteps,
    NonTerminatingController,
    PerStepProbability,
    Predicate,
    applicable,
    sample_activation_length,
    substream,
)
from .dynamics import (
    DynamicsModel,
    FixedSteps,
    RolloutSample,
    UnsupportedEnvironment,
    UntilTermination,
    exact_expected_score,
    expected_goal,
    predict_step,
    rollout,
    terminal_distribution,
)
from .goalscore import (
    Component,
    Demonstration,
    GoalScorer,
    ProgressDistribution,
    fit_from_demos,
    monotonicity_report,
    noisy_wrap,
)
from .gridworld import GridSpec, InvalidGridSpec, generate_grid_demos, grid_step, gridworld_library
from .selector import (
    NoApplicableController,
    SelectionTrace,
    SelectorConfig,
    evaluate_candidates,
    execute_episode,
    oracle_select,
    select,
)

__all__ = [name for name in dir() if not name.startswith("_")]
