import numpy as np
import pytest
from hypothesis import given, strategies as st

from goalseq import (
    ChainSpec,
    Controller,
    DynamicsModel,
    FixedSteps,
    GoalScorer,
    MaxSteps,
    PerStepProbability,
    UnsupportedEnvironment,
    UntilTermination,
    benchmark_library,
    exact_expected_score,
    expected_goal,
    predict_step,
    rollout,
    terminal_distribution,
)
from goalseq.chain import RIGHT
from goalseq.dynamics import summarize, transition_matrix
from goalseq.goalscore import ProgressDistribution
from goalseq.gridworld import gridworld_library


def right_mover(spec, beta, p_d=0.0, corruption="local", cid=7):
    return Controller(cid, "right", lambda s: (0.0, 1.0), PerStepProbability(beta),
                      DynamicsModel(spec, p_d, corruption))


def indicator(spec, target):
    return GoalScorer({s: ProgressDistribution.point(float(s == target)) for s in spec.states})


def test_noiseless_step(chain):
    m = DynamicsModel(chain)
    assert predict_step(m, 7, RIGHT, np.random.default_rng(0)) == 8


def test_forced_local_corruption_support(chain):
    m = DynamicsModel(chain, 1.0)
    rng = np.random.default_rng(0)
    seen = {predict_step(m, 7, RIGHT, rng) for _ in range(500)}
    assert seen == {6, 7, 8}
    assert {predict_step(m, 1, RIGHT, rng) for _ in range(500)} == {1, 2}


def test_forced_global_corruption_covers_chain(chain):
    m = DynamicsModel(chain, 1.0, "global")
    rng = np.random.default_rng(0)
    assert {predict_step(m, 7, RIGHT, rng) for _ in range(5000)} == set(chain.states)


def test_jitter_frequency(chain):
    m = DynamicsModel(chain, 0.2)
    rng = np.random.default_rng(3)
    hits = sum(predict_step(m, 7, RIGHT, rng) == 8 for _ in range(100_000))
    assert 0.86 <= hits / 100_000 <= 0.88


def test_fixed_rollout_sequence(chain):
    c = right_mover(chain, 0.5)
    r = rollout(c.dynamics, c, 3, FixedSteps(2), np.random.default_rng(0))
    assert (r.terminal, r.states, r.steps) == (5, (3, 4, 5), 2)


def test_certain_termination_rollout(chain):
    c = right_mover(chain, 1.0)
    r = rollout(c.dynamics, c, 3, UntilTermination(50), np.random.default_rng(0))
    assert (r.terminal, r.steps) == (4, 1)


def test_mean_terminal_of_half_beta(chain):
    c = right_mover(chain, 0.5)
    terminal, *_ = __import__("goalseq.dynamics", fromlist=["simulate"]).simulate(
        c.dynamics, c, 0, UntilTermination(50), 100_000, np.random.default_rng(4))
    # index 0 is state 1, so the mean state is mean index + 1
    assert 2.9 <= terminal.mean() + 1 <= 3.1


def test_max_steps_rollout_ends_on_count(chain):
    c = Controller(8, "right3", lambda s: (0.0, 1.0), MaxSteps(3), DynamicsModel(chain))
    r = rollout(c.dynamics, c, 2, UntilTermination(50), np.random.default_rng(0))
    assert (r.terminal, r.steps, r.truncated) == (5, 3, False)


def test_rollout_cap_marks_truncation(chain):
    c = right_mover(chain, 0.0001)
    r = rollout(c.dynamics, c, 1, UntilTermination(5), np.random.default_rng(0))
    assert r.steps == 5 and r.truncated


def test_deterministic_expectation_has_no_spread(chain, linear_scorer):
    c = right_mover(chain, 0.5)
    for k in (1, 16, 64):
        mean, err = expected_goal(c.dynamics, c, linear_scorer, 3, FixedSteps(4), k, np.random.default_rng(0))
        assert err == 0.0 and mean == pytest.approx(6 / 19)


def test_single_sample_equals_its_rollout(chain, linear_scorer):
    c = right_mover(chain, 0.3)
    mean, err = expected_goal(c.dynamics, c, linear_scorer, 2, UntilTermination(), 1, np.random.default_rng(11))
    r = rollout(c.dynamics, c, 2, UntilTermination(), np.random.default_rng(11))
    assert err == 0.0 and mean == linear_scorer.score(r.terminal).mean


def test_long_mover_exact_value(chain, linear_scorer):
    # closed form: sum_{l=1}^{19} 0.8^(l-1) / 19
    c = right_mover(chain, 0.2)
    assert exact_expected_score(c, linear_scorer, 1, UntilTermination()) == pytest.approx(0.2593653897874775, abs=1e-12)


def test_monte_carlo_agrees_with_exact(chain, linear_scorer):
    c = right_mover(chain, 0.2)
    exact = exact_expected_score(c, linear_scorer, 1, UntilTermination())
    mean, err = expected_goal(c.dynamics, c, linear_scorer, 1, UntilTermination(), 1_000_000,
                              np.random.default_rng(5))
    assert abs(mean - exact) <= 4 * err


def test_certain_termination_exact(chain, linear_scorer):
    c = right_mover(chain, 1.0)
    assert exact_expected_score(c, linear_scorer, 1, UntilTermination()) == pytest.approx(1 / 19, abs=1e-15)


def test_one_noisy_step_exact(chain):
    c = right_mover(chain, 0.5, p_d=0.2)
    value = exact_expected_score(c, indicator(chain, 8), 7, FixedSteps(1))
    assert value == pytest.approx(0.8 + 0.2 / 3, abs=1e-12)


def test_exact_rejects_gridworld(grid):
    lib = gridworld_library(grid)
    g = GoalScorer({s: ProgressDistribution.point(0.5) for s in grid.states}, "manhattan")
    with pytest.raises(UnsupportedEnvironment):
        exact_expected_score(lib[3], g, grid.start, UntilTermination())


def test_summarize_matches_numpy():
    x = np.random.default_rng(0).random(50)
    mean, err = summarize(x)
    assert mean == pytest.approx(x.mean())
    assert err == pytest.approx(x.std(ddof=1) / np.sqrt(50))


@given(st.sampled_from([0.0, 0.2, 0.7, 1.0]), st.sampled_from(["local", "global"]), st.integers(1, 5))
def test_transition_rows_are_distributions(p_d, corruption, cid):
    spec = ChainSpec(9)
    c = benchmark_library(spec, p_d, corruption=corruption)[cid]
    M = transition_matrix(c.dynamics, c)
    assert np.all(M >= 0) and np.allclose(M.sum(axis=1), 1.0)


@given(st.integers(1, 19), st.integers(1, 5), st.sampled_from([0.0, 0.3]))
def test_terminal_distribution_sums_to_one(s0, cid, p_d):
    spec = ChainSpec()
    c = benchmark_library(spec, p_d)[cid]
    dist = terminal_distribution(c, s0, UntilTermination())
    assert dist.sum() == pytest.approx(1.0, abs=1e-9)


def test_fixed_steps_exact_matches_matrix_power(chain):
    c = benchmark_library(chain, 0.3)[4]
    M = transition_matrix(c.dynamics, c)
    start = np.zeros(len(chain.states))
    start[4] = 1.0
    expected = start @ np.linalg.matrix_power(M, 6)
    assert np.allclose(terminal_distribution(c, 5, FixedSteps(6)), expected)
