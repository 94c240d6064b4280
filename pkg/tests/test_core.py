import numpy as np
import pytest
from hypothesis import given, strategies as st

from goalseq import (
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
from goalseq.dynamics import DynamicsModel
from goalseq.gridworld import LOCAL, gridworld_library


def test_max_steps_length_is_fixed():
    rng = np.random.default_rng(0)
    assert all(sample_activation_length(MaxSteps(10), rng) == 10 for _ in range(20))


def test_certain_termination_lasts_one_step():
    rng = np.random.default_rng(1)
    assert {sample_activation_length(PerStepProbability(1.0), rng) for _ in range(1000)} == {1}


def test_geometric_mean_length():
    rng = np.random.default_rng(2)
    lengths = [sample_activation_length(PerStepProbability(0.2), rng) for _ in range(100_000)]
    assert 4.9 <= np.mean(lengths) <= 5.1


def test_zero_beta_is_rejected():
    with pytest.raises(NonTerminatingController, match="beta = 0"):
        sample_activation_length(PerStepProbability(0.0), np.random.default_rng(0))


def test_predicate_length_is_open():
    assert sample_activation_length(Predicate(lambda s: True), np.random.default_rng(0)) is None


@pytest.mark.parametrize("beta", [-0.1, 1.5])
def test_beta_outside_unit_interval(beta):
    with pytest.raises(ValueError):
        PerStepProbability(beta)


def test_chain_controllers_apply_everywhere(chain, quiet_lib):
    assert all(applicable(c, s) for c in quiet_lib for s in range(1, 20))


def test_local_greedy_initiation(grid):
    greedy = gridworld_library(grid)[LOCAL]
    assert not applicable(greedy, grid.start)
    beside = (grid.goal[0] - 1, grid.goal[1])
    assert applicable(greedy, beside)


def test_duplicate_ids_rejected(quiet_lib):
    c = quiet_lib[1]
    with pytest.raises(ValueError, match="duplicate"):
        ControllerLibrary((c, c))


def test_subset_and_lookup(quiet_lib):
    sub = quiet_lib.subset(3, 5)
    assert [c.id for c in sub] == [3, 5]
    with pytest.raises(KeyError):
        sub[1]


def test_bad_policy_output(chain):
    bad = Controller(9, "bad", lambda s: (1.0,), PerStepProbability(0.5), DynamicsModel(chain))
    with pytest.raises(ValueError, match="bad action distribution"):
        bad.action_probs(1)


def test_substreams_repeat_and_differ():
    a = substream(5, 1, 2).random(4)
    assert np.array_equal(a, substream(5, 1, 2).random(4))
    assert not np.array_equal(a, substream(5, 2, 1).random(4))


@given(st.integers(0, 2**32), st.integers(0, 50))
def test_act_matches_policy_support(seed, state):
    from goalseq import ChainSpec, benchmark_library

    spec = ChainSpec()
    lib = benchmark_library(spec)
    s = 1 + state % 19
    rng = np.random.default_rng(seed)
    for c in lib:
        a = c.act(s, rng)
        probs = c.action_probs(s)
        assert probs[spec.actions.index(a)] > 0
