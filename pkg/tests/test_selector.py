import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from goalseq import (
    ChainSpec,
    NoApplicableController,
    SelectorConfig,
    UntilTermination,
    benchmark_library,
    evaluate_candidates,
    exact_expected_score,
    execute_episode,
    fit_from_demos,
    generate_chain_demos,
    noisy_wrap,
    oracle_select,
    select,
)
from goalseq.selector import CandidateEvaluation


def ev(cid, mean, ok=True):
    return CandidateEvaluation(cid, ok, mean if ok else None, 0.0, 1)


def test_select_best_mean():
    assert select([ev(1, 0.32), ev(2, 0.21), ev(3, 0.16), ev(4, 0.05), ev(5, 0.0)]) == 1


def test_select_tie_goes_low():
    assert select([ev(4, 0.5), ev(2, 0.5), ev(3, 0.1)]) == 2


def test_select_single_applicable():
    assert select([ev(1, None, False), ev(2, -3.0), ev(3, None, False)]) == 2


def test_select_none_applicable():
    with pytest.raises(NoApplicableController):
        select([ev(1, None, False)])


def test_start_ranking(chain, quiet_lib, linear_scorer):
    evals = evaluate_candidates(1, quiet_lib, linear_scorer, SelectorConfig(k=256), seed=0)
    assert len(evals) == 5
    exact = {c.id: exact_expected_score(c, linear_scorer, 1, UntilTermination()) for c in quiet_lib}
    assert min(exact[i] for i in (1, 2, 3)) > max(exact[4], exact[5])
    means = {e.controller_id: e.mean for e in evals}
    assert min(means[i] for i in (1, 2, 3)) > max(means[4], means[5])


def test_inapplicable_flags(chain, linear_scorer):
    from dataclasses import replace

    lib = benchmark_library(chain)
    blocked = type(lib)(tuple(replace(c, initiation=lambda s: False) for c in lib))
    evals = evaluate_candidates(3, blocked, linear_scorer, SelectorConfig(), 0)
    assert not any(e.applicable for e in evals)


def test_k1_deterministic_score(chain, quiet_lib, linear_scorer):
    from goalseq import FixedSteps

    evals = evaluate_candidates(4, quiet_lib, linear_scorer, SelectorConfig(FixedSteps(3), k=1), 0)
    assert evals[0].mean == linear_scorer.score(7).mean and evals[0].terminals == (7,)


def test_oracle_prefers_longest_mover(quiet_lib, linear_scorer):
    assert oracle_select(1, quiet_lib, linear_scorer, SelectorConfig()) == 3


def test_oracle_prefers_longest_mover_continue(chain, linear_scorer):
    lib = benchmark_library(chain, beta_semantics="continue")
    assert oracle_select(1, lib, linear_scorer, SelectorConfig()) == 1


def test_oracle_tie_next_to_goal(quiet_lib, linear_scorer):
    assert oracle_select(19, quiet_lib, linear_scorer, SelectorConfig()) == 1


def test_oracle_library_of_one(quiet_lib, linear_scorer):
    assert oracle_select(5, quiet_lib.subset(5), linear_scorer, SelectorConfig()) == 5


def test_base_noise_episode_succeeds(chain):
    lib = benchmark_library(chain, 0.2)
    g = noisy_wrap(fit_from_demos(generate_chain_demos(chain, 5)), 0.2)
    trace = execute_episode(chain, lib, g, SelectorConfig(), 7)
    assert trace.success and trace.steps[-1].post_state == 20
    assert trace.activations == len(trace.steps) <= 100


def test_left_only_never_arrives(chain, quiet_lib, linear_scorer):
    trace = execute_episode(chain, quiet_lib.subset(5), linear_scorer, SelectorConfig(), 0)
    assert not trace.success and trace.activations == 100
    assert trace.diagnostic == "max planning steps reached"


def test_replay_is_identical(chain, quiet_lib, linear_scorer):
    cfg = SelectorConfig(k=1)
    a = execute_episode(chain, quiet_lib, linear_scorer, cfg, 3).to_json(chain)
    b = execute_episode(chain, quiet_lib, linear_scorer, cfg, 3).to_json(chain)
    assert a == b
    doc = json.loads(a)
    assert set(doc) == {"header", "steps", "summary"}


def test_trace_chain_is_connected(chain):
    lib = benchmark_library(chain, 0.2)
    g = noisy_wrap(fit_from_demos(generate_chain_demos(chain, 5)), 0.2)
    trace = execute_episode(chain, lib, g, SelectorConfig(), 11)
    for prev, nxt in zip(trace.steps, trace.steps[1:]):
        assert prev.post_state == nxt.state == prev.executed[-1]
    assert trace.primitive_steps == len(trace.states_visited()) - 1


def test_replan_every_step_runs_one_step(chain):
    lib = benchmark_library(chain, 0.2)
    g = noisy_wrap(fit_from_demos(generate_chain_demos(chain, 5)), 0.2)
    trace = execute_episode(chain, lib, g, SelectorConfig(replan_every_step=True, max_planning_steps=200), 1)
    assert all(len(st.executed) == 2 for st in trace.steps)


@given(st.integers(1, 19), st.floats(0.1, 10), st.floats(-1, 1))
def test_argmax_ignores_affine_rescaling(s, scale, shift):
    # selection only depends on the ordering of expected scores
    spec = ChainSpec()
    lib = benchmark_library(spec, 0.2)
    base = fit_from_demos(generate_chain_demos(spec, 1))
    from goalseq import GoalScorer
    from goalseq.goalscore import ProgressDistribution

    warped = GoalScorer({k: ProgressDistribution.point(scale * d.mean + shift) for k, d in base.table.items()})
    cfg = SelectorConfig(k=16)
    a = evaluate_candidates(s, lib, base, cfg, 9)
    b = evaluate_candidates(s, lib, warped, cfg, 9)
    assert select(a) == select(b)
