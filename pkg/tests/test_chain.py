import numpy as np
import pytest

from goalseq import ChainSpec, PerStepProbability, benchmark_library, chain_step, generate_chain_demos
from goalseq.chain import LEFT, RIGHT, termination_probability


def test_step_table_cases(chain):
    assert chain_step(chain, 19, RIGHT) == (20, 1, True)
    assert chain_step(chain, 1, LEFT) == (1, 0, False)
    assert chain_step(chain, 7, RIGHT) == (8, 0, False)


@pytest.mark.parametrize("s", [0, 20, 25])
def test_step_outside_chain(chain, s):
    with pytest.raises(ValueError):
        chain_step(chain, s, RIGHT)


def test_library_shape(chain):
    lib = benchmark_library(chain)
    assert [c.id for c in lib] == [1, 2, 3, 4, 5]
    assert [c.termination.beta for c in lib] == [0.9, 0.5, 0.2, 0.5, 0.5]
    assert all(isinstance(c.termination, PerStepProbability) for c in lib)


def test_continue_semantics_flips_beta(chain):
    lib = benchmark_library(chain, beta_semantics="continue")
    assert [round(c.termination.beta, 12) for c in lib][:3] == [0.1, 0.5, 0.8]
    with pytest.raises(ValueError):
        termination_probability(0.3, "sometimes")


def test_noiseless_model_matches_environment(chain, quiet_lib):
    for c in quiet_lib:
        for s in range(1, 20):
            for a in chain.actions:
                assert c.dynamics.true_step(s, a) == chain_step(chain, s, a)[0]


def test_plain_demo(chain):
    demo, = generate_chain_demos(chain, 1)
    assert demo.states == tuple(range(1, 21)) and demo.times is None


def test_dithered_demos_keep_path(chain):
    demos = generate_chain_demos(chain, 5, 0.5, np.random.default_rng(0))
    assert all(d.states == tuple(range(1, 21)) for d in demos)
    assert len({d.times for d in demos}) == 5


def test_codec(chain):
    assert chain.decode(chain.encode(20)) == 20
    for bad in (0, 21, True, "3"):
        with pytest.raises(ValueError):
            chain.decode(bad)


def test_bad_chain_specs():
    with pytest.raises(ValueError):
        ChainSpec(1)
    with pytest.raises(ValueError):
        ChainSpec(5, start_state=6)
