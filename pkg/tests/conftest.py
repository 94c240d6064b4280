import pytest
from hypothesis import HealthCheck, settings

from goalseq import ChainSpec, GridSpec, benchmark_library, fit_from_demos, generate_chain_demos
from goalseq._kernel import warmup
from goalseq.gridworld import DEFAULT_MAP

settings.register_profile("suite", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("suite")

warmup()


@pytest.fixture(scope="session")
def chain():
    return ChainSpec()


@pytest.fixture(scope="session")
def linear_scorer(chain):
    # single walk 1..20: state s scores (s - 1) / 19
    return fit_from_demos(generate_chain_demos(chain, 1))


@pytest.fixture(scope="session")
def quiet_lib(chain):
    return benchmark_library(chain, 0.0)


@pytest.fixture(scope="session")
def grid():
    return GridSpec.from_ascii(DEFAULT_MAP)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
