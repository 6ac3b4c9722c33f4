import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from radarwave.config import RadarConfig, build_constellation, build_flat_pattern, make_config
from radarwave.operator import build_operator

settings.register_profile("default", deadline=None, max_examples=50, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# lines recorded by the acceptance module, printed once at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def raw_config(n, t, k, **kw) -> RadarConfig:
    """Config without validation, for operator shapes outside the K <= N rule."""
    dirs = tuple(np.pi * (i + 1) / (k + 1) for i in range(k))
    return RadarConfig(num_antennas=n, num_samples=t, directions=dirs, **kw)


def rand_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def desk_cfg():
    return make_config(num_antennas=16, num_samples=256, num_directions=4)


@pytest.fixture(scope="session")
def desk_result(desk_cfg):
    from radarwave.gamp import solve

    op = build_operator(desk_cfg)
    d = build_flat_pattern(desk_cfg)
    return solve(desk_cfg, op, d)


@pytest.fixture
def qpsk():
    return build_constellation(2)
