import functools

import numpy as np
import pytest

from medialparam import RunConfig, run_pipeline
from medialparam.shapes import FIXTURES

# sampling per fixture: length-dependent wherever loop sizes differ a lot
FIXTURE_RUNS = {
    "capsule": (200, "equal"),
    "disk": (36, "equal"),
    "star": (120, "equal"),
    "star_with_hole": (120, "length"),
    "ellipse_with_hole": (120, "length"),
    "l_with_holes": (120, "length"),
    "three_components": (120, "length"),
}


@functools.lru_cache(maxsize=None)
def run_fixture(name, samples=None, sampling=None, seed=0):
    n, strat = FIXTURE_RUNS[name]
    cfg = RunConfig(domain=FIXTURES[name](), samples=samples or n,
                    sampling=sampling or strat, seed=seed)
    return run_pipeline(cfg)


_VERDICTS = []


def record(line):
    _VERDICTS.append(line)


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)


@pytest.fixture(params=sorted(FIXTURE_RUNS))
def fixture_run(request):
    return request.param, run_fixture(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
