import numpy as np
import pytest

from pnfgame.model import BenefitSpec, GameConfig


def make_config(n=10, rho=0.8, c=0.1, gamma=0.5, scale=1.0, **kw):
    return GameConfig(n=n, c=c, gamma=gamma, rho=rho, benefit=BenefitSpec(scale=scale), **kw)


@pytest.fixture
def cfg():
    return make_config()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE_LINES = {}


def record_criterion(number, passed, detail):
    line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line, flush=True)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
