import os
import subprocess
import sys

import numpy as np
import pytest

from pnfgame import _kernels_py as pure
from pnfgame._backend import BACKEND

fast = pytest.importorskip("pnfgame._kernels")

TOL = (1e-10, 200, 200)


def test_compiled_backend_selected():
    assert BACKEND == "cython"


def test_pure_python_forced_by_env():
    env = dict(os.environ, PNFGAME_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import pnfgame; print(pnfgame.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("seed", range(20))
def test_scalar_kernels_agree(seed):
    rng = np.random.default_rng(seed)
    rho, beta = rng.uniform(0.05, 0.95), rng.uniform(0.5, 3)
    s, c = rng.uniform(0, 50), rng.uniform(0.02, 0.4)
    z = rng.uniform(0.01, 20)
    assert fast.marginal(z, s, rho, beta) == pytest.approx(pure.marginal(z, s, rho, beta), abs=1e-12)
    assert fast.content_value(z, s, rho, beta, c) == pytest.approx(pure.content_value(z, s, rho, beta, c), abs=1e-12)
    assert fast.best_production(s, c, rho, beta, *TOL) == pytest.approx(pure.best_production(s, c, rho, beta, *TOL), abs=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_scan_links_agree(seed):
    rng = np.random.default_rng(seed)
    pows = np.sort(rng.uniform(0, 9, 15))[::-1] ** 0.7
    args = (rng.uniform(0, 5), pows, 0.1, rng.uniform(0, 1), 0.7, 1.0, *TOL)
    za, ua = fast.scan_links(*args)
    zb, ub = pure.scan_links(*args)
    np.testing.assert_allclose(za, zb, atol=1e-12, rtol=0)
    np.testing.assert_allclose(ua, ub, atol=1e-12, rtol=0)


@pytest.mark.parametrize("seed", range(5))
def test_production_sweep_agree(seed):
    rng = np.random.default_rng(seed)
    n = 12
    g = (rng.random((n, n)) < 0.3).astype(np.uint8)
    np.fill_diagonal(g, 0)
    gbar = np.ascontiguousarray(np.maximum(g, g.T))
    order = rng.permutation(n).astype(np.int64)
    xa = np.ascontiguousarray(rng.uniform(1, 9, n))
    xb = xa.copy()
    ra = fast.production_sweep(xa, gbar, order, 0.1, 0.8, 1.0, 0.5, *TOL)
    rb = pure.production_sweep(xb, gbar, order, 0.1, 0.8, 1.0, 0.5, *TOL)
    np.testing.assert_allclose(xa, xb, atol=1e-12, rtol=0)
    assert ra == pytest.approx(rb, abs=1e-12)
