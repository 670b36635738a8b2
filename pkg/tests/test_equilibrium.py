import math

import numpy as np
import pytest

from pnfgame.equilibrium import (
    best_response,
    classify_profile,
    equilibrium_gamma_range,
    gamma_region,
    gamma_region_table,
    production_fixed_point,
    production_levels,
    symmetric_equilibrium_degrees,
    verify_strict_nash,
)
from pnfgame.errors import ConvergenceError
from pnfgame.model import PricingScheme, StrategyProfile
from pnfgame.numerics import symmetric_production
from pnfgame.topology import complete, empty, line, regular, ring, star, two_ring

from conftest import make_config
from oracles import (
    oracle_best_response,
    oracle_fixed_point,
    oracle_is_strict,
    oracle_profile_cases,
    oracle_user_payoff,
    subsets,
)


def test_fixed_point_examples():
    cfg = make_config(n=5)
    np.testing.assert_allclose(production_fixed_point(empty(5), cfg), 9.0, atol=1e-9)
    xs, _ = symmetric_production(4, cfg)
    np.testing.assert_allclose(production_fixed_point(complete(5), cfg), xs, atol=1e-9)
    x = production_fixed_point(star(5), cfg)
    np.testing.assert_allclose(x[:4], x[0], atol=1e-12)
    assert x[4] < x[0]
    np.testing.assert_allclose(x, oracle_fixed_point(star(5), cfg), atol=1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_fixed_point_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    g = (rng.random((7, 7)) < 0.35).astype(np.uint8)
    np.fill_diagonal(g, 0)
    cfg = make_config(n=7, rho=float(rng.choice([0.5, 0.8])))
    np.testing.assert_allclose(production_fixed_point(g, cfg), oracle_fixed_point(g, cfg), atol=1e-9)


def test_fixed_point_reports_nonconvergence():
    with pytest.raises(ConvergenceError) as err:
        production_fixed_point(star(6), make_config(n=6), max_sweeps=1)
    assert err.value.residual > 0


def test_best_response_examples():
    cfg = make_config(n=5)
    prof = StrategyProfile(np.array([3.0, 0, 0, 0, 0]), ring(5, 1))
    br = best_response(0, prof, cfg)
    assert br.x == pytest.approx(9.0, abs=1e-9) and br.outbound == frozenset()
    prof = StrategyProfile(np.array([3.0, 2.0, 0.0, 1.0, 4.0]), empty(5))
    br = best_response(0, prof, make_config(n=5, gamma=0.0))
    assert br.outbound == {1, 3, 4}


def test_best_response_matches_enumeration():
    for cfg, x, g in oracle_profile_cases(45, seed=11):
        prof = StrategyProfile(x, g)
        for i in range(cfg.n):
            br = best_response(i, prof, cfg)
            val, z, sub = oracle_best_response(i, x, g, cfg)
            assert br.utility == pytest.approx(val, abs=1e-8)
            assert oracle_user_payoff(i, x, g, sorted(br.outbound), br.x, cfg) == pytest.approx(val, abs=1e-8)


def test_verdicts_match_enumeration():
    verdicts = []
    for cfg, x, g in oracle_profile_cases(45, seed=12):
        rep = verify_strict_nash(StrategyProfile(x, g), cfg)
        assert rep.is_equilibrium == oracle_is_strict(x, g, cfg)
        verdicts.append(rep.is_equilibrium)
    assert any(verdicts) and not all(verdicts)


@pytest.mark.parametrize("seed", range(6))
def test_priced_best_response_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = 5
    cfg = make_config(n=n, gamma=float(rng.uniform(0.05, 0.6)))
    g = (rng.random((n, n)) < 0.4).astype(np.uint8)
    np.fill_diagonal(g, 0)
    x = rng.uniform(1, 9, n)
    x[1] = x[2]  # exercise ties between equal producers
    p, t = float(rng.uniform(0, 0.02)), float(rng.uniform(-0.3, 0.3))
    prof = StrategyProfile(x, g)
    for i in range(n):
        br = best_response(i, prof, cfg, PricingScheme(p, t))
        best = max(oracle_user_payoff(i, x, g, sub, None, cfg, p, t, with_z_opt=True)[0]
                   for sub in subsets(j for j in range(n) if j != i))
        assert br.utility == pytest.approx(best, abs=1e-8)


def test_symmetric_inside_and_outside_region():
    cfg = make_config()
    for d in (2, 4, 6):
        iv = gamma_region(d, cfg)
        prof = StrategyProfile(np.full(10, iv.x_s), ring(10, d // 2))
        inside = verify_strict_nash(prof, cfg.replace(gamma=0.5 * (iv.gamma_lo + iv.gamma_hi)))
        assert inside.is_equilibrium and inside.classification == "symmetric"
        below = verify_strict_nash(prof, cfg.replace(gamma=0.95 * iv.gamma_lo))
        assert not below.is_equilibrium
        assert any(w.reason == "best_response" and len(w.new_outbound) > len(prof.outbound(w.user))
                   for w in below.witnesses)
        above = verify_strict_nash(prof, cfg.replace(gamma=1.05 * iv.gamma_hi))
        assert any(len(w.new_outbound) < len(prof.outbound(w.user)) for w in above.witnesses)


def test_lemma_witnesses():
    cfg = make_config(n=4, gamma=0.3)
    g = ring(4, 1).copy()
    g[1, 0] = 1
    xs, _ = symmetric_production(2, cfg)
    rep = verify_strict_nash(StrategyProfile(np.full(4, xs), g), cfg)
    assert "mutual_link" in {w.reason for w in rep.witnesses}
    rep = verify_strict_nash(StrategyProfile(np.array([0.0, 9, 9, 9]), empty(4)), cfg)
    assert {w.reason for w in rep.witnesses if w.user == 0} >= {"zero_production"}
    rep = verify_strict_nash(StrategyProfile(np.array([9.5, 9, 9, 9]), empty(4)), cfg)
    assert "above_autarky" in {w.reason for w in rep.witnesses}
    assert rep.classification == "none"


@pytest.mark.parametrize("topo", [star, line])
@pytest.mark.parametrize("gamma", [0.05, 0.3, 1.0, 2.0])
def test_star_and_line_rejected(topo, gamma):
    cfg = make_config(n=5, gamma=gamma)
    x = production_fixed_point(topo(5), cfg)
    assert not verify_strict_nash(StrategyProfile(x, topo(5)), cfg).is_equilibrium


def test_gamma_region_table_shape():
    table = gamma_region_table(make_config())
    ivs = table.intervals
    assert [iv.d for iv in ivs] == list(range(10))
    assert ivs[-1].gamma_lo == 0.0 and ivs[0].gamma_hi == math.inf
    assert all(iv.width > 0 for iv in ivs)
    assert all(a.gamma_lo > b.gamma_hi for a, b in zip(ivs, ivs[1:]))
    assert table.mean_width == pytest.approx(np.mean([iv.width for iv in ivs[1:-1]]))
    assert gamma_region(4, make_config()).gamma_lo == pytest.approx(0.22096, abs=1e-5)
    assert symmetric_equilibrium_degrees(make_config(gamma=0.23)) == [4]


def test_equilibrium_gamma_range_matches_region():
    cfg = make_config()
    for d in (2, 4, 6, 8):
        iv = gamma_region(d, cfg)
        lo, hi = equilibrium_gamma_range(StrategyProfile(np.full(10, iv.x_s), ring(10, d // 2)), cfg)
        assert lo == pytest.approx(iv.gamma_lo, abs=2e-9) and hi == pytest.approx(iv.gamma_hi, abs=2e-9)
    assert equilibrium_gamma_range(StrategyProfile(np.full(10, 9.0), ring(10, 1)), cfg) is None


def test_classification():
    cfg = make_config(n=6)
    pc = classify_profile(StrategyProfile(np.full(6, 4.5796), ring(6, 1)), cfg)
    assert pc.kind == "symmetric" and pc.degree == 2
    x = np.array([5.0, 5.0, 2.0, 2.0, 2.0, 2.0])
    pc = classify_profile(StrategyProfile(x, two_ring(6, 2, 0, 1)), cfg)
    assert pc.kind == "asymmetric" and pc.two_type and pc.n_h == 2
    assert (pc.x_hi, pc.x_lo, pc.k_hi, pc.k_lo) == (5.0, 2.0, 0, 1)
    pc = classify_profile(StrategyProfile(np.array([5.0, 4, 3, 3, 3, 3]), empty(6)), cfg)
    assert pc.kind == "asymmetric" and not pc.two_type and pc.x_lo is None and pc.n_levels == 3
    assert [len(u) for _, u in production_levels([1, 1 + 1e-10, 2])] == [1, 2]
