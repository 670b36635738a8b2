import math

import numpy as np
import pytest

from pnfgame.equilibrium import verify_strict_nash
from pnfgame.model import StrategyProfile, social_welfare
from pnfgame.numerics import max_production, planner_production
from pnfgame.topology import empty
from pnfgame.welfare import (
    optimal_degree,
    optimal_prices,
    optimum_profile,
    social_optimum,
    verify_priced_equilibrium,
    welfare_gap,
)

from conftest import make_config
from oracles import closed_form_q


def brute_force_degree(cfg):
    vals = [closed_form_q(d, cfg.rho, cfg.c) - 0.5 * d * cfg.gamma for d in range(cfg.n)]
    return int(np.argmax(vals))


def test_optimum_examples():
    opt = social_optimum(make_config(gamma=0.5))
    assert opt.d_opt == 4 and opt.x_opt == pytest.approx(9.866252, abs=1e-6)
    assert opt.welfare_per_user == pytest.approx(2.32775729, abs=1e-7)
    assert opt.foc_residual < 1e-9 and not opt.boundary
    opt = social_optimum(make_config(gamma=2.0))
    assert opt.d_opt == 0 and opt.x_opt == pytest.approx(9.0, abs=1e-9)
    assert opt.p_opt == 0.0 and opt.t_hi == math.inf and math.isnan(opt.t_mid)
    assert social_optimum(make_config(gamma=0.0)).d_opt == 9


@pytest.mark.parametrize("gamma", np.linspace(0.01, 2.0, 25))
@pytest.mark.parametrize("rho", [0.5, 0.8])
def test_threshold_rule_matches_argmax(gamma, rho):
    cfg = make_config(rho=rho, gamma=float(gamma))
    assert optimal_degree(cfg)[0] == brute_force_degree(cfg)


def test_boundary_flag():
    cfg = make_config()
    dq3 = closed_form_q(4, 0.8, 0.1) - closed_form_q(3, 0.8, 0.1)
    assert optimal_degree(cfg.replace(gamma=2 * dq3))[1]


def test_price_examples():
    cfg = make_config()
    p = optimal_prices(1, planner_production(1, cfg), cfg)
    assert p.p_opt == pytest.approx(0.05, abs=1e-12) and p.p_paper == pytest.approx(0.05, abs=1e-12)
    p = optimal_prices(4, planner_production(4, cfg), cfg)
    assert p.p_opt == pytest.approx(0.02, abs=1e-12) and p.p_paper == pytest.approx(0.08, abs=1e-12)
    assert optimal_prices(0, 9.0, cfg).p_opt == 0.0
    assert optimal_prices(9, planner_production(9, cfg), cfg).t_lo == -math.inf


def test_transfer_bounds():
    opt = social_optimum(make_config(gamma=0.5))
    assert opt.t_lo == pytest.approx(-0.46426, abs=1e-5)
    assert opt.t_hi == pytest.approx(-0.43727, abs=1e-5)
    assert opt.t_lo < opt.t_mid < opt.t_hi


def test_unpriced_optimum_fails_production():
    cfg = make_config(gamma=0.5)
    opt = social_optimum(cfg)
    rep = verify_priced_equilibrium(cfg, opt, t=0.0, p=0.0)
    assert not rep.is_equilibrium
    assert any(w.kind == "production" and w.reason == "production_foc" for w in rep.witnesses)


def test_frozen_income_pricing_sustains_optimum():
    cfg = make_config(gamma=0.5)
    opt = social_optimum(cfg)
    for t in np.linspace(opt.t_lo, opt.t_hi, 7)[1:-1]:
        assert verify_priced_equilibrium(cfg, opt, float(t), frozen_income=True).is_equilibrium
    below = verify_priced_equilibrium(cfg, opt, opt.t_lo - 0.01, frozen_income=True)
    assert any(len(w.new_outbound) > 2 for w in below.witnesses)
    above = verify_priced_equilibrium(cfg, opt, opt.t_hi + 0.01, frozen_income=True)
    assert any(len(w.new_outbound) < 2 for w in above.witnesses)


def test_exact_priced_deviation_is_unbounded():
    # One more friend at p = c/(1+d#) drives the marginal cost to zero.
    cfg = make_config(gamma=0.5)
    opt = social_optimum(cfg)
    rep = verify_priced_equilibrium(cfg, opt, opt.t_mid)
    assert not rep.is_equilibrium
    assert all(math.isinf(w.utility_gain) for w in rep.witnesses)


def test_optimum_profile_is_regular():
    cfg = make_config(gamma=0.5)
    prof = optimum_profile(cfg, social_optimum(cfg))
    assert list(prof.friends().degrees) == [4] * 10


def test_welfare_gap():
    cfg = make_config(gamma=0.5)
    opt = social_optimum(cfg)
    _, _, gap = welfare_gap(optimum_profile(cfg, opt), cfg)
    assert gap == pytest.approx(0.0, abs=1e-9)
    small = make_config(gamma=0.05)
    iso = StrategyProfile(np.full(10, max_production(small)), empty(10))
    assert welfare_gap(iso, small)[2] > 0
