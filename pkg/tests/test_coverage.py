"""Coverage probabilities: thresholds, feasibility gates, method agreement."""

import numpy as np
import pytest

from uavhetnet.coverage import (CoverageResult, NomaThresholds,
                                coverage_noma_conditional, coverage_noma_los,
                                coverage_noma_nlos, coverage_noma_tier,
                                coverage_tbs, _noma_cov_nodes)
from uavhetnet.params import NetworkParams


def test_threshold_scalars(table_params):
    thr = NomaThresholds(eps_f=1.0, eps_t=1.0)       # 0 dB
    assert thr.near_feasible(table_params)
    # stage thresholds: 1/(0.8-0.2) and 1/(0.2-0.08)
    assert thr.eps_star(table_params) == pytest.approx(
        max(1.0 / 0.6, 1.0 / 0.12), rel=1e-12)
    assert thr.eps_star(table_params) == pytest.approx(8.3333, abs=2e-4)
    assert thr.eps_tf(table_params) == pytest.approx(1.0 / 0.6, rel=1e-12)


def test_threshold_from_db():
    thr = NomaThresholds.from_db(-3.0, 3.0)
    assert thr.eps_f == pytest.approx(10 ** -0.3)
    assert thr.eps_t == pytest.approx(10 ** 0.3)


def test_far_infeasible_at_power_ratio(table_params):
    thr = NomaThresholds(eps_f=1.0, eps_t=4.0)       # a_m / a_n exactly
    assert not thr.far_feasible(table_params)
    res = coverage_noma_conditional("far", "los", 500.0, thr, table_params)
    assert res.value == 0.0 and not res.feasible


def test_near_infeasibility_grid(table_params):
    # 20-point grids straddling each gate boundary
    for eps_f in np.linspace(3.5, 4.5, 20):
        thr = NomaThresholds(eps_f=float(eps_f), eps_t=0.5)
        res = coverage_noma_conditional("near", "los", 210.0, thr, table_params)
        if table_params.a_m - table_params.a_n * eps_f <= 0:
            assert res.value == 0.0 and not res.feasible
        else:
            assert res.feasible and res.value > 0.0
    for eps_t in np.linspace(2.0, 3.0, 20):          # boundary at a_n/(beta a_m) = 2.5
        thr = NomaThresholds(eps_f=0.5, eps_t=float(eps_t))
        res = coverage_noma_conditional("near", "los", 210.0, thr, table_params)
        feasible = table_params.a_n - table_params.beta * table_params.a_m * eps_t > 0
        assert res.feasible == feasible
        assert (res.value > 0.0) == feasible
    for eps_t in np.linspace(3.5, 4.5, 20):          # far boundary at a_m/a_n = 4
        thr = NomaThresholds(eps_f=0.5, eps_t=float(eps_t))
        res = coverage_noma_conditional("far", "los", 500.0, thr, table_params)
        feasible = table_params.a_m - table_params.a_n * eps_t > 0
        assert res.feasible == feasible


def test_conditional_domain_checks(table_params):
    thr = NomaThresholds(1.0, 1.0)
    with pytest.raises(ValueError):
        coverage_noma_conditional("near", "los", table_params.R_f + 1.0, thr, table_params)
    with pytest.raises(ValueError):
        coverage_noma_conditional("far", "los", table_params.R_f, thr, table_params)
    with pytest.raises(ValueError):
        coverage_noma_conditional("near", "los", table_params.h - 1.0, thr, table_params)
    with pytest.raises(ValueError):
        coverage_noma_conditional("middle", "los", 210.0, thr, table_params)


def test_perfect_sic_role_swap():
    # with beta = 0 and no partner-stage constraint the near case reduces to
    # the far-case formula at the threshold whose far map hits eps_t / a_n
    p = NetworkParams().replace(beta=0.0)
    eps_t = 0.5
    near = NomaThresholds(eps_f=0.0, eps_t=eps_t)
    assert near.eps_star(p) == pytest.approx(eps_t / p.a_n, rel=1e-12)
    swapped = eps_t / p.a_n * p.a_m / (1.0 + eps_t / p.a_n * p.a_n)
    far = NomaThresholds(eps_f=0.0, eps_t=swapped)
    assert far.eps_tf(p) == pytest.approx(near.eps_star(p), rel=1e-12)
    r = p.R_f
    v_near = coverage_noma_conditional("near", "los", r, near, p).value
    v_far = float(_noma_cov_nodes(np.float64(r), far.eps_tf(p), p, los=True))
    assert v_near == pytest.approx(v_far, abs=1e-9)


def test_tbs_coverage_threshold_to_zero(table_params):
    res = coverage_tbs(1e-12, table_params)
    assert res.value == pytest.approx(1.0, abs=1e-5)


def test_tbs_coverage_m1_alzer_exact():
    p = NetworkParams().replace(m_T=1)
    alzer = coverage_tbs(1.0, p, "alzer")
    exact = coverage_tbs(1.0, p, "exact_m1")
    assert alzer.value == exact.value
    with pytest.raises(ValueError):
        coverage_tbs(1.0, NetworkParams(), "exact_m1")   # m_T = 2 has no exact path


def test_tbs_coverage_gc_matches_adaptive(table_params):
    for nu_db in (-10.0, 0.0, 10.0):
        nu = 10 ** (nu_db / 10.0)
        gc = coverage_tbs(nu, table_params, "gauss_chebyshev", gc_nodes=50)
        ref = coverage_tbs(nu, table_params, "adaptive")
        assert gc.value == pytest.approx(ref.value, rel=1e-3)
    # the fixed-node rule converges on the adaptive value as nodes grow
    gc_dense = coverage_tbs(1.0, table_params, "gauss_chebyshev", gc_nodes=200)
    ref = coverage_tbs(1.0, table_params, "adaptive")
    assert gc_dense.value == pytest.approx(ref.value, rel=1e-4)


def test_tbs_coverage_panel_matches_adaptive(table_params):
    for nu_db in (-10.0, 0.0, 10.0):
        nu = 10 ** (nu_db / 10.0)
        fast = coverage_tbs(nu, table_params, "alzer")
        ref = coverage_tbs(nu, table_params, "adaptive")
        assert fast.value == pytest.approx(ref.value, rel=1e-4)


def test_coverage_monotone_in_thresholds(table_params):
    nus = np.logspace(-1, 1, 8)
    vals = [coverage_tbs(float(nu), table_params).value for nu in nus]
    assert all(a >= b - 1e-12 for a, b in zip(vals[:-1], vals[1:]))

    eps_grid = np.logspace(-1, 1, 8)
    tier_eps = [coverage_noma_tier(NomaThresholds(float(e), float(e)), table_params).value
                for e in eps_grid]
    assert all(a >= b - 1e-12 for a, b in zip(tier_eps[:-1], tier_eps[1:]))

    betas = [0.0, 0.05, 0.1, 0.2, 0.3]
    thr = NomaThresholds(1.0, 1.0)
    by_beta = [coverage_noma_tier(thr, table_params.replace(beta=b)).value
               for b in betas]
    assert all(a >= b - 1e-12 for a, b in zip(by_beta[:-1], by_beta[1:]))


def test_tier_mixture_consistency(table_params):
    from uavhetnet.association import assoc_all
    thr = NomaThresholds(1.0, 1.0)
    probs = assoc_all(table_params)
    mix = (probs.A_L * coverage_noma_los(thr, table_params) +
           probs.A_N * coverage_noma_nlos(thr, table_params)) / probs.A_A
    assert coverage_noma_tier(thr, table_params).value == pytest.approx(mix, abs=1e-12)


def test_tier_infeasible_gives_zero(table_params):
    thr = NomaThresholds(eps_f=10.0, eps_t=10.0)     # both gates closed
    res = coverage_noma_tier(thr, table_params)
    assert res.value == 0.0 and not res.feasible


def test_coverage_results_in_unit_interval(table_params):
    for nu in (0.01, 1.0, 100.0):
        assert 0.0 <= coverage_tbs(nu, table_params).value <= 1.0
    for eps in (0.1, 1.0, 3.0):
        res = coverage_noma_tier(NomaThresholds(eps, eps), table_params)
        assert 0.0 <= res.value <= 1.0
        assert isinstance(res, CoverageResult)
