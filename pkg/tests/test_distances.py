"""Nearest-station densities, exclusion radii, serving-distance densities."""

import math

import numpy as np
import pytest
from scipy import optimize, stats

from uavhetnet.distances import (ConditionalPdf, DomainError, TierLabel,
                                 cdf_nearest, exclusion_radius, pdf_nearest,
                                 pdf_serving, serving_pdf, slant_to_horizontal,
                                 tbs_serving_mass)
from uavhetnet.numerics import integrate
from uavhetnet.params import NetworkParams, build_derived
from uavhetnet.simulator import TIER_CODE


def test_tbs_nearest_mass_is_ball_probability(table_params):
    d = build_derived(table_params)
    mass = integrate(lambda r: float(pdf_nearest(TierLabel.TBS, r, table_params)),
                     0.0, table_params.R_B)
    assert mass == pytest.approx(d.Q_T, abs=1e-9)


def test_abs_nearest_densities_normalize(table_params):
    for tier in (TierLabel.LOS_ABS, TierLabel.NLOS_ABS):
        mass = integrate(lambda r: float(pdf_nearest(tier, r, table_params)),
                         table_params.h, math.inf)
        assert mass == pytest.approx(1.0, abs=1e-6)


def test_los_density_vanishes_without_abs(table_params):
    p = table_params.replace(lambda_A=1e-30)
    r = np.linspace(p.h, 10 * p.h, 50)
    assert np.all(pdf_nearest(TierLabel.LOS_ABS, r, p) < 1e-25)


def test_density_zero_outside_support(table_params):
    assert pdf_nearest(TierLabel.LOS_ABS, table_params.h - 1.0, table_params) == 0.0
    assert pdf_nearest(TierLabel.TBS, table_params.R_B + 1.0, table_params) == 0.0


def test_nearest_distance_ks_against_simulation(assoc_records, table_params):
    rec = assoc_records[200.0]
    for tier, samples in ((TierLabel.LOS_ABS, rec.nearest_los),
                          (TierLabel.NLOS_ABS, rec.nearest_nlos)):
        finite = samples[np.isfinite(samples)]
        stat = stats.kstest(finite,
                            lambda r: np.asarray(cdf_nearest(tier, r, table_params)))
        # 0.01 is calibrated for the full campaign; at reduced trial counts
        # fall back to the ~1% critical value of the KS statistic
        bound = max(0.01, 1.7 / math.sqrt(len(finite)))
        assert stat.statistic < bound, f"{tier}: KS={stat.statistic:.4f}"


def test_exclusion_at_altitude_equals_crossover(table_params):
    d = build_derived(table_params)
    tau = exclusion_radius(TierLabel.NLOS_ABS, TierLabel.LOS_ABS,
                           table_params.h, table_params)
    assert float(tau) == pytest.approx(d.l_Lh, rel=1e-14)


def test_exclusion_floor_branch(table_params):
    # serving LoS close-in with a ball TBS: the NLoS exclusion floors at h
    d = build_derived(table_params)
    assert d.l_LT >= d.l_Lh
    r = 0.5 * (table_params.h + d.l_Lh)
    tau = exclusion_radius(TierLabel.LOS_ABS, TierLabel.NLOS_ABS, r,
                           table_params, tbs_in_ball=True)
    assert float(tau) == table_params.h


def test_exclusion_against_root_finding(table_params):
    d = build_derived(table_params)
    # r = 250 m sits below the crossover l_Lh, so the raw equal-power root
    # (~170 m) lies under the altitude and the exclusion floors at h
    assert float(exclusion_radius(TierLabel.LOS_ABS, TierLabel.NLOS_ABS, 250.0,
                                  table_params)) == table_params.h
    # beyond the crossover the exclusion solves the equal-power equation
    r = 350.0
    tau = float(exclusion_radius(TierLabel.LOS_ABS, TierLabel.NLOS_ABS, r,
                                 table_params, tbs_in_ball=False))
    root = optimize.brentq(
        lambda t: d.eta_L * r ** -table_params.alpha_L - d.eta_N * t ** -table_params.alpha_N,
        1.0, 1e6, xtol=1e-12)
    assert tau == pytest.approx(root, rel=1e-9)


def test_exclusion_monotone(table_params):
    d = build_derived(table_params)
    grids = {
        (TierLabel.NLOS_ABS, TierLabel.LOS_ABS): np.linspace(table_params.h, 5000.0, 200),
        (TierLabel.LOS_ABS, TierLabel.NLOS_ABS): np.linspace(table_params.h, 5000.0, 200),
        (TierLabel.LOS_ABS, TierLabel.TBS): np.linspace(table_params.h, d.l_LT, 200),
        (TierLabel.TBS, TierLabel.LOS_ABS): np.linspace(0.0, table_params.R_B, 200),
        (TierLabel.TBS, TierLabel.NLOS_ABS): np.linspace(0.0, table_params.R_B, 200),
    }
    for (serving, interferer), r in grids.items():
        tau = exclusion_radius(serving, interferer, r, table_params)
        assert np.all(np.diff(tau) >= -1e-12), (serving, interferer)


def test_exclusion_boundary_consistency(table_params):
    # at the max in-ball LoS serving distance the TBS exclusion hits the ball edge
    d = build_derived(table_params)
    tau = exclusion_radius(TierLabel.LOS_ABS, TierLabel.TBS, d.l_LT, table_params)
    assert float(tau) == pytest.approx(table_params.R_B, rel=1e-12)


def test_exclusion_domain_errors(table_params):
    d = build_derived(table_params)
    with pytest.raises(DomainError):
        exclusion_radius(TierLabel.LOS_ABS, TierLabel.TBS, d.l_LT * 1.01, table_params)
    with pytest.raises(DomainError):
        exclusion_radius(TierLabel.NLOS_ABS, TierLabel.TBS, 300.0, table_params)
    with pytest.raises(DomainError):
        exclusion_radius(TierLabel.TBS, TierLabel.LOS_ABS,
                         table_params.R_B * 1.01, table_params)
    with pytest.raises(DomainError):
        exclusion_radius(TierLabel.LOS_ABS, TierLabel.NLOS_ABS,
                         table_params.h - 1.0, table_params)


def test_serving_density_nlos_normalizes(table_params):
    mass = integrate(lambda r: float(pdf_serving(TierLabel.NLOS_ABS, r, table_params)),
                     table_params.h, math.inf)
    assert mass == pytest.approx(1.0, abs=1e-6)


def test_serving_density_los_branches_normalize(table_params):
    d = build_derived(table_params)
    m1 = integrate(lambda r: float(pdf_serving(TierLabel.LOS_ABS, r, table_params, 1)),
                   table_params.h, math.inf)
    m2 = integrate(lambda r: float(pdf_serving(TierLabel.LOS_ABS, r, table_params, 2)),
                   table_params.h, d.l_LT)
    assert m1 + m2 == pytest.approx(1.0, abs=1e-6)


def test_serving_density_tbs_normalizes(table_params):
    mass = integrate(lambda r: float(pdf_serving(TierLabel.TBS, r, table_params)),
                     0.0, table_params.R_B)
    assert mass == pytest.approx(1.0, abs=1e-6)
    assert 0.0 < tbs_serving_mass(table_params) < 1.0


def test_serving_distance_ks_nlos(records_h200, table_params):
    rec = records_h200
    samples = rec.serving[rec.tier == TIER_CODE[TierLabel.NLOS_ABS]]
    grid = np.linspace(table_params.h, table_params.h + 4000.0, 2500)
    dens = pdf_serving(TierLabel.NLOS_ABS, grid, table_params)
    cdf_grid = np.concatenate([[0.0], np.cumsum(
        0.5 * (dens[1:] + dens[:-1]) * np.diff(grid))])
    cdf_grid /= max(cdf_grid[-1], 1.0)

    stat = stats.kstest(samples, lambda r: np.interp(r, grid, cdf_grid))
    bound = max(0.02, 1.7 / math.sqrt(len(samples)))
    assert stat.statistic < bound, f"KS={stat.statistic:.4f}"


def test_slant_to_horizontal_floors(table_params):
    assert slant_to_horizontal(table_params.h / 2.0, table_params.h) == 0.0
    assert slant_to_horizontal(table_params.h, table_params.h) == 0.0
    val = slant_to_horizontal(250.0, 200.0)
    assert float(val) == pytest.approx(math.sqrt(250.0 ** 2 - 200.0 ** 2), rel=1e-12)


def test_serving_pdf_wrapper(table_params):
    d = build_derived(table_params)
    pdf = serving_pdf(TierLabel.LOS_ABS, table_params, branch=2)
    assert isinstance(pdf, ConditionalPdf)
    assert pdf.support == (table_params.h, d.l_LT)
    lo, hi = pdf.support
    mass = integrate(lambda r: float(pdf(r)), lo, hi)
    # branch 2 is the occupied-ball sub-density: its mass is A_L2 / A_L
    from uavhetnet.association import assoc_all
    probs = assoc_all(table_params)
    assert mass == pytest.approx(probs.A_L2 / probs.A_L, abs=1e-6)
    full = serving_pdf(TierLabel.NLOS_ABS, table_params)
    assert math.isinf(full.support[1])
