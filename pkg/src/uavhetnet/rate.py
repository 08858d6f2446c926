"""Ergodic spectrum efficiency of both tiers.

Every rate is an integral of a CCDF over the threshold axis,
E[log2(1+SINR)] = (1/ln 2) * integral of P(SINR > z)/(1+z).  In the NOMA
tier the CCDF argument maps through f1(z) = z/(a_n - beta*a_m*z) for
messages decoded after cancellation and f2(z) = z/(a_m - a_n*z) for
messages decoded against the superposed remainder; each map diverges at a
finite z, capping the SINR support, so the integrals run to a_n/(beta*a_m)
and a_m/a_n (to infinity under perfect cancellation, via a log transform).

Near-case and far-case rates are reported per pair: the typical UE's own
message plus the paired fixed UE's message, each weighted by the case
probability through the un-renormalized serving densities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _sci

from .association import assoc_all
from .coverage import (_alzer_terms, _gl_grid, _link_constants, _noma_cov_nodes,
                       _tbs_cov_nodes, serving_tail_radius)
from .distances import (TierLabel, exclusion_radius, pdf_serving,
                        slant_to_horizontal)
from .laplace import abs_exponent_batch
from .params import NetworkParams, build_derived

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class RateCase:
    """Per-pair spectrum efficiency of one association case [bit/s/Hz]."""
    typical_message: float
    fixed_message: float

    @property
    def total(self) -> float:
        return self.typical_message + self.fixed_message


def _ccdf_integral(ccdf, z_cap: float, rel_tol: float = 1e-6) -> float:
    """(1/ln 2) * integral of ccdf(z)/(1+z) over [0, z_cap].

    ``z_cap`` may be inf; then the integral runs in v = ln(1+z) out to where
    the CCDF falls below 1e-12.
    """
    if z_cap == 0.0:
        return 0.0
    if math.isinf(z_cap):
        v_max = 1.0
        while ccdf(math.expm1(v_max)) > 1e-12 and v_max < 60.0:
            v_max *= 1.5
        val, _ = _sci.quad(lambda v: ccdf(math.expm1(v)), 0.0, v_max,
                           epsabs=1e-10, epsrel=rel_tol, limit=200)
        return val / _LN2
    val, _ = _sci.quad(lambda z: ccdf(z) / (1.0 + z), 0.0, z_cap,
                       epsabs=1e-10, epsrel=rel_tol, limit=200)
    return val / _LN2


# -- mmWave tier ---------------------------------------------------------------

def rate_tbs(params: NetworkParams) -> float:
    """Ergodic rate of a UE served by the mmWave tier [bit/s/Hz]."""
    d = build_derived(params)
    nodes, weights = _gl_grid(0.0, params.R_B, [d.l_TL])
    dens_w = weights * pdf_serving(TierLabel.TBS, nodes, params)

    def ccdf(z: float) -> float:
        if z <= 0.0:
            return 1.0
        return float(np.sum(dens_w * _tbs_cov_nodes(nodes, z, params)))

    return _ccdf_integral(ccdf, math.inf)


# -- NOMA tier -----------------------------------------------------------------

def _f1(z: float, params: NetworkParams) -> float:
    """Effective threshold of a message decoded after cancellation."""
    den = params.a_n - params.beta * params.a_m * z
    return z / den if den > 0.0 else math.inf


def _f2(z: float, params: NetworkParams) -> float:
    """Effective threshold of a message decoded against the remainder."""
    den = params.a_m - params.a_n * z
    return z / den if den > 0.0 else math.inf


def _case_grid(params: NetworkParams, los: bool, near: bool):
    """Panel grid and density weights over the serving-distance segment."""
    d = build_derived(params)
    tier = TierLabel.LOS_ABS if los else TierLabel.NLOS_ABS
    if near:
        lo, hi = params.h, params.R_f
    else:
        lo, hi = params.R_f, max(serving_tail_radius(params, tier), params.R_f)
    interior = [d.l_Lh, d.l_LT] if los else []
    nodes, weights = _gl_grid(lo, hi, interior)
    if nodes is None:
        return None, None
    if los:
        dens = pdf_serving(tier, nodes, params, branch=1) + \
            pdf_serving(tier, nodes, params, branch=2)
    else:
        dens = pdf_serving(tier, nodes, params)
    return nodes, weights * dens


def _ccdf_serving(z_eff: float, nodes, dens_w, params: NetworkParams,
                  los: bool, fixed_distance: bool) -> float:
    """CCDF of one message at effective threshold ``z_eff``, averaged over
    the serving-distance grid.

    ``fixed_distance`` evaluates the fading tail at the paired-UE distance
    R_f while keeping the interference exclusion tied to the serving node.
    """
    if math.isinf(z_eff):
        return 0.0
    if z_eff <= 0.0:
        return float(np.sum(dens_w))
    if not fixed_distance:
        return float(np.sum(dens_w * _noma_cov_nodes(nodes, z_eff, params, los)))
    m, b, c, alpha = _link_constants(params, los)
    d = build_derived(params)
    # fading tail at R_f, interference bounds at each serving node
    k, coef = _alzer_terms(m)
    s = (z_eff * params.R_f ** alpha / (d.P_A * c)) * (k * b)
    if los:
        w_l = slant_to_horizontal(nodes, params.h)
        tau_n = exclusion_radius(TierLabel.LOS_ABS, TierLabel.NLOS_ABS, nodes, params)
        w_n = slant_to_horizontal(tau_n, params.h)
    else:
        tau_l = exclusion_radius(TierLabel.NLOS_ABS, TierLabel.LOS_ABS, nodes, params)
        w_l = slant_to_horizontal(tau_l, params.h)
        w_n = slant_to_horizontal(nodes, params.h)
    expo = abs_exponent_batch(np.broadcast_to(s, nodes.shape + s.shape), w_l, w_n, params)
    tail = np.sum(coef * np.exp(-s * d.sigma2_A) * np.exp(-expo), axis=-1)
    return float(np.sum(dens_w * tail))


def rate_noma_case(role: str, link: str, params: NetworkParams) -> RateCase:
    """Spectrum-efficiency contribution of one (near/far, LoS/NLoS) case.

    Both messages of the pair are integrated against the un-renormalized
    serving density restricted to the case's distance segment, so the four
    case totals sum to the full ABS-tier conditional pair rate.
    """
    if role not in ("near", "far"):
        raise ValueError(f"role must be 'near' or 'far', got {role!r}")
    if link not in ("los", "nlos"):
        raise ValueError(f"link must be 'los' or 'nlos', got {link!r}")
    los, near = link == "los", role == "near"
    nodes, dens_w = _case_grid(params, los, near)
    if nodes is None:
        return RateCase(0.0, 0.0)

    cap1 = math.inf if params.beta == 0.0 else \
        params.a_n / (params.beta * params.a_m)
    cap2 = params.a_m / params.a_n

    if near:
        # typical decodes its own message after cancellation; the fixed UE
        # decodes directly at distance R_f
        typical = _ccdf_integral(
            lambda z: _ccdf_serving(_f1(z, params), nodes, dens_w, params, los, False), cap1)
        fixed = _ccdf_integral(
            lambda z: _ccdf_serving(_f2(z, params), nodes, dens_w, params, los, True), cap2)
    else:
        # typical decodes directly; the fixed UE cancels first at R_f
        typical = _ccdf_integral(
            lambda z: _ccdf_serving(_f2(z, params), nodes, dens_w, params, los, False), cap2)
        fixed = _ccdf_integral(
            lambda z: _ccdf_serving(_f1(z, params), nodes, dens_w, params, los, True), cap1)
    return RateCase(typical_message=typical, fixed_message=fixed)


def rate_noma_tier(params: NetworkParams) -> float:
    """ABS-tier per-pair spectrum efficiency [bit/s/Hz]."""
    probs = assoc_all(params)
    if probs.A_A <= 0.0:
        raise ZeroDivisionError("ABS tier has zero association probability")
    los_total = rate_noma_case("near", "los", params).total + \
        rate_noma_case("far", "los", params).total
    nlos_total = rate_noma_case("near", "nlos", params).total + \
        rate_noma_case("far", "nlos", params).total
    return (probs.A_L * los_total + probs.A_N * nlos_total) / probs.A_A
