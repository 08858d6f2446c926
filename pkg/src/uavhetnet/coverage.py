"""Coverage probabilities for both tiers.

mmWave tier: the serving-distance expectation of the fading CCDF bound
applied to the SINR event, with the interference transform inside; offered
in an adaptive-quadrature form, a fixed Gauss-Chebyshev form, and (for
m_T = 1, where the bound is exact) an exact alias.

NOMA tier: the two-stage decoding chain collapses, per case, to a single
fading-tail event at an effective threshold -- eps* for the near UE (which
must decode the partner's message first, then its own through the residual
cancellation error) and eps_t^f for the far UE.  Thresholds that make the
effective value negative are infeasible: the power split can never deliver
them and coverage is exactly zero.

The tier integrals run on Gauss-Legendre panels with breakpoints at every
branch boundary of the serving densities; ``method="adaptive"`` is the
scalar reference path used for validation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import numerics
from .association import assoc_all
from .distances import (TierLabel, exclusion_radius, expected_count,
                        pdf_nearest, pdf_serving, slant_to_horizontal,
                        tbs_serving_mass, void_probability)
from .laplace import _tbs_exponent, abs_exponent_batch
from .params import NetworkParams, build_derived

_NODES_PER_PANEL = 24


@dataclass(frozen=True)
class NomaThresholds:
    """Targeted SINRs (linear) of the paired fixed UE and the typical UE."""
    eps_f: float
    eps_t: float

    @classmethod
    def from_db(cls, eps_f_db: float, eps_t_db: float | None = None) -> "NomaThresholds":
        if eps_t_db is None:
            eps_t_db = eps_f_db
        return cls(10.0 ** (eps_f_db / 10.0), 10.0 ** (eps_t_db / 10.0))

    def near_feasible(self, params: NetworkParams) -> bool:
        return (params.a_m - params.a_n * self.eps_f > 0.0 and
                params.a_n - params.beta * params.a_m * self.eps_t > 0.0)

    def far_feasible(self, params: NetworkParams) -> bool:
        return params.a_m - params.a_n * self.eps_t > 0.0

    def eps_star(self, params: NetworkParams) -> float:
        """Effective near-UE threshold: the harder of the two decode stages."""
        if not self.near_feasible(params):
            raise ValueError("near-UE thresholds are infeasible for this power split")
        return max(self.eps_f / (params.a_m - params.a_n * self.eps_f),
                   self.eps_t / (params.a_n - params.beta * params.a_m * self.eps_t))

    def eps_tf(self, params: NetworkParams) -> float:
        """Effective far-UE threshold."""
        if not self.far_feasible(params):
            raise ValueError("far-UE threshold is infeasible for this power split")
        return self.eps_t / (params.a_m - params.a_n * self.eps_t)


@dataclass(frozen=True)
class CoverageResult:
    value: float
    method: str
    feasible: bool = True


def _alzer_terms(m: int):
    """Signed binomial expansion of the fading CCDF bound [1-e^-bt]^m."""
    k = np.arange(1, m + 1)
    coef = (-1.0) ** (k + 1) * np.array([math.comb(m, int(j)) for j in k])
    return k.astype(float), coef


def _link_constants(params: NetworkParams, los: bool):
    d = build_derived(params)
    if los:
        return params.m_L, d.b_L, d.C_L, params.alpha_L
    return params.m_N, d.b_N, d.C_N, params.alpha_N


# -- panel grids over serving distance ---------------------------------------

@lru_cache(maxsize=64)
def serving_tail_radius(params: NetworkParams, tier: TierLabel) -> float:
    """Slant distance beyond which the nearest-ABS mass is below ~1e-14."""
    los = tier is TierLabel.LOS_ABS
    lo, hi = params.h, params.h + 100.0 * params.region_radius
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if expected_count(slant_to_horizontal(mid, params.h), params, los) > 32.0:
            hi = mid
        else:
            lo = mid
    return hi


def _panel_edges(lo: float, hi: float, interior, n_geo: int = 8):
    """Sorted panel edges covering [lo, hi], split at interior breakpoints,
    with geometric growth across the remaining span."""
    if hi <= lo:
        return None
    pts = {lo, hi}
    for p in interior:
        if lo < p < hi:
            pts.add(float(p))
    base = np.array(sorted(pts))
    edges = [base[0]]
    for a, b in zip(base[:-1], base[1:]):
        span = b - a
        if span > 0:
            sub = a + span * (np.cumsum(2.0 ** np.arange(n_geo)) / (2.0 ** (n_geo + 1) - 2.0))
            edges.extend(sub[:-1])
            edges.append(b)
    return np.array(edges)


def _gl_grid(lo: float, hi: float, interior):
    edges = _panel_edges(lo, hi, interior)
    if edges is None:
        return None, None
    return numerics.gl_panel_rule(edges, _NODES_PER_PANEL)


# -- NOMA-tier conditional and tier coverage ---------------------------------

def _noma_cov_nodes(r, eps_eff: float, params: NetworkParams, los: bool):
    """Coverage at serving distance(s) ``r`` for effective threshold
    ``eps_eff``; vectorized over r."""
    d = build_derived(params)
    m, b, c, alpha = _link_constants(params, los)
    r = np.asarray(r, dtype=float)
    if los:
        w_l = slant_to_horizontal(r, params.h)
        tau_n = exclusion_radius(TierLabel.LOS_ABS, TierLabel.NLOS_ABS, r, params)
        w_n = slant_to_horizontal(tau_n, params.h)
    else:
        tau_l = exclusion_radius(TierLabel.NLOS_ABS, TierLabel.LOS_ABS, r, params)
        w_l = slant_to_horizontal(tau_l, params.h)
        w_n = slant_to_horizontal(r, params.h)
    k, coef = _alzer_terms(m)
    s = (eps_eff / (d.P_A * c)) * r[..., None] ** alpha * (k * b)   # B + (K,)
    expo = abs_exponent_batch(s, w_l, w_n, params)
    return np.sum(coef * np.exp(-s * d.sigma2_A) * np.exp(-expo), axis=-1)


def coverage_noma_conditional(role: str, link: str, r: float, thr: NomaThresholds,
                              params: NetworkParams) -> CoverageResult:
    """Coverage given ABS service at slant distance ``r`` for one case.

    ``role`` is "near" or "far" (near requires r <= R_f), ``link`` is "los"
    or "nlos".  Infeasible thresholds give value 0 with ``feasible=False``.
    """
    if role not in ("near", "far"):
        raise ValueError(f"role must be 'near' or 'far', got {role!r}")
    if link not in ("los", "nlos"):
        raise ValueError(f"link must be 'los' or 'nlos', got {link!r}")
    if r < params.h:
        raise ValueError("ABS serving distance must be >= h")
    if role == "near" and r > params.R_f:
        raise ValueError("near role requires r <= R_f")
    if role == "far" and r <= params.R_f:
        raise ValueError("far role requires r > R_f")
    feasible = thr.near_feasible(params) if role == "near" else thr.far_feasible(params)
    if not feasible:
        return CoverageResult(0.0, method="alzer", feasible=False)
    eps_eff = thr.eps_star(params) if role == "near" else thr.eps_tf(params)
    value = float(_noma_cov_nodes(np.float64(r), eps_eff, params, link == "los"))
    return CoverageResult(min(max(value, 0.0), 1.0), method="alzer")


def _tier_integral(params: NetworkParams, los: bool, density, eps_near, eps_far) -> float:
    """integral over r of density(r) * conditional coverage, split at R_f.

    ``eps_near``/``eps_far`` of None mark that side infeasible (contributes 0).
    """
    d = build_derived(params)
    tier = TierLabel.LOS_ABS if los else TierLabel.NLOS_ABS
    tail = serving_tail_radius(params, tier)
    interior = [d.l_Lh, d.l_LT] if los else \
        [max(params.h, (d.eta_N / d.eta_L) ** (1 / params.alpha_N) *
             params.h ** (params.alpha_L / params.alpha_N))]
    total = 0.0
    for lo, hi, eps_eff in ((params.h, params.R_f, eps_near),
                            (params.R_f, max(tail, params.R_f), eps_far)):
        if eps_eff is None or hi <= lo:
            continue
        nodes, weights = _gl_grid(lo, hi, interior)
        if nodes is None:
            continue
        cov = _noma_cov_nodes(nodes, eps_eff, params, los)
        total += float(np.sum(weights * density(nodes) * cov))
    return total


def coverage_noma_los(thr: NomaThresholds, params: NetworkParams) -> float:
    """Coverage given LoS-ABS service, both ball branches included."""
    eps_near = thr.eps_star(params) if thr.near_feasible(params) else None
    eps_far = thr.eps_tf(params) if thr.far_feasible(params) else None

    def density(r):
        return pdf_serving(TierLabel.LOS_ABS, r, params, branch=1) + \
            pdf_serving(TierLabel.LOS_ABS, r, params, branch=2)

    return _tier_integral(params, True, density, eps_near, eps_far)


def coverage_noma_nlos(thr: NomaThresholds, params: NetworkParams) -> float:
    """Coverage given NLoS-ABS service."""
    eps_near = thr.eps_star(params) if thr.near_feasible(params) else None
    eps_far = thr.eps_tf(params) if thr.far_feasible(params) else None
    density = lambda r: pdf_serving(TierLabel.NLOS_ABS, r, params)
    return _tier_integral(params, False, density, eps_near, eps_far)


def coverage_noma_tier(thr: NomaThresholds, params: NetworkParams) -> CoverageResult:
    """Tier coverage: association-weighted mix of the LoS and NLoS cases."""
    probs = assoc_all(params)
    if probs.A_A <= 0.0:
        raise ZeroDivisionError("ABS tier has zero association probability")
    if not (thr.near_feasible(params) or thr.far_feasible(params)):
        return CoverageResult(0.0, method="alzer", feasible=False)
    value = (probs.A_L * coverage_noma_los(thr, params) +
             probs.A_N * coverage_noma_nlos(thr, params)) / probs.A_A
    return CoverageResult(min(max(value, 0.0), 1.0), method="alzer")


# -- mmWave tier ---------------------------------------------------------------

def _tbs_cov_nodes(r, nu_T: float, params: NetworkParams):
    """mmWave coverage at serving distance(s) r, vectorized."""
    d = build_derived(params)
    eps_t = nu_T / (d.G_M * d.P_T * d.C_T)
    k, coef = _alzer_terms(params.m_T)
    r = np.asarray(r, dtype=float)
    s = eps_t * r[..., None] ** params.alpha_T * (k * d.b_T)
    expo = _tbs_exponent(s, r, params)
    return np.sum(coef * np.exp(-s * d.sigma2_T) * np.exp(-expo), axis=-1)


def coverage_tbs(nu_T: float, params: NetworkParams, method: str = "alzer",
                 gc_nodes: int = 50) -> CoverageResult:
    """mmWave-tier coverage at linear SINR threshold ``nu_T``.

    ``method``: "alzer" (panel quadrature over the serving density),
    "gauss_chebyshev" (fixed-node form on the two density branches),
    "exact_m1" (alias of alzer, restricted to m_T = 1 where the fading
    bound is exact), or "adaptive" (scalar reference quadrature).
    """
    if nu_T <= 0:
        raise ValueError("SINR threshold must be positive")
    d = build_derived(params)

    if method == "exact_m1":
        if params.m_T != 1:
            raise ValueError("exact coverage without transform derivatives needs m_T = 1")
        return CoverageResult(coverage_tbs(nu_T, params, "alzer").value, method=method)

    if method == "gauss_chebyshev":
        split = min(max(d.l_TL, 0.0), params.R_B)
        total = 0.0
        for lo, hi in ((0.0, split), (split, params.R_B)):
            if hi <= lo:
                continue
            x, weight, circ, half = numerics.gc_map(lo, hi, gc_nodes)
            total += half * weight * float(np.sum(
                circ * _tbs_cov_nodes(x, nu_T, params) * pdf_serving(TierLabel.TBS, x, params)))
        return CoverageResult(min(max(total, 0.0), 1.0), method=method)

    if method == "adaptive":
        def integrand(r):
            return float(_tbs_cov_nodes(np.float64(r), nu_T, params) *
                         pdf_serving(TierLabel.TBS, r, params))
        split = min(max(d.l_TL, 0.0), params.R_B)
        value = numerics.integrate(integrand, 0.0, split) + \
            numerics.integrate(integrand, split, params.R_B)
        return CoverageResult(min(max(value, 0.0), 1.0), method=method)

    if method != "alzer":
        raise ValueError(f"unknown method {method!r}")

    nodes, weights = _gl_grid(0.0, params.R_B, [d.l_TL])
    value = float(np.sum(weights * pdf_serving(TierLabel.TBS, nodes, params) *
                         _tbs_cov_nodes(nodes, nu_T, params)))
    return CoverageResult(min(max(value, 0.0), 1.0), method="alzer")
