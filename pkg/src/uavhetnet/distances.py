"""Nearest-station distance densities, interferer exclusion radii, and
serving-distance densities conditioned on the association outcome.

ABS distances are slant distances (>= altitude h); TBS distances are ground
distances.  The LoS/NLoS thinning makes the ABS processes non-homogeneous,
so every void probability runs through the cumulative intensity

    Lambda(x) = 2*pi*lambda_A * integral_0^x t * P(t) dt,

the expected number of LoS (or NLoS) ABSs within horizontal distance x.
Profiles are precomputed per scenario as cumulative Gauss-Legendre panels
and evaluated to machine accuracy at arbitrary points.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .params import NetworkParams, build_derived
from . import channel


class TierLabel(enum.Enum):
    """Which station class serves (or interferes with) the typical UE."""
    TBS = "tbs"
    LOS_ABS = "los_abs"
    NLOS_ABS = "nlos_abs"


class DomainError(ValueError):
    """A distance argument lies outside the branch domain of a formula."""


class UnsupportedRegimeError(ValueError):
    """The parameter regime has no implemented closed form."""


# -- cumulative LoS/NLoS intensity profiles ---------------------------------

class _CumulativeIntensity:
    """Machine-accurate evaluator of Lambda(x) for one link class.

    Panel edges grow geometrically from 0; panel-end cumulative values are
    precomputed once, and an evaluation integrates only the partial panel
    [edge, x] with a 24-node rule, so no interpolation error enters.
    Beyond the last edge the integrand's large-x limit P(inf) is used.
    """

    _GL_N = 24

    def __init__(self, params: NetworkParams, los: bool):
        self.params = params
        self.los = los
        self._prob = (lambda x: channel.p_los(x, params)) if los else \
                     (lambda x: channel.p_nlos(x, params))
        self._rate = 2.0 * math.pi * params.lambda_A
        # dense near the first few altitudes, geometric afterwards
        x_max = 10.0 * params.region_radius
        n_panels = 400
        ratio = (x_max / (params.h / 50.0)) ** (1.0 / (n_panels - 1))
        edges = np.concatenate([[0.0], (params.h / 50.0) * ratio ** np.arange(n_panels)])
        self._edges = edges
        xg, wg = np.polynomial.legendre.leggauss(self._GL_N)
        self._xg, self._wg = xg, wg
        lo, hi = edges[:-1], edges[1:]
        half = 0.5 * (hi - lo)[:, None]
        nodes = 0.5 * (hi + lo)[:, None] + half * xg[None, :]
        panel_vals = np.sum(half * wg[None, :] * nodes * self._prob(nodes), axis=1)
        self._cum = np.concatenate([[0.0], np.cumsum(panel_vals)])
        self._p_inf = float(self._prob(np.inf))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.empty_like(x)
        inside = x <= self._edges[-1]
        xi = np.clip(x[inside], 0.0, None)
        idx = np.searchsorted(self._edges, xi, side="right") - 1
        idx = np.clip(idx, 0, len(self._edges) - 2)
        lo = self._edges[idx]
        half = 0.5 * (xi - lo)[:, None]
        nodes = (lo[:, None] + half) + half * self._xg[None, :]
        partial = np.sum(half * self._wg[None, :] * nodes * self._prob(nodes), axis=1)
        out[inside] = self._cum[idx] + partial
        if np.any(~inside):
            xo = x[~inside]
            out[~inside] = self._cum[-1] + self._p_inf * 0.5 * (xo ** 2 - self._edges[-1] ** 2)
        out *= self._rate
        return float(out[0]) if scalar else out


@lru_cache(maxsize=32)
def _profiles(params: NetworkParams):
    return _CumulativeIntensity(params, los=True), _CumulativeIntensity(params, los=False)


def expected_count(x, params: NetworkParams, los: bool):
    """Expected LoS (or NLoS) ABSs within horizontal distance ``x``."""
    prof_l, prof_n = _profiles(params)
    return prof_l(x) if los else prof_n(x)


def void_probability(x, params: NetworkParams, los: bool):
    """Probability of no LoS (or NLoS) ABS within horizontal distance x."""
    return np.exp(-expected_count(x, params, los))


def slant_to_horizontal(tau, h: float):
    """sqrt(tau^2 - h^2), clipped at 0 for slant distances at or below h."""
    tau = np.asarray(tau, dtype=float)
    return np.sqrt(np.maximum(tau * tau - h * h, 0.0))


# -- nearest-station densities ----------------------------------------------

def pdf_nearest(tier: TierLabel, r, params: NetworkParams):
    """Density of the nearest-station distance for one station class.

    For the TBS class this is the sub-density that integrates to Q_T over
    [0, R_B] (the ball may be empty); the ABS densities integrate to 1.
    """
    r = np.asarray(r, dtype=float)
    if tier is TierLabel.TBS:
        lam = params.lambda_T
        dens = 2.0 * math.pi * lam * r * np.exp(-math.pi * lam * r * r)
        return np.where((r >= 0) & (r <= params.R_B), dens, 0.0)
    los = tier is TierLabel.LOS_ABS
    x = slant_to_horizontal(r, params.h)
    prob = channel.p_los(x, params) if los else channel.p_nlos(x, params)
    dens = 2.0 * math.pi * params.lambda_A * r * prob * \
        np.exp(-expected_count(x, params, los))
    return np.where(r >= params.h, dens, 0.0)


def cdf_nearest(tier: TierLabel, r, params: NetworkParams):
    """CDF companion of :func:`pdf_nearest` (TBS value saturates at Q_T)."""
    r = np.asarray(r, dtype=float)
    if tier is TierLabel.TBS:
        rr = np.clip(r, 0.0, params.R_B)
        return 1.0 - np.exp(-math.pi * params.lambda_T * rr * rr)
    los = tier is TierLabel.LOS_ABS
    x = slant_to_horizontal(np.maximum(r, params.h), params.h)
    return 1.0 - np.exp(-expected_count(x, params, los))


# -- exclusion radii ---------------------------------------------------------

def _power_match(eta_from: float, eta_to: float, alpha_from: float,
                 alpha_to: float, r):
    """Distance at which class `to` matches the biased power of class `from`
    at distance r: solves eta_from r^-alpha_from = eta_to tau^-alpha_to."""
    return (eta_to / eta_from) ** (1.0 / alpha_to) * \
        np.asarray(r, dtype=float) ** (alpha_from / alpha_to)


def exclusion_radius(serving: TierLabel, interferer: TierLabel, r,
                     params: NetworkParams, tbs_in_ball: bool = False):
    """Minimum distance of the nearest interferer of class ``interferer``
    given service by ``serving`` at distance ``r``.

    ABS interferer radii are slant distances floored at h.  Raises
    :class:`DomainError` when ``r`` leaves the branch domain of the pair.
    """
    d = build_derived(params)
    r = np.asarray(r, dtype=float)
    tol = 1e-9 * max(1.0, params.h)

    if serving is interferer:
        return r  # nearest same-class interferer sits just beyond the server

    if serving is TierLabel.NLOS_ABS:
        if np.any(r < params.h - tol):
            raise DomainError("serving NLoS ABS distance must be >= h")
        if interferer is TierLabel.LOS_ABS:
            return np.maximum(params.h, _power_match(d.eta_N, d.eta_L, params.alpha_N, params.alpha_L, r))
        raise DomainError("no TBS exclusion radius exists for NLoS service "
                          "(NLoS association requires an empty LoS ball)")

    if serving is TierLabel.LOS_ABS:
        if np.any(r < params.h - tol):
            raise DomainError("serving LoS ABS distance must be >= h")
        if interferer is TierLabel.TBS:
            if np.any(r > d.l_LT + tol):
                raise DomainError("serving LoS ABS beyond l_LT cannot coexist "
                                  "with a TBS inside the LoS ball")
            return _power_match(d.eta_L, d.eta_T, params.alpha_L, params.alpha_T, r)
        # NLoS interferer: same power-match law with or without a ball TBS,
        # but a ball TBS caps the serving distance at l_LT
        if tbs_in_ball and np.any(r > d.l_LT + tol):
            raise DomainError("serving LoS ABS beyond l_LT cannot coexist "
                              "with a TBS inside the LoS ball")
        return np.maximum(params.h, _power_match(d.eta_L, d.eta_N, params.alpha_L, params.alpha_N, r))

    # serving TBS
    if np.any((r < -tol) | (r > params.R_B + tol)):
        raise DomainError("serving TBS distance must lie in [0, R_B]")
    if interferer is TierLabel.LOS_ABS:
        return np.maximum(params.h, _power_match(d.eta_T, d.eta_L, params.alpha_T, params.alpha_L, r))
    return np.maximum(params.h, _power_match(d.eta_T, d.eta_N, params.alpha_T, params.alpha_N, r))


# -- serving-distance densities ----------------------------------------------

def _assoc(params: NetworkParams):
    from . import association  # deferred: association builds on this module
    return association.assoc_all(params)


def pdf_serving(tier: TierLabel, r, params: NetworkParams, branch: int = 1):
    """Serving-distance density conditioned on the association outcome.

    For LoS service, ``branch`` selects the empty-ball (1) or occupied-ball
    (2) component; the two are sub-densities that integrate to A_L1/A_L and
    A_L2/A_L, so summed over branches they normalize to 1.  The TBS density
    is normalized by the mass of its own numerator, which keeps it a proper
    density for every ordering of l_TL, l_TN and R_B.
    """
    d = build_derived(params)
    r = np.asarray(r, dtype=float)

    if tier is TierLabel.NLOS_ABS:
        probs = _assoc(params)
        tau = exclusion_radius(TierLabel.NLOS_ABS, TierLabel.LOS_ABS,
                               np.maximum(r, params.h), params)
        void_l = void_probability(slant_to_horizontal(tau, params.h), params, los=True)
        return pdf_nearest(tier, r, params) * void_l * (1.0 - d.Q_T) / probs.A_N

    if tier is TierLabel.LOS_ABS:
        if branch not in (1, 2):
            raise ValueError("branch must be 1 (no ball TBS) or 2 (ball TBS)")
        probs = _assoc(params)
        rr = np.maximum(r, params.h)
        tau_n = exclusion_radius(TierLabel.LOS_ABS, TierLabel.NLOS_ABS, rr, params)
        void_n = void_probability(slant_to_horizontal(tau_n, params.h), params, los=False)
        base = pdf_nearest(tier, r, params) * void_n / probs.A_L
        if branch == 1:
            return base * (1.0 - d.Q_T)
        tau_t = np.where(rr <= d.l_LT, _power_match(d.eta_L, d.eta_T, params.alpha_L,
                                                    params.alpha_T, rr), params.R_B)
        ball_factor = np.exp(-math.pi * params.lambda_T * tau_t ** 2) - (1.0 - d.Q_T)
        return np.where(r <= d.l_LT, base * np.maximum(ball_factor, 0.0), 0.0)

    # TBS: density proportional to f_{R_T,0}(r) times the probability that no
    # LoS ABS beats the TBS at r (NLoS ABSs never compete once a ball TBS exists)
    tau_l = exclusion_radius(TierLabel.TBS, TierLabel.LOS_ABS,
                             np.clip(r, 0.0, params.R_B), params)
    void_l = void_probability(slant_to_horizontal(tau_l, params.h), params, los=True)
    return pdf_nearest(tier, r, params) * void_l / tbs_serving_mass(params)


@dataclass(frozen=True)
class ConditionalPdf:
    """A serving-distance density with its support and branch bookkeeping.

    LoS branches are sub-densities (they integrate to the branch's share of
    the LoS association mass); everything else integrates to 1.
    """
    tier: TierLabel
    support: tuple              # (lower [m], upper [m] or inf)
    branch: int                 # 1 = empty ball, 2 = occupied ball (LoS only)
    params: NetworkParams

    def __call__(self, r):
        return pdf_serving(self.tier, r, self.params, branch=self.branch)


def serving_pdf(tier: TierLabel, params: NetworkParams,
                branch: int = 1) -> ConditionalPdf:
    """Bundle :func:`pdf_serving` with its support for one tier/branch."""
    d = build_derived(params)
    if tier is TierLabel.TBS:
        support = (0.0, params.R_B)
    elif tier is TierLabel.LOS_ABS and branch == 2:
        support = (params.h, d.l_LT)
    else:
        support = (params.h, math.inf)
    return ConditionalPdf(tier=tier, support=support, branch=branch, params=params)


@lru_cache(maxsize=32)
def tbs_serving_mass(params: NetworkParams) -> float:
    """Normalizer of the TBS serving-distance density: the probability that a
    ball TBS exists and no LoS ABS outpowers the nearest one."""
    from . import numerics
    d = build_derived(params)

    def numerator(r):
        tau_l = exclusion_radius(TierLabel.TBS, TierLabel.LOS_ABS, r, params)
        return float(pdf_nearest(TierLabel.TBS, r, params) *
                     void_probability(slant_to_horizontal(tau_l, params.h), params, los=True))

    split = min(max(d.l_TL, 0.0), params.R_B)
    spec = numerics.DEFAULT_SPEC
    return numerics.integrate(numerator, 0.0, split, spec) + \
        numerics.integrate(numerator, split, params.R_B, spec)
