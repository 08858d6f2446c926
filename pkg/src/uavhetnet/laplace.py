"""Laplace transforms E[exp(-s I)] of the aggregate interference.

mmWave tier: interfering TBSs live in the annulus between the serving
distance and the ball radius, carry a two-level random beam gain, and fade
with Nakagami-m; the transform is a probability generating functional over
the gain-thinned sub-processes.  The default path integrates the PGFL
exponent numerically; a closed form through incomplete-Beta segments exists
when 2/alpha_T is an integer and serves as a cross-check (its alternating
sign factor is ill-defined otherwise).

ABS tier: LoS and NLoS interferers form independent non-homogeneous
processes outside exclusion bounds set by the association; the transform is
the product of their two exponential functionals.  Semi-infinite ranges are
truncated at the simulation-region radius, which is also where the Monte
Carlo universe ends.

All transforms accept vector ``s`` and evaluate on shared Gauss-Legendre
panels; ``method="adaptive"`` re-computes through the scalar adaptive
quadrature for validation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numerics
from .channel import p_los, p_nlos
from .distances import TierLabel, exclusion_radius, slant_to_horizontal
from .params import NetworkParams, build_derived

_N_PANELS = 12
_PANEL_GROWTH = 2.2
_NODES_PER_PANEL = 16


def _pgfl_kernel(y, m):
    """1 - (1 + y)^-m without cancellation for tiny y."""
    return -np.expm1(-m * np.log1p(y))


@dataclass(frozen=True)
class LaplaceContext:
    """Exclusion geometry seen by the ABS-tier transform.

    ``w_L_low``/``w_N_low`` are horizontal lower bounds for LoS and NLoS
    interferers; upper bounds are the region radius.
    """
    serving: TierLabel
    r: float          # serving slant distance [m]
    w_L_low: float    # [m]
    w_N_low: float    # [m]


def ctx_serving_nlos(r: float, params: NetworkParams) -> LaplaceContext:
    """Bounds when a NLoS ABS at slant distance r serves the UE."""
    tau_l = exclusion_radius(TierLabel.NLOS_ABS, TierLabel.LOS_ABS, r, params)
    return LaplaceContext(
        serving=TierLabel.NLOS_ABS, r=float(r),
        w_L_low=float(slant_to_horizontal(tau_l, params.h)),
        w_N_low=float(slant_to_horizontal(r, params.h)),
    )


def ctx_serving_los(r: float, params: NetworkParams,
                    tbs_in_ball: bool = False) -> LaplaceContext:
    """Bounds when a LoS ABS at slant distance r serves the UE."""
    tau_n = exclusion_radius(TierLabel.LOS_ABS, TierLabel.NLOS_ABS, r, params,
                             tbs_in_ball=tbs_in_ball)
    return LaplaceContext(
        serving=TierLabel.LOS_ABS, r=float(r),
        w_L_low=float(slant_to_horizontal(r, params.h)),
        w_N_low=float(slant_to_horizontal(tau_n, params.h)),
    )


# -- ABS tier -----------------------------------------------------------------

def _panel_nodes(w_low, x_max: float):
    """Geometric panels from each lower bound to the region edge.

    ``w_low`` has any batch shape B; returns nodes and weights of shape
    B + (n_panels * nodes_per_panel,).
    """
    w = np.asarray(w_low, dtype=float)
    span = np.maximum(x_max - w, 0.0)
    widths = _PANEL_GROWTH ** np.arange(_N_PANELS)
    cuts = np.concatenate([[0.0], np.cumsum(widths)]) / np.sum(widths)
    edges = w[..., None] + span[..., None] * cuts          # B + (P+1,)
    xg, wg = numerics._leggauss(_NODES_PER_PANEL)
    lo, hi = edges[..., :-1, None], edges[..., 1:, None]
    half = 0.5 * (hi - lo)
    nodes = 0.5 * (hi + lo) + half * xg
    weights = half * wg
    flat = w.shape + (_N_PANELS * _NODES_PER_PANEL,)
    return nodes.reshape(flat), weights.reshape(flat)


def _abs_exponent(s, w_low, params: NetworkParams, los: bool):
    """PGFL exponent of one ABS class beyond horizontal bound ``w_low``.

    ``w_low`` has batch shape B; ``s`` must broadcast against B + (K,);
    the result has shape broadcast(s, B + (1,)).
    """
    d = build_derived(params)
    if los:
        c, m, alpha, prob = d.C_L, params.m_L, params.alpha_L, p_los
    else:
        c, m, alpha, prob = d.C_N, params.m_N, params.alpha_N, p_nlos
    x, wt = _panel_nodes(w_low, params.region_radius)      # B + (NX,)
    slant_pow = (x * x + params.h ** 2) ** (0.5 * alpha)
    field = prob(x, params) * x * wt                       # B + (NX,)
    s = np.asarray(s, dtype=float)[..., None]              # s + (1,)
    kernel = _pgfl_kernel((s * (d.P_A * c)) / (m * slant_pow[..., None, :]), m)
    return 2.0 * math.pi * params.lambda_A * np.sum(kernel * field[..., None, :], axis=-1)


def _abs_exponent_adaptive(s: float, w_low: float, params: NetworkParams,
                           los: bool) -> float:
    d = build_derived(params)
    if los:
        c, m, alpha, prob = d.C_L, params.m_L, params.alpha_L, p_los
    else:
        c, m, alpha, prob = d.C_N, params.m_N, params.alpha_N, p_nlos

    def integrand(x):
        slant_pow = (x * x + params.h ** 2) ** (0.5 * alpha)
        return float(_pgfl_kernel(s * d.P_A * c / (m * slant_pow), m) *
                     prob(x, params) * x)

    # split at the elevation-angle knee scales so quad converges cleanly
    cuts = [w_low] + [w_low + f * params.h for f in (2.0, 20.0, 200.0)] + \
        [params.region_radius]
    cuts = sorted({min(max(c_, w_low), params.region_radius) for c_ in cuts})
    val = sum(numerics.integrate(integrand, a, b)
              for a, b in zip(cuts[:-1], cuts[1:]))
    return 2.0 * math.pi * params.lambda_A * val


def laplace_abs(s, ctx: LaplaceContext, params: NetworkParams,
                method: str = "panel"):
    """E[exp(-s * I_A)] for the ABS-tier interference under ``ctx``.

    Accepts scalar or array ``s`` (must be >= 0); equals 1 at s = 0.
    """
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise ValueError("transform argument s must be >= 0")
    if method == "adaptive":
        flat = np.atleast_1d(s_arr).ravel()
        expo = np.array([_abs_exponent_adaptive(float(v), ctx.w_L_low, params, True) +
                         _abs_exponent_adaptive(float(v), ctx.w_N_low, params, False)
                         for v in flat]).reshape(np.atleast_1d(s_arr).shape)
    elif method == "panel":
        expo = _abs_exponent(s_arr, np.float64(ctx.w_L_low), params, los=True) + \
            _abs_exponent(s_arr, np.float64(ctx.w_N_low), params, los=False)
    else:
        raise ValueError(f"unknown method {method!r}")
    out = np.exp(-expo)
    if np.isscalar(s) or s_arr.ndim == 0:
        return float(np.squeeze(out))
    return out


def abs_exponent_batch(s, w_l_low, w_n_low, params: NetworkParams):
    """Vector core for tier integrals: exponent of L_IA for batched bounds.

    ``w_l_low``/``w_n_low`` have batch shape B, ``s`` broadcasts against
    B + (K,); returns the summed LoS+NLoS exponent of that shape.
    """
    return _abs_exponent(s, w_l_low, params, los=True) + \
        _abs_exponent(s, w_n_low, params, los=False)


# -- mmWave tier ---------------------------------------------------------------

def _tbs_exponent(s, r_low, params: NetworkParams):
    """PGFL exponent for TBS interferers in the annulus [r_low, R_B].

    ``r_low`` has batch shape B; ``s`` broadcasts against B + (K,).
    """
    d = build_derived(params)
    r_low = np.asarray(r_low, dtype=float)
    xg, wg = numerics._leggauss(24)
    lo = r_low[..., None]
    hi = np.broadcast_to(float(params.R_B), lo.shape)
    edges = lo + (hi - lo) * np.array([0.0, 0.05, 0.25, 1.0])  # denser near r_low
    plo, phi = edges[..., :-1, None], edges[..., 1:, None]
    half = 0.5 * (phi - plo)
    nodes = (0.5 * (phi + plo) + half * xg).reshape(r_low.shape + (-1,))
    weights = (half * wg).reshape(r_low.shape + (-1,))
    s = np.asarray(s, dtype=float)[..., None]
    expo = 0.0
    for gain, p_gain in ((d.G_M, d.p_M), (d.G_m, d.p_m)):
        kernel = _pgfl_kernel(s * (d.P_T * d.C_T * gain) /
                              (params.m_T * nodes[..., None, :] ** params.alpha_T),
                              params.m_T)
        expo = expo + p_gain * np.sum(kernel * (nodes * weights)[..., None, :], axis=-1)
    return 2.0 * math.pi * params.lambda_T * expo


def laplace_tbs(s, r_T0: float, params: NetworkParams, method: str = "numeric"):
    """E[exp(-s * I_T)] for mmWave interference, serving TBS at ``r_T0``.

    ``method="numeric"`` integrates the PGFL exponent (always available);
    ``"closed_form"`` evaluates the incomplete-Beta expression, defined only
    when 2/alpha_T is an integer; ``"adaptive"`` is the scalar reference.
    """
    if not 0.0 <= r_T0 <= params.R_B:
        raise ValueError("serving TBS distance must lie in [0, R_B]")
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise ValueError("transform argument s must be >= 0")
    if method == "numeric":
        expo = _tbs_exponent(s_arr, np.float64(r_T0), params)
    elif method == "adaptive":
        flat = np.atleast_1d(s_arr).ravel()
        expo = np.array([_tbs_exponent_adaptive(float(v), r_T0, params) for v in flat]) \
            .reshape(np.atleast_1d(s_arr).shape)
    elif method == "closed_form":
        flat = np.atleast_1d(s_arr).ravel()
        expo = np.array([_tbs_exponent_closed(float(v), r_T0, params) for v in flat]) \
            .reshape(np.atleast_1d(s_arr).shape)
    else:
        raise ValueError(f"unknown method {method!r}")
    out = np.exp(-expo)
    if np.isscalar(s) or s_arr.ndim == 0:
        return float(np.squeeze(out))
    return out


def _tbs_exponent_adaptive(s: float, r_T0: float, params: NetworkParams) -> float:
    d = build_derived(params)
    total = 0.0
    for gain, p_gain in ((d.G_M, d.p_M), (d.G_m, d.p_m)):
        def integrand(r, gain=gain):
            return float(_pgfl_kernel(s * d.P_T * d.C_T * gain /
                                      (params.m_T * r ** params.alpha_T), params.m_T) * r)
        total += p_gain * numerics.integrate(integrand, r_T0, params.R_B)
    return 2.0 * math.pi * params.lambda_T * total


def _tbs_exponent_closed(s: float, r_T0: float, params: NetworkParams) -> float:
    """Incomplete-Beta form of the exponent; needs integer 2/alpha_T."""
    two_over_alpha = 2.0 / params.alpha_T
    if abs(two_over_alpha - round(two_over_alpha)) > 1e-12:
        raise ValueError(
            f"closed form undefined: (-1)^(2/alpha_T - i + 1) needs integer "
            f"2/alpha_T, got alpha_T = {params.alpha_T}")
    if s == 0.0:
        return 0.0
    d = build_derived(params)
    m = params.m_T
    r0 = max(r_T0, 1e-9)
    total = 0.0
    for gain, p_gain in ((d.G_M, d.p_M), (d.G_m, d.p_m)):
        k_j = s * d.P_T * d.C_T * gain / m
        t_l = -k_j / r0 ** params.alpha_T
        t_u = -k_j / params.R_B ** params.alpha_T
        for i in range(1, m + 1):
            sign = (-1.0) ** round(two_over_alpha - i + 1)
            seg = numerics.beta_segment(t_l, t_u, i - two_over_alpha, 1.0 - m)
            total += p_gain * math.comb(m, i) * k_j ** two_over_alpha * sign * seg
    return 2.0 * math.pi * params.lambda_T / params.alpha_T * total
