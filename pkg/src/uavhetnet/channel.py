"""Propagation functions and random link-state samplers.

Deterministic pieces: the elevation-angle S-curve LoS probability for
air-to-ground links and the ball-limited mmWave path loss.  Random pieces:
unit-mean Nakagami-m power fading (Gamma(m, 1/m)) and the two-level
interferer beamforming gain.  Samplers take an explicit ``numpy`` Generator;
:func:`stream` derives reproducible per-trial/per-purpose generators from a
master seed.
"""

from __future__ import annotations

import numpy as np

from .params import NetworkParams, build_derived

# purpose indices for stream(); one sub-stream per kind of draw so that a
# consumer may skip any of them without shifting the others
ABS_GEOMETRY = 0
TBS_GEOMETRY = 1
ABS_FADING = 2
TBS_FADING = 3
BEAM_GAINS = 4
SERVING_FADING = 5


def stream(master_seed: int, *key: int) -> np.random.Generator:
    """Independent random stream for (master_seed, key...).

    Trial i of a campaign uses ``stream(seed, i, purpose)``; the derivation
    depends only on the integers, never on scheduling, so results are
    identical for any worker count or chunking.
    """
    return np.random.default_rng((master_seed, *key))


def p_los(x, params: NetworkParams):
    """LoS probability of an A2G link at horizontal distance ``x`` metres.

    Logistic in the elevation angle (degrees): 1/(1 + a*exp(-b*(angle - a))).
    At x = 0 the ABS is overhead and the angle is 90 degrees.  Written via
    atan(x/h) so x = 0 needs no special case.
    """
    x = np.asarray(x, dtype=float)
    angle_deg = 90.0 - np.degrees(np.arctan(x / params.h))
    return 1.0 / (1.0 + params.a * np.exp(-params.b * (angle_deg - params.a)))


def p_nlos(x, params: NetworkParams):
    """NLoS probability, the complement of :func:`p_los`."""
    return 1.0 - p_los(x, params)


def path_loss_T(r, params: NetworkParams):
    """mmWave-tier path loss at distance ``r``: C_T * r^-alpha_T inside the
    LoS ball, exactly zero beyond it.  The ball boundary r = R_B is LoS."""
    d = build_derived(params)
    r = np.asarray(r, dtype=float)
    return np.where(r <= params.R_B, d.C_T * r ** -params.alpha_T, 0.0)


def path_loss_abs(r, params: NetworkParams, los: bool):
    """A2G path loss at slant distance ``r`` for a LoS or NLoS link."""
    d = build_derived(params)
    r = np.asarray(r, dtype=float)
    if los:
        return d.C_L * r ** -params.alpha_L
    return d.C_N * r ** -params.alpha_N


def sample_fading(m: int, rng: np.random.Generator, size=None):
    """Unit-mean Nakagami-m power gain(s): Gamma(shape=m, scale=1/m)."""
    if not (isinstance(m, (int, np.integer)) and m >= 1):
        raise ValueError(f"fading shape must be an integer >= 1, got {m!r}")
    return rng.gamma(shape=float(m), scale=1.0 / m, size=size)


def sample_interferer_gain(params: NetworkParams, rng: np.random.Generator, size=None):
    """Beam gain of an interfering TBS: G_M w.p. p_M, else G_m."""
    d = build_derived(params)
    u = rng.random(size)
    return np.where(u < d.p_M, d.G_M, d.G_m)
