"""Tier association probabilities under max biased average received power.

Service rules: with no TBS inside the LoS ball the UE takes whichever ABS
class delivers more biased power; with a ball TBS present, NLoS ABSs are
barred from service and the UE takes the LoS ABS only if it outpowers both
the nearest NLoS ABS and the nearest TBS, falling back to the TBS
otherwise.  The TBS probability is the complement.

The occupied-ball LoS term is computed as a single joint expectation over
the nearest-LoS distance.  Factorizing it into the product
Q_T * Q_L * P(beats NLoS) * P(beats TBS) treats the two comparisons as
independent, which overstates nothing individually but drops their positive
correlation through the serving distance; the simulator confirms the joint
value (the product sits several Monte Carlo standard errors away at the
default scenario).  The product's factors are still reported for reference.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import numerics
from .distances import (TierLabel, exclusion_radius, pdf_nearest,
                        slant_to_horizontal, void_probability)
from .params import NetworkParams, build_derived

log = logging.getLogger(__name__)

# counts integrand evaluations clamped at zero in the ball-TBS term; the
# bracket is non-negative analytically, so only rounding can land below zero
negative_bracket_clamps = 0


class ConsistencyError(RuntimeError):
    """The computed probabilities violate a structural identity."""


@dataclass(frozen=True)
class AssociationProbs:
    """Tier association probabilities and their building blocks."""
    A_T: float
    A_L: float
    A_N: float
    A_L1: float          # LoS service, empty ball
    A_L2: float          # LoS service, occupied ball (joint form)
    Q_T: float           # P(some TBS inside the ball)
    Q_L: float           # P(some LoS ABS within l_LT)
    P_AL2N: float        # factorized: P(LoS beats NLoS | ball occupied branch)
    P_AL2T: float        # factorized: P(LoS beats TBS | ball occupied branch)

    @property
    def A_A(self) -> float:
        """Probability of being served by the ABS tier."""
        return self.A_L + self.A_N


def _quad(f, lo, hi):
    return numerics.integrate(f, lo, hi, numerics.DEFAULT_SPEC)


def assoc_nlos(params: NetworkParams) -> float:
    """Probability of NLoS-ABS service: empty ball and the nearest NLoS ABS
    outpowering every LoS ABS."""
    d = build_derived(params)
    h = params.h

    def integrand(r):
        tau = exclusion_radius(TierLabel.NLOS_ABS, TierLabel.LOS_ABS, r, params)
        void_l = void_probability(slant_to_horizontal(tau, h), params, los=True)
        return float(void_l * pdf_nearest(TierLabel.NLOS_ABS, r, params))

    return (1.0 - d.Q_T) * _quad(integrand, h, math.inf)


def _los_void_weighted(params: NetworkParams, lo: float, hi: float,
                       with_ball_factor: bool) -> float:
    """integral of f_{R_L,0}(r) * P(no stronger NLoS ABS)
    [* P(TBS in (tau_TL(r), R_B])] over [lo, hi]."""
    d = build_derived(params)
    h = params.h

    def integrand(r):
        global negative_bracket_clamps
        tau_n = exclusion_radius(TierLabel.LOS_ABS, TierLabel.NLOS_ABS, r, params)
        val = void_probability(slant_to_horizontal(tau_n, h), params, los=False) * \
            pdf_nearest(TierLabel.LOS_ABS, r, params)
        if with_ball_factor:
            tau_t = exclusion_radius(TierLabel.LOS_ABS, TierLabel.TBS,
                                     min(r, d.l_LT), params)
            bracket = math.exp(-math.pi * params.lambda_T * tau_t ** 2) - (1.0 - d.Q_T)
            if bracket < 0.0:
                negative_bracket_clamps += 1
                log.warning("clamped negative ball-TBS bracket %.3e at r=%.6g", bracket, r)
                bracket = 0.0
            val *= bracket
        return float(val)

    return _quad(integrand, lo, hi)


def assoc_los(params: NetworkParams):
    """LoS-ABS service probability and its components.

    Returns ``(A_L, A_L1, A_L2, Q_L, P_AL2N, P_AL2T)``.  ``A_L2`` is the
    joint occupied-ball expectation; ``P_AL2N`` and ``P_AL2T`` are the
    factorized conditionals (with the shortcut P_AL2N = 1 when l_Lh > l_LT)
    whose product with Q_T*Q_L approximates A_L2.
    """
    d = build_derived(params)
    h = params.h

    a_l1 = (1.0 - d.Q_T) * _los_void_weighted(params, h, math.inf, with_ball_factor=False)

    q_l = 1.0 - float(void_probability(slant_to_horizontal(d.l_LT, h), params, los=True))

    if d.l_LT <= h:
        # a ball TBS beats every LoS ABS: no occupied-ball LoS service
        return a_l1, a_l1, 0.0, q_l, 1.0, 0.0

    a_l2 = _los_void_weighted(params, h, d.l_LT, with_ball_factor=True)

    if d.l_Lh > d.l_LT:
        p_al2n = 1.0
    else:
        p_al2n = _los_void_weighted(params, h, d.l_LT, with_ball_factor=False) / q_l

    def bracket_only(r):
        tau_t = exclusion_radius(TierLabel.LOS_ABS, TierLabel.TBS, r, params)
        bracket = max(0.0, math.exp(-math.pi * params.lambda_T * tau_t ** 2) - (1.0 - d.Q_T))
        return float(bracket * pdf_nearest(TierLabel.LOS_ABS, r, params))

    p_al2t = _quad(bracket_only, h, d.l_LT) / (q_l * d.Q_T)

    return a_l1 + a_l2, a_l1, a_l2, q_l, p_al2n, p_al2t


@lru_cache(maxsize=32)
def assoc_all(params: NetworkParams) -> AssociationProbs:
    """All three tier probabilities; the TBS one by complement."""
    d = build_derived(params)
    a_n = assoc_nlos(params)
    a_l, a_l1, a_l2, q_l, p_al2n, p_al2t = assoc_los(params)
    if a_n + a_l > 1.0 + 1e-9:
        raise ConsistencyError(f"A_N + A_L = {a_n + a_l!r} exceeds 1")
    a_t = 1.0 - a_n - a_l
    return AssociationProbs(A_T=a_t, A_L=a_l, A_N=a_n, A_L1=a_l1, A_L2=a_l2,
                            Q_T=d.Q_T, Q_L=q_l, P_AL2N=p_al2n, P_AL2T=p_al2t)
