"""Monte Carlo oracle for the two-tier network.

Each trial drops both station processes in the simulation disc around the
typical UE, applies the max-biased-power association (NLoS ABSs barred from
service whenever a TBS sits inside the LoS ball), and evaluates the full
decoding chain: the mmWave SINR with random interferer beam gains, or the
two-stage NOMA chain with a residual-cancellation term, plus an
equal-split orthogonal baseline.

Randomness is organized as one substream per (master seed, trial index
[, resample attempt], purpose), so any chunking or worker count reproduces
identical numbers.  Trials reduce to per-trial records whose SINR inputs are
threshold- and beta-independent; metrics for any threshold grid are then a
cheap pure function of the records.

Two equivalent sampling paths exist.  ``sample_realization`` materializes
both processes over the whole disc (the literal model, used by the
per-trial reference ops and the distribution tests).  The campaign path
draws the TBS process only inside the LoS ball: outside it the
ball-limited path loss is exactly zero, so those points are invisible to
every observable, and restricting a Poisson process to a subregion is
exact in law.  ABSs are always drawn over the whole disc; their
interference carries no cutoff.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import (ABS_FADING, ABS_GEOMETRY, BEAM_GAINS, SERVING_FADING,
                      TBS_FADING, TBS_GEOMETRY, p_los, sample_fading,
                      sample_interferer_gain, stream)
from .coverage import NomaThresholds
from .distances import TierLabel
from .laplace import LaplaceContext
from .params import NetworkParams, build_derived

_CHUNK = 128          # trials per vectorized batch; results do not depend on it
_MAX_RESAMPLE = 1000

TIER_CODE = {TierLabel.TBS: 0, TierLabel.LOS_ABS: 1, TierLabel.NLOS_ABS: 2}


class EmptyNetworkError(RuntimeError):
    """A realization holds no station that could serve the UE."""


def oma_equivalent_threshold(eps: float) -> float:
    """SINR the orthogonal baseline needs in its half slot to deliver the
    same rate as a NOMA message at threshold ``eps``: (1+eps)^2 - 1."""
    return (1.0 + eps) ** 2 - 1.0


def _trial_stream(seed: int, trial: int, attempt: int, purpose: int) -> np.random.Generator:
    if attempt:
        return stream(seed, trial, attempt, purpose)
    return stream(seed, trial, purpose)


# =====================================================================
# realization-level reference ops
# =====================================================================

@dataclass
class NetworkRealization:
    """One sampled drop of both processes over the simulation disc."""
    tbs_xy: np.ndarray          # (n_T, 2) positions [m]
    abs_xy: np.ndarray          # (n_A, 2) positions [m]
    abs_los: np.ndarray         # (n_A,) LoS marks


@dataclass
class AssociationOutcome:
    tier: TierLabel
    distance: float             # slant for ABS service, ground for TBS [m]
    near: bool | None           # ABS service only
    tbs_in_ball: bool
    serving_index: int          # index into the relevant point list


@dataclass
class TrialOutcome:
    association: TierLabel
    serving_distance: float
    near: bool | None
    sinr_chain: dict
    covered: bool
    rates: dict


def sample_realization(params: NetworkParams, rng: np.random.Generator) -> NetworkRealization:
    """Drop both processes over the whole disc; LoS marks are independent
    Bernoulli draws at each ABS's horizontal distance from the UE."""
    area = math.pi * params.region_radius ** 2

    def _positions(count):
        radius = params.region_radius * np.sqrt(rng.random(count))
        angle = 2.0 * math.pi * rng.random(count)
        return np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])

    tbs_xy = _positions(rng.poisson(params.lambda_T * area))
    abs_xy = _positions(rng.poisson(params.lambda_A * area))
    abs_dist = np.hypot(abs_xy[:, 0], abs_xy[:, 1])
    abs_los = rng.random(len(abs_xy)) < p_los(abs_dist, params)
    return NetworkRealization(tbs_xy=tbs_xy, abs_xy=abs_xy, abs_los=abs_los)


def associate(real: NetworkRealization, params: NetworkParams,
              bar_nlos_with_ball_tbs: bool = True) -> AssociationOutcome:
    """Max biased average received power.

    By default NLoS ABSs are barred from service whenever a TBS sits inside
    the LoS ball, mirroring the analytical accounting; passing ``False``
    runs the pure max-power rule instead, which measures the error that the
    bar introduces.
    """
    d = build_derived(params)
    h2 = params.h ** 2

    tbs_d = np.hypot(real.tbs_xy[:, 0], real.tbs_xy[:, 1]) if len(real.tbs_xy) \
        else np.empty(0)
    abs_d2 = real.abs_xy[:, 0] ** 2 + real.abs_xy[:, 1] ** 2 + h2

    i_t = int(np.argmin(tbs_d)) if tbs_d.size else -1
    ball = i_t >= 0 and tbs_d[i_t] <= params.R_B

    los_d2 = np.where(real.abs_los, abs_d2, np.inf)
    nlos_d2 = np.where(real.abs_los, np.inf, abs_d2)
    i_l = int(np.argmin(los_d2)) if np.any(real.abs_los) else -1
    i_n = int(np.argmin(nlos_d2)) if len(real.abs_los) and not np.all(real.abs_los) else -1

    p_l = d.eta_L * los_d2[i_l] ** (-params.alpha_L / 2.0) if i_l >= 0 else 0.0
    p_n = d.eta_N * nlos_d2[i_n] ** (-params.alpha_N / 2.0) if i_n >= 0 else 0.0
    p_t = d.eta_T * tbs_d[i_t] ** -params.alpha_T if ball else 0.0

    if ball:
        if p_l > p_n and p_l > p_t:
            r = math.sqrt(los_d2[i_l])
            return AssociationOutcome(TierLabel.LOS_ABS, r, r <= params.R_f, True, i_l)
        if not bar_nlos_with_ball_tbs and p_n > p_l and p_n > p_t:
            r = math.sqrt(nlos_d2[i_n])
            return AssociationOutcome(TierLabel.NLOS_ABS, r, r <= params.R_f, True, i_n)
        return AssociationOutcome(TierLabel.TBS, float(tbs_d[i_t]), None, True, i_t)
    if p_l == 0.0 and p_n == 0.0:
        raise EmptyNetworkError("no ball TBS and no ABS in the realization")
    if p_l > p_n:
        r = math.sqrt(los_d2[i_l])
        return AssociationOutcome(TierLabel.LOS_ABS, r, r <= params.R_f, False, i_l)
    r = math.sqrt(nlos_d2[i_n])
    return AssociationOutcome(TierLabel.NLOS_ABS, r, r <= params.R_f, False, i_n)


def noma_chain(x_t, x_f, i_a, noise, params: NetworkParams,
               thresholds: NomaThresholds, beta: float | None = None):
    """SINRs, coverage events and per-pair rates of the NOMA chain and the
    equal-split orthogonal baseline, given the unsplit received powers.

    ``x_t``/``x_f`` are the typical and fixed UE's received signal powers
    before the power split, ``i_a`` the aggregate ABS interference.  Inputs
    broadcast; ``beta`` overrides the scenario's residual coefficient.
    """
    am, an = params.a_m, params.a_n
    beta = params.beta if beta is None else beta
    den = i_a + noise

    g_stage1 = am * x_t / (an * x_t + den)           # typical decodes partner
    g_own_near = an * x_t / (den + beta * am * x_t)  # typical after cancellation
    g_far = g_stage1                                 # typical decodes directly
    g_fix_direct = am * x_f / (an * x_f + den)       # fixed UE decodes directly
    g_fix_sic = an * x_f / (den + beta * am * x_f)   # fixed UE after cancellation

    g_oma_t = x_t / den
    g_oma_f = x_f / den
    eps_oma = oma_equivalent_threshold(thresholds.eps_t)

    return {
        "sinr": {"stage1_near": g_stage1, "own_near": g_own_near,
                 "typical_far": g_far, "fixed_direct": g_fix_direct,
                 "fixed_sic": g_fix_sic, "oma_typical": g_oma_t,
                 "oma_fixed": g_oma_f},
        "covered_near": (g_stage1 > thresholds.eps_f) & (g_own_near > thresholds.eps_t),
        "covered_far": g_far > thresholds.eps_t,
        "covered_oma": g_oma_t > eps_oma,
        "rates": {
            "pair_near": np.log2(1.0 + g_own_near) + np.log2(1.0 + g_fix_direct),
            "pair_far": np.log2(1.0 + g_far) + np.log2(1.0 + g_fix_sic),
            "pair_oma": 0.5 * np.log2(1.0 + g_oma_t) + 0.5 * np.log2(1.0 + g_oma_f),
        },
    }


def evaluate_trial(real: NetworkRealization, outcome: AssociationOutcome,
                   thresholds: NomaThresholds, params: NetworkParams,
                   rng: np.random.Generator, nu_T: float = 1.0) -> TrialOutcome:
    """Full decoding chain for one realization.

    Draw order (fixed regardless of the outcome, so evaluation laziness
    cannot shift the stream): TBS fading, TBS interferer gains, ABS fading,
    fixed-UE fading for both link classes.
    """
    d = build_derived(params)
    h2 = params.h ** 2

    h_tbs = sample_fading(params.m_T, rng, len(real.tbs_xy))
    g_tbs = sample_interferer_gain(params, rng, len(real.tbs_xy))
    if len(real.abs_xy):
        shape_abs = np.where(real.abs_los, params.m_L, params.m_N).astype(float)
        h_abs = rng.gamma(shape=shape_abs, scale=1.0 / shape_abs)
    else:
        h_abs = np.empty(0)
    h_fix_los = float(sample_fading(params.m_L, rng))
    h_fix_nlos = float(sample_fading(params.m_N, rng))

    if outcome.tier is TierLabel.TBS:
        tbs_d = np.hypot(real.tbs_xy[:, 0], real.tbs_xy[:, 1])
        loss = np.where(tbs_d <= params.R_B, d.C_T * tbs_d ** -params.alpha_T, 0.0)
        contrib = g_tbs * d.P_T * loss * h_tbs
        signal = d.G_M * d.P_T * d.C_T * outcome.distance ** -params.alpha_T \
            * h_tbs[outcome.serving_index]
        interference = float(np.sum(contrib) - contrib[outcome.serving_index])
        gamma_t = signal / (interference + d.sigma2_T)
        return TrialOutcome(outcome.tier, outcome.distance, None,
                            {"gamma_T": gamma_t}, covered=gamma_t > nu_T,
                            rates={"tbs": math.log2(1.0 + gamma_t)})

    los = outcome.tier is TierLabel.LOS_ABS
    c_link = d.C_L if los else d.C_N
    alpha = params.alpha_L if los else params.alpha_N
    slant = np.sqrt(real.abs_xy[:, 0] ** 2 + real.abs_xy[:, 1] ** 2 + h2)
    loss_abs = np.where(real.abs_los, d.C_L * slant ** -params.alpha_L,
                        d.C_N * slant ** -params.alpha_N)
    contrib = d.P_A * loss_abs * h_abs
    x_t = d.P_A * c_link * outcome.distance ** -alpha * h_abs[outcome.serving_index]
    i_a = float(np.sum(contrib) - contrib[outcome.serving_index])
    x_f = d.P_A * c_link * params.R_f ** -alpha * (h_fix_los if los else h_fix_nlos)

    chain = noma_chain(x_t, x_f, i_a, d.sigma2_A, params, thresholds)
    covered = chain["covered_near"] if outcome.near else chain["covered_far"]
    rates = {"pair": float(chain["rates"]["pair_near"] if outcome.near
                           else chain["rates"]["pair_far"]),
             "pair_oma": float(chain["rates"]["pair_oma"])}
    return TrialOutcome(outcome.tier, outcome.distance, outcome.near,
                        chain["sinr"], covered=bool(covered), rates=rates)


# =====================================================================
# campaign path: chunked, vectorized, per-trial substreams
# =====================================================================

@dataclass
class TrialRecords:
    """Struct-of-arrays reduction of a campaign; one slot per trial.

    ``x_typ``/``x_fix``/``i_abs`` hold the unsplit ABS-tier powers (NaN on
    TBS trials); ``s_tbs``/``i_tbs`` the mmWave signal and interference (NaN
    on ABS trials).  All SINRs for any thresholds/beta derive from these.
    """
    tier: np.ndarray            # int8, TIER_CODE values
    serving: np.ndarray         # float64 [m]
    near: np.ndarray            # bool
    x_typ: np.ndarray
    x_fix: np.ndarray
    i_abs: np.ndarray
    s_tbs: np.ndarray
    i_tbs: np.ndarray
    nearest_los: np.ndarray     # slant [m], inf when the class is empty
    nearest_nlos: np.ndarray
    nearest_tbs: np.ndarray     # ground [m], inf when the ball is empty
    resampled: int = 0
    with_fading: bool = True

    def __len__(self):
        return len(self.tier)

    def head(self, n: int) -> "TrialRecords":
        """First ``n`` trials (same draws; useful for error-scaling checks)."""
        return TrialRecords(
            tier=self.tier[:n], serving=self.serving[:n], near=self.near[:n],
            x_typ=self.x_typ[:n], x_fix=self.x_fix[:n], i_abs=self.i_abs[:n],
            s_tbs=self.s_tbs[:n], i_tbs=self.i_tbs[:n],
            nearest_los=self.nearest_los[:n], nearest_nlos=self.nearest_nlos[:n],
            nearest_tbs=self.nearest_tbs[:n],
            resampled=self.resampled, with_fading=self.with_fading)


def _seg_min(values: np.ndarray, starts: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """Per-segment minimum; +inf for empty segments."""
    out = np.full(len(starts), np.inf)
    if len(values):
        raw = np.minimum.reduceat(values, np.minimum(starts, len(values) - 1))
        nonempty = counts > 0
        out[nonempty] = raw[nonempty]
    return out


def _seg_sum(values: np.ndarray, starts: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """Per-segment sum; 0 for empty segments."""
    out = np.zeros(len(starts))
    if len(values):
        raw = np.add.reduceat(values, np.minimum(starts, len(values) - 1))
        nonempty = counts > 0
        out[nonempty] = raw[nonempty]
    return out


def _seg_argmin(values: np.ndarray, seg_min: np.ndarray, starts: np.ndarray,
                counts: np.ndarray, trial_of: np.ndarray) -> np.ndarray:
    """Global index of the first per-segment minimum; -1 where undefined."""
    out = np.full(len(starts), -1, dtype=np.int64)
    if len(values):
        hit = values == seg_min[trial_of]
        cand = np.where(hit, np.arange(len(values)), len(values))
        raw = np.minimum.reduceat(cand, np.minimum(starts, len(values) - 1))
        ok = (counts > 0) & np.isfinite(seg_min)
        out[ok] = raw[ok]
    return out


def _simulate_chunk(args):
    params, seed, start, stop, fading, bar_nlos = args
    n = stop - start
    d = build_derived(params)
    h2 = params.h ** 2
    mean_abs = params.lambda_A * math.pi * params.region_radius ** 2
    mean_ball = params.lambda_T * math.pi * params.R_B ** 2
    rb2 = params.R_B ** 2

    x_typ = np.full(n, np.nan)
    x_fix = np.full(n, np.nan)
    i_abs = np.full(n, np.nan)
    s_tbs = np.full(n, np.nan)
    i_tbs = np.full(n, np.nan)
    resampled = 0

    u_radius, u_flags, tbs_r2 = [], [], []
    k_abs = np.empty(n, dtype=np.int64)
    attempt_of = np.zeros(n, dtype=np.int64)
    fix_draws = np.empty((n, 2))

    for j in range(n):
        trial = start + j
        for attempt in range(_MAX_RESAMPLE):
            g_abs = _trial_stream(seed, trial, attempt, ABS_GEOMETRY)
            k_a = int(g_abs.poisson(mean_abs))
            u_r = g_abs.random(k_a)
            u_f = g_abs.random(k_a)
            g_tbs = _trial_stream(seed, trial, attempt, TBS_GEOMETRY)
            k_t = int(g_tbs.poisson(mean_ball))
            r2_t = rb2 * g_tbs.random(k_t)
            if k_a or k_t:
                break
            resampled += 1
        else:
            raise EmptyNetworkError("resample limit hit; densities too low")
        attempt_of[j] = attempt
        k_abs[j] = k_a
        u_radius.append(u_r)
        u_flags.append(u_f)
        tbs_r2.append(r2_t)
        if fading:
            g_sf = _trial_stream(seed, trial, attempt, SERVING_FADING)
            fix_draws[j, 0] = sample_fading(params.m_L, g_sf)
            fix_draws[j, 1] = sample_fading(params.m_N, g_sf)

    x = params.region_radius * np.sqrt(
        np.concatenate(u_radius) if u_radius else np.empty(0))
    u_flag = np.concatenate(u_flags) if u_flags else np.empty(0)
    starts = np.zeros(n, dtype=np.int64)
    np.cumsum(k_abs[:-1], out=starts[1:])
    trial_of = np.repeat(np.arange(n), k_abs)

    is_los = u_flag < p_los(x, params)
    slant2 = x * x + h2
    sl = np.where(is_los, slant2, np.inf)
    sn = np.where(is_los, np.inf, slant2)
    min_l2 = _seg_min(sl, starts, k_abs)
    min_n2 = _seg_min(sn, starts, k_abs)

    min_t2 = np.array([r2.min() if len(r2) else np.inf for r2 in tbs_r2])
    ball = min_t2 <= rb2

    p_l = np.where(np.isfinite(min_l2), d.eta_L * min_l2 ** (-params.alpha_L / 2.0), 0.0)
    p_n = np.where(np.isfinite(min_n2), d.eta_N * min_n2 ** (-params.alpha_N / 2.0), 0.0)
    p_t = np.where(ball, d.eta_T * min_t2 ** (-params.alpha_T / 2.0), 0.0)

    los_wins = np.where(ball, (p_l > p_n) & (p_l > p_t), p_l > p_n)
    if bar_nlos:
        nlos_wins = ~ball & ~los_wins
    else:
        nlos_wins = np.where(ball, (p_n >= p_l) & (p_n > p_t), ~los_wins)
    tier = np.where(los_wins, TIER_CODE[TierLabel.LOS_ABS],
                    np.where(nlos_wins, TIER_CODE[TierLabel.NLOS_ABS],
                             TIER_CODE[TierLabel.TBS])).astype(np.int8)
    is_tbs = tier == TIER_CODE[TierLabel.TBS]
    serving = np.where(is_tbs, np.sqrt(min_t2),
                       np.where(los_wins, np.sqrt(min_l2), np.sqrt(min_n2)))
    near = ~is_tbs & (serving <= params.R_f)

    if fading:
        idx_l = _seg_argmin(sl, min_l2, starts, k_abs, trial_of)
        idx_n = _seg_argmin(sn, min_n2, starts, k_abs, trial_of)

        h_field = np.empty(len(x))
        for j in range(n):
            g_fa = _trial_stream(seed, start + j, int(attempt_of[j]), ABS_FADING)
            sel = slice(starts[j], starts[j] + k_abs[j])
            shape = np.where(is_los[sel], params.m_L, params.m_N).astype(float)
            h_field[sel] = g_fa.gamma(shape=shape, scale=1.0 / shape)

        loss = np.where(is_los, d.C_L * slant2 ** (-params.alpha_L / 2.0),
                        d.C_N * slant2 ** (-params.alpha_N / 2.0))
        contrib = d.P_A * loss * h_field
        totals = _seg_sum(contrib, starts, k_abs)

        srv_idx = np.where(los_wins, idx_l, idx_n)
        on_abs = ~is_tbs & (srv_idx >= 0)
        safe_idx = np.maximum(srv_idx, 0)
        i_abs[on_abs] = (totals - contrib[safe_idx])[on_abs]
        c_link = np.where(los_wins, d.C_L, d.C_N)
        alpha_link = np.where(los_wins, params.alpha_L, params.alpha_N)
        x_typ[on_abs] = (d.P_A * c_link * serving ** -alpha_link *
                         h_field[safe_idx])[on_abs]
        h_fix = np.where(los_wins, fix_draws[:, 0], fix_draws[:, 1])
        x_fix[on_abs] = (d.P_A * c_link * params.R_f ** -alpha_link * h_fix)[on_abs]

        for j in np.flatnonzero(is_tbs):
            r2 = tbs_r2[j]
            trial = start + int(j)
            h_t = sample_fading(params.m_T,
                                _trial_stream(seed, trial, int(attempt_of[j]), TBS_FADING),
                                len(r2))
            gains = sample_interferer_gain(
                params, _trial_stream(seed, trial, int(attempt_of[j]), BEAM_GAINS), len(r2))
            contrib_t = gains * d.P_T * d.C_T * r2 ** (-params.alpha_T / 2.0) * h_t
            k = int(np.argmin(r2))
            s_tbs[j] = d.G_M * d.P_T * d.C_T * r2[k] ** (-params.alpha_T / 2.0) * h_t[k]
            i_tbs[j] = float(np.sum(contrib_t) - contrib_t[k])

    return (tier, serving, near, x_typ, x_fix, i_abs, s_tbs, i_tbs,
            np.sqrt(min_l2), np.sqrt(min_n2), np.sqrt(min_t2), resampled)


def simulate_records(params: NetworkParams, n_trials: int, seed: int,
                     workers: int = 1, fading: bool = True,
                     bar_nlos_with_ball_tbs: bool = True) -> TrialRecords:
    """Run ``n_trials`` independent trials and reduce them to records.

    Bit-identical for fixed (params, n_trials, seed) at any ``workers``.
    ``bar_nlos_with_ball_tbs=False`` switches to the pure max-power rule
    (diagnostics; the analytical engine assumes the bar).
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    spans = [(params, seed, lo, min(lo + _CHUNK, n_trials), fading,
              bar_nlos_with_ball_tbs)
             for lo in range(0, n_trials, _CHUNK)]
    if workers > 1 and len(spans) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_simulate_chunk, spans, chunksize=4))
    else:
        parts = [_simulate_chunk(span) for span in spans]
    cols = [np.concatenate([p[k] for p in parts]) for k in range(11)]
    return TrialRecords(tier=cols[0], serving=cols[1], near=cols[2].astype(bool),
                        x_typ=cols[3], x_fix=cols[4], i_abs=cols[5],
                        s_tbs=cols[6], i_tbs=cols[7], nearest_los=cols[8],
                        nearest_nlos=cols[9], nearest_tbs=cols[10],
                        resampled=sum(p[11] for p in parts), with_fading=fading)


# =====================================================================
# metrics
# =====================================================================

@dataclass
class Estimate:
    value: float
    se: float

    def __iter__(self):
        yield self.value
        yield self.se


@dataclass
class TierMetrics:
    """Frequencies and conditional means for one tier of one campaign."""
    tier: str
    n_trials: int
    n_associated: int
    association: Estimate
    coverage: Estimate | None = None
    rate: Estimate | None = None
    oma_coverage: Estimate | None = None
    oma_rate: Estimate | None = None


@dataclass
class CampaignSummary:
    """Per-tier metrics of one campaign at one threshold point."""
    tbs: TierMetrics            # mmWave tier (coverage at nu_T)
    los: TierMetrics            # LoS-ABS association share
    nlos: TierMetrics           # NLoS-ABS association share
    abs_tier: TierMetrics       # whole ABS tier (NOMA coverage/rate + OMA)
    resampled: int


def _freq(count: int, n: int) -> Estimate:
    p = count / n
    return Estimate(p, math.sqrt(max(p * (1.0 - p), 0.0) / n))


def _cond_mean(values: np.ndarray) -> Estimate:
    if len(values) == 0:
        return Estimate(math.nan, math.nan)
    se = float(np.std(values, ddof=1) / math.sqrt(len(values))) if len(values) > 1 \
        else math.nan
    return Estimate(float(np.mean(values)), se)


def summarize(records: TrialRecords, params: NetworkParams,
              thresholds: NomaThresholds, nu_T: float = 1.0,
              beta: float | None = None) -> CampaignSummary:
    """Tier metrics from records at one threshold point.

    ``beta`` overrides the scenario's residual-cancellation coefficient
    (the recorded powers do not depend on it).
    """
    n = len(records)
    d = build_derived(params)

    t_mask = records.tier == TIER_CODE[TierLabel.TBS]
    l_mask = records.tier == TIER_CODE[TierLabel.LOS_ABS]
    n_mask = records.tier == TIER_CODE[TierLabel.NLOS_ABS]

    tbs = TierMetrics("tbs", n, int(t_mask.sum()), _freq(int(t_mask.sum()), n))
    if records.with_fading and tbs.n_associated:
        g = records.s_tbs[t_mask] / (records.i_tbs[t_mask] + d.sigma2_T)
        tbs.coverage = _freq(int(np.sum(g > nu_T)), tbs.n_associated)
        tbs.rate = _cond_mean(np.log2(1.0 + g))

    los = TierMetrics("los_abs", n, int(l_mask.sum()), _freq(int(l_mask.sum()), n))
    nlos = TierMetrics("nlos_abs", n, int(n_mask.sum()), _freq(int(n_mask.sum()), n))

    a_mask = ~t_mask
    n_abs = int(a_mask.sum())
    abs_tier = TierMetrics("abs_tier", n, n_abs, _freq(n_abs, n))
    if records.with_fading and n_abs:
        chain = noma_chain(records.x_typ[a_mask], records.x_fix[a_mask],
                           records.i_abs[a_mask], d.sigma2_A, params,
                           thresholds, beta=beta)
        near = records.near[a_mask]
        covered = np.where(near, chain["covered_near"], chain["covered_far"])
        abs_tier.coverage = _freq(int(covered.sum()), n_abs)
        abs_tier.rate = _cond_mean(np.where(near, chain["rates"]["pair_near"],
                                            chain["rates"]["pair_far"]))
        abs_tier.oma_coverage = _freq(int(np.sum(chain["covered_oma"])), n_abs)
        abs_tier.oma_rate = _cond_mean(np.asarray(chain["rates"]["pair_oma"]))

    return CampaignSummary(tbs=tbs, los=los, nlos=nlos, abs_tier=abs_tier,
                           resampled=records.resampled)


def run_campaign(params: NetworkParams, thresholds: NomaThresholds,
                 n_trials: int, seed: int, *, nu_T: float = 1.0,
                 beta: float | None = None, workers: int = 1,
                 fading: bool = True):
    """Simulate and summarize in one call.

    Returns ``(summary, records)``; re-summarizing the records at other
    thresholds needs no further simulation.
    """
    records = simulate_records(params, n_trials, seed, workers=workers, fading=fading)
    return summarize(records, params, thresholds, nu_T=nu_T, beta=beta), records


# =====================================================================
# interference-field samplers for transform validation
# =====================================================================

def sample_tbs_interference(params: NetworkParams, r_T0: float, n_draws: int,
                            seed: int) -> np.ndarray:
    """Draws of the mmWave interference with the serving TBS at ``r_T0``:
    interferers are a Poisson process on the annulus [r_T0, R_B] with random
    beam gains and Nakagami fading."""
    d = build_derived(params)
    lo2, hi2 = r_T0 ** 2, params.R_B ** 2
    mean = params.lambda_T * math.pi * max(hi2 - lo2, 0.0)
    out = np.empty(n_draws)
    for i in range(n_draws):
        rng = stream(seed, i, TBS_GEOMETRY)
        k = rng.poisson(mean)
        r2 = lo2 + (hi2 - lo2) * rng.random(k)
        h = sample_fading(params.m_T, stream(seed, i, TBS_FADING), k)
        g = sample_interferer_gain(params, stream(seed, i, BEAM_GAINS), k)
        out[i] = float(np.sum(g * d.P_T * d.C_T * r2 ** (-params.alpha_T / 2.0) * h))
    return out


def sample_abs_interference(params: NetworkParams, ctx: LaplaceContext,
                            n_draws: int, seed: int) -> np.ndarray:
    """Draws of the ABS-tier interference under exclusion context ``ctx``:
    the full-disc field thinned to LoS points beyond w_L_low and NLoS points
    beyond w_N_low."""
    d = build_derived(params)
    mean = params.lambda_A * math.pi * params.region_radius ** 2
    out = np.empty(n_draws)
    for i in range(n_draws):
        g_geo = stream(seed, i, ABS_GEOMETRY)
        k = g_geo.poisson(mean)
        x = params.region_radius * np.sqrt(g_geo.random(k))
        los = g_geo.random(k) < p_los(x, params)
        keep = np.where(los, x >= ctx.w_L_low, x >= ctx.w_N_low)
        x, los = x[keep], los[keep]
        g_fad = stream(seed, i, ABS_FADING)
        if len(x):
            shape = np.where(los, params.m_L, params.m_N).astype(float)
            h = g_fad.gamma(shape=shape, scale=1.0 / shape)
        else:
            h = np.empty(0)
        slant2 = x * x + params.h ** 2
        loss = np.where(los, d.C_L * slant2 ** (-params.alpha_L / 2.0),
                        d.C_N * slant2 ** (-params.alpha_N / 2.0))
        out[i] = float(np.sum(d.P_A * loss * h))
    return out
