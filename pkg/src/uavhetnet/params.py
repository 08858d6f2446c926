"""Scenario parameters and derived constants.

All downstream math runs in linear units (watts, metres); dB and dBm appear
only here, at the configuration boundary.  ``NetworkParams`` holds the raw
scenario knobs as they appear in a config file, ``build_derived`` turns them
into the linear-scale constants (biased power prefactors, power-crossover
distances, beamforming gains, fading bound coefficients) that every other
module consumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, asdict
from functools import lru_cache
from pathlib import Path

import yaml


def db_to_linear(x_db: float) -> float:
    """dB -> linear power ratio."""
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x_lin: float) -> float:
    """Linear power ratio -> dB."""
    return 10.0 * math.log10(x_lin)


def dbm_to_watt(x_dbm: float) -> float:
    """dBm -> watts."""
    return 10.0 ** ((x_dbm - 30.0) / 10.0)


class ParameterError(ValueError):
    """A named scenario parameter violates its validity constraint."""

    def __init__(self, field_name: str, message: str):
        self.field_name = field_name
        super().__init__(f"{field_name}: {message}")


@dataclass(frozen=True)
class NetworkParams:
    """One scenario: every raw knob of the two-tier network.

    Densities are points per m^2, distances in metres, losses in dB,
    powers in dBm.  Attribute names match the config-file keys exactly.
    """

    lambda_T: float = 1e-5        # TBS density [1/m^2]
    lambda_A: float = 0.2e-5      # ABS density [1/m^2]
    a: float = 12.08              # S-curve environment parameter
    b: float = 0.11               # S-curve environment parameter
    h: float = 200.0              # common ABS altitude [m]
    R_f: float = 220.0            # paired-UE link distance [m], >= h
    R_B: float = 220.0            # mmWave LoS-ball radius [m]
    beta: float = 0.1             # residual SIC coefficient, in [0, 1)
    alpha_N: float = 3.0          # path-loss exponent, NLoS ABS link
    alpha_L: float = 2.5          # path-loss exponent, LoS ABS link
    alpha_T: float = 2.0          # path-loss exponent, TBS link
    C_N_dB: float = 10.0          # additive loss, NLoS ABS link [dB]
    C_L_dB: float = 3.0           # additive loss, LoS ABS link [dB]
    C_T_dB: float = 3.0           # additive loss, TBS link [dB]
    m_N: int = 1                  # Nakagami shape, NLoS ABS link
    m_L: int = 2                  # Nakagami shape, LoS ABS link
    m_T: int = 2                  # Nakagami shape, TBS link
    a_m: float = 0.8              # power share of the far UE
    a_n: float = 0.2              # power share of the near UE
    P_T_dBm: float = 20.0         # TBS transmit power [dBm]
    P_A_dBm: float = 59.0         # ABS transmit power [dBm]
    sigma2_T_dBm: float = -70.0   # mmWave-tier noise power [dBm]
    sigma2_A_dBm: float = -104.0  # ABS-tier noise power [dBm]
    N_T: int = 4                  # TBS antenna count
    region_radius: float = 5e4    # simulation disc radius [m]

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        """Raise :class:`ParameterError` on the first violated constraint."""
        positive = [
            "lambda_T", "lambda_A", "a", "b", "h", "R_f", "R_B",
            "alpha_N", "alpha_L", "alpha_T", "region_radius",
        ]
        for name in positive:
            if not getattr(self, name) > 0:
                raise ParameterError(name, "must be strictly positive")
        for name in ("m_N", "m_L", "m_T"):
            value = getattr(self, name)
            if not (isinstance(value, int) and value >= 1):
                raise ParameterError(name, "must be an integer >= 1")
        if not (isinstance(self.N_T, int) and self.N_T >= 1):
            raise ParameterError("N_T", "must be an integer >= 1")
        if not 0.0 <= self.beta < 1.0:
            raise ParameterError("beta", "must lie in [0, 1)")
        if not (self.a_m > self.a_n > 0):
            raise ParameterError("a_m", "power shares need a_m > a_n > 0")
        if abs(self.a_m + self.a_n - 1.0) > 1e-12:
            raise ParameterError("a_n", "power shares must satisfy a_m + a_n = 1")
        if self.R_f < self.h:
            raise ParameterError("R_f", "paired-UE distance must be >= altitude h")

    # -- config I/O ---------------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict) -> "NetworkParams":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ParameterError(sorted(unknown)[0], "unknown parameter name")
        cast = dict(data)
        for name in ("m_N", "m_L", "m_T", "N_T"):
            value = cast.get(name)
            if isinstance(value, float) and value.is_integer():
                cast[name] = int(value)  # YAML numbers may arrive as floats
        return cls(**cast)

    @classmethod
    def from_file(cls, path: str | Path) -> "NetworkParams":
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
        if not isinstance(data, dict):
            raise ParameterError("<config>", f"{path} does not contain a key/value mapping")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return asdict(self)

    def replace(self, **changes) -> "NetworkParams":
        merged = {**self.to_dict(), **changes}
        return NetworkParams.from_dict(merged)


@dataclass(frozen=True)
class DerivedConstants:
    """Linear-scale constants precomputed from a :class:`NetworkParams`.

    ``eta_*`` are the biased average-received-power prefactors (power x
    additive loss x association bias).  The ``l_*`` lengths are the distances
    at which two tiers deliver equal biased power; they delimit the branch
    structure of the interferer-exclusion radii.  ``b_*`` are the fading
    CCDF bound coefficients m*(m!)^(-1/m), exact for m = 1.
    """

    # transmit/noise powers and additive losses, linear
    P_T: float        # [W]
    P_A: float        # [W]
    sigma2_T: float   # [W]
    sigma2_A: float   # [W]
    C_T: float
    C_L: float
    C_N: float
    # biased-power prefactors
    eta_T: float
    eta_L: float
    eta_N: float
    # equal-power crossover distances [m]
    l_Lh: float       # LoS-ABS distance matching a NLoS ABS overhead
    l_LT: float       # max LoS-ABS serving distance with a ball TBS present
    l_TL: float       # TBS distance matching a LoS ABS overhead
    l_TN: float       # TBS distance matching a NLoS ABS overhead
    # fading CCDF bound coefficients
    b_T: float
    b_L: float
    b_N: float
    # sectorized beam pattern
    theta_a: float    # azimuth beamwidth [rad]
    theta_d: float    # depression beamwidth [rad]
    G_M: float        # main-lobe gain
    G_m: float        # side-lobe gain
    p_M: float        # probability an interfering beam shows its main lobe
    p_m: float
    # probability of at least one TBS inside the LoS ball
    Q_T: float


def _alzer_coefficient(m: int) -> float:
    """m * (m!)^(-1/m); equals 1 for m = 1."""
    return m * math.factorial(m) ** (-1.0 / m)


def _side_lobe_gain(n_t: int) -> float:
    """Side-lobe gain of the sectorized pattern for an n_t-antenna array.

    The interpolation formula turns negative for large arrays (already at
    n_t = 16); a gain cannot be negative, so it is floored at zero there
    (side lobes then contribute no interference).
    """
    s = math.sqrt(3.0) * math.sin(3.0 * math.pi / (2.0 * math.sqrt(n_t))) / (2.0 * math.pi)
    return max((math.sqrt(n_t) - n_t * s) / (math.sqrt(n_t) - s), 0.0)


@lru_cache(maxsize=64)
def build_derived(params: NetworkParams) -> DerivedConstants:
    """Validate ``params`` and compute every derived linear-scale constant."""
    params.validate()

    p_t = dbm_to_watt(params.P_T_dBm)
    p_a = dbm_to_watt(params.P_A_dBm)
    c_t = db_to_linear(params.C_T_dB)
    c_l = db_to_linear(params.C_L_dB)
    c_n = db_to_linear(params.C_N_dB)

    theta_a = math.sqrt(3.0 / params.N_T)
    theta_d = math.sqrt(3.0 / params.N_T)
    g_M = float(params.N_T)
    g_m = _side_lobe_gain(params.N_T)
    p_M = (theta_a / (2.0 * math.pi)) * (theta_d / math.pi)

    eta_T = g_M * p_t * c_t
    eta_L = params.a_n * p_a * c_l
    eta_N = params.a_n * p_a * c_n

    h, r_b = params.h, params.R_B
    l_Lh = (eta_L / eta_N) ** (1.0 / params.alpha_L) * h ** (params.alpha_N / params.alpha_L)
    l_LT = (eta_L / eta_T) ** (1.0 / params.alpha_L) * r_b ** (params.alpha_T / params.alpha_L)
    l_TL = (eta_T / eta_L) ** (1.0 / params.alpha_T) * h ** (params.alpha_L / params.alpha_T)
    l_TN = (eta_T / eta_N) ** (1.0 / params.alpha_T) * h ** (params.alpha_N / params.alpha_T)

    return DerivedConstants(
        P_T=p_t, P_A=p_a,
        sigma2_T=dbm_to_watt(params.sigma2_T_dBm),
        sigma2_A=dbm_to_watt(params.sigma2_A_dBm),
        C_T=c_t, C_L=c_l, C_N=c_n,
        eta_T=eta_T, eta_L=eta_L, eta_N=eta_N,
        l_Lh=l_Lh, l_LT=l_LT, l_TL=l_TL, l_TN=l_TN,
        b_T=_alzer_coefficient(params.m_T),
        b_L=_alzer_coefficient(params.m_L),
        b_N=_alzer_coefficient(params.m_N),
        theta_a=theta_a, theta_d=theta_d,
        G_M=g_M, G_m=g_m, p_M=p_M, p_m=1.0 - p_M,
        Q_T=1.0 - math.exp(-math.pi * params.lambda_T * r_b * r_b),
    )
