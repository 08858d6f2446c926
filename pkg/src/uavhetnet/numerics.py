"""Quadrature and special-function helpers shared by the analytical engine.

Two integration schemes: an adaptive wrapper around ``scipy.integrate.quad``
(the authoritative path) and a fixed-node Gauss-Chebyshev rule used by the
closed-ish coverage form.  Semi-infinite ranges are truncated at a finite
horizon (the simulation-region radius by default) and the discarded tail is
re-estimated through the substitution u = 1/(1 + t - horizon); the tail is
added back, so callers see a plain finite number.

``beta_segment`` evaluates the incomplete-Beta difference that appears in
the closed-form interference transform.  The two endpoints there are
negative and the exponent pair can make each endpoint value individually
divergent, so the difference is computed as one integral over the segment,
which stays finite whenever the segment does not straddle zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate as _sci

DEFAULT_INF_HORIZON = 5e4  # [m] matches the simulation disc radius


class IntegrationError(RuntimeError):
    """Quadrature failed to converge; carries the best estimate so far."""

    def __init__(self, message: str, estimate: float, residual: float):
        self.estimate = estimate
        self.residual = residual
        super().__init__(f"{message} (best estimate {estimate!r}, residual {residual!r})")


@dataclass(frozen=True)
class QuadratureSpec:
    """Integration controls.

    ``scheme`` selects adaptive quadrature or the fixed Gauss-Chebyshev
    rule with ``n_nodes`` nodes.  ``inf_horizon`` is where semi-infinite
    ranges are truncated before the tail re-estimate.
    """

    scheme: str = "adaptive"          # "adaptive" | "gauss_chebyshev"
    n_nodes: int = 50
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdivisions: int = 200
    inf_horizon: float = DEFAULT_INF_HORIZON

    def __post_init__(self):
        if self.scheme not in ("adaptive", "gauss_chebyshev"):
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")
        if self.n_nodes < 1:
            raise ValueError("n_nodes must be >= 1")
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")


DEFAULT_SPEC = QuadratureSpec()


def _quad(f, a: float, b: float, spec: QuadratureSpec) -> float:
    out = _sci.quad(f, a, b, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
                    limit=spec.max_subdivisions, full_output=1)
    if len(out) >= 4:  # quad appends an explanation when it gives up
        value, abserr = out[0], out[1]
        tol = max(spec.abs_tol, spec.rel_tol * abs(value))
        if abserr > 100.0 * tol:
            raise IntegrationError(f"adaptive quadrature on [{a}, {b}]: {out[3]}",
                                   estimate=value, residual=abserr)
    return out[0]


def integrate(f, lower: float, upper: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Integrate ``f`` over [lower, upper]; ``upper`` may be ``math.inf``."""
    if spec.scheme == "gauss_chebyshev":
        if not math.isfinite(upper):
            raise ValueError("gauss_chebyshev scheme needs a finite range")
        return gc_integrate(f, lower, upper, spec.n_nodes)
    if math.isinf(upper):
        horizon = max(spec.inf_horizon, lower + 1.0)
        # geometric subdivision: mass concentrated anywhere near the lower
        # bound is not lost on the long truncated range
        span = horizon - lower
        edges = [lower + span * g for g in
                 (0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0)]
        head = sum(_quad(f, a, b, spec) for a, b in zip(edges[:-1], edges[1:]))
        # tail via t = horizon + u/(1-u), dt = du/(1-u)^2
        def tail_integrand(u):
            return f(horizon + u / (1.0 - u)) / (1.0 - u) ** 2
        tail = _quad(tail_integrand, 0.0, 1.0 - 1e-12, spec)
        return head + tail
    return _quad(f, lower, upper, spec)


# -- Gauss-Chebyshev --------------------------------------------------------

def gauss_chebyshev_nodes(n: int):
    """First-kind Gauss-Chebyshev rule on [-1, 1].

    Returns ``(nodes, weight, circle_factors)`` where ``nodes[i]`` is
    cos((2i-1)pi/(2n)) for i = 1..n, ``weight`` is the common pi/n and
    ``circle_factors[i]`` is sqrt(1 - nodes[i]^2).  An integral of g over
    [-1, 1] is approximated by weight * sum(circle_factors * g(nodes)).
    """
    if n < 1:
        raise ValueError("node count must be >= 1")
    i = np.arange(1, n + 1)
    nodes = np.cos((2 * i - 1) * np.pi / (2 * n))
    return nodes, np.pi / n, np.sqrt(1.0 - nodes ** 2)


def gc_map(a: float, b: float, n: int):
    """Gauss-Chebyshev nodes affinely mapped to [a, b], with their common
    weight, circle factors, and the half-width (b-a)/2."""
    nodes, weight, circ = gauss_chebyshev_nodes(n)
    half = 0.5 * (b - a)
    return half * nodes + 0.5 * (a + b), weight, circ, half


def gc_integrate(f, a: float, b: float, n: int) -> float:
    """Fixed-node Gauss-Chebyshev estimate of the integral of f over [a, b]."""
    x, weight, circ, half = gc_map(a, b, n)
    return half * weight * float(np.sum(circ * f(x)))


# -- Gauss-Legendre panels (vectorized fixed quadrature) --------------------

@lru_cache(maxsize=32)
def _leggauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def gl_panel_rule(edges, nodes_per_panel: int = 32):
    """Composite Gauss-Legendre rule over consecutive panels.

    ``edges`` is an increasing sequence of breakpoints; returns flat arrays
    ``(nodes, weights)`` so that ``weights @ f(nodes)`` approximates the
    integral over [edges[0], edges[-1]].  Meant for smooth integrands that
    callers evaluate vectorized.
    """
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) < 0):
        raise ValueError("edges must be a non-decreasing 1-D sequence")
    xg, wg = _leggauss(nodes_per_panel)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)[:, None]
    mid = 0.5 * (hi + lo)[:, None]
    nodes = (mid + half * xg[None, :]).ravel()
    weights = (half * wg[None, :]).ravel()
    return nodes, weights


def geometric_edges(a: float, b: float, n_panels: int, growth: float = 2.0):
    """Panel breakpoints from a to b with geometrically growing widths."""
    if b <= a:
        return np.array([a, max(a, b)])
    widths = growth ** np.arange(n_panels)
    cuts = np.concatenate([[0.0], np.cumsum(widths)])
    return a + (b - a) * cuts / cuts[-1]


# -- incomplete Beta --------------------------------------------------------

def _real_power(t: np.ndarray, e: float) -> np.ndarray:
    """t**e for possibly negative t, defined when e is an integer there."""
    t = np.asarray(t, dtype=float)
    if np.all(t >= 0.0):
        return t ** e
    if abs(e - round(e)) > 1e-12:
        raise ValueError(f"negative base with non-integer exponent {e!r}")
    sign = np.where((t < 0) & (round(e) % 2 != 0), -1.0, 1.0)
    return sign * np.abs(t) ** e


def beta_segment(x1: float, x2: float, p: float, q: float,
                 spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Integral of t^(p-1) (1-t)^(q-1) over the real segment [x1, x2].

    Equals B(x2; p, q) - B(x1; p, q) where both pieces converge, but stays
    finite for p <= 0 as long as the segment does not straddle t = 0.
    """
    if x1 == x2:
        return 0.0
    if min(x1, x2) < 0.0 < max(x1, x2) and p <= 0.0:
        raise IntegrationError("segment straddles the non-integrable singularity at t = 0",
                               estimate=math.nan, residual=math.inf)
    if min(x1, x2) >= 1.0 or max(x1, x2) > 1.0 > min(x1, x2):
        if q - 1.0 < 0.0 and abs(q - round(q)) > 1e-12:
            raise ValueError("segment crosses t = 1 with non-integer exponent")

    def f(t):
        return float(_real_power(t, p - 1.0) * _real_power(1.0 - t, q - 1.0))

    if x1 <= 0.0 <= x2 or x2 <= 0.0 <= x1:
        # p > 0 here: split so quad sees the integrable endpoint singularity
        return _quad(f, x1, 0.0, spec) + _quad(f, 0.0, x2, spec)
    return _quad(f, x1, x2, spec)


def incomplete_beta(x: float, p: float, q: float,
                    spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """B(x; p, q) = integral of t^(p-1) (1-t)^(q-1) from 0 to x.

    ``x`` may be negative (the path runs along the real segment [0, x]).
    Rejects p <= 0, where the origin singularity is non-integrable.
    """
    if p <= 0.0:
        raise IntegrationError(f"incomplete beta diverges at t = 0 for p = {p!r}",
                               estimate=math.nan, residual=math.inf)
    return beta_segment(0.0, x, p, q, spec)
