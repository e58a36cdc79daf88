"""Analytic association and success probabilities for the three tiers.

Transmitters of a tier form a planar Poisson field; a requested item is
cached at each node independently with some probability p, so the
potential servers are the p-thinned field.  The user connects to the
nearest potential server inside the tier's serving radius (macro cells
are unbounded) and the transmission succeeds when the received
signal-to-interference ratio under Rayleigh fading clears a threshold.

Everything reduces to the tail integral

    g_integral(a, b) = integral_b^inf dx / (1 + x^(a/2)),   a > 2,

which has the closed form pi/2 - arctan(b) at a = 4 and is evaluated by
adaptive quadrature plus an analytic tail series otherwise.

All probability functions accept scalars or numpy arrays for the caching
probability ``p`` and broadcast elementwise.  Thresholds are linear SIR
values; convert from dB once at the boundary (``RadioConfig.from_db``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

__all__ = [
    "NetworkGeometry",
    "RadioConfig",
    "TierGeometry",
    "association_probability",
    "g_integral",
    "hit_term",
    "q_factor",
    "stp_cache_tier",
    "stp_mbs",
    "stp_nearest_cached",
    "stp_nearest_uncached",
]


@dataclass(frozen=True)
class TierGeometry:
    """Poisson density, serving radius and path-loss exponent of one tier.

    ``serving_radius`` is in metres; use ``math.inf`` for the unbounded
    macro tier.  The path-loss exponent must exceed 2 or the aggregate
    interference integral diverges.
    """

    density: float
    serving_radius: float
    pathloss: float

    def __post_init__(self):
        if not self.density > 0:
            raise ValueError("density must be positive")
        if not self.serving_radius > 0:
            raise ValueError("serving_radius must be positive (math.inf allowed)")
        if not self.pathloss > 2:
            raise ValueError("pathloss exponent must be > 2")

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.serving_radius)

    @property
    def mean_nodes_in_radius(self) -> float:
        """Expected node count inside the serving disk (inf if unbounded)."""
        if not self.bounded:
            return math.inf
        return self.density * math.pi * self.serving_radius**2


@dataclass(frozen=True)
class NetworkGeometry:
    """The three tiers together, with the cross-tier radius ordering checked:
    the small-cell radius must be at least the device-to-device radius, and
    the macro tier is unbounded."""

    d2d: TierGeometry
    sbs: TierGeometry
    mbs: TierGeometry

    def __post_init__(self):
        if not (self.d2d.bounded and self.sbs.bounded):
            raise ValueError("d2d and sbs tiers must have finite serving radii")
        if self.sbs.serving_radius < self.d2d.serving_radius:
            raise ValueError(
                "sbs serving radius must be >= d2d serving radius "
                f"({self.sbs.serving_radius} < {self.d2d.serving_radius})"
            )
        if self.mbs.bounded:
            raise ValueError("mbs tier must be unbounded (serving_radius=math.inf)")


@dataclass(frozen=True)
class RadioConfig:
    """Linear SIR threshold, per-tier bandwidths (Hz) and backhaul rate (bit/s)."""

    sir_threshold: float
    bandwidth_d2d: float
    bandwidth_sbs: float
    bandwidth_mbs: float
    backhaul_rate: float

    def __post_init__(self):
        for name in ("sir_threshold", "bandwidth_d2d", "bandwidth_sbs",
                     "bandwidth_mbs", "backhaul_rate"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")

    @classmethod
    def from_db(cls, sir_threshold_db, bandwidth_d2d, bandwidth_sbs,
                bandwidth_mbs, backhaul_rate):
        """Build from a threshold in dB; the conversion happens only here."""
        return cls(10.0 ** (sir_threshold_db / 10.0), bandwidth_d2d,
                   bandwidth_sbs, bandwidth_mbs, backhaul_rate)

    @property
    def sir_threshold_db(self) -> float:
        return 10.0 * math.log10(self.sir_threshold)


# Quadrature split: integrate [b, cut] adaptively, then sum the alternating
# series of the tail, whose remainder is below the first omitted term.
_TAIL_FACTOR = 100.0
_TAIL_TERM_TOL = 1e-14


def _g_quadrature(a: float, b: float) -> float:
    """Tail integral of 1/(1+x^(a/2)) from b, without the a=4 shortcut."""
    s = a / 2.0
    cut = max(b, 10.0) * _TAIL_FACTOR
    head, _ = integrate.quad(lambda x: 1.0 / (1.0 + x**s), b, cut,
                             epsabs=1e-13, epsrel=1e-13, limit=400)
    # 1/(1+x^s) = sum_k (-1)^(k+1) x^(-ks) for x > 1, integrated term by term
    tail = 0.0
    k = 1
    while True:
        term = cut ** (1.0 - k * s) / (k * s - 1.0)
        tail += term if k % 2 else -term
        if term < _TAIL_TERM_TOL:
            break
        k += 1
    return head + tail


@lru_cache(maxsize=512)
def g_integral(a: float, b: float) -> float:
    """Evaluate integral_b^inf dx/(1+x^(a/2)) for a > 2, b >= 0.

    Returns the closed form pi/2 - arctan(b) when a == 4; otherwise
    adaptive quadrature on [b, cut] plus the analytic alternating tail
    series, accurate to better than 1e-10 absolute.
    """
    a = float(a)
    b = float(b)
    if a <= 2:
        raise ValueError("g_integral requires a > 2 (the integral diverges)")
    if b < 0:
        raise ValueError("g_integral requires b >= 0")
    if a == 4.0:
        return math.pi / 2.0 - math.atan(b)
    return _g_quadrature(a, b)


def _as_prob(p):
    p = np.asarray(p, dtype=float)
    if np.any(p < 0) or np.any(p > 1):
        raise ValueError("caching probability must lie in [0, 1]")
    return p


def _maybe_scalar(arr, scalar_input):
    return float(arr) if scalar_input else arr


def association_probability(p, geom: TierGeometry):
    """Probability that at least one potential server of the tier lies
    within the serving radius: 1 - exp(-lambda * p * pi * r^2).

    Only defined for the bounded tiers; the macro tier always has a
    nearest node, so an unbounded radius raises.
    """
    if not geom.bounded:
        raise ValueError("association probability needs a finite serving radius")
    scalar = np.isscalar(p) or getattr(p, "ndim", 0) == 0
    p = _as_prob(p)
    out = -np.expm1(-geom.density * p * math.pi * geom.serving_radius**2 * np.ones_like(p))
    return _maybe_scalar(out, scalar)


def q_factor(p, geom: TierGeometry, theta: float, x: float):
    """Common kernel of the bounded-tier success probabilities:

        [1 - exp(-lambda*pi*r^2 * (p + theta^(2/a) * G))] / (p + theta^(2/a) * G)

    with G = g_integral(a, x).  Strictly positive even at p = 0 because
    G > 0 for every finite x.
    """
    if not geom.bounded:
        raise ValueError("q_factor needs a finite serving radius")
    scalar = np.isscalar(p) or getattr(p, "ndim", 0) == 0
    p = _as_prob(p)
    a = geom.pathloss
    den = p + theta ** (2.0 / a) * g_integral(a, x)
    area = geom.density * math.pi * geom.serving_radius**2
    out = -np.expm1(-area * den) / den
    return _maybe_scalar(out, scalar)


def stp_nearest_cached(p, geom: TierGeometry, theta: float):
    """Success probability when the nearest node of the tier caches the item
    (interference only from nodes beyond the server).  Zero at p = 0 by
    stipulation: with nothing cached there is no server to succeed.
    """
    return _stp_conditional(p, geom, theta, theta ** (-2.0 / geom.pathloss))


def stp_nearest_uncached(p, geom: TierGeometry, theta: float):
    """Success probability when the nearest node does not cache the item and
    a farther potential server transmits (interference from the whole
    field, including nodes closer than the server).  Zero at p = 0.
    """
    return _stp_conditional(p, geom, theta, 0.0)


def _stp_conditional(p, geom, theta, x):
    scalar = np.isscalar(p) or getattr(p, "ndim", 0) == 0
    p = _as_prob(p)
    q = q_factor(p, geom, theta, x)
    assoc = -np.expm1(-geom.density * p * math.pi * geom.serving_radius**2
                      * np.ones_like(p))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(p > 0, p * q / np.where(assoc > 0, assoc, 1.0), 0.0)
    return _maybe_scalar(out, scalar)


def stp_cache_tier(p, geom: TierGeometry, theta: float):
    """Tier success probability, mixing the nearest-cached case (weight p)
    with the nearest-uncached case (weight 1 - p).  Zero at p = 0."""
    scalar = np.isscalar(p) or getattr(p, "ndim", 0) == 0
    p = _as_prob(p)
    a = geom.pathloss
    qx = q_factor(p, geom, theta, theta ** (-2.0 / a))
    q0 = q_factor(p, geom, theta, 0.0)
    assoc = -np.expm1(-geom.density * p * math.pi * geom.serving_radius**2
                      * np.ones_like(p))
    mix = p * (qx - q0) + q0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(p > 0, p * mix / np.where(assoc > 0, assoc, 1.0), 0.0)
    return _maybe_scalar(out, scalar)


def stp_mbs(pathloss: float, theta: float) -> float:
    """Success probability from the nearest macro cell.

    Independent of the macro density: scaling the field moves the server
    and the interferers alike.  Equals
    [1 + theta^(2/a) * g_integral(a, theta^(-2/a))]^(-1).
    """
    if not pathloss > 2:
        raise ValueError("pathloss exponent must be > 2")
    t = theta ** (2.0 / pathloss)
    return 1.0 / (1.0 + t * g_integral(pathloss, 1.0 / t))


def hit_term(p, geom: TierGeometry, theta: float):
    """Association probability times tier success probability, computed in
    the product form p * (p * (q(x*) - q(0)) + q(0)) that has no 0/0 at
    p = 0 and is continuous on [0, 1].

    This is the quantity the delay model consumes: the probability that
    the tier both has a potential server in range and delivers the item
    successfully.
    """
    scalar = np.isscalar(p) or getattr(p, "ndim", 0) == 0
    p = _as_prob(p)
    a = geom.pathloss
    qx = q_factor(p, geom, theta, theta ** (-2.0 / a))
    q0 = q_factor(p, geom, theta, 0.0)
    out = p * (p * (qx - q0) + q0)
    return _maybe_scalar(out, scalar)
