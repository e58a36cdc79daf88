"""Service-delay model for a caching policy.

A request for quality level l of file f is served by the first tier in
the cascade d2d -> sbs -> mbs that holds the item and clears the SIR
threshold.  Each branch contributes its transmission time weighted by
the probability of reaching and succeeding on that branch; the macro
branch additionally pays the backhaul retrieval time.  The three branch
weights (hit_d, (1-hit_d)*hit_s, (1-hit_d)*(1-hit_s)) partition unity.

Delays are expected-time surrogates: success probability times
transmission time, not a conditional waiting time.  Units are bits, Hz,
bit/s and seconds throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .content import ContentLibrary, preference_matrix, super_layer_size
from .geometry import NetworkGeometry, RadioConfig, hit_term, stp_mbs

__all__ = [
    "CacheBudgets",
    "DelayBreakdown",
    "all_miss_delay",
    "branch_delays",
    "cell_delay_matrix",
    "hit_rate",
    "overall_delay",
    "partial_delay_d2d",
    "partial_delay_mbs",
    "partial_delay_sbs",
]


@dataclass(frozen=True)
class CacheBudgets:
    """Per-node cache sizes in bits: every d2d helper stores at most
    ``m_d`` bits and every small cell at most ``m_s`` bits."""

    m_d: float
    m_s: float

    def __post_init__(self):
        if not (self.m_d > 0 and self.m_s > 0):
            raise ValueError("cache budgets must be strictly positive")


@dataclass(frozen=True)
class DelayBreakdown:
    """Per-(file, layer) partial delays in seconds and their
    popularity-weighted total."""

    d2d: np.ndarray
    sbs: np.ndarray
    mbs: np.ndarray
    total: float

    @property
    def per_cell(self) -> np.ndarray:
        return self.d2d + self.sbs + self.mbs


def _log_rate(bandwidth, theta):
    return bandwidth * np.log2(1.0 + theta)


def branch_delays(hit_d, hit_s, mbs_success, sizes, radio: RadioConfig):
    """The three branch delays for given hit terms, elementwise.

    Split out so the algebra can be checked against hand-computed hit
    values; the public functions feed it hit terms derived from the
    caching probabilities.
    """
    theta = radio.sir_threshold
    d2d = hit_d * sizes / _log_rate(radio.bandwidth_d2d, theta)
    sbs = (1.0 - hit_d) * hit_s * sizes / _log_rate(radio.bandwidth_sbs, theta)
    mbs = (1.0 - hit_d) * (1.0 - hit_s) * sizes * (
        1.0 / radio.backhaul_rate
        + mbs_success / _log_rate(radio.bandwidth_mbs, theta)
    )
    return d2d, sbs, mbs


def partial_delay_d2d(f, l, p_d, lib: ContentLibrary, geom_d, radio: RadioConfig):
    """Expected d2d branch delay for item (f, l) cached with probability p_d."""
    h = hit_term(p_d, geom_d, radio.sir_threshold)
    return float(h * super_layer_size(lib, f, l)
                 / _log_rate(radio.bandwidth_d2d, radio.sir_threshold))


def partial_delay_sbs(f, l, p_d, p_s, lib: ContentLibrary, geom_d, geom_s,
                      radio: RadioConfig):
    """Expected small-cell branch delay for item (f, l): reached only when
    the d2d branch misses."""
    hd = hit_term(p_d, geom_d, radio.sir_threshold)
    hs = hit_term(p_s, geom_s, radio.sir_threshold)
    return float((1.0 - hd) * hs * super_layer_size(lib, f, l)
                 / _log_rate(radio.bandwidth_sbs, radio.sir_threshold))


def partial_delay_mbs(f, l, p_d, p_s, lib: ContentLibrary,
                      geoms: NetworkGeometry, radio: RadioConfig):
    """Expected macro branch delay for item (f, l): backhaul retrieval plus
    downlink transmission, reached when both cached tiers miss."""
    hd = hit_term(p_d, geoms.d2d, radio.sir_threshold)
    hs = hit_term(p_s, geoms.sbs, radio.sir_threshold)
    pm = stp_mbs(geoms.mbs.pathloss, radio.sir_threshold)
    c = super_layer_size(lib, f, l)
    return float((1.0 - hd) * (1.0 - hs) * c * (
        1.0 / radio.backhaul_rate
        + pm / _log_rate(radio.bandwidth_mbs, radio.sir_threshold)))


def _hit_matrices(p_d, p_s, geoms, radio):
    theta = radio.sir_threshold
    return (hit_term(p_d, geoms.d2d, theta), hit_term(p_s, geoms.sbs, theta))


def overall_delay(policy, lib: ContentLibrary, geoms: NetworkGeometry,
                  radio: RadioConfig) -> DelayBreakdown:
    """Popularity-weighted overall service delay of a caching policy.

    Parameters
    ----------
    policy : CachingPolicy
        Caching probability matrices, each shaped (F, L).
    lib, geoms, radio
        Catalog, tier geometry and radio parameters.

    Returns
    -------
    DelayBreakdown
        The three per-cell partial-delay matrices and the total
        sum_{f,l} p_{f,l} * (d2d + sbs + mbs).
    """
    if policy.p_d.shape != lib.shape or policy.p_s.shape != lib.shape:
        raise ValueError(
            f"policy shape {policy.p_d.shape} does not match catalog {lib.shape}")
    hd, hs = _hit_matrices(policy.p_d, policy.p_s, geoms, radio)
    pm = stp_mbs(geoms.mbs.pathloss, radio.sir_threshold)
    d2d, sbs, mbs = branch_delays(hd, hs, pm, lib.super_layer_sizes, radio)
    weights = preference_matrix(lib)
    total = float((weights * (d2d + sbs + mbs)).sum())
    return DelayBreakdown(d2d=d2d, sbs=sbs, mbs=mbs, total=total)


def cell_delay_matrix(p_d, p_s, lib: ContentLibrary, geoms: NetworkGeometry,
                      radio: RadioConfig) -> np.ndarray:
    """Popularity-weighted per-cell delay contributions, shape (F, L).

    The overall delay is the plain sum of this matrix, and each cell
    depends only on its own pair of caching probabilities; the optimizer
    exploits that separability for linear-cost gradients.
    """
    hd, hs = _hit_matrices(np.asarray(p_d, float), np.asarray(p_s, float),
                           geoms, radio)
    pm = stp_mbs(geoms.mbs.pathloss, radio.sir_threshold)
    d2d, sbs, mbs = branch_delays(hd, hs, pm, lib.super_layer_sizes, radio)
    return preference_matrix(lib) * (d2d + sbs + mbs)


def hit_rate(f, l, p_d, p_s, lib: ContentLibrary, geoms: NetworkGeometry,
             radio: RadioConfig) -> float:
    """Probability that item (f, l) is served from a local cache (either
    cached tier): 1 - (1 - hit_d) * (1 - hit_s).  Non-decreasing in both
    caching probabilities."""
    hd = hit_term(p_d, geoms.d2d, radio.sir_threshold)
    hs = hit_term(p_s, geoms.sbs, radio.sir_threshold)
    return float(1.0 - (1.0 - hd) * (1.0 - hs))


def all_miss_delay(lib: ContentLibrary, geoms: NetworkGeometry,
                   radio: RadioConfig) -> float:
    """Closed form of the overall delay when nothing is cached anywhere:
    every request pays backhaul retrieval plus macro downlink."""
    pm = stp_mbs(geoms.mbs.pathloss, radio.sir_threshold)
    per_bit = (1.0 / radio.backhaul_rate
               + pm / _log_rate(radio.bandwidth_mbs, radio.sir_threshold))
    weights = preference_matrix(lib)
    return float((weights * lib.super_layer_sizes).sum() * per_bit)
