import math

import numpy as np
import pytest

from svcache import (
    CacheBudgets,
    CachingPolicy,
    all_miss_delay,
    hit_rate,
    hit_term,
    overall_delay,
    partial_delay_d2d,
    partial_delay_mbs,
    partial_delay_sbs,
    preference_matrix,
    stp_mbs,
)
from svcache.delay import branch_delays
from svcache.geometry import RadioConfig

THETA = 10.0**0.5
LOG_TERM = math.log2(1.0 + THETA)


def test_branch_kernel_d2d_arithmetic():
    # hand numbers: hit 0.18087 on a 50 Mbit item over 20 MHz
    radio = RadioConfig(THETA, 20e6, 20e6, 10e6, 100e6)
    d2d, _, _ = branch_delays(0.18087, 0.0, 0.3469, 50e6, radio)
    assert d2d == pytest.approx(0.18087 * 50e6 / (20e6 * LOG_TERM), rel=1e-12)
    assert d2d == pytest.approx(0.2198, abs=2e-4)


def test_branch_kernel_sbs_arithmetic():
    radio = RadioConfig(THETA, 20e6, 20e6, 10e6, 100e6)
    _, sbs, _ = branch_delays(0.18087, 0.5, 0.3469, 50e6, radio)
    assert sbs == pytest.approx((1 - 0.18087) * 0.5 * 50e6 / (20e6 * LOG_TERM),
                                rel=1e-12)
    assert sbs == pytest.approx(0.4977, abs=2e-4)


def test_branch_kernel_mbs_arithmetic():
    radio = RadioConfig(THETA, 20e6, 20e6, 10e6, 100e6)
    _, _, mbs = branch_delays(0.0, 0.0, 0.3469, 50e6, radio)
    expected = 50e6 / 100e6 + 0.3469 * 50e6 / (10e6 * LOG_TERM)
    assert mbs == pytest.approx(expected, rel=1e-12)
    assert mbs == pytest.approx(1.3432, abs=2e-4)


def test_partial_delays_zero_cases(lib, geoms, radio):
    assert partial_delay_d2d(1, 2, 0.0, lib, geoms.d2d, radio) == 0.0
    assert partial_delay_sbs(1, 2, 0.5, 0.0, lib, geoms.d2d, geoms.sbs, radio) == 0.0


def test_partial_delay_scales_with_item_size(lib, geoms, radio):
    one = partial_delay_d2d(4, 1, 0.5, lib, geoms.d2d, radio)
    two = partial_delay_d2d(4, 2, 0.5, lib, geoms.d2d, radio)
    assert two == pytest.approx(2.0 * one, rel=1e-12)  # uniform layers: c doubles


def test_partial_delay_consistency_with_hit_terms(lib, geoms, radio):
    hd = hit_term(0.4, geoms.d2d, radio.sir_threshold)
    hs = hit_term(0.7, geoms.sbs, radio.sir_threshold)
    pm = stp_mbs(geoms.mbs.pathloss, radio.sir_threshold)
    c = 50e6
    assert partial_delay_sbs(2, 2, 0.4, 0.7, lib, geoms.d2d, geoms.sbs, radio) \
        == pytest.approx((1 - hd) * hs * c / (20e6 * LOG_TERM), rel=1e-12)
    assert partial_delay_mbs(2, 2, 0.4, 0.7, lib, geoms, radio) == pytest.approx(
        (1 - hd) * (1 - hs) * c * (1 / radio.backhaul_rate + pm / (10e6 * LOG_TERM)),
        rel=1e-12)


def test_mbs_delay_decreasing_in_backhaul_rate(lib, geoms):
    values = []
    for rate in (1e6, 5e6, 20e6, 100e6):
        radio = RadioConfig(THETA, 20e6, 20e6, 10e6, rate)
        values.append(partial_delay_mbs(1, 2, 0.2, 0.2, lib, geoms, radio))
    assert np.all(np.diff(values) < 0)


def test_overall_delay_breakdown(lib, geoms, radio):
    rng = np.random.default_rng(3)
    policy = CachingPolicy(rng.random(lib.shape), rng.random(lib.shape))
    bd = overall_delay(policy, lib, geoms, radio)
    weights = preference_matrix(lib)
    assert bd.total >= 0
    assert bd.total == pytest.approx(float((weights * bd.per_cell).sum()),
                                     rel=1e-12)
    assert np.all(bd.d2d >= 0) and np.all(bd.sbs >= 0) and np.all(bd.mbs >= 0)
    # spot-check one cell against the scalar operations
    f, l = 5, 2
    assert bd.d2d[f - 1, l - 1] == pytest.approx(
        partial_delay_d2d(f, l, policy.p_d[f - 1, l - 1], lib, geoms.d2d, radio),
        rel=1e-12)


def test_branch_weights_partition_unity(lib, geoms, radio):
    rng = np.random.default_rng(11)
    hd = hit_term(rng.random(lib.shape), geoms.d2d, radio.sir_threshold)
    hs = hit_term(rng.random(lib.shape), geoms.sbs, radio.sir_threshold)
    total = hd + (1 - hd) * hs + (1 - hd) * (1 - hs)
    assert np.allclose(total, 1.0, rtol=0, atol=1e-12)


def test_all_miss_closed_form(lib, geoms, radio):
    zero = CachingPolicy.zeros(*lib.shape)
    assert overall_delay(zero, lib, geoms, radio).total == pytest.approx(
        all_miss_delay(lib, geoms, radio), abs=1e-12)


def test_delay_non_increasing_in_single_entries(lib, geoms, radio):
    base_pd = np.full(lib.shape, 0.3)
    base_ps = np.full(lib.shape, 0.3)
    base = overall_delay(CachingPolicy(base_pd, base_ps), lib, geoms, radio).total
    for f, l in ((0, 0), (0, 1), (9, 0), (19, 1)):
        for tier in ("d", "s"):
            pd, ps = base_pd.copy(), base_ps.copy()
            (pd if tier == "d" else ps)[f, l] = 0.8
            bumped = overall_delay(CachingPolicy(pd, ps), lib, geoms, radio).total
            assert bumped <= base + 1e-15


def test_hit_rate_values_and_monotonicity(lib, geoms, radio):
    assert hit_rate(1, 1, 0.0, 0.0, lib, geoms, radio) == 0.0
    hd = hit_term(0.5, geoms.d2d, radio.sir_threshold)
    hs = hit_term(0.5, geoms.sbs, radio.sir_threshold)
    assert hit_rate(1, 2, 0.5, 0.5, lib, geoms, radio) == pytest.approx(
        1 - (1 - hd) * (1 - hs), rel=1e-12)
    grid = np.linspace(0.0, 1.0, 11)
    surface = np.array([[hit_rate(1, 2, pd, ps, lib, geoms, radio)
                         for ps in grid] for pd in grid])
    assert np.all(np.diff(surface, axis=0) >= -1e-15)
    assert np.all(np.diff(surface, axis=1) >= -1e-15)
    assert surface.min() >= 0.0 and surface.max() <= 1.0


def test_hand_computed_hit_rate():
    # 1 - (1 - 0.18087) * (1 - 0.5) with injected hit terms
    assert 1 - (1 - 0.18087) * 0.5 == pytest.approx(0.59044, abs=1e-5)


def test_overall_delay_shape_mismatch(lib, geoms, radio):
    bad = CachingPolicy(np.zeros((3, 2)), np.zeros((3, 2)))
    with pytest.raises(ValueError):
        overall_delay(bad, lib, geoms, radio)


def test_cache_budgets_validation():
    with pytest.raises(ValueError):
        CacheBudgets(m_d=0.0, m_s=1.0)
    with pytest.raises(ValueError):
        CacheBudgets(m_d=1.0, m_s=-5.0)
