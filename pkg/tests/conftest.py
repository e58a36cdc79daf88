import math

import pytest

from svcache import (
    CacheBudgets,
    ContentLibrary,
    NetworkGeometry,
    RadioConfig,
    SimConfig,
    TierGeometry,
)

# Reference setting used across the suite: 20 files x 2 layers of 25 Mbit,
# skewness 1, plateau 5, quartic path loss, 5 dB threshold.


@pytest.fixture(scope="session")
def lib():
    return ContentLibrary.uniform(20, 2, 25e6, skewness=1.0, plateau=5.0)


@pytest.fixture(scope="session")
def geom_d():
    return TierGeometry(density=0.01, serving_radius=20.0, pathloss=4.0)


@pytest.fixture(scope="session")
def geom_s():
    return TierGeometry(density=0.001, serving_radius=60.0, pathloss=4.0)


@pytest.fixture(scope="session")
def geom_m():
    return TierGeometry(density=1e-5, serving_radius=math.inf, pathloss=4.0)


@pytest.fixture(scope="session")
def geoms(geom_d, geom_s, geom_m):
    return NetworkGeometry(d2d=geom_d, sbs=geom_s, mbs=geom_m)


@pytest.fixture(scope="session")
def radio():
    return RadioConfig.from_db(sir_threshold_db=5.0, bandwidth_d2d=20e6,
                               bandwidth_sbs=20e6, bandwidth_mbs=10e6,
                               backhaul_rate=5e6)


@pytest.fixture(scope="session")
def budgets():
    return CacheBudgets(m_d=200e6, m_s=500e6)


@pytest.fixture(scope="session")
def theta():
    return 10.0**0.5  # 5 dB


@pytest.fixture
def fast_sim():
    return SimConfig(trials=8_000, master_seed=1234)
