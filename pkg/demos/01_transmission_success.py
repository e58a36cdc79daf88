"""How likely is a transmission from each tier to succeed?

Walks the analytic success probabilities for the device-to-device tier
(nearest-node-is-server case, farther-server case, and their mixture),
spot-checks each against the Monte-Carlo estimator, and shows the macro
tier's threshold curve with its density independence.

Run:  python demos/01_transmission_success.py
"""

import numpy as np

from svcache import (
    SimConfig,
    TierGeometry,
    mc_stp_cache_tier,
    mc_stp_mbs,
    stp_cache_tier,
    stp_mbs,
    stp_nearest_cached,
    stp_nearest_uncached,
)

THETA = 10.0 ** (5.0 / 10.0)  # 5 dB, linear

d2d = TierGeometry(density=0.01, serving_radius=20.0, pathloss=4.0)
sbs = TierGeometry(density=0.001, serving_radius=60.0, pathloss=4.0)

# The caching probability p thins the field of potential servers.  With a
# larger p the nearest potential server is closer, so the SIR improves:
# every curve below rises with p.  The nearest-cached case always beats
# the farther-server case because the latter suffers interference from
# nodes closer than the server.
print("d2d tier, 5 dB threshold")
print(f"{'p':>5} {'nearest-cached':>15} {'farther-server':>15} {'mixture':>10}")
for p in (0.1, 0.3, 0.5, 0.7, 0.9, 1.0):
    print(f"{p:5.1f} {stp_nearest_cached(p, d2d, THETA):15.4f} "
          f"{stp_nearest_uncached(p, d2d, THETA):15.4f} "
          f"{stp_cache_tier(p, d2d, THETA):10.4f}")

# Monte-Carlo cross-check (10k trials keeps this demo quick; the test
# suite runs 50k).  The estimator mirrors the analytic sampling model:
# serving distance from the thinned nearest-point law, interferers as a
# full-density Poisson field, Rayleigh fading.
sim = SimConfig(trials=10_000, master_seed=7)
print("\nMonte-Carlo spot checks (10k trials, mixture case)")
print(f"{'tier':>5} {'p':>5} {'analytic':>10} {'mc':>10} {'stderr':>9}")
for name, geom in (("d2d", d2d), ("sbs", sbs)):
    for p in (0.3, 0.7):
        est = mc_stp_cache_tier(p, geom, THETA, sim)
        print(f"{name:>5} {p:5.1f} {stp_cache_tier(p, geom, THETA):10.4f} "
              f"{est.mean:10.4f} {est.stderr:9.4f}")

# The macro tier has no serving radius: the nearest macro cell always
# exists, and scaling the density moves server and interferers alike, so
# the success probability depends only on the threshold and path loss.
print("\nmacro tier: threshold curve (density-free)")
print(f"{'theta_dB':>9} {'analytic':>10} {'mc @1e-5':>10} {'mc @5e-5':>10}")
for theta_db in (1.0, 3.0, 5.0, 7.0, 9.0):
    lin = 10.0 ** (theta_db / 10.0)
    a = mc_stp_mbs(1e-5, 4.0, lin, SimConfig(trials=10_000, master_seed=11))
    b = mc_stp_mbs(5e-5, 4.0, lin, SimConfig(trials=10_000, master_seed=12))
    print(f"{theta_db:9.1f} {stp_mbs(4.0, lin):10.4f} {a.mean:10.4f} {b.mean:10.4f}")
