"""What does caching buy in service delay?

Evaluates the overall delay of uniform policies over a (p_d, p_s) grid.
More caching anywhere never hurts: every row and column of the table is
non-increasing, from the all-miss corner (everything fetched over the
backhaul) down to the fully cached corner.

Run:  python demos/02_delay_landscape.py
"""

import numpy as np

from svcache import CachingPolicy, all_miss_delay, overall_delay
from svcache.config import default_config

cfg = default_config()
lib, geoms, radio = cfg.library, cfg.geometry, cfg.radio

print(f"all-miss delay (nothing cached): {all_miss_delay(lib, geoms, radio):.3f} s")
print("\noverall delay [s] for uniform policies, p_d down, p_s across")

grid = np.linspace(0.0, 1.0, 6)
header = "p_d\\p_s " + " ".join(f"{ps:7.1f}" for ps in grid)
print(header)
for p_d in grid:
    cells = []
    for p_s in grid:
        policy = CachingPolicy(np.full(lib.shape, p_d), np.full(lib.shape, p_s))
        cells.append(overall_delay(policy, lib, geoms, radio).total)
    print(f"{p_d:7.1f} " + " ".join(f"{v:7.3f}" for v in cells))

# The same numbers are available as CSV through the command line:
#   svcache delay-surface --grid-points 21 --out surface.csv
print("\n(budget feasibility is ignored here on purpose: the landscape shows")
print(" why full budget utilization is optimal before budgets are enforced)")
