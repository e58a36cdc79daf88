"""Watching the gradient-projection solver settle.

Runs the solver for three SIR thresholds and prints the delay
trajectory: the step size shrinks as 1/t, every iterate keeps both cache
budgets exactly full, and the delay change drops below the stopping
tolerance after a modest number of iterations.  Stricter thresholds end
at higher delay.

Run:  python demos/04_optimizer_convergence.py
"""

from svcache import optimize
from svcache.config import default_config

cfg = default_config()

for theta_db in (3.0, 5.0, 7.0):
    point = cfg.with_values(**{"radio.sir_threshold_db": theta_db})
    result = optimize(point.library, point.geometry, point.radio,
                      point.budgets, point.optimizer)
    t = result.delay_trajectory
    shown = {0, 1, 2, 5, 10, 20, 50, result.iterations_run}
    print(f"\ntheta = {theta_db:.0f} dB: "
          f"{result.iterations_run} iterations, converged={result.converged}, "
          f"best delay {result.best_delay:.6f} s")
    print(f"{'iter':>5} {'delay_s':>12} {'step':>8} {'residual_d':>11}")
    for i in sorted(shown):
        if i > result.iterations_run:
            continue
        step = f"{result.step_sizes[i - 1]:8.4f}" if i > 0 else "      --"
        res = f"{result.budget_residual_d[i - 1]:11.2e}" if i > 0 else "         --"
        print(f"{i:5d} {t[i]:12.6f} {step} {res}")

# Equivalent CSV output (per-iteration rows for all three thresholds):
#   svcache convergence --theta-db 3 5 7 --out trajectories.csv
