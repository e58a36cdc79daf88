"""Gradient projection for the cache-budget delay minimization.

The solver alternates a diminishing-step gradient move (step 1/t at
iteration t) with a projection of each tier's matrix onto its budget
set.  The projection subtracts one uniform shift u from every entry,
clips to [0, 1], and picks u by bisection so the expected cache usage
equals the budget; full utilization is optimal because the delay is
non-increasing in every caching probability.  Note this uniform shift is
the operator used throughout here and in the baselines; it is not the
Euclidean projection onto the size-weighted budget polytope (that one
would shift each entry proportionally to its size).

A brute-force ``grid_oracle`` provides ground truth on small instances
by minimizing over all pairs of per-tier grid matrices projected to
budget equality.  It evaluates the cross product through an exact
bilinear split of the objective rather than literal pair enumeration,
which would be astronomically large already at grid step 0.02.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .content import ContentLibrary, preference_matrix
from .delay import CacheBudgets, cell_delay_matrix, overall_delay
from .geometry import NetworkGeometry, RadioConfig, hit_term, stp_mbs
from .policies import CachingPolicy, epcp, mpcp

__all__ = [
    "OptimizerConfig",
    "OptimizerResult",
    "grid_oracle",
    "objective_gradient",
    "optimize",
    "project_budget",
]


@dataclass(frozen=True)
class OptimizerConfig:
    """Iteration budget, stopping tolerance and numerical step sizes.

    ``initial_policy`` is either an explicit policy or the name of a
    baseline ("mpcp" or "epcp").  The default warm-starts from MPCP: the
    1/t step schedule refines a good feasible point well but moves too
    slowly to cross the whole box from a cold uniform start.
    """

    max_iterations: int = 100
    convergence_tol: float = 1e-6
    fd_step: float = 1e-6
    bisection_tol: float = 1e-10
    initial_policy: CachingPolicy | str = "mpcp"

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        for name in ("convergence_tol", "fd_step", "bisection_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class OptimizerResult:
    """Best iterate found plus the per-iteration trace.

    ``delay_trajectory[0]`` is the initial policy's delay; entry t is the
    delay after iteration t.  ``step_sizes`` and the two budget-residual
    lists align with iterations 1..iterations_run.
    """

    best_policy: CachingPolicy
    best_delay: float
    delay_trajectory: list[float]
    iterations_run: int
    converged: bool
    step_sizes: list[float] = field(default_factory=list)
    budget_residual_d: list[float] = field(default_factory=list)
    budget_residual_s: list[float] = field(default_factory=list)


def project_budget(p_hat, sizes, budget, tol=1e-10) -> np.ndarray:
    """Project a raw matrix onto {q in [0,1]^(FxL) : sum(sizes * q) = budget}.

    Returns min{[p_hat - u]+, 1} with the uniform shift u found by
    bisection; the shifted-clipped usage is continuous and non-increasing
    in u, so the bracket [min(p_hat) - 1 - budget/min(sizes), max(p_hat)]
    always contains a root.  When the budget is at least the whole
    catalog the equality is unattainable and the all-ones matrix is
    returned (budget non-binding).

    ``tol`` is the accepted relative budget residual; the bisection runs
    the shift down to machine precision regardless (it is cheap), so the
    realized residual sits far below the bound and re-projecting an
    already projected matrix reproduces it to round-off.
    """
    if not budget > 0:
        raise ValueError("budget must be strictly positive")
    if not tol > 0:
        raise ValueError("tol must be strictly positive")
    p_hat = np.asarray(p_hat, dtype=float)
    sizes = np.asarray(sizes, dtype=float)
    if np.any(sizes <= 0):
        raise ValueError("sizes must be strictly positive")
    capacity = sizes.sum()
    if budget >= capacity:
        return np.ones_like(p_hat)

    def usage(u):
        return float((sizes * np.clip(p_hat - u, 0.0, 1.0)).sum())

    lo = float(p_hat.min()) - 1.0 - budget / float(sizes.min())
    hi = float(p_hat.max())
    # invariant: usage(lo) >= budget >= usage(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if usage(mid) > budget:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-16 * max(1.0, abs(hi), abs(lo)):
            break
    # the bracket is one float apart; keep the endpoint closest to budget
    u = min((lo, hi), key=lambda v: abs(usage(v) - budget))
    return np.clip(p_hat - u, 0.0, 1.0)


def objective_gradient(policy: CachingPolicy, lib: ContentLibrary,
                       geoms: NetworkGeometry, radio: RadioConfig,
                       h: float = 1e-6):
    """Central finite differences of the overall delay in every policy
    entry, one matrix per tier.

    The overall delay is a plain sum of per-cell terms, each depending on
    its own entry pair only, so perturbing all entries of one tier at
    once gives exactly the per-entry difference quotients while costing
    two cell-matrix evaluations instead of 2*F*L delay evaluations; that
    is what keeps one gradient linear in F*L.  Entries within h of a box
    edge fall back to the one-sided difference over the clipped window.
    """
    if h <= 0:
        raise ValueError("finite-difference step must be positive")

    def tier_grad(p, other, d2d_side):
        up = np.minimum(p + h, 1.0)
        down = np.maximum(p - h, 0.0)
        if d2d_side:
            f_up = cell_delay_matrix(up, other, lib, geoms, radio)
            f_dn = cell_delay_matrix(down, other, lib, geoms, radio)
        else:
            f_up = cell_delay_matrix(other, up, lib, geoms, radio)
            f_dn = cell_delay_matrix(other, down, lib, geoms, radio)
        return (f_up - f_dn) / (up - down)

    grad_d = tier_grad(policy.p_d, policy.p_s, d2d_side=True)
    grad_s = tier_grad(policy.p_s, policy.p_d, d2d_side=False)
    return grad_d, grad_s


def _resolve_initial(initial, lib, budgets):
    if isinstance(initial, CachingPolicy):
        return initial
    if initial == "mpcp":
        return mpcp(lib, budgets)
    if initial == "epcp":
        return epcp(lib, budgets)
    raise ValueError(f"unknown initial policy {initial!r}; "
                     "use 'mpcp', 'epcp' or an explicit CachingPolicy")


def optimize(lib: ContentLibrary, geoms: NetworkGeometry, radio: RadioConfig,
             budgets: CacheBudgets, cfg: OptimizerConfig | None = None
             ) -> OptimizerResult:
    """Run the projected-gradient solver and return the best iterate.

    Every iterate is feasible: both gradients are evaluated at the
    current point, the stepped matrices are projected tier by tier onto
    budget equality, and iteration stops once the delay change drops
    below ``convergence_tol`` or the iteration budget runs out.  The 1/t
    step does not guarantee monotone descent, so the best iterate seen
    (including the start) is tracked and returned.
    """
    cfg = cfg or OptimizerConfig()
    sizes = lib.super_layer_sizes
    start = _resolve_initial(cfg.initial_policy, lib, budgets)

    def at_equality(matrix, budget):
        target = min(budget, float(sizes.sum()))
        return abs(float((matrix * sizes).sum()) - target) <= 1e-9 * budget

    policy = CachingPolicy(
        p_d=start.p_d if at_equality(start.p_d, budgets.m_d)
        else project_budget(start.p_d, sizes, budgets.m_d, cfg.bisection_tol),
        p_s=start.p_s if at_equality(start.p_s, budgets.m_s)
        else project_budget(start.p_s, sizes, budgets.m_s, cfg.bisection_tol),
    )
    current = overall_delay(policy, lib, geoms, radio).total
    result = OptimizerResult(
        best_policy=policy, best_delay=current, delay_trajectory=[current],
        iterations_run=0, converged=False,
    )
    for t in range(1, cfg.max_iterations + 1):
        eps = 1.0 / t
        grad_d, grad_s = objective_gradient(policy, lib, geoms, radio, cfg.fd_step)
        p_d = project_budget(policy.p_d - eps * grad_d, sizes, budgets.m_d,
                             cfg.bisection_tol)
        p_s = project_budget(policy.p_s - eps * grad_s, sizes, budgets.m_s,
                             cfg.bisection_tol)
        policy = CachingPolicy(p_d=p_d, p_s=p_s)
        new = overall_delay(policy, lib, geoms, radio).total
        usage_d, usage_s = policy.budget_usage(sizes)
        result.delay_trajectory.append(new)
        result.step_sizes.append(eps)
        result.budget_residual_d.append(abs(usage_d - min(budgets.m_d, sizes.sum())))
        result.budget_residual_s.append(abs(usage_s - min(budgets.m_s, sizes.sum())))
        result.iterations_run = t
        if new < result.best_delay:
            result.best_delay = new
            result.best_policy = policy
        delta = abs(new - current)
        current = new
        if delta < cfg.convergence_tol:
            result.converged = True
            break
    return result


# ---------------------------------------------------------------------------
# Brute-force grid oracle
# ---------------------------------------------------------------------------

_GRID_STEPS = (0.05, 0.02)
_PAIR_FLOP_GUARD = 4e10


def _grid_chunks(n_cells, n_values, chunk=1_000_000):
    """Yield the grid {0, ..., 1}^n_cells as (m, n_cells) blocks without
    materializing the full n_values^n_cells enumeration."""
    values = np.linspace(0.0, 1.0, n_values)
    total = n_values**n_cells
    shape = (n_values,) * n_cells
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        coords = np.unravel_index(idx, shape)
        yield np.column_stack([values[c] for c in coords])


def _project_rows(rows, sizes, budget, iters=80):
    """Row-wise uniform-shift projection to budget equality (vectorized
    bisection; same operator as :func:`project_budget`)."""
    capacity = sizes.sum()
    if budget >= capacity:
        return np.ones_like(rows)
    lo = rows.min(axis=1) - 1.0 - budget / sizes.min()
    hi = rows.max(axis=1)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        total = np.clip(rows - mid[:, None], 0.0, 1.0) @ sizes
        above = total > budget
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    u = 0.5 * (lo + hi)
    return np.clip(rows - u[:, None], 0.0, 1.0)


_CANDIDATE_GUARD = 3_000_000


def _tier_candidates(lib, geom, theta, sizes_flat, budget, n_values, useful):
    """Enumerate, project and dedupe one tier's grid.

    Returns (full_rows, hit) where full_rows holds one representative
    projected matrix per distinct useful-cell combination and hit the
    corresponding hit-term values on the useful cells.  Matrices that
    differ only on zero-popularity cells cannot change the delay, so one
    representative suffices.  Dedupe happens per chunk and again on the
    merged survivors, keeping memory bounded.
    """
    n_cells = sizes_flat.size
    reps = None
    for raw in _grid_chunks(n_cells, n_values):
        block = _project_rows(raw, sizes_flat, budget)
        key = np.round(block[:, useful], 9)
        _, keep = np.unique(key, axis=0, return_index=True)
        block = block[keep]
        reps = block if reps is None else np.vstack((reps, block))
        if reps.shape[0] > _CANDIDATE_GUARD:
            raise ValueError("grid_oracle search space too large for this instance")
        key = np.round(reps[:, useful], 9)
        _, keep = np.unique(key, axis=0, return_index=True)
        reps = reps[np.sort(keep)]
    hit = hit_term(reps[:, useful], geom, theta)
    return reps, hit


def grid_oracle(lib: ContentLibrary, geoms: NetworkGeometry,
                radio: RadioConfig, budgets: CacheBudgets,
                grid_step: float = 0.02) -> tuple[CachingPolicy, float]:
    """Exhaustive ground-truth minimum over projected grid policies.

    Enumerates every per-tier matrix on the grid {0, step, ..., 1},
    projects each to budget equality, and minimizes the overall delay
    over all cross-tier pairs.  The pair minimum is computed exactly via
    the split D = u(p_d) + V(p_d) . hit_s(p_s): per d2d candidate the
    inner minimum is a dot product against the Pareto frontier of the
    sbs hit vectors (all components of V share one sign, fixed by
    whether the small-cell transmission beats the backhaul-plus-macro
    path).  Only small instances are accepted.
    """
    F, L = lib.shape
    if F * L > 6:
        raise ValueError("grid_oracle refuses instances with F*L > 6")
    if not any(abs(grid_step - s) < 1e-12 for s in _GRID_STEPS):
        raise ValueError(f"grid_step must be one of {_GRID_STEPS}")
    n_values = int(round(1.0 / grid_step)) + 1

    theta = radio.sir_threshold
    weights = preference_matrix(lib).ravel()
    sizes = lib.super_layer_sizes.ravel()
    useful = np.flatnonzero(weights > 0)
    w = weights[useful]
    c = sizes[useful]
    log2t = np.log2(1.0 + theta)
    a_coef = c / (radio.bandwidth_d2d * log2t)
    b_coef = c / (radio.bandwidth_sbs * log2t)
    pm = stp_mbs(geoms.mbs.pathloss, theta)
    c_coef = c * (1.0 / radio.backhaul_rate + pm / (radio.bandwidth_mbs * log2t))

    rows_d, hit_d = _tier_candidates(lib, geoms.d2d, theta, sizes,
                                     budgets.m_d, n_values, useful)
    rows_s, hit_s = _tier_candidates(lib, geoms.sbs, theta, sizes,
                                     budgets.m_s, n_values, useful)

    # D(i, j) = base_i + V_i . H_j with V_i = w*(1-hit_d_i)*(b-c) <= or >= 0
    base = hit_d @ (w * a_coef) + (1.0 - hit_d) @ (w * c_coef)
    v_mat = w * (b_coef - c_coef) * (1.0 - hit_d)
    sbs_gain_sign = float(np.sign((b_coef - c_coef)[0])) if useful.size else 0.0

    frontier_idx = _pareto_indices(hit_s, maximize=sbs_gain_sign < 0)
    h_front = hit_s[frontier_idx]
    if v_mat.shape[0] * h_front.shape[0] * max(useful.size, 1) > _PAIR_FLOP_GUARD:
        raise ValueError("grid_oracle search space too large for this instance")

    best_val = np.inf
    best_i = best_j = 0
    block = max(1, int(2e7 // max(h_front.shape[0], 1)))
    for start in range(0, v_mat.shape[0], block):
        sl = slice(start, start + block)
        scores = v_mat[sl] @ h_front.T + base[sl, None]
        flat = int(np.argmin(scores))
        i_loc, j_loc = divmod(flat, h_front.shape[0])
        if scores[i_loc, j_loc] < best_val:
            best_val = float(scores[i_loc, j_loc])
            best_i = start + i_loc
            best_j = int(frontier_idx[j_loc])

    policy = CachingPolicy(p_d=rows_d[best_i].reshape(F, L),
                           p_s=rows_s[best_j].reshape(F, L))
    # recompute through the delay model; the bilinear split must agree
    total = overall_delay(policy, lib, geoms, radio).total
    return policy, total


def _pareto_indices(points, maximize):
    """Indices of the Pareto-optimal rows of ``points``.

    For the inner minimization only non-dominated hit vectors can attain
    the optimum: dominated rows are removable because every weight vector
    they are scored against has one uniform sign.  2-D uses a sort-scan;
    the small widths beyond that use pairwise dominance pruning.
    """
    pts = points if maximize else -points
    n, k = pts.shape
    if k == 1:
        return np.array([int(np.argmax(pts[:, 0]))])
    if k == 2:
        order = np.lexsort((-pts[:, 1], -pts[:, 0]))
        sorted_pts = pts[order]
        running = np.maximum.accumulate(sorted_pts[:, 1])
        first = np.empty(n, dtype=bool)
        first[0] = True
        first[1:] = sorted_pts[1:, 1] > running[:-1]
        return order[first]
    if n > 200_000:
        raise ValueError("grid_oracle search space too large for this instance")
    kept_idx: list[int] = []
    for idx in np.argsort(-pts.sum(axis=1)):
        row = pts[idx]
        kept = pts[kept_idx]
        if kept_idx and bool(np.any(np.all(kept >= row, axis=1)
                                    & np.any(kept > row, axis=1))):
            continue
        kept_idx.append(int(idx))
    return np.asarray(kept_idx)
