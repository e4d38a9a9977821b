"""Euclidean projections used by the first-order backend and its checks.

The feasible set of the selection models factors into independent
per-row slices {0 <= x_j <= t <= 1} plus one trace hyperplane, so exact
row projections plus Dykstra alternation give the full projection.
"""

import numpy as np

from .errors import IterLimitError


def project_row_capset(y_diag, y_off):
    """Exact projection of one row onto {0 <= x_j <= t <= 1}.

    Returns (t, x).  The minimizer clips each off-diagonal entry to
    [0, t]; the diagonal value t solves a piecewise-linear equation
    whose breakpoints are the sorted off-diagonal entries.
    """
    y_off = np.asarray(y_off, dtype=float)
    if y_off.size == 0:
        t = float(min(1.0, max(0.0, y_diag)))
        return t, y_off.copy()
    t = _row_diag_solution(np.asarray([y_diag]), y_off[None, :])[0]
    return float(t), np.clip(y_off, 0.0, t)


def _row_diag_solution(y_diag, off):
    """Vectorized unconstrained-then-clamped diagonal for row cap-sets.

    off has one row of off-diagonal entries per row of y_diag; returns
    the optimal t per row, clamped to [0, 1].
    """
    k = off.shape[1]
    a = -np.sort(-off, axis=1)            # descending
    s = np.cumsum(a, axis=1)
    counts = np.arange(1, k + 1)
    cand = np.empty((off.shape[0], k + 1))
    cand[:, 0] = y_diag
    cand[:, 1:] = (y_diag[:, None] + s) / (1.0 + counts)
    upper = np.concatenate([np.full((off.shape[0], 1), np.inf), a], axis=1)
    lower = np.concatenate([a, np.full((off.shape[0], 1), -np.inf)], axis=1)
    valid = (cand <= upper) & (cand >= lower)
    first = np.argmax(valid, axis=1)
    t = cand[np.arange(off.shape[0]), first]
    return np.clip(t, 0.0, 1.0)


def project_rows_capset(x):
    """Row-wise exact projection of a square matrix onto all cap slices."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if n == 1:
        return np.array([[min(1.0, max(0.0, x[0, 0]))]])
    mask = ~np.eye(n, dtype=bool)
    off = x[mask].reshape(n, n - 1)
    t = _row_diag_solution(np.diag(x).copy(), off)
    out = np.empty_like(x)
    out[mask] = np.clip(off, 0.0, t[:, None]).ravel()
    out[np.diag_indices(n)] = t
    return out


def project_trace(x, r):
    """Projection onto {tr X = r}: shift the diagonal uniformly."""
    n = x.shape[0]
    out = x.copy()
    out[np.diag_indices(n)] += (r - np.trace(x)) / n
    return out


def project_model_feasible(x, r, tol=1e-9, iter_cap=5000):
    """Dykstra alternation between the row cap-sets and the trace plane.

    Converges to the exact Euclidean projection onto their
    intersection; the returned point satisfies the cap constraints
    exactly (last step is the cap projection) and the trace within tol.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if not 1 <= r <= n:
        raise ValueError(f"need 1 <= r <= {n}")
    y = x.copy()
    inc_tr = np.zeros_like(x)
    inc_cap = np.zeros_like(x)
    prev = None
    for _ in range(iter_cap):
        z = project_trace(y + inc_tr, r)
        inc_tr = (y + inc_tr) - z
        y = project_rows_capset(z + inc_cap)
        inc_cap = (z + inc_cap) - y
        if prev is not None:
            change = np.abs(y - prev).max()
            if change <= tol and abs(np.trace(y) - r) <= max(tol, 1e-12 * n):
                return y
        prev = y.copy()
    raise IterLimitError("Dykstra projection did not converge")


def project_columns_l1_ball(m, radius):
    """Project every column of m onto the L1 ball of the given radius."""
    m = np.asarray(m, dtype=float)
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    absm = np.abs(m)
    norms = absm.sum(axis=0)
    out = m.copy()
    over = norms > radius
    if not np.any(over):
        return out
    sub = absm[:, over]
    d = sub.shape[0]
    a = -np.sort(-sub, axis=0)
    s = np.cumsum(a, axis=0)
    counts = np.arange(1, d + 1)[:, None]
    theta_cand = (s - radius) / counts
    k = (a > theta_cand).sum(axis=0)
    theta = theta_cand[k - 1, np.arange(sub.shape[1])]
    shrunk = np.sign(m[:, over]) * np.maximum(absm[:, over] - theta, 0.0)
    out[:, over] = shrunk
    return out


def project_dual_maxcol_ball(w, radius=1.0):
    """Project onto {W : sum_j ||W(:,j)||_inf <= radius}.

    This is the unit ball of the norm dual to the max-column-L1 matrix
    norm.  The per-column infinity-norm budgets follow a waterfilling
    rule; the crossing of the total-budget curve is located by an exact
    piecewise-linear sweep over all breakpoints.
    """
    w = np.asarray(w, dtype=float)
    d, n = w.shape
    absw = np.abs(w)
    colmax = absw.max(axis=0)
    if colmax.sum() <= radius:
        return w.copy()

    a = -np.sort(-absw, axis=0)              # descending per column
    s = np.cumsum(a, axis=0)
    ks = np.arange(1, d + 1)[:, None]
    # breakpoints where column j's active count k becomes k+1 (last: hits 0)
    events = s - ks * np.concatenate([a[1:], np.zeros((1, n))], axis=0)
    dslope = np.concatenate(
        [1.0 / (ks[:-1] * (ks[:-1] + 1.0)) * np.ones((1, n)),
         np.full((1, n), 1.0 / d)], axis=0) if d > 1 else np.full((1, n), 1.0)

    order = np.argsort(events.ravel(), kind="stable")
    ev = np.concatenate([[0.0], events.ravel()[order]])
    # slope of the total-budget curve after each breakpoint
    slopes = np.concatenate([[-float(n)],
                             -float(n) + np.cumsum(dslope.ravel()[order])])
    m_vals = np.empty(ev.size)
    m_vals[0] = colmax.sum()
    m_vals[1:] = colmax.sum() + np.cumsum(slopes[:-1] * np.diff(ev))
    idx = int(np.searchsorted(-m_vals, -radius))  # first M <= radius
    if idx >= ev.size:
        lam = ev[-1]
    else:
        lam = ev[idx - 1] + (radius - m_vals[idx - 1]) / slopes[idx - 1]

    inner = events[:-1] if d > 1 else np.zeros((0, n))
    kstar = 1 + (inner < lam).sum(axis=0)
    budget = np.maximum(
        0.0, (s[kstar - 1, np.arange(n)] - lam) / kstar)
    return np.sign(w) * np.minimum(absw, budget[None, :])
