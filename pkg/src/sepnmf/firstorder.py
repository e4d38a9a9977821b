"""First-order backend: relaxed primal-dual splitting for the three
selection models.

The primal block keeps the per-row cap constraints (exact projection);
the residual term and the trace pin are dualized.  For the
min-residual model the dual of the max-column-L1 norm enters through
its unit-ball projection; for the noise-bounded and rank-free models
the residual constraint enters through per-column L1-ball projections
via the Moreau identity.  The returned iterate is polished onto the
feasible set with Dykstra alternation, so certificates built from it
satisfy the constraint block to projection accuracy.
"""

import numpy as np

from .projections import (
    project_columns_l1_ball,
    project_dual_maxcol_ball,
    project_model_feasible,
    project_rows_capset,
)


def _operator_norm_bound(A, with_trace):
    """Upper bound on the norm of X -> (A X, tr X)."""
    sig = np.linalg.norm(A, 2)
    n = A.shape[1]
    return float(np.sqrt(sig * sig + (n if with_trace else 0.0))) + 1e-12


def _polish(X, r, feas_tol):
    if r is None:
        return project_rows_capset(X)
    return project_model_feasible(X, r, tol=min(feas_tol, 1e-9), iter_cap=20000)


def _run_pdhg(A, r, opts, dual_prox, primal_shift, objective):
    """Relaxed primal-dual iteration shared by the three models.

    dual_prox updates the residual-block dual variable; primal_shift is
    the gradient of the linear part of the primal objective (zero for
    the min-residual model); objective(X) scores a cap-feasible
    candidate and drives the stall-based stopping rule.
    """
    d, n = A.shape
    with_trace = r is not None
    L = _operator_norm_bound(A, with_trace)
    gamma = opts.fo_step_ratio
    tau = 0.99 * gamma / L
    sigma = 0.99 / (gamma * L)
    rho = opts.fo_relax
    diag_ix = np.diag_indices(n)

    X = np.zeros((n, n))
    if with_trace:
        X[diag_ix] = r / float(n)
    W = np.zeros((d, n))
    y = 0.0
    best_obj = np.inf
    best_X = X.copy()
    stall = 0
    iterations = opts.fo_max_iters
    hit_cap = True
    for it in range(1, opts.fo_max_iters + 1):
        G = A.T @ W + primal_shift
        if with_trace:
            G = G.copy()
            G[diag_ix] += y
        Xh = project_rows_capset(X - tau * G)
        Wh = dual_prox(W + sigma * (A @ (2.0 * Xh - X)), sigma)
        if with_trace:
            yh = y + sigma * (np.trace(2.0 * Xh - X) - r)
        X += rho * (Xh - X)
        W += rho * (Wh - W)
        if with_trace:
            y += rho * (yh - y)
        if it % opts.fo_check_every == 0:
            cand = Xh if not with_trace else project_rows_capset(
                Xh + ((r - np.trace(Xh)) / n) * np.eye(n))
            obj = objective(cand)
            if obj < best_obj - 0.1 * opts.fo_obj_tol:
                best_obj = obj
                best_X = cand.copy()
                stall = 0
            else:
                if obj < best_obj:
                    best_obj = obj
                    best_X = cand.copy()
                stall += 1
            if stall >= opts.fo_stall_checks:
                iterations = it
                hit_cap = False
                break
    final = _polish(best_X, r, opts.fo_feas_tol)
    if objective(final) > best_obj + opts.fo_obj_tol:
        alt = _polish(X, r, opts.fo_feas_tol)
        if objective(alt) < objective(final):
            final = alt
    diag = {
        "backend": "firstorder",
        "iterations": iterations,
        "iterlimit": hit_cap,
        "best_objective": float(best_obj),
        "max_infeasibility": 0.0 if r is None else abs(np.trace(final) - r),
    }
    return final, diag


def solve_min_residual_fo(A, r, opts):
    """Relaxed PDHG for the trace-pinned residual minimization."""
    def dual_prox(V, sig):
        return project_dual_maxcol_ball(V - sig * A)

    def objective(X):
        return float(np.abs(A - A @ X).sum(axis=0).max())

    return _run_pdhg(A, r, opts, dual_prox, np.zeros((A.shape[1],) * 2), objective)


def solve_noise_bounded_fo(A, r, eps, f, opts):
    """Relaxed PDHG with the residual constrained per column."""
    n = A.shape[1]
    bound = 2.0 * eps

    def dual_prox(V, sig):
        inside = A + project_columns_l1_ball(V / sig - A, bound)
        return V - sig * inside

    shift = np.zeros((n, n))
    shift[np.diag_indices(n)] = f
    pen = _constraint_penalty(A, bound)

    def objective(X):
        return float(f @ np.diag(X)) + pen(X)

    X, diag = _run_pdhg(A, r, opts, dual_prox, shift, objective)
    diag["residual_bound"] = bound
    diag["achieved_residual"] = float(np.abs(A - A @ X).sum(axis=0).max())
    return X, diag


def solve_rank_free_fo(A, eps, g, opts):
    """Relaxed PDHG without the trace pin; thresholding happens later."""
    n = A.shape[1]
    bound = opts.rho * eps

    def dual_prox(V, sig):
        inside = A + project_columns_l1_ball(V / sig - A, bound)
        return V - sig * inside

    shift = np.zeros((n, n))
    shift[np.diag_indices(n)] = g
    pen = _constraint_penalty(A, bound)

    def objective(X):
        return float(g @ np.diag(X)) + pen(X)

    X, diag = _run_pdhg(A, None, opts, dual_prox, shift, objective)
    diag["residual_bound"] = bound
    diag["achieved_residual"] = float(np.abs(A - A @ X).sum(axis=0).max())
    return X, diag


def _constraint_penalty(A, bound, weight=100.0):
    """Soft score of the residual-budget violation for the stall test."""
    def pen(X):
        resid = np.abs(A - A @ X).sum(axis=0).max()
        return weight * max(0.0, float(resid) - bound)
    return pen
