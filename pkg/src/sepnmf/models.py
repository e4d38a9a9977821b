"""The three LP-representable column-selection models and their solvers.

All three share the self-dictionary constraint block
``0 <= X(i,j) <= X(i,i) <= 1``:

* min-residual model: minimize ||A - AX||_1 with tr(X) = r pinned.
  Needs no noise estimate; this is the model the refined selection
  algorithms solve.
* noise-bounded model: minimize f.diag(X) subject to
  ||A - AX||_1 <= 2*eps and tr(X) = r (the original formulation; eps
  must be supplied).
* rank-free model: minimize g.diag(X) subject to
  ||A - AX||_1 <= rho*eps, no trace constraint.

``||.||_1`` of a matrix is the induced norm (max absolute column sum)
throughout.  Each solve returns a Certificate carrying the optimizer,
the recomputed objective and solver diagnostics.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InfeasibleError, IterLimitError, UnboundedError
from .linalg import as_matrix, induced_l1_norm
from .lp import LpBuilder
from .simplex import SimplexOptions, solve_lp_simplex

AUTO_SIMPLEX_MAX_COLS = 30


@dataclass
class ModelOptions:
    """Backend choice, tolerances and model parameter vectors."""

    backend: str = "auto"          # auto | simplex | firstorder
    encoding: str = "split"        # split | explicit (simplex backend)
    simplex: SimplexOptions = field(default_factory=SimplexOptions)
    fo_feas_tol: float = 1e-6
    fo_obj_tol: float = 1e-5
    fo_max_iters: int = 50_000
    fo_check_every: int = 100
    fo_stall_checks: int = 20
    fo_relax: float = 1.85
    fo_step_ratio: float = 1.0
    f: np.ndarray = None           # noise-bounded diag cost; default ramp
    g: np.ndarray = None           # rank-free diag cost; default 1 + ramp
    rho: float = 1.0

    def f_vector(self, n):
        if self.f is not None:
            f = np.asarray(self.f, dtype=float)
            if f.size != n or np.unique(f).size != n:
                raise ValueError("f must have n pairwise-distinct entries")
            return f
        return (np.arange(n) + 1.0) / n

    def g_vector(self, n):
        if self.g is not None:
            g = np.asarray(self.g, dtype=float)
            if g.size != n or np.unique(g).size != n or np.any(g <= 0):
                raise ValueError("g must have n distinct positive entries")
            return g
        return 1.0 + (np.arange(n) + 1.0) / n


@dataclass
class Certificate:
    """Solution record for one model solve."""

    X: np.ndarray
    theta: float                   # recomputed ||A - A X||_1
    p: np.ndarray                  # diag(X)
    model: str                     # min-residual | noise-bounded | rank-free
    r: int
    diagnostics: dict = field(default_factory=dict)

    @property
    def backend(self):
        return self.diagnostics.get("backend", "?")


def feasibility_report(A, X, r=None, tol=1e-8):
    """Constraint violations of X for the shared constraint block.

    Returns a dict of violation magnitudes; `trace` is checked only
    when r is given.  `objective` is ||A - AX||_1.
    """
    A = np.asarray(A, dtype=float)
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if X.shape != (n, n) or A.shape[1] != n:
        raise DimensionError("X must be n x n matching A's columns")
    diag = np.diag(X)
    rep = {
        "nonneg": float(max(0.0, -X.min())),
        "diag_cap": float(max(0.0, diag.max() - 1.0)),
        "offdiag_cap": float(max(0.0, (X - diag[None, :].T).max())),
        "objective": induced_l1_norm(A - A @ X),
    }
    if r is not None:
        rep["trace"] = abs(float(np.trace(X)) - r)
    rep["feasible"] = all(
        rep[k] <= tol for k in ("nonneg", "diag_cap", "offdiag_cap")
    ) and (r is None or rep["trace"] <= max(tol, 1e-6))
    return rep


# ----------------------------------------------------------------------
# LP builders
# ----------------------------------------------------------------------

def build_residual_lp(A, r):
    """Reference LP for the min-residual model, explicit envelope form.

    Variables: X (n^2), Y (d*n), z; constraints are the two residual
    envelopes, the per-column sums against z, the trace pin, the
    off-diagonal caps together with the diagonal caps, and the sign
    constraints.  The variable and constraint counts are exactly
    n^2 + d*n + 1 and 2n^2 + 2dn + n + 1.
    """
    A = as_matrix(A, "A")
    d, n = A.shape
    if not 1 <= r <= n:
        raise DimensionError(f"need 1 <= r <= {n}, got {r}")
    ix = lambda i, j: j * n + i
    iy = lambda i, j: n * n + j * d + i
    iz = n * n + d * n
    bld = LpBuilder(iz + 1, name="residual-lp")
    bld.c[iz] = 1.0
    for j in range(iz + 1):
        bld.set_bounds(j, -np.inf, np.inf)

    for j in range(n):
        for i in range(d):
            cols = [ix(k, j) for k in range(n) if A[i, k] != 0.0]
            vals = [-A[i, k] for k in range(n) if A[i, k] != 0.0]
            bld.add_row(cols + [iy(i, j)], vals + [-1.0], "<", -A[i, j])
    for j in range(n):
        for i in range(d):
            cols = [ix(k, j) for k in range(n) if A[i, k] != 0.0]
            vals = [A[i, k] for k in range(n) if A[i, k] != 0.0]
            bld.add_row(cols + [iy(i, j)], vals + [-1.0], "<", A[i, j])
    for j in range(n):
        bld.add_row([iy(i, j) for i in range(d)] + [iz],
                    [1.0] * d + [-1.0], "<", 0.0)
    bld.add_row([ix(i, i) for i in range(n)], [1.0] * n, "=", float(r))
    for i in range(n):
        for j in range(n):
            if i == j:
                bld.add_row([ix(i, i)], [1.0], "<", 1.0)
            else:
                bld.add_row([ix(i, j), ix(i, i)], [1.0, -1.0], "<", 0.0)
    for i in range(n):
        for j in range(n):
            bld.add_row([ix(i, j)], [-1.0], "<", 0.0)
    return bld.build()


def _build_split_lp(A, model, r, resid_bound, diag_cost):
    """Residual-split encoding used by the simplex solve path.

    The residual is carried by a positive/negative part pair, which
    keeps the row count at d*n + n + n^2 (+1) and admits a crash basis
    that is feasible everywhere except the trace row.
    """
    d, n = A.shape
    ix = lambda i, j: j * n + i
    ip = lambda i, j: n * n + j * d + i
    iq = lambda i, j: n * n + d * n + j * d + i
    iz = n * n + 2 * d * n
    ncols = iz + 1 if model == "min-residual" else iz
    bld = LpBuilder(ncols, name=f"{model}-lp")
    for i in range(n):
        for j in range(n):
            bld.set_bounds(ix(i, j), 0.0, 1.0)
    hint = []
    for j in range(n):
        for i in range(d):
            cols = [ix(k, j) for k in range(n) if A[i, k] != 0.0]
            vals = [A[i, k] for k in range(n) if A[i, k] != 0.0]
            bld.add_row(cols + [ip(i, j), iq(i, j)], vals + [1.0, -1.0],
                        "=", A[i, j])
            hint.append(ip(i, j) if A[i, j] >= 0.0 else iq(i, j))
    colsums = np.abs(A).sum(axis=0)
    jmax = int(np.argmax(colsums))
    for j in range(n):
        cols = [ip(i, j) for i in range(d)] + [iq(i, j) for i in range(d)]
        vals = [1.0] * (2 * d)
        if model == "min-residual":
            bld.add_row(cols + [iz], vals + [-1.0], "<", 0.0)
            hint.append(iz if j == jmax else -1)
        else:
            bld.add_row(cols, vals, "<", float(resid_bound))
            hint.append(-1 if colsums[j] <= resid_bound else -2)
    if model in ("min-residual", "noise-bounded"):
        bld.add_row([ix(i, i) for i in range(n)], [1.0] * n, "=", float(r))
        hint.append(-2)
    for i in range(n):
        for j in range(n):
            if i != j:
                bld.add_row([ix(i, j), ix(i, i)], [1.0, -1.0], "<", 0.0)
                hint.append(-1)
    if model == "min-residual":
        bld.c[iz] = 1.0
    else:
        for i in range(n):
            bld.c[ix(i, i)] = diag_cost[i]
    return bld.build(), np.asarray(hint, dtype=np.int64)


def _solve_via_simplex(A, model, r, resid_bound, diag_cost, opts):
    if opts.encoding == "explicit" and model == "min-residual":
        lp = build_residual_lp(A, r)
        hint = None
    else:
        lp, hint = _build_split_lp(A, model, r, resid_bound, diag_cost)
    sol = solve_lp_simplex(lp, options=opts.simplex, basis_hint=hint)
    if sol.status == "infeasible":
        raise InfeasibleError(f"{model} model is infeasible (bound {resid_bound})")
    if sol.status == "iterlimit":
        raise IterLimitError(f"simplex hit the iteration cap on the {model} model")
    if sol.status == "unbounded":
        raise UnboundedError(f"{model} model reported unbounded")
    n = A.shape[1]
    X = sol.x[: n * n].reshape((n, n), order="F")
    diag = {
        "backend": "simplex",
        "iterations": sol.iterations,
        "lp_objective": sol.objective,
        "max_infeasibility": sol.max_infeasibility,
        "status": sol.status,
    }
    return X, diag


def _certificate(A, X, model, r, diag):
    X = np.asarray(X, dtype=float)
    theta = induced_l1_norm(A - A @ X)
    return Certificate(X=X, theta=theta, p=np.diag(X).copy(), model=model,
                       r=r, diagnostics=diag)


def _pick_backend(opts, n):
    if opts.backend != "auto":
        return opts.backend
    return "simplex" if n <= AUTO_SIMPLEX_MAX_COLS else "firstorder"


def solve_min_residual(A, r, opts=None):
    """Solve the trace-pinned residual-minimization model; Certificate out."""
    from . import firstorder
    A = as_matrix(A, "A")
    opts = opts or ModelOptions()
    n = A.shape[1]
    if not 1 <= r <= n:
        raise DimensionError(f"need 1 <= r <= {n}, got {r}")
    backend = _pick_backend(opts, n)
    if backend == "simplex":
        X, diag = _solve_via_simplex(A, "min-residual", r, None, None, opts)
    else:
        X, diag = firstorder.solve_min_residual_fo(A, r, opts)
    return _certificate(A, X, "min-residual", r, diag)


def solve_noise_bounded(A, r, eps, opts=None):
    """Original formulation: needs the noise level eps as input."""
    from . import firstorder
    A = as_matrix(A, "A")
    opts = opts or ModelOptions()
    n = A.shape[1]
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if not 1 <= r <= n:
        raise DimensionError(f"need 1 <= r <= {n}, got {r}")
    f = opts.f_vector(n)
    backend = _pick_backend(opts, n)
    if backend == "simplex":
        X, diag = _solve_via_simplex(A, "noise-bounded", r, 2.0 * eps, f, opts)
    else:
        X, diag = firstorder.solve_noise_bounded_fo(A, r, eps, f, opts)
    return _certificate(A, X, "noise-bounded", r, diag)


def solve_rank_free(A, eps, opts=None):
    """Trace-free variant with threshold selection downstream."""
    from . import firstorder
    A = as_matrix(A, "A")
    opts = opts or ModelOptions()
    n = A.shape[1]
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if opts.rho <= 0:
        raise ValueError("rho must be positive")
    g = opts.g_vector(n)
    backend = _pick_backend(opts, n)
    if backend == "simplex":
        X, diag = _solve_via_simplex(A, "rank-free", None, opts.rho * eps, g, opts)
    else:
        X, diag = firstorder.solve_rank_free_fo(A, eps, g, opts)
    return _certificate(A, X, "rank-free", None, diag)


# ----------------------------------------------------------------------
# Ground-truth checks
# ----------------------------------------------------------------------

def verify_certificate(instance, cert, tol=1e-6):
    """Check a min-residual certificate against its instance's ground truth.

    Three families of checks: the objective against twice the noise
    level, the per-column norm and reconstruction bounds, and the
    diagonal lower bound at every true basis index (the last only when
    kappa > 0 and beta < 1).  Failures are report entries, not errors.
    """
    eps = instance.epsilon
    kappa, beta = instance.kappa, instance.beta
    V = instance.V
    X = cert.X
    resid_slack = 10.0 * cert.diagnostics.get("max_infeasibility", 0.0)
    checks = []

    bound = 2.0 * eps + tol + resid_slack
    checks.append({
        "name": "objective_le_twice_noise",
        "passed": bool(cert.theta <= bound),
        "measured": float(cert.theta),
        "bound": float(bound),
    })

    if eps < 1.0:
        et = 4.0 * eps / (1.0 - eps)
        colnorms = np.abs(X).sum(axis=0)
        recon = np.abs(V - V @ X).sum(axis=0)
        checks.append({
            "name": "column_norm_bound",
            "passed": bool(np.all(colnorms <= 1.0 + et + tol + resid_slack)),
            "measured": float(colnorms.max()),
            "bound": float(1.0 + et + tol + resid_slack),
        })
        checks.append({
            "name": "column_reconstruction_bound",
            "passed": bool(np.all(recon <= et + tol + resid_slack)),
            "measured": float(recon.max()),
            "bound": float(et + tol + resid_slack),
        })

    if kappa > 0.0 and beta < 1.0 and eps < 1.0:
        lb = 1.0 - 8.0 * eps / (kappa * (1.0 - beta) * (1.0 - eps))
        basis_diag = cert.p[np.asarray(instance.basis, dtype=int)]
        checks.append({
            "name": "basis_diagonal_lower_bound",
            "passed": bool(np.all(basis_diag >= lb - tol - resid_slack)),
            "measured": float(basis_diag.min()),
            "bound": float(lb - tol - resid_slack),
        })

    return {"passed": all(c["passed"] for c in checks), "checks": checks}
