"""Small regression solvers: nonnegative least squares and nonnegative
L1-norm fitting.

NNLS is the Lawson-Hanson active-set method.  The L1 fit reduces to a
linear program with residual-bound variables solved by the simplex
backend.
"""

import numpy as np

from .errors import IterLimitError
from .lp import LpBuilder
from .simplex import solve_lp_simplex


def solve_nnls(b, c, tol=1e-10, max_iters=None):
    """min over x >= 0 of ||b x - c||_2, Lawson-Hanson active set.

    Returns x with KKT residual below ``tol``: the gradient of the
    squared residual is >= -tol on zero coordinates and within tol of
    zero on positive ones.
    """
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float).ravel()
    m, n = b.shape
    if max_iters is None:
        max_iters = 30 * n + 100
    x = np.zeros(n)
    passive = np.zeros(n, dtype=bool)
    btb_scale = max(1.0, np.abs(b).max()) ** 2
    w = b.T @ (c - b @ x)
    iters = 0
    while True:
        candidates = np.flatnonzero(~passive & (w > tol * btb_scale))
        if candidates.size == 0:
            break
        j = candidates[np.argmax(w[candidates])]
        passive[j] = True
        while True:
            iters += 1
            if iters > max_iters:
                raise IterLimitError("NNLS active-set iteration cap exceeded")
            idx = np.flatnonzero(passive)
            z = np.zeros(n)
            z[idx], *_ = np.linalg.lstsq(b[:, idx], c, rcond=None)
            if np.all(z[idx] > tol):
                x = z
                break
            # step toward z until the first passive variable hits zero
            neg = idx[z[idx] <= tol]
            alpha = np.min(x[neg] / (x[neg] - z[neg]))
            x = x + alpha * (z - x)
            passive[x <= tol] = False
            x[~passive] = 0.0
        w = b.T @ (c - b @ x)
    return x


def nnls_residual_sq(b, c, tol=1e-10):
    """Squared residual of the NNLS fit of c on the columns of b."""
    x = solve_nnls(b, c, tol=tol)
    r = c - b @ x
    return float(r @ r)


def solve_l1_regression_nonneg(b, c, tol=1e-8):
    """min over z >= 0 of ||c - B z||_1, via an LP.

    Returns (z, value).  Auxiliary variables bound the residual entries
    from above and below; the simplex backend does the work.
    """
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float).ravel()
    m, p = b.shape
    # variables: z (p, >= 0) then t (m, >= 0); minimize sum(t)
    bld = LpBuilder(p + m, name="l1fit")
    bld.c[p:] = 1.0
    for i in range(m):
        cols = list(range(p)) + [p + i]
        # c_i - b_i.z <= t_i
        bld.add_row(cols, list(-b[i]) + [-1.0], "<", -c[i])
        # -(c_i - b_i.z) <= t_i
        bld.add_row(cols, list(b[i]) + [-1.0], "<", c[i])
    sol = solve_lp_simplex(bld.build(), tol=tol)
    if sol.status == "iterlimit":
        raise IterLimitError("L1 regression LP hit the iteration cap")
    if not sol.optimal:
        raise RuntimeError(f"L1 regression LP ended with status {sol.status}")
    z = sol.x[:p]
    return z, float(np.abs(c - b @ z).sum())
