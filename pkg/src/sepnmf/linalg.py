"""Dense matrix kernel: norms, column ops, Jacobi SVD, seeded sampling.

All matrices are column-oriented ``numpy.ndarray`` of dtype float64.
``as_matrix`` is the validating constructor used at API boundaries; the
numeric kernels assume validated input.
"""

import numpy as np

from .errors import BadParameterError, NoConvergenceError, ZeroColumnError

RNG_ALGORITHM = "pcg64"


def as_matrix(values, name="matrix"):
    """Validate and return a 2-d float64 array with finite entries.

    Raises ValueError on NaN/Inf entries or empty dimensions.
    """
    m = np.asarray(values, dtype=float)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {m.shape}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"{name} must have at least one row and column")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return m


class RngStream:
    """Seeded random stream (PCG64) with deterministic child derivation.

    Identical seeds produce identical sample sequences on one platform;
    cross-platform bit-exactness is not promised.
    """

    def __init__(self, seed, _spawn_key=()):
        self.seed = int(seed)
        self.algorithm = RNG_ALGORITHM
        self._spawn_key = tuple(int(k) for k in _spawn_key)
        seq = np.random.SeedSequence(self.seed, spawn_key=self._spawn_key)
        self.generator = np.random.Generator(np.random.PCG64(seq))

    def child(self, *key):
        """Derive an independent stream keyed by integers (reproducible)."""
        return RngStream(self.seed, self._spawn_key + tuple(int(k) for k in key))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, key={self._spawn_key}, algo={self.algorithm})"


def induced_l1_norm(m):
    """Max absolute column sum (the operator norm induced by the L1 norm)."""
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        raise ValueError("empty matrix")
    if m.ndim == 1:
        return float(np.abs(m).sum())
    return float(np.abs(m).sum(axis=0).max())


def normalize_columns_l1(m):
    """Scale every column to unit L1 norm, preserving signs.

    Raises ZeroColumnError at the first all-zero column.
    """
    m = np.asarray(m, dtype=float)
    sums = np.abs(m).sum(axis=0)
    zero = np.flatnonzero(sums == 0.0)
    if zero.size:
        raise ZeroColumnError(int(zero[0]))
    return m / sums


def pairwise_l1_distances(a):
    """n-by-n symmetric matrix of L1 distances between the columns of ``a``."""
    a = np.asarray(a, dtype=float)
    d, n = a.shape
    # chunk over columns so memory stays O(chunk * d * n)
    out = np.empty((n, n))
    step = max(1, int(4_000_000 / max(1, d * n)))
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        out[lo:hi] = np.abs(a[:, lo:hi, None] - a[:, None, :]).sum(axis=0)
    np.fill_diagonal(out, 0.0)
    return out


def sample_dirichlet(params, rng):
    """One draw from a Dirichlet distribution with the given shape parameters.

    Sampling goes through normalized Gamma draws of the underlying
    generator.  All parameters must be strictly positive.
    """
    params = np.asarray(params, dtype=float)
    if params.ndim != 1 or params.size == 0:
        raise BadParameterError("params must be a non-empty 1-d sequence")
    if np.any(params <= 0.0) or not np.all(np.isfinite(params)):
        raise BadParameterError("all Dirichlet parameters must be finite and > 0")
    return rng.generator.dirichlet(params)


def reduced_svd(m, max_sweeps=100, tol=1e-14):
    """Reduced SVD via one-sided Jacobi: M = F diag(sigma) G^T.

    Parameters
    ----------
    m : (d, k) array with d >= k.
    max_sweeps : Jacobi sweep cap; NoConvergenceError beyond it.

    Returns
    -------
    f : (d, k) with orthonormal columns.
    sigma : (k,) nonincreasing, >= 0.
    g : (k, k) orthogonal.
    """
    m = np.asarray(m, dtype=float)
    d, k = m.shape
    if d < k:
        raise ValueError(f"need rows >= cols, got {d} x {k}")
    u = m.copy()
    g = np.eye(k)
    scale = np.linalg.norm(m)
    if scale == 0.0:
        return np.eye(d, k), np.zeros(k), g

    converged = False
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(k - 1):
            for q in range(p + 1, k):
                app = u[:, p] @ u[:, p]
                aqq = u[:, q] @ u[:, q]
                apq = u[:, p] @ u[:, q]
                if abs(apq) <= tol * np.sqrt(app * aqq) or apq == 0.0:
                    continue
                off = max(off, abs(apq) / max(np.sqrt(app * aqq), 1e-300))
                # Jacobi rotation zeroing the (p, q) inner product
                tau = (aqq - app) / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                if tau == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                up = u[:, p].copy()
                u[:, p] = c * up - s * u[:, q]
                u[:, q] = s * up + c * u[:, q]
                gp = g[:, p].copy()
                g[:, p] = c * gp - s * g[:, q]
                g[:, q] = s * gp + c * g[:, q]
        if off <= tol:
            converged = True
            break
    if not converged:
        raise NoConvergenceError(f"Jacobi SVD did not converge in {max_sweeps} sweeps")

    sigma = np.sqrt((u * u).sum(axis=0))
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    u = u[:, order]
    g = g[:, order]
    f = np.empty_like(u)
    cutoff = sigma[0] * max(d, k) * np.finfo(float).eps if sigma[0] > 0 else 0.0
    for j in range(k):
        if sigma[j] > cutoff:
            f[:, j] = u[:, j] / sigma[j]
        else:
            # numerically zero direction: complete the orthonormal set
            f[:, j] = _orthonormal_completion(f[:, :j], d)
    return f, sigma, g


def _orthonormal_completion(fpart, d):
    for trial in range(d):
        v = np.zeros(d)
        v[trial] = 1.0
        if fpart.shape[1]:
            v -= fpart @ (fpart.T @ v)
        nrm = np.linalg.norm(v)
        if nrm > 1e-8:
            return v / nrm
    raise NoConvergenceError("could not complete orthonormal basis")
