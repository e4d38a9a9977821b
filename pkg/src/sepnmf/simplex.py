"""Bounded-variable revised simplex with a dense explicit basis inverse.

Designed for the desk-scale programs this toolkit produces (up to a few
thousand rows).  Pricing is Dantzig by default and switches to Bland's
rule while a degenerate stall lasts, which is what guarantees
termination.  Rows with a single nonzero are folded into variable
bounds before the iteration starts.
"""

from dataclasses import dataclass

import numpy as np

from .lp import LpSolution


@dataclass
class SimplexOptions:
    opt_tol: float = 1e-8        # reduced-cost threshold
    feas_tol: float = 1e-9       # bound / row violation threshold
    pivot_tol: float = 1e-9
    max_iters: int = 50_000
    refactor_every: int = 3000
    stall_limit: int = 100       # degenerate steps before Bland kicks in


def solve_lp_simplex(lp, tol=None, options=None, basis_hint=None):
    """Solve a LinearProgram; returns LpSolution.

    ``basis_hint`` optionally maps each row to a structural column to
    crash with (-1 = use the row's slack / an artificial).
    """
    opts = options or SimplexOptions()
    if tol is not None:
        opts = SimplexOptions(**{**opts.__dict__, "opt_tol": tol})
    w = _Workspace(lp, opts)
    if w.status is not None:
        return w.finish(np.zeros(lp.n_cols))
    w.crash(basis_hint)
    sol = w.run()
    return sol


class _Workspace:
    def __init__(self, lp, opts):
        self.lp = lp
        self.opts = opts
        self.status = None
        self.iterations = 0
        self.lo_s = lp.lo.copy()
        self.hi_s = lp.hi.copy()
        self._presolve()
        if self.status is not None:
            return
        self._compile_columns()

    # -- presolve: singleton rows become bounds ------------------------
    def _presolve(self):
        lp, ft = self.lp, self.opts.feas_tol
        counts = np.bincount(lp.row_idx, minlength=lp.n_rows)
        single = counts == 1
        if single.any():
            smask = single[lp.row_idx]
            for r, j, a in zip(lp.row_idx[smask], lp.col_idx[smask], lp.values[smask]):
                if a == 0.0:
                    continue
                val = lp.rhs[r] / a
                sense = lp.senses[r] if a > 0 else {"<": ">", ">": "<", "=": "="}[lp.senses[r]]
                if sense in ("<", "="):
                    self.hi_s[j] = min(self.hi_s[j], val)
                if sense in (">", "="):
                    self.lo_s[j] = max(self.lo_s[j], val)
        empty = counts == 0
        for r in np.flatnonzero(empty):
            s, b = lp.senses[r], lp.rhs[r]
            if (s == "<" and b < -ft) or (s == ">" and b > ft) or (s == "=" and abs(b) > ft):
                self.status = "infeasible"
                return
        if np.any(self.lo_s > self.hi_s + ft):
            self.status = "infeasible"
            return
        self.hi_s = np.maximum(self.hi_s, self.lo_s)
        self.keep = np.flatnonzero(counts > 1)

    def _compile_columns(self):
        lp = self.lp
        m = self.keep.size
        self.m = m
        rowmap = np.full(lp.n_rows, -1, dtype=np.int64)
        rowmap[self.keep] = np.arange(m)
        kmask = rowmap[lp.row_idx] >= 0
        tr = rowmap[lp.row_idx[kmask]]
        tc = lp.col_idx[kmask]
        tv = lp.values[kmask]
        order = np.argsort(tc, kind="stable")
        tr, tc, tv = tr[order], tc[order], tv[order]

        n = lp.n_cols
        senses = lp.senses[self.keep]
        n_slack = int((senses != "=").sum())
        total = n + n_slack + m  # artificials pre-allocated, one per row
        ptr = np.zeros(total + 1, dtype=np.int64)
        np.add.at(ptr, tc + 1, 1)
        # slack and artificial columns are single-entry
        slack_rows = np.flatnonzero(senses != "=")
        for k, _ in enumerate(slack_rows):
            ptr[n + k + 1] = 1
        for i in range(m):
            ptr[n + n_slack + i + 1] = 1
        np.cumsum(ptr, out=ptr)
        nnz = ptr[-1]
        rows = np.empty(nnz, dtype=np.int64)
        vals = np.empty(nnz, dtype=float)
        rows[: tr.size] = tr
        vals[: tr.size] = tv
        pos = tr.size
        for i in slack_rows:
            rows[pos] = i
            vals[pos] = 1.0 if senses[i] == "<" else -1.0
            pos += 1
        rows[pos:] = np.arange(m)
        vals[pos:] = 1.0  # artificial signs fixed at crash time
        self.colptr, self.colrow, self.colval = ptr, rows, vals
        self.col_of_nnz = np.repeat(np.arange(total), np.diff(ptr))

        self.n, self.n_slack, self.total = n, n_slack, total
        self.art0 = n + n_slack
        self.b = lp.rhs[self.keep].copy()
        self.lo = np.concatenate([self.lo_s, np.zeros(n_slack), np.zeros(m)])
        self.hi = np.concatenate([self.hi_s, np.full(n_slack + m, np.inf)])
        self.cost = np.concatenate([lp.c, np.zeros(n_slack + m)])
        self.slack_of_row = np.full(m, -1, dtype=np.int64)
        self.slack_of_row[slack_rows] = n + np.arange(n_slack)

    def _colslice(self, j):
        s, e = self.colptr[j], self.colptr[j + 1]
        return self.colrow[s:e], self.colval[s:e]

    def _dense_basis(self):
        bmat = np.zeros((self.m, self.m))
        for k, j in enumerate(self.basis):
            r, v = self._colslice(j)
            bmat[r, k] = v
        return bmat

    # -- crash ----------------------------------------------------------
    def crash(self, basis_hint):
        m, n = self.m, self.n
        self.state = np.zeros(self.total, dtype=np.int8)  # 0 lo, 1 hi, 2 basic, 3 free
        self.xval = np.zeros(self.total)
        for j in range(self.total):
            if np.isfinite(self.lo[j]):
                self.state[j], self.xval[j] = 0, self.lo[j]
            elif np.isfinite(self.hi[j]):
                self.state[j], self.xval[j] = 1, self.hi[j]
            else:
                self.state[j], self.xval[j] = 3, 0.0

        hint = np.full(m, -1, dtype=np.int64)
        if basis_hint is not None:
            bh = np.asarray(basis_hint, dtype=np.int64)
            hint[: bh.size] = bh[self.keep] if bh.size == self.lp.n_rows else bh
        basis = np.empty(m, dtype=np.int64)
        used = set()
        for i in range(m):
            j = hint[i]
            if 0 <= j < n and j not in used:
                basis[i] = j
                used.add(j)
            elif j != -2 and self.slack_of_row[i] >= 0:
                basis[i] = self.slack_of_row[i]
            else:
                basis[i] = self.art0 + i
        self.basis = basis
        if not self._set_basis(repair=True):
            # singular or wildly infeasible crash: all slack/artificial
            self.basis = np.array(
                [self.slack_of_row[i] if self.slack_of_row[i] >= 0 else self.art0 + i
                 for i in range(m)], dtype=np.int64)
            self._set_basis(repair=True, force_artificial=True)

    def _set_basis(self, repair=False, force_artificial=False):
        m = self.m
        self.state[self.basis] = 2
        try:
            self.binv = np.linalg.inv(self._dense_basis())
        except np.linalg.LinAlgError:
            self.state[self.basis] = 0
            return False
        self._compute_xb()
        if not repair:
            return True
        ft = self.opts.feas_tol
        bad = np.flatnonzero(
            (self.x_b < self.lo[self.basis] - 1e3 * ft)
            | (self.x_b > self.hi[self.basis] + 1e3 * ft))
        if force_artificial or bad.size:
            rows = np.arange(m) if force_artificial else bad
            for i in rows:
                old = self.basis[i]
                if old >= self.art0:
                    continue
                self.state[old] = self._bound_state(old)
                self.xval[old] = self._bound_value(old)
                self.basis[i] = self.art0 + i
                self.state[self.basis[i]] = 2
            self.binv = np.linalg.inv(self._dense_basis())
            self._compute_xb()
        # orient artificial signs so their values are nonnegative;
        # negating basis column k is a row sign flip of the inverse
        for i in range(m):
            j = self.basis[i]
            if j >= self.art0 and self.x_b[i] < 0:
                s = self.colptr[j]
                self.colval[s] = -self.colval[s]
                self.binv[i] = -self.binv[i]
                self.x_b[i] = -self.x_b[i]
        return True

    def _bound_state(self, j):
        if np.isfinite(self.lo[j]):
            return 0
        if np.isfinite(self.hi[j]):
            return 1
        return 3

    def _bound_value(self, j):
        s = self._bound_state(j)
        return self.lo[j] if s == 0 else (self.hi[j] if s == 1 else 0.0)

    def _compute_xb(self):
        rhs = self.b.copy()
        nonbasic = np.flatnonzero((self.state != 2) & (self.xval != 0.0))
        for j in nonbasic:
            r, v = self._colslice(j)
            rhs[r] -= v * self.xval[j]
        self.x_b = self.binv @ rhs

    # -- the iteration ---------------------------------------------------
    def run(self):
        ft = self.opts.feas_tol
        art_used = np.any(self.basis >= self.art0)
        if art_used:
            phase1 = np.zeros(self.total)
            phase1[self.art0:] = 1.0
            status = self._iterate(phase1, phase=1)
            if status == "iterlimit":
                self.status = "iterlimit"
                return self.finish(self._extract())
            art_sum = self.x_b[self.basis >= self.art0].sum() if np.any(self.basis >= self.art0) else 0.0
            if art_sum > 1e4 * ft:
                self.status = "infeasible"
                return self.finish(self._extract())
            # pin artificials at zero for phase 2
            self.lo[self.art0:] = 0.0
            self.hi[self.art0:] = 0.0
        status = self._iterate(self.cost, phase=2)
        self.status = status
        return self.finish(self._extract())

    def _iterate(self, cost, phase):
        opts = self.opts
        m = self.m
        stall = 0
        bland = False
        since_refactor = 0
        movable = self.hi - self.lo > opts.feas_tol
        if not hasattr(self, "_ger_buf"):
            self._ger_buf = np.empty_like(self.binv)
        while True:
            if self.iterations >= opts.max_iters:
                return "iterlimit"
            self.iterations += 1
            since_refactor += 1
            y = cost[self.basis] @ self.binv
            d = cost - np.bincount(
                self.col_of_nnz, weights=y[self.colrow] * self.colval,
                minlength=self.total)
            at_lo = (self.state == 0) & movable & (d < -opts.opt_tol)
            at_hi = (self.state == 1) & movable & (d > opts.opt_tol)
            free = (self.state == 3) & (np.abs(d) > opts.opt_tol)
            eligible = at_lo | at_hi | free
            if phase == 2:
                eligible[self.art0:] = False
            idx = np.flatnonzero(eligible)
            if idx.size == 0:
                if phase == 1 and cost[self.basis] @ self.x_b > 1e4 * opts.feas_tol:
                    return "infeasible"
                return "optimal"
            if bland:
                q = int(idx[0])
            else:
                q = int(idx[np.argmax(np.abs(d[idx]))])
            direction = 1.0 if (at_lo[q] or (free[q] and d[q] < 0)) else -1.0

            rq, vq = self._colslice(q)
            w = self.binv[:, rq] @ vq
            t_own = self.hi[q] - self.lo[q] if self.state[q] != 3 else np.inf

            delta = -direction * w
            blocking, t_star = -1, t_own
            cand = np.flatnonzero(np.abs(delta) > opts.pivot_tol)
            if cand.size:
                bi = self.basis[cand]
                dd = delta[cand]
                room = np.where(dd > 0, self.hi[bi] - self.x_b[cand],
                                self.lo[bi] - self.x_b[cand])
                ratios = np.maximum(room / dd, 0.0)
                best = float(np.min(ratios))
                near = ratios <= best + 1e-12
                sub = cand[near]
                if bland:
                    blk = int(sub[np.argmin(self.basis[sub])])
                else:
                    blk = int(sub[np.argmax(np.abs(delta[sub]))])
                if best < t_star:
                    blocking, t_star = blk, best
            if not np.isfinite(t_star):
                return "infeasible" if phase == 1 else "unbounded"

            if t_star <= 1e-12:
                stall += 1
                if stall >= opts.stall_limit:
                    bland = True
            else:
                stall = 0
                bland = False

            if blocking < 0:
                # bound flip, basis unchanged
                self.x_b -= direction * t_star * w
                self.state[q] = 1 - self.state[q]
                self.xval[q] = self.hi[q] if self.state[q] == 1 else self.lo[q]
                continue

            # pivot q in, basis[blocking] out
            leaving = self.basis[blocking]
            self.x_b -= direction * t_star * w
            enter_val = self.xval[q] + direction * t_star
            hit_hi = delta[blocking] > 0
            self.state[leaving] = 1 if hit_hi else 0
            self.xval[leaving] = self.hi[leaving] if hit_hi else self.lo[leaving]
            if not np.isfinite(self.xval[leaving]):
                self.xval[leaving] = 0.0
                self.state[leaving] = 3
            self.basis[blocking] = q
            self.state[q] = 2
            self.x_b[blocking] = enter_val

            pivot = w[blocking]
            if abs(pivot) < 1e3 * opts.pivot_tol or since_refactor >= opts.refactor_every:
                self.binv = np.linalg.inv(self._dense_basis())
                self._compute_xb()
                since_refactor = 0
            else:
                row = self.binv[blocking] / pivot
                np.multiply(w[:, None], row[None, :], out=self._ger_buf)
                self.binv -= self._ger_buf
                self.binv[blocking] = row

    def _extract(self):
        x = self.xval[: self.n].copy()
        inb = self.basis < self.n
        x[self.basis[inb]] = self.x_b[inb]
        return np.clip(x, self.lo_s, self.hi_s)

    def finish(self, x):
        lp = self.lp
        ax = np.zeros(lp.n_rows)
        np.add.at(ax, lp.row_idx, lp.values * x[lp.col_idx])
        viol = np.zeros(lp.n_rows)
        lt = lp.senses == "<"
        gt = lp.senses == ">"
        eq = lp.senses == "="
        viol[lt] = np.maximum(0.0, ax[lt] - lp.rhs[lt])
        viol[gt] = np.maximum(0.0, lp.rhs[gt] - ax[gt])
        viol[eq] = np.abs(ax[eq] - lp.rhs[eq])
        bviol = np.maximum(np.maximum(lp.lo - x, x - lp.hi), 0.0)
        max_inf = float(max(viol.max() if viol.size else 0.0,
                            bviol.max() if bviol.size else 0.0))
        status = self.status or "optimal"
        if status == "optimal" and max_inf > 1e4 * self.opts.feas_tol:
            status = "infeasible"
        return LpSolution(
            status=status,
            x=x,
            objective=float(lp.c @ x),
            iterations=self.iterations,
            max_infeasibility=max_inf,
            diagnostics={"rows_after_presolve": getattr(self, "m", 0)},
        )
