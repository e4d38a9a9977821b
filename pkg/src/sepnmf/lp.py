"""Linear-program container and a fixed-format MPS exporter.

Constraint matrices are stored as triplet lists and compiled to a
column-slice form for the solver.  The MPS export exists only for
cross-checking against outside solvers; nothing at runtime reads it.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class LinearProgram:
    """min c.x  s.t.  rows (<=, =, >=) rhs  and  lo <= x <= hi."""

    c: np.ndarray
    n_rows: int
    row_idx: np.ndarray
    col_idx: np.ndarray
    values: np.ndarray
    senses: np.ndarray  # '<', '=', '>' per row
    rhs: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    name: str = "lp"

    @property
    def n_cols(self):
        return self.c.size

    def validate(self):
        m, n = self.n_rows, self.n_cols
        if self.rhs.size != m or self.senses.size != m:
            raise ValueError("rhs/senses length must match row count")
        if self.lo.size != n or self.hi.size != n:
            raise ValueError("bounds length must match column count")
        if self.row_idx.size != self.col_idx.size or self.row_idx.size != self.values.size:
            raise ValueError("triplet arrays must have equal length")
        if self.row_idx.size:
            if self.row_idx.min() < 0 or self.row_idx.max() >= m:
                raise ValueError("row index out of bounds")
            if self.col_idx.min() < 0 or self.col_idx.max() >= n:
                raise ValueError("col index out of bounds")
            pairs = self.row_idx.astype(np.int64) * n + self.col_idx
            if np.unique(pairs).size != pairs.size:
                raise ValueError("duplicate (row, col) triplet")
        if np.any(self.lo > self.hi):
            raise ValueError("lo > hi for some variable")
        bad = set(np.unique(self.senses)) - {"<", "=", ">"}
        if bad:
            raise ValueError(f"unknown senses {bad}")
        return self

    def to_dense(self):
        a = np.zeros((self.n_rows, self.n_cols))
        a[self.row_idx, self.col_idx] = self.values
        return a


class LpBuilder:
    """Incremental triplet builder for LinearProgram."""

    def __init__(self, n_cols, name="lp"):
        self.name = name
        self.c = np.zeros(n_cols)
        self.lo = np.zeros(n_cols)
        self.hi = np.full(n_cols, np.inf)
        self._rows = []
        self._cols = []
        self._vals = []
        self._senses = []
        self._rhs = []

    def set_bounds(self, j, lo, hi):
        self.lo[j] = lo
        self.hi[j] = hi

    def add_row(self, cols, vals, sense, rhs):
        r = len(self._rhs)
        self._rows.extend([r] * len(cols))
        self._cols.extend(cols)
        self._vals.extend(vals)
        self._senses.append(sense)
        self._rhs.append(rhs)
        return r

    def build(self):
        lp = LinearProgram(
            c=self.c,
            n_rows=len(self._rhs),
            row_idx=np.asarray(self._rows, dtype=np.int64),
            col_idx=np.asarray(self._cols, dtype=np.int64),
            values=np.asarray(self._vals, dtype=float),
            senses=np.asarray(self._senses, dtype="<U1"),
            rhs=np.asarray(self._rhs, dtype=float),
            lo=self.lo,
            hi=self.hi,
            name=self.name,
        )
        return lp.validate()


@dataclass
class LpSolution:
    status: str  # optimal | infeasible | unbounded | iterlimit
    x: np.ndarray
    objective: float
    iterations: int
    max_infeasibility: float = 0.0
    diagnostics: dict = field(default_factory=dict)

    @property
    def optimal(self):
        return self.status == "optimal"


def to_mps(lp, name=None):
    """Render the program in fixed-format MPS (export only)."""
    name = name or lp.name
    sense_tag = {"<": "L", "=": "E", ">": "G"}
    lines = [f"NAME          {name.upper()[:8]:<8}", "ROWS", " N  COST"]
    for i in range(lp.n_rows):
        lines.append(f" {sense_tag[lp.senses[i]]}  R{i:<7d}")
    lines.append("COLUMNS")
    by_col = {}
    for r, ccol, v in zip(lp.row_idx, lp.col_idx, lp.values):
        by_col.setdefault(int(ccol), []).append((int(r), float(v)))
    for j in range(lp.n_cols):
        entries = []
        if lp.c[j] != 0.0:
            entries.append(("COST", lp.c[j]))
        entries.extend((f"R{r}", v) for r, v in sorted(by_col.get(j, [])))
        for k in range(0, len(entries), 2):
            pair = entries[k:k + 2]
            row = f"    X{j:<9d}"
            for rn, v in pair:
                row += f"{rn:<10}{v:<15.8g}"
            lines.append(row.rstrip())
    lines.append("RHS")
    for i in range(lp.n_rows):
        if lp.rhs[i] != 0.0:
            lines.append(f"    RHS       R{i:<9d}{lp.rhs[i]:<15.8g}".rstrip())
    lines.append("BOUNDS")
    for j in range(lp.n_cols):
        lo, hi = lp.lo[j], lp.hi[j]
        if lo == 0.0 and np.isposinf(hi):
            continue
        if np.isneginf(lo) and np.isposinf(hi):
            lines.append(f" FR BND       X{j:<9d}")
            continue
        if np.isfinite(lo) and lo != 0.0 or np.isneginf(lo):
            tag = "LO" if np.isfinite(lo) else "MI"
            val = f"{lo:<15.8g}" if np.isfinite(lo) else ""
            lines.append(f" {tag} BND       X{j:<9d}{val}".rstrip())
        if np.isfinite(hi):
            lines.append(f" UP BND       X{j:<9d}{hi:<15.8g}".rstrip())
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"
