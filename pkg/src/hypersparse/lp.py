"""Dense tableau dual simplex for ``min c.x  s.t.  A x <= b, x >= 0`` with ``c >= 0``.

With ``c >= 0`` the all-slack basis is dual feasible, so no phase one is
needed.  Rows can be appended to an optimal tableau and the dual simplex
resumed, which is what row generation needs.
"""

from __future__ import annotations

import numpy as np


class LPError(RuntimeError):
    def __init__(self, msg: str, iterations: int = 0, **diag):
        self.iterations = iterations
        self.diagnostics = diag
        extra = ", ".join(f"{k}={v}" for k, v in diag.items())
        super().__init__(f"{msg} (after {iterations} pivots{', ' + extra if extra else ''})")


class DualSimplex:
    """Tableau over structural plus slack columns.

    ``T @ [x; s] = rhs`` holds for the current basis, with ``T[:, basis]`` the
    identity.  ``dj`` holds reduced costs (all >= 0 while dual feasible).
    """

    def __init__(self, c, A, b, pivot_tol: float = 1e-9, feas_tol: float = 1e-9, max_iter: int = 200000):
        c = np.asarray(c, dtype=float)
        if np.any(c < 0):
            raise ValueError("cost vector must be nonnegative")
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).reshape(-1)
        self.nvar = c.shape[0]
        rows = A.shape[0]
        if A.shape[1] != self.nvar or b.shape[0] != rows:
            raise ValueError("inconsistent LP dimensions")
        self.c_full = np.concatenate([c, np.zeros(rows)])
        self.T = np.hstack([A, np.eye(rows)])
        self.rhs = b.copy()
        self.dj = self.c_full.copy()
        self.basis = np.arange(self.nvar, self.nvar + rows)
        self.pivot_tol = pivot_tol
        self.feas_tol = feas_tol
        self.max_iter = max_iter
        self.iterations = 0

    @property
    def rows(self) -> int:
        return self.T.shape[0]

    def add_rows(self, A_new, b_new) -> None:
        """Append ``A_new x <= b_new`` with fresh slacks, expressed in the current basis."""
        A_new = np.atleast_2d(np.asarray(A_new, dtype=float))
        b_new = np.asarray(b_new, dtype=float).reshape(-1)
        k = A_new.shape[0]
        if k == 0:
            return
        cols = self.T.shape[1]
        full = np.zeros((k, cols))
        full[:, : self.nvar] = A_new
        rhs = b_new.copy()
        coef = full[:, self.basis]  # (k, rows)
        nz = np.any(coef != 0, axis=0)
        if np.any(nz):
            full -= coef[:, nz] @ self.T[nz]
            rhs -= coef[:, nz] @ self.rhs[nz]
        full[:, self.basis] = 0.0
        self.T = np.vstack([np.hstack([self.T, np.zeros((self.rows, k))]), np.hstack([full, np.eye(k)])])
        self.rhs = np.concatenate([self.rhs, rhs])
        self.dj = np.concatenate([self.dj, np.zeros(k)])
        self.c_full = np.concatenate([self.c_full, np.zeros(k)])
        self.basis = np.concatenate([self.basis, np.arange(cols, cols + k)])

    def _pivot(self, r: int, j: int) -> None:
        T = self.T
        piv = T[r, j]
        T[r] /= piv
        self.rhs[r] /= piv
        col = T[:, j].copy()
        col[r] = 0.0
        nz = np.flatnonzero(np.abs(col) > 0)
        if nz.size:
            T[nz] -= np.outer(col[nz], T[r])
            self.rhs[nz] -= col[nz] * self.rhs[r]
        T[nz, j] = 0.0
        self.dj -= self.dj[j] * T[r]
        self.dj[j] = 0.0
        self.basis[r] = j
        self.iterations += 1

    def solve(self) -> None:
        stall = 0
        last_obj = -np.inf
        while True:
            bad = np.flatnonzero(self.rhs < -self.feas_tol)
            if bad.size == 0:
                return
            if self.iterations >= self.max_iter:
                raise LPError("iteration limit reached", self.iterations, rows=self.rows)
            bland = stall > 50
            r = int(bad[0]) if bland else int(bad[np.argmin(self.rhs[bad])])
            row = self.T[r]
            cand = np.flatnonzero(row < -self.pivot_tol)
            if cand.size == 0:
                raise LPError("primal infeasible", self.iterations, row=r, rhs=float(self.rhs[r]))
            ratios = np.maximum(self.dj[cand], 0.0) / -row[cand]
            best = ratios.min()
            ties = cand[ratios <= best + 1e-12 * max(1.0, best)]
            if bland:
                j = int(ties[0])
            else:
                j = int(ties[np.argmin(row[ties])])
            self._pivot(r, j)
            obj = self.objective
            if obj > last_obj + 1e-12:
                stall = 0
                last_obj = obj
            else:
                stall += 1

    @property
    def objective(self) -> float:
        return float(self.c_full[self.basis] @ self.rhs)

    def primal(self) -> np.ndarray:
        x = np.zeros(self.T.shape[1])
        x[self.basis] = self.rhs
        return np.maximum(x[: self.nvar], 0.0)
