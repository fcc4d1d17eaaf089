"""Dense two-phase primal simplex for linear programs with bounded variables.

Solves   minimize c @ x   subject to   a @ x = b,   lower <= x <= upper,
where upper bounds may be +inf (lower bounds must be finite). Inequality
constraints are the caller's job (add slack/surplus columns). Pivoting uses
Dantzig's rule with lowest-index tie-breaks and falls back to Bland's rule
after a run of degenerate steps, so the method is deterministic and finite.

Sized for the planner's instances (tens of rows, a few hundred columns); the
basis is refactorized from scratch every iteration, trading speed for
numerical freshness.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_BLAND_TRIGGER = 50  # consecutive degenerate pivots before switching rules


@dataclass
class LpResult:
    status: str
    x: np.ndarray | None
    objective: float | None


class _Lp:
    def __init__(self, c, a, b, lower, upper, tol):
        self.c = np.asarray(c, dtype=float)
        self.a = np.asarray(a, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        self.tol = tol
        self.m, self.n = self.a.shape
        if not np.isfinite(self.lower).all():
            raise ValueError("lower bounds must be finite")
        if (self.upper < self.lower - tol).any():
            raise ValueError("upper bound below lower bound")

    def _values(self, basis, at_upper):
        """Nonbasic values at their bounds and the implied basic values."""
        x = np.where(at_upper, self.upper, self.lower)
        nonbasic = np.setdiff1d(np.arange(self.cols), basis, assume_unique=False)
        rhs = self.b - self.a_ext[:, nonbasic] @ x[nonbasic]
        xb = np.linalg.solve(self.a_ext[:, basis], rhs)
        x[basis] = xb
        return x, xb

    def _iterate(self, cost, basis, at_upper):
        """Run the simplex loop; mutates basis/at_upper, returns status."""
        degenerate_run = 0
        for _ in range(20000):
            _, xb = self._values(basis, at_upper)
            bmat = self.a_ext[:, basis]
            y = np.linalg.solve(bmat.T, cost[basis])
            reduced = cost - self.a_ext.T @ y
            in_basis = np.zeros(self.cols, dtype=bool)
            in_basis[basis] = True
            can_rise = ~in_basis & ~at_upper & (reduced < -self.tol)
            can_fall = ~in_basis & at_upper & (reduced > self.tol)
            eligible = np.flatnonzero(can_rise | can_fall)
            if eligible.size == 0:
                return OPTIMAL
            if degenerate_run >= _BLAND_TRIGGER:
                enter = int(eligible[0])  # Bland: lowest index
            else:
                enter = int(eligible[np.argmax(np.abs(reduced[eligible]))])
            direction = -1.0 if at_upper[enter] else 1.0

            w = np.linalg.solve(bmat, self.a_ext[:, enter])
            step = self.upper[enter] - self.lower[enter]  # own-bound flip limit
            leave_pos = -1
            leave_to_upper = False
            coeffs = -direction * w
            for i in range(self.m):
                coeff = coeffs[i]
                var = basis[i]
                if coeff > self.tol:
                    room = self.upper[var] - xb[i]
                elif coeff < -self.tol:
                    room = xb[i] - self.lower[var]
                    coeff = -coeff
                else:
                    continue
                ratio = max(room, 0.0) / coeff
                if ratio < step - self.tol or (
                    ratio < step + self.tol
                    and leave_pos >= 0
                    and var < basis[leave_pos]
                ):
                    step = ratio
                    leave_pos = i
                    leave_to_upper = coeffs[i] > 0
            if not np.isfinite(step):
                return UNBOUNDED
            degenerate_run = degenerate_run + 1 if step <= self.tol else 0
            if leave_pos < 0:
                at_upper[enter] = ~at_upper[enter]  # bound flip, basis unchanged
                continue
            leaving = basis[leave_pos]
            basis[leave_pos] = enter
            at_upper[enter] = False
            at_upper[leaving] = leave_to_upper
        raise RuntimeError("simplex iteration limit reached")

    def solve(self):
        # Phase 1: artificials sized to the residual at the all-lower point.
        x0 = self.lower.copy()
        resid = self.b - self.a @ x0
        signs = np.where(resid >= 0, 1.0, -1.0)
        self.a_ext = np.hstack([self.a, np.diag(signs)])
        self.cols = self.n + self.m
        self.lower = np.concatenate([self.lower, np.zeros(self.m)])
        self.upper = np.concatenate([self.upper, np.full(self.m, np.inf)])
        basis = np.arange(self.n, self.n + self.m)
        at_upper = np.zeros(self.cols, dtype=bool)

        phase1_cost = np.concatenate([np.zeros(self.n), np.ones(self.m)])
        status = self._iterate(phase1_cost, basis, at_upper)
        if status != OPTIMAL:
            return LpResult(INFEASIBLE, None, None)
        x, _ = self._values(basis, at_upper)
        feas_tol = 1e-7 * max(1.0, float(np.abs(self.b).max()))
        if x[self.n:].sum() > feas_tol:
            return LpResult(INFEASIBLE, None, None)

        # Phase 2: pin artificials at zero and optimize the real objective.
        self.upper[self.n:] = 0.0
        phase2_cost = np.concatenate([self.c, np.zeros(self.m)])
        status = self._iterate(phase2_cost, basis, at_upper)
        if status == UNBOUNDED:
            return LpResult(UNBOUNDED, None, None)
        x, _ = self._values(basis, at_upper)
        xs = x[: self.n]
        return LpResult(OPTIMAL, xs, float(self.c @ xs))


def solve_bounded_lp(c, a, b, lower, upper, tol: float = 1e-9) -> LpResult:
    """Minimize ``c @ x`` over ``a @ x = b``, ``lower <= x <= upper``."""
    return _Lp(c, a, b, lower, upper, tol).solve()
