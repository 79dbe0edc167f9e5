"""Dense phase-1 simplex for feasibility of ``A w = b, w >= 0``.

Uses Bland's rule, so it cannot cycle. Besides a feasible point it returns
the simplex multipliers of the phase-1 problem, which form a Farkas
certificate when the system is infeasible.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LPError

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-12
COST_TOL = 1e-12


@dataclass
class Phase1Result:
    feasible: bool
    x: np.ndarray  # values of the structural variables
    objective: float  # sum of artificial variables at the optimum
    duals: np.ndarray  # y with A^T y <= 0 and b^T y = objective
    iterations: int


def phase1(A, b, feas_tol: float = FEAS_TOL, max_iter: int | None = None) -> Phase1Result:
    """Minimize the total artificial slack of ``A w + s = b``.

    The problem is feasible iff the optimum is below ``feas_tol``. The
    returned multipliers satisfy ``A^T y <= 0`` (up to ``COST_TOL``) and
    ``b^T y = objective``, so ``y`` separates ``b`` from the cone ``A w``
    whenever the objective is positive.
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    m, n = A.shape
    if b.shape != (m,):
        raise ValueError(f"b has shape {b.shape}, expected ({m},)")
    sign = np.where(b < 0, -1.0, 1.0)
    A *= sign[:, None]
    b *= sign

    # tableau columns: structural (n), artificial (m), rhs
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    # reduced-cost row for cost 1 on artificials, expressed in the artificial basis
    T[m, :n] = -A.sum(axis=0)
    T[m, -1] = -b.sum()
    basis = np.arange(n, n + m)

    if max_iter is None:
        max_iter = 50 * (n + m) + 1000
    it = 0
    while True:
        costs = T[m, :n + m]
        candidates = np.flatnonzero(costs < -COST_TOL)
        if len(candidates) == 0:
            break
        if it >= max_iter:
            raise LPError("simplex iteration limit reached", residual=float(-T[m, -1]))
        j = candidates[0]  # Bland: lowest index entering
        col = T[:m, j]
        rows = np.flatnonzero(col > PIVOT_TOL)
        if len(rows) == 0:
            # objective is bounded below by zero, so this only happens on garbage input
            raise LPError("phase-1 problem reported unbounded", residual=float(-T[m, -1]))
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-15 * max(1.0, abs(best))]
        r = ties[np.argmin(basis[ties])]  # Bland: lowest basic index leaving
        T[r] /= T[r, j]
        others = np.arange(m + 1) != r
        T[others] -= np.outer(T[others, j], T[r])
        basis[r] = j
        it += 1

    x = np.zeros(n + m)
    x[basis] = T[:m, -1]
    objective = float(x[n:].sum())
    # artificial reduced cost r_i = 1 - y_i
    y = (1.0 - T[m, n:n + m]) * sign
    return Phase1Result(
        feasible=objective <= feas_tol,
        x=x[:n],
        objective=objective,
        duals=y,
        iterations=it,
    )
