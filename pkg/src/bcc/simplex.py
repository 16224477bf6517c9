"""Dense tableau simplex for small LPs in the form ``min c.x, A x >= b, x >= 0``.

Two phases with artificial variables; Bland's smallest-index rule for both
entering and leaving variables, so degenerate covering LPs cannot cycle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TOL = 1e-7


class SimplexError(RuntimeError):
    pass


class InfeasibleError(SimplexError):
    pass


class UnboundedError(SimplexError):
    pass


@dataclass
class LPResult:
    value: float
    x: np.ndarray
    iterations: int


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    for i in range(T.shape[0]):
        if i != row and T[i, col] != 0.0:
            T[i] -= T[i, col] * T[row]


def _run(T: np.ndarray, basis: list[int], allowed: int, cap: int, iters: int) -> int:
    """Minimize the objective held in the last row of ``T`` (reduced costs)."""
    m = T.shape[0] - 1
    while True:
        obj = T[-1, :allowed]
        cand = np.nonzero(obj < -TOL)[0]
        if cand.size == 0:
            return iters
        col = int(cand[0])
        column = T[:m, col]
        pos = np.nonzero(column > TOL)[0]
        if pos.size == 0:
            raise UnboundedError("objective is unbounded below")
        ratios = T[pos, -1] / column[pos]
        best = ratios.min()
        ties = pos[ratios <= best + TOL]
        row = int(min(ties, key=lambda i: basis[i]))
        _pivot(T, row, col)
        basis[row] = col
        iters += 1
        if iters > cap:
            raise SimplexError(f"iteration cap {cap} exceeded")


def solve_covering_lp(c, A, b) -> LPResult:
    """Solve ``min c.x`` subject to ``A x >= b``, ``x >= 0`` (requires ``b >= 0``).

    Raises
    ------
    InfeasibleError, UnboundedError, SimplexError
    """
    c = np.asarray(c, dtype=float)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float)
    m, n = A.shape if A.size else (0, c.size)
    if m == 0:
        if np.any(c < -TOL):
            raise UnboundedError("objective is unbounded below")
        return LPResult(0.0, np.zeros(n), 0)
    if np.any(b < 0):
        raise ValueError("right-hand side must be nonnegative")
    cap = 10 * (m + n)
    # columns: x (n) | surplus (m) | artificial (m) | rhs
    width = n + 2 * m + 1
    T = np.zeros((m + 1, width))
    T[:m, :n] = A
    T[:m, n : n + m] = -np.eye(m)
    T[:m, n + m : n + 2 * m] = np.eye(m)
    T[:m, -1] = b
    basis = list(range(n + m, n + 2 * m))
    # phase I: minimize the sum of artificials
    T[-1, :] = -T[:m, :].sum(axis=0)
    T[-1, n + m : n + 2 * m] = 0.0
    iters = _run(T, basis, n + 2 * m, cap, 0)
    if -T[-1, -1] > TOL:
        raise InfeasibleError("constraints are infeasible")
    # drive leftover artificials out of the basis where possible
    for i, bv in enumerate(basis):
        if bv >= n + m:
            nz = np.nonzero(np.abs(T[i, : n + m]) > TOL)[0]
            if nz.size:
                _pivot(T, i, int(nz[0]))
                basis[i] = int(nz[0])
    # phase II on original costs, artificials frozen out
    T[-1, :] = 0.0
    T[-1, :n] = c
    for i, bv in enumerate(basis):
        if bv < n + m and T[-1, bv] != 0.0:
            T[-1] -= T[-1, bv] * T[i]
    iters = _run(T, basis, n + m, cap, iters)
    x = np.zeros(n + 2 * m)
    for i, bv in enumerate(basis):
        x[bv] = T[i, -1]
    xs = x[:n]
    return LPResult(float(c @ xs), xs, iters)
