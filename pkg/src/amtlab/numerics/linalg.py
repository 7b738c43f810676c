"""Dense linear solves with partial pivoting."""

from __future__ import annotations

import numpy as np

PIVOT_THRESHOLD = 1e-13


class SingularSystemError(np.linalg.LinAlgError):
    pass


def solve_linear_system(A, b, pivot_threshold=PIVOT_THRESHOLD):
    """Solve ``A x = b`` by Gaussian elimination with partial pivoting.

    A pivot smaller than ``pivot_threshold`` times the largest entry of ``A``
    is treated as numerical singularity.  One step of iterative refinement is
    applied to tighten the residual.
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"A must be square, got shape {A.shape}")
    n = A.shape[0]
    if n < 1 or b.shape != (n,):
        raise ValueError(f"incompatible shapes {A.shape} and {b.shape}")

    scale = np.max(np.abs(A))
    if scale == 0.0:
        raise SingularSystemError("zero matrix")
    lu = A.copy()
    perm = np.arange(n)
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) < pivot_threshold * scale:
            raise SingularSystemError(f"pivot {abs(lu[p, k]):.3e} below threshold at column {k}")
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        lu[k + 1 :, k] /= lu[k, k]
        lu[k + 1 :, k + 1 :] -= np.outer(lu[k + 1 :, k], lu[k, k + 1 :])

    def lu_solve(rhs):
        y = rhs[perm].copy()
        for i in range(1, n):
            y[i] -= lu[i, :i] @ y[:i]
        for i in range(n - 1, -1, -1):
            y[i] = (y[i] - lu[i, i + 1 :] @ y[i + 1 :]) / lu[i, i]
        return y

    x = lu_solve(b)
    x += lu_solve(b - A @ x)
    return x
