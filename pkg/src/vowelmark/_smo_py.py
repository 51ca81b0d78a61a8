"""Pure-numpy sequential minimal optimization solver.

Reference implementation of the compiled twin in _smo_cy.pyx; both follow
the same deterministic working-set rules (first-maximum |E1 - E2| over
non-bound points, then sweeps from index 0) so results agree across
backends to numerical noise.
"""

from __future__ import annotations

import numpy as np


def smo_solve(K: np.ndarray, y: np.ndarray, C: float,
              tol: float = 1e-3, eps: float = 1e-10,
              max_passes: int | None = None):
    """Solve the dual SVM problem on a precomputed kernel matrix.

    Returns (alpha, bias, passes) with 0 <= alpha_i <= C and
    sum(alpha * y) == 0 maintained by construction.
    """
    n = y.size
    if max_passes is None:
        max_passes = max(100, 10 * n)
    alpha = np.zeros(n)
    E = -y.astype(float)
    b = 0.0

    def take_step(i1: int, i2: int) -> bool:
        nonlocal b
        if i1 == i2:
            return False
        a1 = alpha[i1]
        a2 = alpha[i2]
        y1 = y[i1]
        y2 = y[i2]
        E1 = E[i1]
        E2 = E[i2]
        s = y1 * y2
        if y1 != y2:
            L = max(0.0, a2 - a1)
            H = min(C, C + a2 - a1)
        else:
            L = max(0.0, a1 + a2 - C)
            H = min(C, a1 + a2)
        if L >= H:
            return False
        k11 = K[i1, i1]
        k12 = K[i1, i2]
        k22 = K[i2, i2]
        eta = k11 + k22 - 2.0 * k12
        if eta > 0.0:
            a2new = a2 + y2 * (E1 - E2) / eta
            if a2new < L:
                a2new = L
            elif a2new > H:
                a2new = H
        else:
            # flat or concave direction: compare the objective at both ends
            v1 = E1 + y1 - b
            v2 = E2 + y2 - b
            f1 = y1 * v1 - a1 * k11 - s * a2 * k12
            f2 = y2 * v2 - s * a1 * k12 - a2 * k22
            L1 = a1 + s * (a2 - L)
            H1 = a1 + s * (a2 - H)
            Lobj = (L1 * f1 + L * f2 + 0.5 * L1 * L1 * k11
                    + 0.5 * L * L * k22 + s * L * L1 * k12)
            Hobj = (H1 * f1 + H * f2 + 0.5 * H1 * H1 * k11
                    + 0.5 * H * H * k22 + s * H * H1 * k12)
            if Lobj < Hobj - eps:
                a2new = L
            elif Lobj > Hobj + eps:
                a2new = H
            else:
                a2new = a2
        if abs(a2new - a2) < eps * (a2new + a2 + eps):
            return False
        a1new = a1 + s * (a2 - a2new)
        if a1new < 0.0:
            a2new += s * a1new
            a1new = 0.0
        elif a1new > C:
            a2new += s * (a1new - C)
            a1new = C

        d1 = y1 * (a1new - a1)
        d2 = y2 * (a2new - a2)
        b1 = b - E1 - d1 * k11 - d2 * k12
        b2 = b - E2 - d1 * k12 - d2 * k22
        if 0.0 < a1new < C:
            bnew = b1
        elif 0.0 < a2new < C:
            bnew = b2
        else:
            bnew = 0.5 * (b1 + b2)
        db = bnew - b

        E += d1 * K[i1]
        E += d2 * K[i2]
        E += db
        alpha[i1] = a1new
        alpha[i2] = a2new
        b = bnew
        return True

    def examine(i2: int) -> int:
        y2 = y[i2]
        a2 = alpha[i2]
        E2 = E[i2]
        r2 = E2 * y2
        if not ((r2 < -tol and a2 < C) or (r2 > tol and a2 > 0.0)):
            return 0
        nb = np.nonzero((alpha > 0.0) & (alpha < C))[0]
        if nb.size > 1:
            i1 = int(nb[np.argmax(np.abs(E[nb] - E2))])
            if take_step(i1, i2):
                return 1
        for i1 in nb:
            if take_step(int(i1), i2):
                return 1
        for i1 in range(n):
            if take_step(i1, i2):
                return 1
        return 0

    examine_all = True
    num_changed = 0
    passes = 0
    while (num_changed > 0 or examine_all) and passes < max_passes:
        num_changed = 0
        if examine_all:
            for i in range(n):
                num_changed += examine(i)
        else:
            for i in range(n):
                if 0.0 < alpha[i] < C:
                    num_changed += examine(i)
        if examine_all:
            examine_all = False
        elif num_changed == 0:
            examine_all = True
        passes += 1
    return alpha, b, passes
