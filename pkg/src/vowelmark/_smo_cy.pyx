# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled sequential minimal optimization kernel.

Mirrors _smo_py.smo_solve step for step; see that module for the
reference semantics.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


cdef class _State:
    cdef double[:, ::1] K
    cdef double[::1] y
    cdef double[::1] alpha
    cdef double[::1] E
    cdef double b
    cdef double C
    cdef double tol
    cdef double eps
    cdef Py_ssize_t n


cdef bint _take_step(_State st, Py_ssize_t i1, Py_ssize_t i2):
    cdef double a1, a2, y1, y2, E1, E2, s, L, H
    cdef double k11, k12, k22, eta, a2new, a1new
    cdef double v1, v2, f1, f2, L1, H1, Lobj, Hobj
    cdef double d1, d2, b1, b2, bnew, db
    cdef Py_ssize_t k

    if i1 == i2:
        return False
    a1 = st.alpha[i1]
    a2 = st.alpha[i2]
    y1 = st.y[i1]
    y2 = st.y[i2]
    E1 = st.E[i1]
    E2 = st.E[i2]
    s = y1 * y2
    if y1 != y2:
        L = a2 - a1
        if L < 0.0:
            L = 0.0
        H = st.C + a2 - a1
        if H > st.C:
            H = st.C
    else:
        L = a1 + a2 - st.C
        if L < 0.0:
            L = 0.0
        H = a1 + a2
        if H > st.C:
            H = st.C
    if L >= H:
        return False
    k11 = st.K[i1, i1]
    k12 = st.K[i1, i2]
    k22 = st.K[i2, i2]
    eta = k11 + k22 - 2.0 * k12
    if eta > 0.0:
        a2new = a2 + y2 * (E1 - E2) / eta
        if a2new < L:
            a2new = L
        elif a2new > H:
            a2new = H
    else:
        v1 = E1 + y1 - st.b
        v2 = E2 + y2 - st.b
        f1 = y1 * v1 - a1 * k11 - s * a2 * k12
        f2 = y2 * v2 - s * a1 * k12 - a2 * k22
        L1 = a1 + s * (a2 - L)
        H1 = a1 + s * (a2 - H)
        Lobj = (L1 * f1 + L * f2 + 0.5 * L1 * L1 * k11
                + 0.5 * L * L * k22 + s * L * L1 * k12)
        Hobj = (H1 * f1 + H * f2 + 0.5 * H1 * H1 * k11
                + 0.5 * H * H * k22 + s * H * H1 * k12)
        if Lobj < Hobj - st.eps:
            a2new = L
        elif Lobj > Hobj + st.eps:
            a2new = H
        else:
            a2new = a2
    if fabs(a2new - a2) < st.eps * (a2new + a2 + st.eps):
        return False
    a1new = a1 + s * (a2 - a2new)
    if a1new < 0.0:
        a2new += s * a1new
        a1new = 0.0
    elif a1new > st.C:
        a2new += s * (a1new - st.C)
        a1new = st.C

    d1 = y1 * (a1new - a1)
    d2 = y2 * (a2new - a2)
    b1 = st.b - E1 - d1 * k11 - d2 * k12
    b2 = st.b - E2 - d1 * k12 - d2 * k22
    if 0.0 < a1new < st.C:
        bnew = b1
    elif 0.0 < a2new < st.C:
        bnew = b2
    else:
        bnew = 0.5 * (b1 + b2)
    db = bnew - st.b

    for k in range(st.n):
        st.E[k] = st.E[k] + d1 * st.K[i1, k] + d2 * st.K[i2, k] + db
    st.alpha[i1] = a1new
    st.alpha[i2] = a2new
    st.b = bnew
    return True


cdef int _examine(_State st, Py_ssize_t i2):
    cdef double y2 = st.y[i2]
    cdef double a2 = st.alpha[i2]
    cdef double E2 = st.E[i2]
    cdef double r2 = E2 * y2
    cdef Py_ssize_t i1, k, best
    cdef double gap, best_gap
    cdef bint any_nb

    if not ((r2 < -st.tol and a2 < st.C) or (r2 > st.tol and a2 > 0.0)):
        return 0
    # heuristic 1: largest |E1 - E2| over non-bound points (first maximum)
    best = -1
    best_gap = -1.0
    any_nb = False
    for k in range(st.n):
        if 0.0 < st.alpha[k] < st.C:
            any_nb = True
            gap = fabs(st.E[k] - E2)
            if gap > best_gap:
                best_gap = gap
                best = k
    if best >= 0 and any_nb:
        if _take_step(st, best, i2):
            return 1
    for k in range(st.n):
        if 0.0 < st.alpha[k] < st.C:
            if _take_step(st, k, i2):
                return 1
    for k in range(st.n):
        if _take_step(st, k, i2):
            return 1
    return 0


def smo_solve(K, y, double C, double tol=1e-3, double eps=1e-10,
              max_passes=None):
    """Compiled twin of vowelmark._smo_py.smo_solve."""
    cdef _State st = _State()
    K = np.ascontiguousarray(K, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = y.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] alpha = np.zeros(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] E = -y.copy()

    st.K = K
    st.y = y
    st.alpha = alpha
    st.E = E
    st.b = 0.0
    st.C = C
    st.tol = tol
    st.eps = eps
    st.n = n

    cdef long cap
    if max_passes is None:
        cap = max(100, 10 * n)
    else:
        cap = max_passes

    cdef bint examine_all = True
    cdef long num_changed = 0
    cdef long passes = 0
    cdef Py_ssize_t i
    while (num_changed > 0 or examine_all) and passes < cap:
        num_changed = 0
        if examine_all:
            for i in range(n):
                num_changed += _examine(st, i)
        else:
            for i in range(n):
                if 0.0 < st.alpha[i] < st.C:
                    num_changed += _examine(st, i)
        if examine_all:
            examine_all = False
        elif num_changed == 0:
            examine_all = True
        passes += 1
    return alpha, st.b, int(passes)
