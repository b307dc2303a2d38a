# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels; same contracts as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, fabs, log1p, sqrt

cnp.import_array()

cdef double LOSS_CAP = 27.631021115928547


cdef inline double _softplus(double z) nogil:
    if z > 0:
        return z + log1p(exp(-z))
    return log1p(exp(z))


cdef inline double _sigmoid(double z) nogil:
    cdef double e = exp(-fabs(z))
    if z >= 0:
        return 1.0 / (1.0 + e)
    return e / (1.0 + e)


def scores(const double[:, ::1] X, const double[:, ::1] center,
           const double[::1] radius, const double[::1] scale):
    cdef Py_ssize_t B = X.shape[0], K = center.shape[0], n = X.shape[1]
    cdef Py_ssize_t b, i, a
    cdef double acc, t
    out = np.empty((B, K), dtype=np.float64)
    cdef double[:, ::1] S = out
    with nogil:
        for b in range(B):
            for i in range(K):
                acc = 0.0
                for a in range(n):
                    t = center[i, a] - X[b, a]
                    acc += t * t
                S[b, i] = scale[i] * (radius[i] - sqrt(acc))
    return out


def cls_loss_grad(const double[:, ::1] X, const double[:, ::1] center,
                  const double[::1] radius, const double[::1] scale,
                  const cnp.int64_t[::1] pos):
    cdef Py_ssize_t B = X.shape[0], K = center.shape[0], n = X.shape[1]
    cdef Py_ssize_t b, i, a
    cdef double acc, t, D, m, s, raw, g, h, y, total = 0.0
    cdef double norm = 1.0 / (<double>B * <double>K)

    S_arr = np.empty((B, K), dtype=np.float64)
    dX_arr = np.zeros((B, n), dtype=np.float64)
    dR_arr = np.zeros(K, dtype=np.float64)
    E_arr = np.zeros((K, n), dtype=np.float64)
    dS_arr = np.zeros(K, dtype=np.float64)
    cdef double[:, ::1] S = S_arr
    cdef double[:, ::1] dX = dX_arr
    cdef double[::1] dR = dR_arr
    cdef double[:, ::1] E = E_arr
    cdef double[::1] dScale = dS_arr

    with nogil:
        for b in range(B):
            for i in range(K):
                acc = 0.0
                for a in range(n):
                    t = center[i, a] - X[b, a]
                    acc += t * t
                D = sqrt(acc)
                m = radius[i] - D
                s = scale[i] * m
                S[b, i] = s
                y = 1.0 if pos[b] == i else 0.0
                raw = _softplus(-s) if y > 0 else _softplus(s)
                if raw < LOSS_CAP:
                    total += raw
                    g = (_sigmoid(s) - y) * norm
                else:
                    total += LOSS_CAP
                    continue
                h = g * scale[i]
                dR[i] += h
                dScale[i] += g * m
                for a in range(n):
                    t = h * (center[i, a] - X[b, a]) / D
                    dX[b, a] += t
                    E[i, a] += t
    return total * norm, S_arr, dX_arr, dR_arr, E_arr, dS_arr
