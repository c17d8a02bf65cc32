# cython: language_level=3
"""Compiled batch kernels; same contract as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, NAN

cnp.import_array()


def aux_batch(M, V):
    cdef const double[:, :, :, ::1] m = np.ascontiguousarray(M, dtype=np.float64)
    cdef const double[:, ::1] v = np.ascontiguousarray(V, dtype=np.float64)
    cdef Py_ssize_t nb = v.shape[0], n = v.shape[1]
    Q_arr = np.empty(nb)
    N_arr = np.empty((nb, n))
    K_arr = np.empty((nb, n, n))
    cdef double[::1] q = Q_arr
    cdef double[:, ::1] nn = N_arr
    cdef double[:, :, ::1] kk = K_arr
    cdef Py_ssize_t b, i, j, k, l
    cdef double s, t
    with nogil:
        for b in range(nb):
            for i in range(n):
                for j in range(i, n):
                    s = 0.0
                    for k in range(n):
                        t = 0.0
                        for l in range(n):
                            t = t + m[i, j, k, l] * v[b, l]
                        s = s + t * v[b, k]
                    kk[b, i, j] = s
                    kk[b, j, i] = s
            t = 0.0
            for i in range(n):
                s = 0.0
                for j in range(n):
                    s = s + kk[b, i, j] * v[b, j]
                nn[b, i] = s
                t = t + s * v[b, i]
            q[b] = t
    return Q_arr, N_arr, K_arr


def metric_batch(Q, N, K, sign):
    cdef const double[::1] q = np.ascontiguousarray(Q, dtype=np.float64)
    cdef const double[:, ::1] nn = np.ascontiguousarray(N, dtype=np.float64)
    cdef const double[:, :, ::1] kk = np.ascontiguousarray(K, dtype=np.float64)
    cdef const double[::1] sg = np.ascontiguousarray(np.broadcast_to(sign, q.shape[0]), dtype=np.float64)
    cdef Py_ssize_t nb = nn.shape[0], n = nn.shape[1]
    F_arr = np.empty((nb, n, n))
    cdef double[:, :, ::1] f = F_arr
    cdef Py_ssize_t b, i, j
    cdef double a, scale
    with nogil:
        for b in range(nb):
            a = fabs(q[b])
            if a > 0.0:
                scale = sg[b] / (a * sqrt(a))
            else:
                scale = NAN
            for i in range(n):
                for j in range(n):
                    f[b, i, j] = (3.0 * q[b] * kk[b, i, j] - 2.0 * nn[b, i] * nn[b, j]) * scale
    return F_arr
