# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled stencil kernels.

Same contracts as trunclap._kernels_py (the numpy fallback); the two must
agree bit for bit. The second difference is accumulated as
(wp*up + wm*um) - ws*u and the max keeps the first (lowest-index) winner.
Boundary arm endpoints are encoded as neighbor index n and read from a
trailing zero slot, exactly like the fallback's extended-array gather.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs

cnp.import_array()


def apply_max_second_diff(const double[::1] u,
                          const double[:, ::1] wp, const double[:, ::1] wm,
                          const double[:, ::1] ws,
                          const int[:, ::1] nbrp_safe, const int[:, ::1] nbrm_safe,
                          double[::1] out, int[::1] arg):
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t m = wp.shape[1]
    cdef Py_ssize_t i, d
    cdef int jp, jm
    cdef double best, cand, up, um
    cdef int bd
    with nogil:
        for i in range(n):
            best = -INFINITY
            bd = 0
            for d in range(m):
                jp = nbrp_safe[i, d]
                jm = nbrm_safe[i, d]
                up = u[jp] if jp < n else 0.0
                um = u[jm] if jm < n else 0.0
                cand = (wp[i, d] * up + wm[i, d] * um) - ws[i, d] * u[i]
                if cand > best:
                    best = cand
                    bd = <int> d
            out[i] = best
            arg[i] = bd
    return np.asarray(out), np.asarray(arg)


def march(double[::1] v, const double[::1] f, double tau,
          const double[:, ::1] wp, const double[:, ::1] wm, const double[:, ::1] ws,
          const int[:, ::1] nbrp_safe, const int[:, ::1] nbrm_safe,
          long max_steps, double tol, long window):
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t m = wp.shape[1]
    cdef Py_ssize_t i, d
    cdef int jp, jm
    cdef double best, cand, up, um, res, a
    cdef long steps = 0
    cdef long ckpt = max_steps - window
    cdef double res_ckpt = INFINITY
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rbuf = np.empty(n)
    cdef double[::1] r = rbuf
    if ckpt < 0:
        ckpt = 0
    with nogil:
        while True:
            res = 0.0
            for i in range(n):
                best = -INFINITY
                for d in range(m):
                    jp = nbrp_safe[i, d]
                    jm = nbrm_safe[i, d]
                    up = v[jp] if jp < n else 0.0
                    um = v[jm] if jm < n else 0.0
                    cand = (wp[i, d] * up + wm[i, d] * um) - ws[i, d] * v[i]
                    if cand > best:
                        best = cand
                r[i] = best + f[i]
                a = fabs(r[i])
                if a > res:
                    res = a
            if steps == ckpt:
                res_ckpt = res
            if res < tol or steps >= max_steps:
                break
            for i in range(n):
                v[i] = v[i] + tau * r[i]
            steps += 1
    return steps, res, res_ckpt
