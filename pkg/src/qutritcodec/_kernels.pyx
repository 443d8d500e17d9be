# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-sample decoder statistics.

Same contract as ``qutritcodec._kernels_py.decoder_stats``.
"""

import numpy as np

cdef inline double _abs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


def decoder_stats(const double complex[:, :, ::1] ks, const double complex[:, ::1] q):
    cdef Py_ssize_t n = q.shape[0]
    cdef Py_ssize_t r = ks.shape[0]
    if ks.shape[1] != 4 or ks.shape[2] != 3:
        raise ValueError("operation elements must have shape (r, 4, 3)")
    if q.shape[1] != 4:
        raise ValueError("inputs must have shape (n, 4)")

    p_arr = np.empty(n, dtype=np.float64)
    f1_arr = np.empty(n, dtype=np.float64)
    f2_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] p = p_arr
    cdef double[::1] f1 = f1_arr
    cdef double[::1] f2 = f2_arr

    cdef Py_ssize_t s, k, i
    cdef double complex a1, b1, a2, b2, v0, v1, v2
    cdef double complex o[4]
    cdef double ps, n1, n2

    with nogil:
        for s in range(n):
            a1 = q[s, 0]
            b1 = q[s, 1]
            a2 = q[s, 2]
            b2 = q[s, 3]
            v0 = a1 * a2
            v1 = a1 * b2
            v2 = b1 * b2
            ps = 0.0
            n1 = 0.0
            n2 = 0.0
            for k in range(r):
                for i in range(4):
                    o[i] = ks[k, i, 0] * v0 + ks[k, i, 1] * v1 + ks[k, i, 2] * v2
                    ps = ps + _abs2(o[i])
                # output index 2*i1 + i2; project qubit 1 onto (a1, b1)
                n1 = n1 + _abs2(a1.conjugate() * o[0] + b1.conjugate() * o[2])
                n1 = n1 + _abs2(a1.conjugate() * o[1] + b1.conjugate() * o[3])
                n2 = n2 + _abs2(a2.conjugate() * o[0] + b2.conjugate() * o[1])
                n2 = n2 + _abs2(a2.conjugate() * o[2] + b2.conjugate() * o[3])
            p[s] = ps
            f1[s] = n1
            f2[s] = n2
    return p_arr, f1_arr, f2_arr
