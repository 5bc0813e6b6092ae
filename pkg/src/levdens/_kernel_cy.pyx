# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled integration kernel.

Hot loop of the scattering solver: fourth-order Runge-Kutta for
psi'' = w(x) psi across one uniform-step region.  Mirrors the arithmetic
of the pure-Python fallback exactly.
"""

import numpy as np

COMPILED = True


def rk4_complex(double[::1] w_half, double h, double complex psi0,
                double complex dpsi0, double complex[::1] out):
    """See the fallback kernel for the contract; this one releases the GIL."""
    cdef Py_ssize_t n = (w_half.shape[0] - 1) // 2
    if out.shape[0] != n + 1:
        raise ValueError("output array length does not match region size")
    cdef double complex psi = psi0
    cdef double complex dpsi = dpsi0
    cdef double a = 0.5 * h
    cdef double s = h / 6.0
    cdef double w0, w1, w2
    cdef double complex k1p, k1d, k2p, k2d, k3p, k3d, k4p, k4d
    cdef Py_ssize_t i
    with nogil:
        out[0] = psi
        for i in range(n):
            w0 = w_half[2 * i]
            w1 = w_half[2 * i + 1]
            w2 = w_half[2 * i + 2]
            k1p = dpsi
            k1d = w0 * psi
            k2p = dpsi + a * k1d
            k2d = w1 * (psi + a * k1p)
            k3p = dpsi + a * k2d
            k3d = w1 * (psi + a * k2p)
            k4p = dpsi + h * k3d
            k4d = w2 * (psi + h * k3p)
            psi = psi + s * (k1p + 2.0 * (k2p + k3p) + k4p)
            dpsi = dpsi + s * (k1d + 2.0 * (k2d + k3d) + k4d)
            out[i + 1] = psi
    return psi, dpsi
