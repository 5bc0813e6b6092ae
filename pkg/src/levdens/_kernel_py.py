"""Pure-Python integration kernel.

Fallback used when the compiled extension is unavailable.  Same contract
and same arithmetic order as the Cython version so results agree to
rounding.
"""

from __future__ import annotations

import numpy as np

COMPILED = False


def rk4_complex(w_half, h, psi0, dpsi0, out):
    """Integrate psi'' = w(x) psi across one uniform-step region.

    Classical fourth-order Runge-Kutta on the first-order system
    (psi, psi').  ``w_half`` holds w at the region's nodes and midpoints
    (length 2n+1 for n steps); ``h`` is the signed step; ``out`` (length
    n+1) receives psi at the nodes, starting with the seed.  Returns the
    final (psi, psi').
    """
    w = memoryview(np.ascontiguousarray(w_half, dtype=np.float64)).tolist()
    n = (len(w) - 1) // 2
    if out.shape[0] != n + 1:
        raise ValueError("output array length does not match region size")
    psi = complex(psi0)
    dpsi = complex(dpsi0)
    out[0] = psi
    a = 0.5 * h
    s = h / 6.0
    for i in range(n):
        w0 = w[2 * i]
        w1 = w[2 * i + 1]
        w2 = w[2 * i + 2]
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
