"""Kernel selection and sweep parallelism.

The integration kernel exists twice: a Cython extension and a pure-Python
fallback with identical semantics.  The compiled one is picked at import
when present; set ``LEVDENS_KERNEL=py`` to force the fallback (used by the
benchmark and the parity tests).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

if os.environ.get("LEVDENS_KERNEL", "").lower() in ("py", "python"):
    from . import _kernel_py as kernel
else:
    try:
        from . import _kernel_cy as kernel  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernel_py as kernel

COMPILED = kernel.COMPILED
rk4_complex = kernel.rk4_complex


def get_kernel(name):
    """Return a kernel module by name ('cy' or 'py'); used by the benchmark."""
    if name == "py":
        from . import _kernel_py

        return _kernel_py
    if name == "cy":
        from . import _kernel_cy  # type: ignore[attr-defined]

        return _kernel_cy
    raise ValueError(f"unknown kernel {name!r}")


def thread_count():
    """Worker count for k-sweeps; capped by the LEVINSON_THREADS variable."""
    cap = os.environ.get("LEVINSON_THREADS")
    n = min(os.cpu_count() or 1, 8)
    if cap is not None:
        try:
            n = max(1, min(n, int(cap)))
        except ValueError:
            pass
    return n


def parallel_map(fn, items):
    """Map ``fn`` over ``items`` preserving order.

    Uses a thread pool when more than one worker is allowed; the compiled
    kernel releases the GIL, so sweeps scale with cores.  Results are
    collected by index, so the output is deterministic either way.
    """
    items = list(items)
    n = thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
