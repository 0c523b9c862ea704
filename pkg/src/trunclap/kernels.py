"""Backend selection for the stencil kernels.

The compiled extension (trunclap._kernels, Cython) is used when it imported
cleanly; otherwise the numpy fallback (trunclap._kernels_py) takes over. The
environment variable TRUNCLAP_KERNELS=cython|numpy forces a choice at import
time, and every entry point here also accepts backend=... for side-by-side
comparisons (the benchmark and the bitwise-equality tests use that).
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

_IMPLS = {"numpy": _kernels_py}
try:  # pragma: no cover - presence depends on the build
    from . import _kernels

    _IMPLS["cython"] = _kernels
except ImportError:  # pragma: no cover
    _kernels = None

_env = os.environ.get("TRUNCLAP_KERNELS", "").strip().lower()
if _env:
    if _env not in _IMPLS:
        raise ImportError(
            f"TRUNCLAP_KERNELS={_env!r} requested but that backend is unavailable "
            f"(have: {sorted(_IMPLS)})"
        )
    BACKEND = _env
else:
    BACKEND = "cython" if "cython" in _IMPLS else "numpy"


def available_backends() -> tuple:
    return tuple(sorted(_IMPLS))


def apply_grid(grid, values: np.ndarray, backend: str | None = None):
    """Evaluate max_d D^2_d at every interior node, in grid units.

    Returns (out, arg): the operator values and the first-argmax direction
    indices, freshly allocated.
    """
    impl = _IMPLS[backend or BACKEND]
    n = grid.n_interior
    out = np.empty(n)
    arg = np.empty(n, dtype=np.int32)
    impl.apply_max_second_diff(
        np.ascontiguousarray(values),
        grid.wp,
        grid.wm,
        grid.ws,
        grid._nbrp_safe,
        grid._nbrm_safe,
        out,
        arg,
    )
    return out, arg


def march_grid(
    grid,
    v: np.ndarray,
    f: np.ndarray,
    tau: float,
    max_steps: int,
    tol: float,
    window: int = 5000,
    backend: str | None = None,
):
    """Run the damped explicit relaxation in place on v; see _kernels_py.march."""
    impl = _IMPLS[backend or BACKEND]
    return impl.march(
        v,
        np.ascontiguousarray(f),
        float(tau),
        grid.wp,
        grid.wm,
        grid.ws,
        grid._nbrp_safe,
        grid._nbrm_safe,
        int(max_steps),
        float(tol),
        int(window),
    )
