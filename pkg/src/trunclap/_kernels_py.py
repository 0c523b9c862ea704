"""Pure numpy implementations of the hot kernels.

These mirror trunclap._kernels (the compiled extension) operation for
operation; the two backends must produce bitwise identical results. The sum
in the second difference is evaluated as (wp*up + wm*um) - ws*u in both, and
ties in the max go to the lowest direction index (np.argmax picks the first
maximum; the C loop uses a strict comparison).
"""

from __future__ import annotations

import numpy as np


def apply_max_second_diff(u, wp, wm, ws, nbrp_safe, nbrm_safe, out, arg):
    """out[i] = max_d D^2_d u at node i, arg[i] = first argmax index.

    nbrp_safe/nbrm_safe index into u extended by one trailing zero (index n
    stands for a boundary endpoint).
    """
    uext = np.append(u, 0.0)
    cand = wp * uext[nbrp_safe] + wm * uext[nbrm_safe] - ws * u[:, None]
    arg[:] = np.argmax(cand, axis=1)
    out[:] = cand[np.arange(len(u)), arg]
    return out, arg


def march(v, f, tau, wp, wm, ws, nbrp_safe, nbrm_safe, max_steps, tol, window):
    """Damped explicit relaxation toward max_d D^2_d v = -f, in place.

    Jacobi-style: each step evaluates the operator on the current iterate
    everywhere, then updates v <- v + tau*(Lambda v + f). Returns
    (steps_taken, final_residual, residual_at_checkpoint) where the
    checkpoint sits `window` steps before the budget runs out (inf if never
    reached); the caller uses it to tell a stalled march from a slow one.
    """
    n = len(v)
    idx = np.arange(n)
    ckpt = max(0, int(max_steps) - int(window))
    res_ckpt = np.inf
    steps = 0
    while True:
        uext = np.append(v, 0.0)
        cand = wp * uext[nbrp_safe] + wm * uext[nbrm_safe] - ws * v[:, None]
        r = cand.max(axis=1) + f
        res = float(np.abs(r).max())
        if steps == ckpt:
            res_ckpt = res
        if res < tol or steps >= max_steps:
            break
        v += tau * r
        steps += 1
    return steps, res, res_ckpt
