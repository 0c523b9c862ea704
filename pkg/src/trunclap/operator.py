"""The discrete operator: max over stencil directions of second differences.

At an interior node x with arms (s+, s-) along direction e,

    D^2_e u(x) = 2*(s- * u(x + s+ e^) + s+ * u(x - s- e^) - (s+ + s-) * u(x))
                 / (s+ * s- * (s+ + s-)),

where clipped arm endpoints carry the boundary value 0. The operator value
is the maximum of D^2_e u(x) over the stencil directions, with ties going to
the lowest direction index (the canonical stencil order), which keeps the
argmax field deterministic for the policy-iteration solver.

The scheme is monotone (each D^2_e is nondecreasing in the neighbor values
and nonincreasing in the center value) and positively homogeneous; it
annihilates affine functions and is exact on quadratics at unclipped nodes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import FieldMismatchError
from .grid import Grid2, ScalarField, StencilSet


@dataclass(frozen=True)
class OperatorOutput:
    """Operator values (physical units, 1/length^2) and argmax directions."""

    values: np.ndarray
    argmax_direction: np.ndarray


def apply(u: ScalarField, grid: Grid2 | None = None, stencil: StencilSet | None = None):
    """Evaluate the discrete operator on a field.

    grid/stencil default to the field's bindings and are validated against
    them when given explicitly.
    """
    if grid is None:
        grid = u.grid
    elif grid is not u.grid:
        raise FieldMismatchError("field is bound to a different grid")
    if stencil is not None and stencil is not grid.stencil:
        raise FieldMismatchError("stencil does not match the grid's stencil")
    out, arg = kernels.apply_grid(grid, u.packed)
    h2 = grid.h * grid.h
    return OperatorOutput(values=out / h2, argmax_direction=arg)


def directional_second_difference(
    u: ScalarField, node: int, direction: int, arms=None
) -> float:
    """Second difference of u at one interior node along one direction.

    `node` is the packed interior index and `direction` the stencil index.
    `arms` optionally overrides the stored physical arm pair (s+, s-); the
    neighbor values still come from the stored stencil topology. Returned in
    physical units.
    """
    g = u.grid
    n = g.n_interior
    m = g.stencil.n_directions
    if not (0 <= node < n):
        raise IndexError(f"node index {node} out of range [0, {n})")
    if not (0 <= direction < m):
        raise IndexError(f"direction index {direction} out of range [0, {m})")
    jp = int(g.nbr_plus[node, direction])
    jm = int(g.nbr_minus[node, direction])
    up = float(u.packed[jp]) if jp >= 0 else 0.0
    um = float(u.packed[jm]) if jm >= 0 else 0.0
    uc = float(u.packed[node])
    if arms is None:
        sp = float(g.arm_plus[node, direction]) * g.h
        sm = float(g.arm_minus[node, direction]) * g.h
    else:
        sp, sm = float(arms[0]), float(arms[1])
        if sp <= 0.0 or sm <= 0.0:
            raise ValueError(f"arm lengths must be positive, got ({sp}, {sm})")
    return 2.0 * (sm * up + sp * um - (sp + sm) * uc) / (sp * sm * (sp + sm))
