"""Principal eigenvalue of the discrete operator by inverse power iteration.

The discrete eigenproblem is -Lambda_h u = mu * u with u > 0 on the interior
nodes and u = 0 on the boundary, where Lambda_h is the max-of-second-
differences operator. The outer loop is nonlinear inverse power iteration:
given the current positive iterate u_k (sup-norm 1), solve

    -Lambda_h v = u_k,

normalize u_{k+1} = v / max v, and evaluate the Collatz-Wielandt bracket

    mu_low  = min over eligible nodes of (-Lambda_h u_{k+1}) / u_{k+1},
    mu_high = max over the same nodes,

restricted to nodes with u_{k+1} >= cw_floor (near-boundary ratios are pure
discretization noise otherwise). For a monotone positively homogeneous
operator, any positive field certifies mu_low <= mu_1^h <= observed fixed
point behavior; iteration stops when the bracket is narrower than
tol_bracket, and the conservative mu_low is reported as the eigenvalue.

Two inner solvers are available:

* "policy" (default): Howard's method. Freeze the argmax direction field,
  solve the resulting sparse linear M-matrix system by LU, re-evaluate the
  argmax; repeat until the direction field is stable. Each policy matrix has
  at most 3 entries per row, the LU factorization is cached while the policy
  is unchanged (late outer iterations reuse one back-substitution each), and
  the iteration terminates because each policy switch strictly improves the
  exact solution.
* "march": the damped explicit relaxation v <- v + tau*(Lambda_h v + u_k)
  with the CFL-safe step tau = 0.45 * min(s+ * s-) over all nodes and
  directions. Monotone and simple, but the global time step collapses when
  clipped arms are short, so it is practical only on coarse or
  lattice-aligned domains; both solvers agree within tol_bracket wherever
  the march is affordable.

All solver arithmetic happens in grid units; physical eigenvalues are the
grid-unit ratios divided by h^2 (exact scale covariance is what makes the
scaling-law test meaningful at the ulp level).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import geometry, kernels
from .errors import (
    BracketNotClosedError,
    InnerSolverStalledError,
    PositivityError,
    SolverError,
)
from .grid import Grid2, ScalarField, StencilSet, build_stencil, rasterize

INNER_SOLVERS = ("policy", "march")

# Safety factor under the CFL bound tau <= min(s+ s-)/2 for the march.
_MARCH_CFL = 0.45

# Policy iteration is finitely terminating; this cap only guards against
# floating-point argmax dither between equally optimal policies.
_MAX_POLICY_SWEEPS = 128

# Residual window used to distinguish "stalled" from "still decreasing"
# when the march hits its step budget.
_MARCH_WINDOW = 5000


@dataclass
class SolverConfig:
    """Discretization and iteration-control parameters."""

    h: float = 1.0 / 64.0
    W: int = 4
    tol_bracket: float = 1e-6
    tol_inner: float = 1e-8
    max_outer: int = 200
    max_inner: int = 200_000
    cw_floor: float = 1e-3
    inner_solver: str = "policy"

    def __post_init__(self):
        if not (self.h > 0.0 and math.isfinite(self.h)):
            raise ValueError(f"h must be positive, got {self.h}")
        if not (isinstance(self.W, (int, np.integer)) and self.W >= 1):
            raise ValueError(f"W must be an integer >= 1, got {self.W}")
        for name in ("tol_bracket", "tol_inner", "cw_floor"):
            val = getattr(self, name)
            if not (0.0 < val < 1.0):
                raise ValueError(f"{name} must lie in (0, 1), got {val}")
        for name in ("max_outer", "max_inner"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.inner_solver not in INNER_SOLVERS:
            raise ValueError(
                f"inner_solver must be one of {INNER_SOLVERS}, got {self.inner_solver!r}"
            )


@dataclass
class EigenEstimate:
    """Converged eigenvalue with its Collatz-Wielandt bracket."""

    mu: float
    mu_low: float
    mu_high: float
    eigenfunction: ScalarField
    outer_iters: int
    inner_iters_total: int
    h: float
    W: int
    residual: float

    def to_json_dict(self) -> dict:
        return {
            "mu": self.mu,
            "mu_low": self.mu_low,
            "mu_high": self.mu_high,
            "h": self.h,
            "W": self.W,
            "outer_iters": self.outer_iters,
            "inner_iters_total": self.inner_iters_total,
            "residual": self.residual,
        }


def analytic_mu(domain) -> float | None:
    """Closed-form eigenvalue where one exists (balls and hyperrectangles)."""
    if isinstance(domain, geometry.Ball):
        return math.pi**2 / (4.0 * domain.r**2)
    if isinstance(domain, geometry.HyperRect):
        return math.pi**2 / (4.0 * sum(a * a for a in domain.alphas))
    return None


def collatz_wielandt(
    u: ScalarField, grid: Grid2 | None = None, stencil: StencilSet | None = None, eta: float = 1e-3
) -> tuple[float, float]:
    """Eigenvalue bracket certified by a positive field.

    Returns (mu_low, mu_high) = extrema of (-Lambda_h u)/u over the nodes
    with u >= eta * max(u), in physical units. mu_low is a genuine lower
    bound for the discrete eigenvalue by monotonicity and homogeneity of the
    operator.
    """
    if grid is None:
        grid = u.grid
    elif grid is not u.grid:
        raise SolverError("field is bound to a different grid")
    if stencil is not None and stencil is not grid.stencil:
        raise SolverError("stencil does not match the grid's stencil")
    vals = u.packed
    if vals.min() <= 0.0:
        raise PositivityError("Collatz-Wielandt ratios need u > 0 on the interior")
    lv, _ = kernels.apply_grid(grid, vals)
    eligible = vals >= eta * vals.max()
    ratios = -lv[eligible] / vals[eligible]
    h2 = grid.h * grid.h
    return float(ratios.min() / h2), float(ratios.max() / h2)


def _initial_field(grid: Grid2) -> np.ndarray:
    """Product of distances to the bounding-box sides, sup-norm 1, grid units."""
    nodes = grid.nodes.astype(float)
    i = nodes[:, 0]
    j = nodes[:, 1]
    # bbox corners in grid units (the lattice covers [i_min, i_min+nx-1] x ...)
    x0, x1 = float(grid.i_min), float(grid.i_min + grid.nx - 1)
    y0, y1 = float(grid.j_min), float(grid.j_min + grid.ny - 1)
    u = (i - x0) * (x1 - i) * (j - y0) * (y1 - j)
    m = u.max()
    if not (m > 0.0):
        # single-node grids and similar degeneracies: fall back to a flat start
        u = np.ones_like(u)
        m = 1.0
    return u / m


def _policy_matrix(grid: Grid2, policy: np.ndarray):
    n = grid.n_interior
    rows = np.arange(n)
    wsd = grid.ws[rows, policy]
    wpd = grid.wp[rows, policy]
    wmd = grid.wm[rows, policy]
    ipd = grid.nbr_plus[rows, policy]
    imd = grid.nbr_minus[rows, policy]
    mp = ipd >= 0
    mm = imd >= 0
    data = np.concatenate([wsd, -wpd[mp], -wmd[mm]])
    r = np.concatenate([rows, rows[mp], rows[mm]])
    c = np.concatenate([rows, ipd[mp], imd[mm]])
    return sp.csc_matrix((data, (r, c)), shape=(n, n))


class _PolicySolver:
    """Howard iteration for -Lambda_h v = f with LU caching across calls."""

    def __init__(self, grid: Grid2):
        self.grid = grid
        self.policy = None
        self.lu = None

    def solve(self, f: np.ndarray, tol: float):
        grid = self.grid
        if self.policy is None:
            # seed the direction field from the source term
            _, self.policy = kernels.apply_grid(grid, f)
            self.lu = None
        sweeps = 0
        for _ in range(_MAX_POLICY_SWEEPS):
            if self.lu is None:
                self.lu = spla.splu(_policy_matrix(grid, self.policy))
            v = self.lu.solve(f)
            sweeps += 1
            if not np.all(np.isfinite(v)) or v.min() <= 0.0:
                raise PositivityError(
                    "policy solve lost positivity; the discrete system is"
                    " ill-conditioned at this resolution"
                )
            lv, pol = kernels.apply_grid(grid, v)
            if np.array_equal(pol, self.policy):
                return v, lv, sweeps
            res = float(np.abs(lv + f).max())
            self.policy = pol
            self.lu = None
            if res <= tol:
                # argmax dithers between equally optimal directions but the
                # equation itself is satisfied
                return v, lv, sweeps
        raise InnerSolverStalledError(
            f"inner solver stalled: policy iteration did not settle in "
            f"{_MAX_POLICY_SWEEPS} sweeps"
        )


class _MarchSolver:
    """Damped explicit relaxation for -Lambda_h v = f."""

    def __init__(self, grid: Grid2, max_inner: int):
        self.grid = grid
        self.max_inner = max_inner
        self.tau = _MARCH_CFL * grid.cfl_min_product()
        self.warm = None

    def solve(self, f: np.ndarray, tol: float):
        v = self.warm.copy() if self.warm is not None else f.copy()
        steps, res, res_ckpt = kernels.march_grid(
            self.grid, v, f, self.tau, self.max_inner, tol, window=_MARCH_WINDOW
        )
        if res > tol:
            trend = "still decreasing" if res < res_ckpt else "not decreasing"
            raise InnerSolverStalledError(
                f"inner solver stalled: march hit max_inner={self.max_inner} with "
                f"sup-norm residual {res:.3e} > {tol:.3e} ({trend}; time step "
                f"tau={self.tau:.3e} grid units)"
            )
        if v.min() <= 0.0:
            raise PositivityError("march solve lost positivity")
        self.warm = v
        lv, _ = kernels.apply_grid(self.grid, v)
        return v, lv, steps


def solve_on_grid(grid: Grid2, cfg: SolverConfig) -> EigenEstimate:
    """Run the eigenvalue iteration on an existing grid."""
    h2 = grid.h * grid.h
    tol_gu = cfg.tol_bracket * h2  # bracket widths are compared in grid units

    if cfg.inner_solver == "policy":
        inner = _PolicySolver(grid)
    else:
        inner = _MarchSolver(grid, cfg.max_inner)

    u = _initial_field(grid)
    inner_total = 0
    ml = -math.inf
    mh = math.inf
    v = u
    for outer in range(1, cfg.max_outer + 1):
        try:
            v, lv, nit = inner.solve(u, cfg.tol_inner)
        except SolverError as exc:
            exc.mu_low = None if ml == -math.inf else ml / h2
            exc.mu_high = None if mh == math.inf else mh / h2
            raise
        inner_total += nit
        vmax = v.max()
        u = v / vmax
        # (-Lambda u)/u equals (-Lambda v)/v by positive homogeneity; using
        # the unnormalized field saves one operator sweep per outer step
        eligible = u >= cfg.cw_floor
        ratios = -lv[eligible] / v[eligible]
        ml = float(ratios.min())
        mh = float(ratios.max())
        if mh - ml < tol_gu:
            lv_u, _ = kernels.apply_grid(grid, u)
            resid = float(np.abs(-lv_u[eligible] - ml * u[eligible]).max())
            return EigenEstimate(
                mu=ml / h2,
                mu_low=ml / h2,
                mu_high=mh / h2,
                eigenfunction=ScalarField(grid, u),
                outer_iters=outer,
                inner_iters_total=inner_total,
                h=grid.h,
                W=grid.stencil.width,
                residual=resid / h2,
            )
    raise BracketNotClosedError(
        f"bracket not closed: width {(mh - ml) / h2:.3e} > tol_bracket "
        f"{cfg.tol_bracket:.3e} after {cfg.max_outer} outer iterations",
        mu_low=ml / h2,
        mu_high=mh / h2,
    )


def solve(domain, cfg: SolverConfig | None = None, *, align_center=None) -> EigenEstimate:
    """Compute the principal eigenvalue of a planar domain.

    Rasterizes the domain at (cfg.h, cfg.W) and runs the iteration. The
    reported mu is the certified lower end of the final bracket.
    """
    if cfg is None:
        cfg = SolverConfig()
    stencil = build_stencil(cfg.W)
    g = rasterize(domain, cfg.h, stencil, align_center=align_center)
    return solve_on_grid(g, cfg)
