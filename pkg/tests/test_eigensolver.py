import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trunclap import geometry as g
from trunclap.eigensolver import (
    EigenEstimate,
    SolverConfig,
    analytic_mu,
    collatz_wielandt,
    solve,
    solve_on_grid,
)
from trunclap.errors import (
    BracketNotClosedError,
    InnerSolverStalledError,
    PositivityError,
    SolverError,
)
from trunclap.grid import ScalarField, build_stencil, rasterize

# ------------------------------------------------- independent toy oracle
#
# On a 3x3 interior grid the eigenproblem is small enough to solve with a
# from-scratch inverse power iteration: the inner equation -Lambda v = u is
# relaxed with a damped explicit loop written out node by node below, sharing
# no code with the package's policy/march solvers.


def _toy_grid():
    return rasterize(g.HyperRect((0.75, 0.75)), 0.5, build_stencil(1))


def _lambda_slow(grid, u):
    """max_d D^2_d u by explicit per-node, per-direction loops (grid units)."""
    out = np.empty(len(u))
    for k in range(grid.n_interior):
        best = -math.inf
        for d in range(grid.stencil.n_directions):
            ip = grid.nbr_plus[k, d]
            im = grid.nbr_minus[k, d]
            up = u[ip] if ip >= 0 else 0.0
            um = u[im] if im >= 0 else 0.0
            cand = grid.wp[k, d] * up + grid.wm[k, d] * um - grid.ws[k, d] * u[k]
            if cand > best:
                best = cand
        out[k] = best
    return out


def _solve_slow(grid, f, tol=1e-15, max_steps=200_000):
    v = f.copy()
    tau = 0.45 * float((grid.arm_plus * grid.arm_minus).min())
    for _ in range(max_steps):
        r = _lambda_slow(grid, v) + f
        if np.abs(r).max() < tol:
            return v
        v += tau * r
    raise AssertionError("oracle inner relaxation did not converge")


def test_toy_grid_against_inverse_power_oracle():
    grid = _toy_grid()
    assert grid.n_interior == 9

    u = np.ones(9)
    mu_gu = math.nan
    for _ in range(200):
        v = _solve_slow(grid, u)
        new = 1.0 / v.max()
        u = v * new
        if abs(new - mu_gu) < 1e-14:
            mu_gu = new
            break
        mu_gu = new
    mu_oracle = mu_gu / grid.h**2

    cfg = SolverConfig(h=0.5, W=1, tol_bracket=1e-12, tol_inner=1e-13)
    est = solve(g.HyperRect((0.75, 0.75)), cfg)
    assert abs(est.mu - mu_oracle) <= 1e-10 * mu_oracle


def test_toy_grid_march_matches_oracle_too():
    grid = _toy_grid()
    u = np.ones(9)
    for _ in range(200):
        v = _solve_slow(grid, u)
        u = v / v.max()
    mu_oracle = (1.0 / v.max()) / grid.h**2

    cfg = SolverConfig(h=0.5, W=1, tol_bracket=1e-10, tol_inner=1e-12, inner_solver="march")
    est = solve(g.HyperRect((0.75, 0.75)), cfg)
    assert abs(est.mu - mu_oracle) <= 1e-8 * mu_oracle


# ------------------------------------------------------------- accuracy


def test_ball_matches_closed_form():
    cfg = SolverConfig(h=1.0 / 32.0, W=3)
    est = solve(g.Ball(1.0), cfg)
    exact = math.pi**2 / 4.0
    assert abs(est.mu - exact) / exact < 0.02


def test_square_matches_closed_form():
    cfg = SolverConfig(h=1.0 / 32.0, W=3)
    est = solve(g.HyperRect((0.5, 0.5)), cfg)
    exact = math.pi**2 / 2.0
    assert abs(est.mu - exact) / exact < 0.02


def test_march_and_policy_agree():
    cfg_p = SolverConfig(h=1.0 / 16.0, W=2, inner_solver="policy")
    cfg_m = SolverConfig(h=1.0 / 16.0, W=2, inner_solver="march")
    mu_p = solve(g.Ball(1.0), cfg_p).mu
    mu_m = solve(g.Ball(1.0), cfg_m).mu
    assert abs(mu_p - mu_m) <= cfg_p.tol_bracket


def test_estimate_fields_and_json_shape():
    cfg = SolverConfig(h=0.125, W=2)
    est = solve(g.Ball(1.0), cfg)
    assert isinstance(est, EigenEstimate)
    assert est.mu == est.mu_low
    assert est.mu_low <= est.mu_high
    assert est.mu_high - est.mu_low < cfg.tol_bracket
    assert est.h == cfg.h and est.W == cfg.W
    assert est.outer_iters >= 1 and est.inner_iters_total >= est.outer_iters
    f = est.eigenfunction
    assert f.packed.min() > 0.0
    assert f.packed.max() == 1.0
    d = est.to_json_dict()
    assert sorted(d) == [
        "W",
        "h",
        "inner_iters_total",
        "mu",
        "mu_high",
        "mu_low",
        "outer_iters",
        "residual",
    ]


# ------------------------------------------------------------ closed forms


def test_analytic_mu_values():
    assert analytic_mu(g.Ball(1.0)) == pytest.approx(math.pi**2 / 4.0, rel=1e-15)
    assert analytic_mu(g.Ball(2.0)) == pytest.approx(math.pi**2 / 16.0, rel=1e-15)
    assert analytic_mu(g.HyperRect((1.0, 0.5))) == pytest.approx(math.pi**2 / 5.0, rel=1e-15)
    # only balls and hyperrectangles have closed forms
    tri = g.Polygon(g.ConvexPolygon([(0, 0), (1, 0), (0, 1)]))
    assert analytic_mu(tri) is None
    assert analytic_mu(g.ReuleauxPolygon(3, 1.0)) is None


def test_analytic_mu_covers_higher_dimensions():
    assert analytic_mu(g.Ball(1.0, dim=5)) == pytest.approx(math.pi**2 / 4.0, rel=1e-15)
    assert analytic_mu(g.HyperRect((1.0, 1.0, 1.0))) == pytest.approx(
        math.pi**2 / 12.0, rel=1e-15
    )


# --------------------------------------------------- Collatz-Wielandt bracket


def test_bracket_from_converged_eigenfunction_is_tight():
    cfg = SolverConfig(h=0.125, W=2, tol_bracket=1e-8)
    est = solve(g.Ball(1.0), cfg)
    lo, hi = collatz_wielandt(est.eigenfunction)
    assert hi - lo <= 1e-7
    # the recomputed bracket must overlap the solver's certified one
    assert lo <= est.mu_high and hi >= est.mu_low


def test_bracket_from_smooth_bump_contains_estimate():
    grid = rasterize(g.Ball(1.0), 0.125, build_stencil(2))
    bump = ScalarField.from_function(grid, lambda x, y: np.cos(0.5 * np.hypot(x, y)))
    lo, hi = collatz_wielandt(bump)
    est = solve_on_grid(grid, SolverConfig(h=0.125, W=2))
    assert lo <= est.mu_high
    assert hi >= est.mu_low


@settings(deadline=None, max_examples=25)
@given(st.integers(0, 2**32 - 1))
def test_bracket_lower_end_never_exceeds_eigenvalue(seed):
    # mu_low certified by any positive field is a lower bound for the
    # discrete eigenvalue (monotonicity + homogeneity)
    grid = _bracket_grid()
    rng = np.random.default_rng(seed)
    u = ScalarField(grid, 0.1 + np.abs(rng.standard_normal(grid.n_interior)))
    lo, _ = collatz_wielandt(u)
    assert lo <= _bracket_reference().mu_high + 1e-9


_CACHE = {}


def _bracket_grid():
    if "grid" not in _CACHE:
        _CACHE["grid"] = rasterize(g.Ball(1.0), 0.25, build_stencil(2))
    return _CACHE["grid"]


def _bracket_reference():
    if "est" not in _CACHE:
        _CACHE["est"] = solve_on_grid(_bracket_grid(), SolverConfig(h=0.25, W=2))
    return _CACHE["est"]


def test_bracket_rejects_nonpositive_fields():
    grid = _bracket_grid()
    vals = np.ones(grid.n_interior)
    vals[3] = 0.0
    with pytest.raises(PositivityError):
        collatz_wielandt(ScalarField(grid, vals))
    vals[3] = -1.0
    with pytest.raises(PositivityError):
        collatz_wielandt(ScalarField(grid, vals))


def test_bracket_rejects_mismatched_grid_and_stencil():
    grid = _bracket_grid()
    other = rasterize(g.Ball(1.0), 0.25, build_stencil(2))
    u = ScalarField(grid, np.ones(grid.n_interior))
    with pytest.raises(SolverError, match="different grid"):
        collatz_wielandt(u, grid=other)
    with pytest.raises(SolverError, match="stencil"):
        collatz_wielandt(u, stencil=build_stencil(3))


# ------------------------------------------------------------- error paths


def test_config_validation():
    with pytest.raises(ValueError, match="h must be positive"):
        SolverConfig(h=0.0)
    with pytest.raises(ValueError, match="h must be positive"):
        SolverConfig(h=math.inf)
    with pytest.raises(ValueError, match="W must be an integer"):
        SolverConfig(W=0)
    with pytest.raises(ValueError, match="W must be an integer"):
        SolverConfig(W=2.5)
    with pytest.raises(ValueError, match="tol_bracket"):
        SolverConfig(tol_bracket=0.0)
    with pytest.raises(ValueError, match="tol_inner"):
        SolverConfig(tol_inner=1.0)
    with pytest.raises(ValueError, match="cw_floor"):
        SolverConfig(cw_floor=-0.1)
    with pytest.raises(ValueError, match="max_outer"):
        SolverConfig(max_outer=0)
    with pytest.raises(ValueError, match="max_inner"):
        SolverConfig(max_inner=0)
    with pytest.raises(ValueError, match="inner_solver"):
        SolverConfig(inner_solver="jacobi")


def test_unclosed_bracket_reports_partial_bracket():
    cfg = SolverConfig(h=0.125, W=2, max_outer=1, tol_bracket=1e-9)
    with pytest.raises(BracketNotClosedError) as exc_info:
        solve(g.Ball(1.0), cfg)
    err = exc_info.value
    assert err.mu_low is not None and err.mu_high is not None
    assert err.mu_low < err.mu_high
    # the partial bracket still brackets the true discrete eigenvalue
    est = solve(g.Ball(1.0), SolverConfig(h=0.125, W=2))
    assert err.mu_low <= est.mu <= err.mu_high


def test_march_stall_is_reported_with_trend():
    cfg = SolverConfig(h=0.25, W=2, inner_solver="march", max_inner=3, tol_inner=1e-12)
    with pytest.raises(InnerSolverStalledError, match="march"):
        solve(g.Ball(1.0), cfg)
