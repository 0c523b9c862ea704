"""Closed-form eigenvalue bounds, equality certification, maximality tables.

For a planar convex domain of diameter d the eigenvalue satisfies

    jung_lower = (N+1)/(2N) * pi^2/d^2   <=   mu_1   <=   pi^2/d^2 = diam_upper,

with equality on the right exactly when the domain fits in a ball of radius
d/2 (even-sided regular polygons, balls). Numerically computed eigenvalues
carry discretization error, absorbed by the documented slack(h, W) budget
when closed-form statements are asserted against solver output.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import geometry
from .eigensolver import SolverConfig, analytic_mu, solve
from .errors import BoundViolationError, ConstraintError, TruncLapError
from .grid import build_stencil

# Discretization slack budget: slack(h, W) = A*h + B*dtheta(W)^2 where dtheta
# is the largest angular gap of the width-W stencil. The two coefficients
# were calibrated once against analytic ball/rectangle/equality-polygon
# eigenvalues over the operating range h in {1/32, 1/64, 1/128}, W in
# {2, 3, 4} (see scripts/calibrate_slack.py) and then frozen; they carry a
# 1.5x safety factor over the worst observed error.
SLACK_H_COEFF = 7.54112
SLACK_ANGLE_COEFF = 0.8235


def slack(h: float, W: int) -> float:
    """Error budget for comparing solver output against exact statements."""
    gap = build_stencil(W).max_angle_gap
    return SLACK_H_COEFF * h + SLACK_ANGLE_COEFF * gap * gap


@dataclass(frozen=True)
class BoundsReport:
    """Every closed-form quantity the theory attaches to one domain."""

    diam: float
    perimeter: float
    area: float
    jung_lower: float
    diam_upper: float
    enclosing_radius: float
    equality_certified: bool

    def to_json_dict(self) -> dict:
        return {
            "diam": self.diam,
            "perimeter": self.perimeter,
            "area": self.area,
            "jung_lower": self.jung_lower,
            "diam_upper": self.diam_upper,
            "enclosing_radius": self.enclosing_radius,
            "equality_certified": self.equality_certified,
        }


def bounds_report(domain, N: int = 2, seed: int = 0) -> BoundsReport:
    """Closed-form bounds for a planar domain.

    equality_certified is the enclosing-circle test: when the domain fits in
    a ball of radius diam/2 (within GEOM_TOL) the diameter upper bound is an
    equality and mu_1 = pi^2/diam^2.
    """
    diam = geometry.domain_diameter(domain)
    per = geometry.domain_perimeter(domain)
    ar = geometry.domain_area(domain)
    rad = geometry.domain_enclosing_radius(domain, seed=seed)
    return BoundsReport(
        diam=diam,
        perimeter=per,
        area=ar,
        jung_lower=geometry.jung_bound(diam, N),
        diam_upper=math.pi**2 / diam**2,
        enclosing_radius=rad,
        equality_certified=bool(rad <= diam / 2.0 + geometry.GEOM_TOL),
    )


_CONSTRAINTS = ("diameter", "perimeter", "volume")

_TABLE_COLUMNS = (
    "domain_id",
    "constraint",
    "mu",
    "mu_low",
    "mu_high",
    "diam",
    "jung_lower",
    "diam_upper",
    "equality_certified",
)


def _measure(domain, constraint: str) -> float:
    if constraint == "diameter":
        return geometry.domain_diameter(domain)
    if constraint == "perimeter":
        return geometry.domain_perimeter(domain)
    return geometry.domain_area(domain)


def _ball_at_level(constraint: str, level: float) -> geometry.Ball:
    if constraint == "diameter":
        return geometry.Ball(level / 2.0)
    if constraint == "perimeter":
        return geometry.Ball(level / (2.0 * math.pi))
    return geometry.Ball(math.sqrt(level / math.pi))


@dataclass
class MaximalityTable:
    """check_maximality output: one row per domain plus the analytic ball row."""

    constraint: str
    level: float
    rows: list
    slack_used: float
    h: float
    W: int

    @property
    def ball_mu(self) -> float:
        return next(r["mu"] for r in self.rows if r["domain_id"] == "ball")

    def to_json_dict(self) -> dict:
        return {
            "constraint": self.constraint,
            "level": self.level,
            "slack": self.slack_used,
            "h": self.h,
            "W": self.W,
            "rows": self.rows,
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(_TABLE_COLUMNS)
            for r in self.rows:
                w.writerow([r.get(c, "") for c in _TABLE_COLUMNS])

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def check_maximality(
    domains,
    constraint: str,
    level: float,
    cfg: SolverConfig | None = None,
    ids=None,
    jobs: int | None = None,
) -> MaximalityTable:
    """Reverse Faber-Krahn style comparison against the ball.

    Every domain is rescaled (exact scaling law) so that the chosen
    constraint — diameter, perimeter, or volume — sits at `level`, solved
    numerically with the shared cfg, and compared against the analytic value
    of the ball at the same constraint level. Raises BoundViolationError if
    any computed value exceeds the ball's by more than slack(h, W); solver
    failures are recorded per row and excluded from the comparison.
    """
    if constraint not in _CONSTRAINTS:
        raise ConstraintError(f"constraint must be one of {_CONSTRAINTS}, got {constraint!r}")
    if not (level > 0.0 and math.isfinite(level)):
        raise ConstraintError(f"constraint level must be positive, got {level}")
    if cfg is None:
        cfg = SolverConfig(h=1.0 / 32.0, W=3)
    domains = list(domains)
    if ids is None:
        ids = [f"domain_{k}" for k in range(len(domains))]
    ids = list(ids)
    if len(ids) != len(domains):
        raise ConstraintError("ids and domains must have matching lengths")

    normalized = []
    for d in domains:
        m0 = _measure(d, constraint)
        if not (m0 > 0.0):
            raise ConstraintError(f"cannot normalize a domain with {constraint} {m0}")
        t = level / m0 if constraint != "volume" else math.sqrt(level / m0)
        nd = geometry.domain_scaled(d, t)
        m1 = _measure(nd, constraint)
        if abs(m1 - level) > 1e-6 * max(1.0, level):
            raise ConstraintError(
                f"normalization failed: {constraint} {m1} != {level} after rescaling"
            )
        normalized.append(nd)

    def run(pair):
        rid, dom = pair
        rep = bounds_report(dom)
        row = {
            "domain_id": rid,
            "constraint": f"{constraint}={level:g}",
            "diam": rep.diam,
            "jung_lower": rep.jung_lower,
            "diam_upper": rep.diam_upper,
            "equality_certified": rep.equality_certified,
        }
        try:
            est = solve(dom, cfg)
            row.update(mu=est.mu, mu_low=est.mu_low, mu_high=est.mu_high)
        except TruncLapError as exc:
            row.update(mu=math.nan, mu_low=math.nan, mu_high=math.nan, error=str(exc))
        return row

    workers = jobs or os.cpu_count() or 1
    with ThreadPoolExecutor(max_workers=workers) as ex:
        rows = list(ex.map(run, zip(ids, normalized)))

    ball = _ball_at_level(constraint, level)
    mu_ball = analytic_mu(ball)
    rep = bounds_report(ball)
    rows.append(
        {
            "domain_id": "ball",
            "constraint": f"{constraint}={level:g}",
            "mu": mu_ball,
            "mu_low": mu_ball,
            "mu_high": mu_ball,
            "diam": rep.diam,
            "jung_lower": rep.jung_lower,
            "diam_upper": rep.diam_upper,
            "equality_certified": rep.equality_certified,
        }
    )

    budget = slack(cfg.h, cfg.W)
    for r in rows:
        if r["domain_id"] != "ball" and math.isfinite(r["mu"]) and r["mu"] > mu_ball + budget:
            raise BoundViolationError(
                f"domain {r['domain_id']} has mu={r['mu']:.6f} exceeding the ball's "
                f"{mu_ball:.6f} by more than slack {budget:.6f} "
                f"({constraint}={level:g})"
            )
    return MaximalityTable(
        constraint=constraint,
        level=level,
        rows=rows,
        slack_used=budget,
        h=cfg.h,
        W=cfg.W,
    )
