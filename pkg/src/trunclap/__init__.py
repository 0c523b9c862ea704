"""Numerical laboratory for the principal eigenvalue of the max-of-second-
derivatives operator (largest Hessian eigenvalue) on convex planar domains
with Dirichlet data: wide-stencil monotone discretization, inverse power
eigensolver with Collatz-Wielandt brackets, closed-form bound checks, and
limiting-sequence experiments."""

from .bounds import (
    BoundsReport,
    MaximalityTable,
    bounds_report,
    check_maximality,
    slack,
)
from .eigensolver import (
    EigenEstimate,
    SolverConfig,
    analytic_mu,
    collatz_wielandt,
    solve,
    solve_on_grid,
)
from .errors import (
    BoundViolationError,
    BracketNotClosedError,
    ConstraintError,
    FieldMismatchError,
    GeometryError,
    GridTooCoarseError,
    InnerSolverStalledError,
    PositivityError,
    SolverError,
    TruncLapError,
    UnsupportedDomainError,
)
from .explorer import (
    ExperimentTable,
    degenerate_rectangles,
    hausdorff_continuity_experiment,
    reuleaux_scan,
    shrinking_sequence,
)
from .geometry import (
    Ball,
    ConvexPolygon,
    DomainSpec,
    HyperRect,
    Point2,
    Polygon,
    ReuleauxPolygon,
    area,
    diameter,
    domain_from_json,
    domain_to_json,
    hausdorff_distance,
    jung_bound,
    min_enclosing_circle,
    perimeter,
    regular_polygon,
    reuleaux_polygon,
    scale,
)
from .grid import Grid2, ScalarField, StencilSet, build_stencil, rasterize
from .kernels import BACKEND, available_backends
from .operator import OperatorOutput, apply, directional_second_difference

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BACKEND",
    "Ball",
    "BoundsReport",
    "BoundViolationError",
    "BracketNotClosedError",
    "ConstraintError",
    "ConvexPolygon",
    "DomainSpec",
    "EigenEstimate",
    "ExperimentTable",
    "FieldMismatchError",
    "GeometryError",
    "Grid2",
    "GridTooCoarseError",
    "HyperRect",
    "InnerSolverStalledError",
    "MaximalityTable",
    "OperatorOutput",
    "Point2",
    "Polygon",
    "PositivityError",
    "ReuleauxPolygon",
    "ScalarField",
    "SolverConfig",
    "SolverError",
    "StencilSet",
    "TruncLapError",
    "UnsupportedDomainError",
    "analytic_mu",
    "apply",
    "area",
    "available_backends",
    "bounds_report",
    "build_stencil",
    "check_maximality",
    "collatz_wielandt",
    "degenerate_rectangles",
    "diameter",
    "directional_second_difference",
    "domain_from_json",
    "domain_to_json",
    "hausdorff_continuity_experiment",
    "hausdorff_distance",
    "jung_bound",
    "min_enclosing_circle",
    "perimeter",
    "regular_polygon",
    "reuleaux_polygon",
    "reuleaux_scan",
    "scale",
    "shrinking_sequence",
    "slack",
    "solve",
    "solve_on_grid",
    "rasterize",
]
