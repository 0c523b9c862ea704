"""Planar convex geometry and domain descriptions.

Everything works on dimensionless coordinates in double precision. The
central object is :class:`ConvexPolygon`, a counterclockwise vertex list;
the tagged-union domain types at the bottom (Ball, HyperRect, Polygon,
ReuleauxPolygon) are what the grid builder and the CLI ingest, with a JSON
schema of the form::

    {"type": "ball", "r": 1.0, "dim": 2}
    {"type": "hyperrect", "alphas": [1.0, 0.5]}
    {"type": "polygon", "vertices": [[x, y], ...]}
    {"type": "reuleaux", "n": 3, "width": 1.0, "arc_samples": 64}

Geometric equality checks use the absolute tolerance GEOM_TOL; all
constructed objects are immutable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import GeometryError, UnsupportedDomainError

# Absolute tolerance for geometric equality checks (double precision headroom
# at unit scale).
GEOM_TOL = 1e-9

# Relative cross-product threshold below which three consecutive vertices are
# treated as collinear and the middle one is merged away. Arc sampling of
# Reuleaux boundaries produces such runs routinely.
_COLLINEAR_REL = 1e-12


@dataclass(frozen=True)
class Point2:
    """A point in the plane."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite point ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y


def _as_vertex_array(vertices) -> np.ndarray:
    rows = []
    for p in vertices:
        if isinstance(p, Point2):
            rows.append((p.x, p.y))
        else:
            q = tuple(p)
            if len(q) != 2:
                raise GeometryError(f"vertex {p!r} is not a point in the plane")
            rows.append((float(q[0]), float(q[1])))
    v = np.asarray(rows, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2:
        raise GeometryError("vertex list must be a sequence of (x, y) pairs")
    if not np.all(np.isfinite(v)):
        raise GeometryError("vertices must be finite")
    return v


def _dedupe_consecutive(v: np.ndarray) -> np.ndarray:
    scale = max(1.0, float(np.abs(v).max()))
    keep = [0]
    for i in range(1, len(v)):
        if np.hypot(*(v[i] - v[keep[-1]])) > GEOM_TOL * scale:
            keep.append(i)
    # closing duplicate (first vertex repeated at the end)
    if len(keep) > 1 and np.hypot(*(v[keep[-1]] - v[keep[0]])) <= GEOM_TOL * scale:
        keep.pop()
    return v[keep]


def _merge_collinear(v: np.ndarray) -> np.ndarray:
    """Drop vertices whose adjacent edges are (numerically) parallel."""
    changed = True
    while changed and len(v) >= 3:
        changed = False
        keep = np.ones(len(v), dtype=bool)
        for i in range(len(v)):
            a = v[i] - v[i - 1]
            b = v[(i + 1) % len(v)] - v[i]
            cr = a[0] * b[1] - a[1] * b[0]
            na = np.hypot(*a)
            nb = np.hypot(*b)
            if abs(cr) <= _COLLINEAR_REL * na * nb and a @ b > 0.0:
                keep[i] = False
                changed = True
        if changed:
            v = v[keep]
    return v


class ConvexPolygon:
    """Convex polygon given by counterclockwise vertices.

    Construction cleans the input (consecutive duplicates dropped, collinear
    runs merged) and then validates strict convexity and orientation; a
    clockwise or non-convex vertex list raises :class:`GeometryError`.
    Instances are immutable.
    """

    __slots__ = ("_v",)

    def __init__(self, vertices):
        v = _as_vertex_array(vertices)
        v = _dedupe_consecutive(v)
        v = _merge_collinear(v)
        if len(v) < 3:
            raise GeometryError(
                f"polygon needs at least 3 distinct non-collinear vertices, got {len(v)}"
            )
        a = np.roll(v, -1, axis=0) - v
        b = np.roll(a, -1, axis=0)
        cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
        if np.all(cross < 0):
            raise GeometryError("vertices are clockwise; expected counterclockwise")
        if np.any(cross <= 0):
            raise GeometryError("vertex list is not convex")
        v.setflags(write=False)
        self._v = v

    @property
    def vertex_array(self) -> np.ndarray:
        """Read-only (n, 2) array of vertices."""
        return self._v

    @property
    def points(self) -> list[Point2]:
        return [Point2(float(x), float(y)) for x, y in self._v]

    def __len__(self) -> int:
        return len(self._v)

    def __repr__(self) -> str:
        return f"ConvexPolygon({len(self._v)} vertices)"

    def bbox(self) -> tuple[float, float, float, float]:
        """(xmin, xmax, ymin, ymax)."""
        v = self._v
        return (
            float(v[:, 0].min()),
            float(v[:, 0].max()),
            float(v[:, 1].min()),
            float(v[:, 1].max()),
        )

    def contains(self, x: float, y: float, strict: bool = False) -> bool:
        v = self._v
        w = np.roll(v, -1, axis=0) - v
        cr = w[:, 0] * (y - v[:, 1]) - w[:, 1] * (x - v[:, 0])
        if strict:
            return bool(np.all(cr > 0.0))
        return bool(np.all(cr >= -GEOM_TOL * max(1.0, abs(x), abs(y))))


# ---------------------------------------------------------------------------
# measurements


def perimeter(poly: ConvexPolygon) -> float:
    """Sum of edge lengths."""
    v = poly.vertex_array
    e = np.roll(v, -1, axis=0) - v
    return float(np.hypot(e[:, 0], e[:, 1]).sum())


def area(poly: ConvexPolygon) -> float:
    """Enclosed area by the shoelace formula (positive for CCW input)."""
    v = poly.vertex_array
    w = np.roll(v, -1, axis=0)
    return float(0.5 * np.sum(v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]))


def diameter(poly: ConvexPolygon) -> float:
    """Largest pairwise vertex distance (= diameter of the closed region).

    Rotating calipers for large vertex counts, direct all-pairs scan for
    small ones.
    """
    v = poly.vertex_array
    n = len(v)
    if n <= 12:
        d = v[:, None, :] - v[None, :, :]
        return float(np.sqrt((d * d).sum(axis=2).max()))
    best = 0.0
    j = 1
    for i in range(n):
        i1 = (i + 1) % n
        e = v[i1] - v[i]
        # advance the opposite vertex while it still moves away from edge i
        guard = 0
        while True:
            j1 = (j + 1) % n
            f = v[j1] - v[j]
            cr = e[0] * f[1] - e[1] * f[0]
            if cr > 0.0 and guard < 2 * n:
                j = j1
                guard += 1
            else:
                break
        for k in (i, i1):
            for jj in (j, (j + 1) % n):
                dx = v[k, 0] - v[jj, 0]
                dy = v[k, 1] - v[jj, 1]
                d2 = dx * dx + dy * dy
                if d2 > best:
                    best = d2
    return float(math.sqrt(best))


def scale(poly: ConvexPolygon, t: float) -> ConvexPolygon:
    """Dilation about the origin: every vertex multiplied by t."""
    if not (t > 0.0):
        raise GeometryError(f"scale factor must be positive, got {t}")
    return ConvexPolygon(poly.vertex_array * t)


def jung_bound(diam: float, N: int = 2) -> float:
    """Closed-form eigenvalue floor (N+1)/(2N) * pi^2 / diam^2."""
    if not (diam > 0.0):
        raise GeometryError(f"diameter must be positive, got {diam}")
    if N < 1:
        raise GeometryError(f"dimension must be >= 1, got {N}")
    return (N + 1) / (2.0 * N) * math.pi**2 / diam**2


# ---------------------------------------------------------------------------
# smallest enclosing circle (Welzl, expected linear time)


def _circum_two(p, q):
    c = 0.5 * (p + q)
    return c, float(np.hypot(*(p - c)))


def _circum_three(p, q, r):
    ax, ay = p
    bx, by = q
    cx, cy = r
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if abs(d) < 1e-14 * max(1.0, abs(ax), abs(ay), abs(bx), abs(by), abs(cx), abs(cy)) ** 2:
        return None, None
    a2 = ax * ax + ay * ay
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d
    uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d
    c = np.array([ux, uy])
    return c, float(np.hypot(*(p - c)))


def min_enclosing_circle(poly: ConvexPolygon, seed: int = 0) -> tuple[Point2, float]:
    """Smallest circle containing every vertex (hence the whole polygon)."""
    pts = poly.vertex_array.copy()
    scale_ = max(1.0, float(np.abs(pts).max()))
    tol = 1e-12 * scale_
    rng = np.random.default_rng(seed)
    rng.shuffle(pts)

    def inside(c, r, p):
        return np.hypot(*(p - c)) <= r + tol

    c, r = pts[0].copy(), 0.0
    for i in range(1, len(pts)):
        if inside(c, r, pts[i]):
            continue
        c, r = pts[i].copy(), 0.0
        for j in range(i):
            if inside(c, r, pts[j]):
                continue
            c, r = _circum_two(pts[i], pts[j])
            for k in range(j):
                if inside(c, r, pts[k]):
                    continue
                cc, rr = _circum_three(pts[i], pts[j], pts[k])
                if cc is None:
                    # collinear support: fall back to the diametral circle of
                    # the farthest pair among the three
                    tri = np.array([pts[i], pts[j], pts[k]])
                    dd = tri[:, None, :] - tri[None, :, :]
                    d2 = (dd * dd).sum(axis=2)
                    a, b = np.unravel_index(int(d2.argmax()), d2.shape)
                    cc, rr = _circum_two(tri[a], tri[b])
                c, r = cc, rr
    return Point2(float(c[0]), float(c[1])), float(r)


# ---------------------------------------------------------------------------
# constructions


def regular_polygon(n: int, circumradius: float) -> ConvexPolygon:
    """Regular n-gon with vertices at angles 2*pi*k/n on a circle at the origin."""
    if not isinstance(n, (int, np.integer)) or n < 3:
        raise GeometryError(f"regular polygon needs an integer n >= 3, got {n}")
    if not (circumradius > 0.0):
        raise GeometryError(f"circumradius must be positive, got {circumradius}")
    k = np.arange(n)
    ang = 2.0 * np.pi * k / n
    return ConvexPolygon(np.column_stack([circumradius * np.cos(ang), circumradius * np.sin(ang)]))


def reuleaux_polygon(n: int, width: float, arc_samples: int = 64) -> ConvexPolygon:
    """Inscribed polygonal approximation of the Reuleaux n-gon of given width.

    The body of constant width w over an odd regular n-gon: each boundary arc
    is a circle of radius w centered at the vertex opposite the arc. The base
    n-gon is sized so that its longest diagonal equals w, which makes the
    diameter of the result exactly the width (for n = 3 the diagonal is the
    side, recovering the classical construction over the equilateral triangle
    of side w). Each arc is sampled at `arc_samples` points including both
    endpoints; the returned polygon is convex and inscribed in the true body,
    so every measurement is a lower approximation except the diameter, which
    is exact.
    """
    if not isinstance(n, (int, np.integer)) or n < 3 or n % 2 == 0:
        raise GeometryError(f"Reuleaux polygon needs an odd integer n >= 3, got {n}")
    if not (width > 0.0):
        raise GeometryError(f"width must be positive, got {width}")
    if not isinstance(arc_samples, (int, np.integer)) or arc_samples < 2:
        raise GeometryError(f"arc_samples must be an integer >= 2, got {arc_samples}")

    R = width / (2.0 * math.cos(math.pi / (2 * n)))
    ang = 2.0 * np.pi * np.arange(n) / n
    base = np.column_stack([R * np.cos(ang), R * np.sin(ang)])

    pts = []
    half = (n + 1) // 2
    for j in range(n):
        c = base[(j + half) % n]
        a0 = math.atan2(base[j][1] - c[1], base[j][0] - c[0])
        a1 = math.atan2(base[(j + 1) % n][1] - c[1], base[(j + 1) % n][0] - c[0])
        if a1 <= a0:
            a1 += 2.0 * math.pi
        ts = np.linspace(a0, a1, int(arc_samples))
        pts.append(np.column_stack([c[0] + width * np.cos(ts), c[1] + width * np.sin(ts)]))
    return ConvexPolygon(np.vstack(pts))


def convex_hull(points: np.ndarray) -> np.ndarray:
    """Counterclockwise hull vertices (Andrew's monotone chain)."""
    pts = np.asarray(points, dtype=float)
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    keep = np.ones(len(pts), dtype=bool)
    for i in range(1, len(pts)):
        if np.allclose(pts[i], pts[i - 1]):
            keep[i] = False
    pts = pts[keep]
    if len(pts) < 3:
        return pts

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2:
                a, b = out[-2], out[-1]
                if (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) <= 0:
                    out.pop()
                else:
                    break
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


# ---------------------------------------------------------------------------
# Hausdorff distance


def _point_segment_dist(p, a, b):
    ab = b - a
    t = np.clip(np.dot(p - a, ab) / max(np.dot(ab, ab), 1e-300), 0.0, 1.0)
    return float(np.hypot(*(p - (a + t * ab))))


def _point_polygon_dist(p, poly: ConvexPolygon) -> float:
    if poly.contains(float(p[0]), float(p[1])):
        return 0.0
    v = poly.vertex_array
    w = np.roll(v, -1, axis=0)
    return min(_point_segment_dist(p, v[i], w[i]) for i in range(len(v)))


def hausdorff_distance(a: ConvexPolygon, b: ConvexPolygon, n_angles: int = 720) -> float:
    """Symmetric Hausdorff distance between two convex polygons.

    Two routes are combined: directed vertex-to-polygon distances (exact for
    convex polygons, since the distance to a convex set is a convex function
    maximized at extreme points) and the sup-norm of sampled support
    functions at `n_angles` directions, which can only underestimate and
    serves as a cross-check. The result is their maximum and never exceeds
    the true distance.
    """
    if n_angles < 4:
        raise GeometryError(f"need at least 4 sampling angles, got {n_angles}")
    d_vert = 0.0
    for src, dst in ((a, b), (b, a)):
        for p in src.vertex_array:
            d_vert = max(d_vert, _point_polygon_dist(p, dst))
    th = np.linspace(0.0, 2.0 * np.pi, int(n_angles), endpoint=False)
    dirs = np.column_stack([np.cos(th), np.sin(th)])
    ha = (a.vertex_array @ dirs.T).max(axis=0)
    hb = (b.vertex_array @ dirs.T).max(axis=0)
    d_supp = float(np.abs(ha - hb).max())
    return max(d_vert, d_supp)


# ---------------------------------------------------------------------------
# domain specifications (tagged union ingested by the grid builder and CLI)


@dataclass(frozen=True)
class Ball:
    """Open ball of radius r centered at the origin, in dimension dim."""

    r: float
    dim: int = 2

    def __post_init__(self):
        if not (isinstance(self.dim, (int, np.integer)) and self.dim >= 1):
            raise GeometryError(f"ball dimension must be an integer >= 1, got {self.dim}")
        if not (self.r > 0.0 and math.isfinite(self.r)):
            raise GeometryError(f"ball radius must be positive and finite, got {self.r}")


@dataclass(frozen=True)
class HyperRect:
    """Product of intervals (-alpha_i, alpha_i)."""

    alphas: tuple

    def __post_init__(self):
        a = tuple(float(x) for x in self.alphas)
        if len(a) < 1:
            raise GeometryError("hyperrectangle needs at least one halfside")
        if not all(x > 0.0 and math.isfinite(x) for x in a):
            raise GeometryError(f"halfsides must be positive and finite, got {a}")
        object.__setattr__(self, "alphas", a)

    @property
    def dim(self) -> int:
        return len(self.alphas)


@dataclass(frozen=True)
class Polygon:
    """A planar domain given directly as a convex polygon."""

    polygon: ConvexPolygon

    def __post_init__(self):
        if not isinstance(self.polygon, ConvexPolygon):
            raise GeometryError("Polygon domain wraps a ConvexPolygon")


@dataclass(frozen=True)
class ReuleauxPolygon:
    """Reuleaux n-gon of the given constant width (odd n)."""

    n: int
    width: float
    arc_samples: int = 64

    def __post_init__(self):
        # constructor below revalidates; fail early with the same messages
        reuleaux_polygon(self.n, self.width, self.arc_samples)


DomainSpec = Union[Ball, HyperRect, Polygon, ReuleauxPolygon]


def is_planar(domain: DomainSpec) -> bool:
    if isinstance(domain, Ball):
        return domain.dim == 2
    if isinstance(domain, HyperRect):
        return domain.dim == 2
    return isinstance(domain, (Polygon, ReuleauxPolygon))


def as_polygon(domain: DomainSpec) -> ConvexPolygon:
    """Polygonal boundary representation of a planar non-ball domain."""
    if isinstance(domain, HyperRect):
        if domain.dim != 2:
            raise UnsupportedDomainError(
                f"need a planar domain, got a {domain.dim}-dimensional hyperrectangle"
            )
        a1, a2 = domain.alphas
        return ConvexPolygon([(-a1, -a2), (a1, -a2), (a1, a2), (-a1, a2)])
    if isinstance(domain, Polygon):
        return domain.polygon
    if isinstance(domain, ReuleauxPolygon):
        return reuleaux_polygon(domain.n, domain.width, domain.arc_samples)
    if isinstance(domain, Ball):
        raise UnsupportedDomainError("a ball has no exact polygon representation")
    raise UnsupportedDomainError(f"unknown domain {domain!r}")


def domain_scaled(domain: DomainSpec, t: float) -> DomainSpec:
    """The dilated domain t*Omega (exact in every variant's parameters)."""
    if not (t > 0.0):
        raise GeometryError(f"scale factor must be positive, got {t}")
    if isinstance(domain, Ball):
        return Ball(domain.r * t, domain.dim)
    if isinstance(domain, HyperRect):
        return HyperRect(tuple(a * t for a in domain.alphas))
    if isinstance(domain, Polygon):
        return Polygon(scale(domain.polygon, t))
    if isinstance(domain, ReuleauxPolygon):
        return ReuleauxPolygon(domain.n, domain.width * t, domain.arc_samples)
    raise UnsupportedDomainError(f"unknown domain {domain!r}")


def domain_diameter(domain: DomainSpec) -> float:
    if isinstance(domain, Ball):
        return 2.0 * domain.r
    if isinstance(domain, HyperRect):
        return 2.0 * math.sqrt(sum(a * a for a in domain.alphas))
    return diameter(as_polygon(domain))


def domain_perimeter(domain: DomainSpec) -> float:
    """Boundary length; for Reuleaux domains this is the inscribed-polygon value."""
    if isinstance(domain, Ball):
        if domain.dim != 2:
            raise UnsupportedDomainError("perimeter is only defined here for planar domains")
        return 2.0 * math.pi * domain.r
    if isinstance(domain, HyperRect):
        if domain.dim != 2:
            raise UnsupportedDomainError("perimeter is only defined here for planar domains")
        return 4.0 * (domain.alphas[0] + domain.alphas[1])
    return perimeter(as_polygon(domain))


def domain_area(domain: DomainSpec) -> float:
    """Enclosed area; for Reuleaux domains this is the inscribed-polygon value."""
    if isinstance(domain, Ball):
        if domain.dim != 2:
            raise UnsupportedDomainError("area is only defined here for planar domains")
        return math.pi * domain.r**2
    if isinstance(domain, HyperRect):
        if domain.dim != 2:
            raise UnsupportedDomainError("area is only defined here for planar domains")
        return 4.0 * domain.alphas[0] * domain.alphas[1]
    return area(as_polygon(domain))


def domain_enclosing_radius(domain: DomainSpec, seed: int = 0) -> float:
    if isinstance(domain, Ball):
        return domain.r
    if isinstance(domain, HyperRect):
        if domain.dim != 2:
            raise UnsupportedDomainError("enclosing circle needs a planar domain")
        return math.sqrt(domain.alphas[0] ** 2 + domain.alphas[1] ** 2)
    return min_enclosing_circle(as_polygon(domain), seed=seed)[1]


# ---------------------------------------------------------------------------
# JSON (de)serialization


def domain_from_json(obj) -> DomainSpec:
    """Parse a DomainSpec from a dict or a JSON string."""
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise GeometryError(f"malformed domain JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise GeometryError(f"domain JSON must be an object, got {type(obj).__name__}")
    kind = obj.get("type")
    try:
        if kind == "ball":
            return Ball(float(obj["r"]), int(obj.get("dim", 2)))
        if kind == "hyperrect":
            return HyperRect(tuple(float(a) for a in obj["alphas"]))
        if kind == "polygon":
            return Polygon(ConvexPolygon(obj["vertices"]))
        if kind == "reuleaux":
            return ReuleauxPolygon(
                int(obj["n"]), float(obj["width"]), int(obj.get("arc_samples", 64))
            )
    except KeyError as exc:
        raise GeometryError(f"domain JSON missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise GeometryError(f"bad domain JSON field: {exc}") from exc
    raise GeometryError(f"unknown domain type {kind!r}")


def domain_to_json(domain: DomainSpec) -> dict:
    if isinstance(domain, Ball):
        return {"type": "ball", "r": domain.r, "dim": domain.dim}
    if isinstance(domain, HyperRect):
        return {"type": "hyperrect", "alphas": list(domain.alphas)}
    if isinstance(domain, Polygon):
        return {"type": "polygon", "vertices": domain.polygon.vertex_array.tolist()}
    if isinstance(domain, ReuleauxPolygon):
        return {
            "type": "reuleaux",
            "n": domain.n,
            "width": domain.width,
            "arc_samples": domain.arc_samples,
        }
    raise UnsupportedDomainError(f"unknown domain {domain!r}")
