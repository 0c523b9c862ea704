"""Shared generators and independent oracles for the test suite.

Oracles here deliberately avoid the library's own algorithms: diameters are
brute-force all-pairs, areas are fan triangulations, Hausdorff distances are
dense support-function sampling. Slow and obviously correct.
"""

from __future__ import annotations

import math

import numpy as np

from trunclap import geometry as g


def random_convex_polygon(rng, npts: int = 12, radius: float = 1.0, center=(0.0, 0.0)):
    """Convex hull of uniform points in a box; retries until >= 4 vertices."""
    for _ in range(50):
        pts = rng.uniform(-radius, radius, (npts, 2)) + np.asarray(center)
        hull = g.convex_hull(pts)
        if len(hull) >= 4:
            return g.ConvexPolygon(hull)
    raise AssertionError("hull generator failed to produce a usable polygon")


def clip_halfplane(poly: g.ConvexPolygon, point, normal) -> g.ConvexPolygon:
    """Intersection with the halfplane (x - point) . normal <= 0."""
    verts = poly.vertex_array
    point = np.asarray(point, dtype=float)
    normal = np.asarray(normal, dtype=float)
    out = []
    n = len(verts)
    for i in range(n):
        a = verts[i]
        b = verts[(i + 1) % n]
        da = float((a - point) @ normal)
        db = float((b - point) @ normal)
        if da <= 0.0:
            out.append(a)
        if (da < 0.0) != (db < 0.0):
            t = da / (da - db)
            out.append(a + t * (b - a))
    return g.ConvexPolygon(np.asarray(out))


def nested_pair(rng, npts: int = 12, radius: float = 1.0):
    """(inner, outer) convex polygons with inner strictly contained in outer,
    where the clip removes a non-trivial chunk."""
    for _ in range(50):
        outer = random_convex_polygon(rng, npts=npts, radius=radius)
        verts = outer.vertex_array
        centroid = verts.mean(axis=0)
        theta = rng.uniform(0.0, 2.0 * math.pi)
        normal = np.array([math.cos(theta), math.sin(theta)])
        support = float(((verts - centroid) @ normal).max())
        point = centroid + 0.25 * support * normal
        try:
            inner = clip_halfplane(outer, point, normal)
        except g.GeometryError:
            continue
        if len(inner) >= 3 and area_fan(inner) < 0.95 * area_fan(outer):
            return inner, outer
    raise AssertionError("nested pair generator failed")


def diameter_allpairs(poly: g.ConvexPolygon) -> float:
    v = poly.vertex_array
    d2 = ((v[:, None, :] - v[None, :, :]) ** 2).sum(axis=2)
    return math.sqrt(float(d2.max()))


def area_fan(poly: g.ConvexPolygon) -> float:
    v = poly.vertex_array
    a = 0.0
    for i in range(1, len(v) - 1):
        u = v[i] - v[0]
        w = v[i + 1] - v[0]
        a += 0.5 * abs(float(u[0] * w[1] - u[1] * w[0]))
    return a


def support_function(poly: g.ConvexPolygon, angles: np.ndarray) -> np.ndarray:
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    return (poly.vertex_array @ dirs.T).max(axis=0)


def hausdorff_support_sampled(a, b, n: int = 5000) -> float:
    """sup |h_A - h_B| over dense directions (exact in the limit for convex sets)."""
    ang = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    return float(np.abs(support_function(a, ang) - support_function(b, ang)).max())
