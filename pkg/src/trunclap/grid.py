"""Lattice rasterization of planar convex domains with boundary-clipped arms.

A Grid2 is a uniform lattice of spacing h restricted to the interior of a
convex domain. For every interior node and every stencil direction e the
builder stores the two arm lengths (s+, s-): the distance you can travel
from the node along +e / -e before either reaching the neighboring lattice
node (full arm, length h*|e|) or exiting the domain (clipped arm, computed
by exact ray-boundary intersection).

Internally all lengths are carried in grid units (h = 1): a node is an
integer pair relative to the alignment center, arms lie in (0, |e|], and
second differences in these units equal h^2 times their physical values.
Keeping the computation in grid units makes similar domains (same shape,
different scale) produce identical data bit for bit, which the scaling-law
checks rely on. Physical quantities are recovered by the single factor h
(lengths) or 1/h^2 (second differences) at the API boundary.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import geometry
from .errors import FieldMismatchError, GridTooCoarseError, UnsupportedDomainError

# Clipped arms shorter than EPS_ARM grid units (i.e. EPS_ARM * h physical)
# are floored at this value so that the explicit march's CFL time step
# tau <= min(s+ * s-)/2 cannot collapse from grazing ray-boundary
# intersections.
EPS_ARM = 1e-6


@dataclass(frozen=True)
class StencilSet:
    """Wide-stencil direction set: coprime integer offsets up to width W.

    One representative per antipodal pair is kept (the second difference is
    even in the direction). `offsets` is ordered canonically: the axis and
    diagonal directions first, then for each level k = 2..W the directions
    (k, q), (q, k), (k, -q), (q, -k) with q coprime to k; tie-breaking in the
    operator's max refers to this order.
    """

    width: int
    offsets: np.ndarray  # (m, 2) int64
    unit: np.ndarray  # (m, 2) float64, normalized offsets
    lengths: np.ndarray  # (m,) float64, |offset|
    max_angle_gap: float  # radians, largest angular hole of the +- set

    @property
    def n_directions(self) -> int:
        return len(self.offsets)


def build_stencil(W: int) -> StencilSet:
    """Enumerate the coprime lattice directions of width W."""
    if not isinstance(W, (int, np.integer)) or W < 1:
        raise ValueError(f"stencil width must be an integer >= 1, got {W}")
    dirs = [(1, 0), (0, 1), (1, 1), (1, -1)]
    for k in range(2, W + 1):
        qs = [q for q in range(1, k) if math.gcd(q, k) == 1]
        dirs.extend((k, q) for q in qs)
        dirs.extend((q, k) for q in qs)
        dirs.extend((k, -q) for q in qs)
        dirs.extend((q, -k) for q in qs)
    offsets = np.asarray(dirs, dtype=np.int64)
    lengths = np.hypot(offsets[:, 0], offsets[:, 1])
    unit = offsets / lengths[:, None]

    both = np.vstack([offsets, -offsets]).astype(float)
    ang = np.sort(np.arctan2(both[:, 1], both[:, 0]))
    gaps = np.diff(ang)
    wrap = ang[0] + 2.0 * np.pi - ang[-1]
    gap = float(max(gaps.max(), wrap))

    for a in (offsets, unit, lengths):
        a.setflags(write=False)
    return StencilSet(int(W), offsets, unit, lengths, gap)


class Grid2:
    """Uniform lattice restricted to a convex planar domain.

    Attributes (all arrays read-only after construction):
      h             lattice spacing
      center        alignment point; lattice = center + h * Z^2
      origin        physical position of lattice index (0, 0)
      nx, ny        lattice extent actually allocated (covers the bbox)
      interior_mask (nx, ny) bool, True at nodes strictly inside the domain
      node_index    (nx, ny) int32, packed index or -1
      nodes         (n, 2) int32 grid-unit coordinates (relative to center)
      arm_plus/minus   (n, m) float64 arm lengths in grid units, in (0, |e|]
      nbr_plus/minus   (n, m) int32 packed neighbor index, -1 when the arm
                       endpoint is a boundary point (value 0)
      wp, wm, ws    (n, m) float64 second-difference weights in grid units:
                    D^2_e u = wp*u(+) + wm*u(-) - ws*u(0)
    """

    __slots__ = (
        "h",
        "center",
        "origin",
        "nx",
        "ny",
        "i_min",
        "j_min",
        "stencil",
        "interior_mask",
        "node_index",
        "nodes",
        "arm_plus",
        "arm_minus",
        "nbr_plus",
        "nbr_minus",
        "wp",
        "wm",
        "ws",
        "_nbrp_safe",
        "_nbrm_safe",
    )

    def __init__(self, **kw):
        for k, v in kw.items():
            object.__setattr__(self, k, v)

    def __setattr__(self, *_):
        raise AttributeError("Grid2 is immutable")

    @property
    def n_interior(self) -> int:
        return len(self.nodes)

    @property
    def n_directions(self) -> int:
        return self.stencil.n_directions

    def node_xy(self) -> np.ndarray:
        """Physical coordinates of the interior nodes, shape (n, 2)."""
        return np.column_stack(
            [self.center[0] + self.nodes[:, 0] * self.h, self.center[1] + self.nodes[:, 1] * self.h]
        )

    def arm_lengths(self) -> tuple[np.ndarray, np.ndarray]:
        """Physical (s+, s-) arrays of shape (n, m)."""
        return self.arm_plus * self.h, self.arm_minus * self.h

    def cfl_min_product(self) -> float:
        """min over nodes and directions of s+ * s- in grid units."""
        return float((self.arm_plus * self.arm_minus).min())

    def dump_csv(self, path) -> None:
        """Debug dump: one row per lattice node with mask and physical arms."""
        m = self.stencil.n_directions
        header = ["i", "j", "x", "y", "interior"]
        for d in range(m):
            header += [f"sp_{d}", f"sm_{d}"]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for a in range(self.nx):
                for b in range(self.ny):
                    i = self.i_min + a
                    j = self.j_min + b
                    x = self.center[0] + i * self.h
                    y = self.center[1] + j * self.h
                    k = int(self.node_index[a, b])
                    row = [i, j, repr(x), repr(y), int(k >= 0)]
                    if k >= 0:
                        for d in range(m):
                            row += [
                                repr(float(self.arm_plus[k, d] * self.h)),
                                repr(float(self.arm_minus[k, d] * self.h)),
                            ]
                    else:
                        row += [""] * (2 * m)
                    w.writerow(row)


class ScalarField:
    """Node values bound to a grid; zero at every non-interior node."""

    __slots__ = ("grid", "packed")

    def __init__(self, grid: Grid2, values):
        v = np.ascontiguousarray(values, dtype=float)
        if v.shape != (grid.n_interior,):
            raise FieldMismatchError(
                f"field has {v.shape} values for a grid with {grid.n_interior} interior nodes"
            )
        if not np.all(np.isfinite(v)):
            raise FieldMismatchError("field values must be finite")
        self.grid = grid
        self.packed = v

    @classmethod
    def from_function(cls, grid: Grid2, fn) -> "ScalarField":
        """Sample fn(x, y) (numpy-vectorized) at the interior nodes."""
        xy = grid.node_xy()
        return cls(grid, np.asarray(fn(xy[:, 0], xy[:, 1]), dtype=float))

    def dense(self) -> np.ndarray:
        """(nx, ny) array with zeros outside the interior."""
        out = np.zeros((self.grid.nx, self.grid.ny))
        out[self.grid.interior_mask] = self.packed
        return out

    def dump_csv(self, path) -> None:
        """Write (x, y, u) rows for the interior nodes."""
        xy = self.grid.node_xy()
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "u"])
            for (x, y), u in zip(xy, self.packed):
                w.writerow([repr(float(x)), repr(float(y)), repr(float(u))])


def _exit_parameter_polygon(p: np.ndarray, e: np.ndarray, verts: np.ndarray) -> np.ndarray:
    """Smallest t > 0 with p + t*e on the polygon boundary (p strictly inside).

    t is in units of the full offset e, so t >= 1 means the whole arm stays
    inside the closure.
    """
    t = np.full(len(p), np.inf)
    nv = len(verts)
    for k in range(nv):
        v0 = verts[k]
        w = verts[(k + 1) % nv] - v0
        denom = w[0] * e[1] - w[1] * e[0]
        if denom < 0.0:
            gamma = w[0] * (p[:, 1] - v0[1]) - w[1] * (p[:, 0] - v0[0])
            np.minimum(t, gamma / -denom, out=t)
    return t


def _exit_parameter_circle(p: np.ndarray, e: np.ndarray, r_gu: float) -> np.ndarray:
    a = float(e[0] * e[0] + e[1] * e[1])
    b = p[:, 0] * e[0] + p[:, 1] * e[1]
    c = p[:, 0] * p[:, 0] + p[:, 1] * p[:, 1] - r_gu * r_gu
    disc = b * b - a * c
    return (-b + np.sqrt(np.maximum(disc, 0.0))) / a


def rasterize(domain, h: float, stencil: StencilSet, *, align_center=None) -> Grid2:
    """Build the interior lattice and clipped arms for a planar domain.

    By default the lattice is aligned so that the center of the domain's
    bounding box is a lattice point, which preserves the symmetries of
    symmetric domains. `align_center` overrides the alignment point; passing
    the same point for two nested domains puts them on a common lattice,
    which the monotonicity comparisons require.
    """
    if not (h > 0.0) or not math.isfinite(h):
        raise ValueError(f"grid spacing must be positive and finite, got {h}")
    if not geometry.is_planar(domain):
        raise UnsupportedDomainError(f"grid solver needs a planar domain, got {domain!r}")

    if isinstance(domain, geometry.Ball):
        xmin, xmax, ymin, ymax = -domain.r, domain.r, -domain.r, domain.r
        circle_r = domain.r
        poly = None
    else:
        poly = geometry.as_polygon(domain)
        xmin, xmax, ymin, ymax = poly.bbox()
        circle_r = None

    if align_center is None:
        cx = 0.5 * (xmin + xmax)
        cy = 0.5 * (ymin + ymax)
    else:
        cx, cy = float(align_center[0]), float(align_center[1])

    i_min = math.floor((xmin - cx) / h)
    i_max = math.ceil((xmax - cx) / h)
    j_min = math.floor((ymin - cy) / h)
    j_max = math.ceil((ymax - cy) / h)
    nx = i_max - i_min + 1
    ny = j_max - j_min + 1
    if nx <= 0 or ny <= 0:
        raise GridTooCoarseError(f"grid too coarse: no interior nodes at h={h}")

    ii = np.arange(i_min, i_max + 1, dtype=np.int64)
    jj = np.arange(j_min, j_max + 1, dtype=np.int64)
    I, J = np.meshgrid(ii, jj, indexing="ij")

    if circle_r is not None:
        r_gu = circle_r / h
        mask = (I * I + J * J).astype(float) < r_gu * r_gu
        verts_gu = None
    else:
        verts_gu = (poly.vertex_array - np.array([cx, cy])) / h
        mask = np.ones((nx, ny), dtype=bool)
        If = I.astype(float)
        Jf = J.astype(float)
        nv = len(verts_gu)
        for k in range(nv):
            v0 = verts_gu[k]
            w = verts_gu[(k + 1) % nv] - v0
            mask &= (w[0] * (Jf - v0[1]) - w[1] * (If - v0[0])) > 0.0

    n = int(mask.sum())
    if n == 0:
        raise GridTooCoarseError(f"grid too coarse: no interior nodes at h={h}")

    node_index = np.full((nx, ny), -1, dtype=np.int32)
    node_index[mask] = np.arange(n, dtype=np.int32)
    nodes = np.column_stack([I[mask], J[mask]]).astype(np.int32)

    m = stencil.n_directions
    arm_plus = np.empty((n, m))
    arm_minus = np.empty((n, m))
    nbr_plus = np.full((n, m), -1, dtype=np.int32)
    nbr_minus = np.full((n, m), -1, dtype=np.int32)

    nodes_f = nodes.astype(float)
    for d in range(m):
        e = stencil.offsets[d]
        L = float(stencil.lengths[d])
        for sgn, arm, nbr in ((1, arm_plus, nbr_plus), (-1, arm_minus, nbr_minus)):
            ti = nodes[:, 0].astype(np.int64) + sgn * e[0] - i_min
            tj = nodes[:, 1].astype(np.int64) + sgn * e[1] - j_min
            inb = (ti >= 0) & (ti < nx) & (tj >= 0) & (tj < ny)
            ids = np.full(n, -1, dtype=np.int32)
            ids[inb] = node_index[ti[inb], tj[inb]]
            full = ids >= 0
            arm[:, d] = L
            nbr[:, d] = ids
            clip = np.nonzero(~full)[0]
            if len(clip):
                p = nodes_f[clip]
                ev = (sgn * e).astype(float)
                if circle_r is not None:
                    t = _exit_parameter_circle(p, ev, r_gu)
                else:
                    t = _exit_parameter_polygon(p, ev, verts_gu)
                s = np.where(t >= 1.0, L, np.maximum(t * L, EPS_ARM))
                arm[clip, d] = s

    ssum = arm_plus + arm_minus
    wp = 2.0 / (arm_plus * ssum)
    wm = 2.0 / (arm_minus * ssum)
    # ws equals 2/(s+ s-) in exact arithmetic; forming it as wp + wm makes
    # the identity bitwise, so the scheme annihilates constants exactly and
    # every frozen-policy matrix is exactly weakly diagonally dominant
    ws = wp + wm

    nbrp_safe = np.where(nbr_plus >= 0, nbr_plus, n).astype(np.int32)
    nbrm_safe = np.where(nbr_minus >= 0, nbr_minus, n).astype(np.int32)

    arrays = dict(
        interior_mask=mask,
        node_index=node_index,
        nodes=nodes,
        arm_plus=arm_plus,
        arm_minus=arm_minus,
        nbr_plus=nbr_plus,
        nbr_minus=nbr_minus,
        wp=np.ascontiguousarray(wp),
        wm=np.ascontiguousarray(wm),
        ws=np.ascontiguousarray(ws),
        _nbrp_safe=np.ascontiguousarray(nbrp_safe),
        _nbrm_safe=np.ascontiguousarray(nbrm_safe),
    )
    for a in arrays.values():
        a.setflags(write=False)

    return Grid2(
        h=float(h),
        center=(float(cx), float(cy)),
        origin=geometry.Point2(float(cx + i_min * h), float(cy + j_min * h)),
        nx=nx,
        ny=ny,
        i_min=int(i_min),
        j_min=int(j_min),
        stencil=stencil,
        **arrays,
    )
