"""Metric primitives for E^d, H^d and S^d in linear ambient models.

Conventions used throughout the package:

* Euclidean space ``E^d``: points are plain vectors in R^d; a hyperplane is
  ``{x : <u, x> = offset}`` with ``|u| = 1``.
* Hyperbolic space ``H^d``: hyperboloid (Minkowski) model with time-first
  coordinates, bilinear form ``<x, y>_M = -x0*y0 + x1*y1 + ... + xd*yd``.
  Points satisfy ``<x, x>_M = -1`` and ``x0 > 0``; a hyperplane is
  ``{x : <x, u>_M = 0}`` with a spacelike unit normal, ``<u, u>_M = +1``.
* Spherical space ``S^d``: unit sphere in R^(d+1); a hyperplane is the great
  subsphere ``{x : <u, x> = 0}`` with ``|u| = 1``; its poles are ``+-u``.

Charts map geodesics to straight lines: the Klein (projective ball) chart for
H^d and the gnomonic chart for S^d, both centered at an arbitrary point.
Convexity computations elsewhere in the package always run in chart space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GeometryError",
    "Geometry",
    "Point",
    "Hyperplane",
    "Line",
    "ChartFrame",
    "minkowski_dot",
    "distance",
    "midpoint",
    "bisector",
    "point_hyperplane_distance",
    "reflect",
    "project_orthogonal",
    "project_g_orthogonal",
    "geodesic_point",
    "chart",
    "unchart",
]

# Tolerance for clamping acos/acosh arguments that drift past their domain.
CLAMP_TOL = 1e-9
# Inputs this close to an excluded configuration (antipodal pair, chart pole)
# are rejected rather than silently clamped.
EXCLUSION_TOL = 1e-9


class GeometryError(ValueError):
    """Invalid metric input: geometry mismatch, antipodal pair, pole, ..."""


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Geometry:
    """A constant-curvature model space: kind in {"E", "H", "S"}, dim d >= 2."""

    kind: str
    d: int

    def __post_init__(self):
        if self.kind not in ("E", "H", "S"):
            raise GeometryError(f"unknown geometry kind {self.kind!r}")
        if self.d < 2:
            raise GeometryError("dimension must be >= 2")

    @property
    def ambient_dim(self) -> int:
        return self.d if self.kind == "E" else self.d + 1

    @property
    def curvature(self) -> int:
        return {"E": 0, "H": -1, "S": 1}[self.kind]

    @staticmethod
    def euclidean(d: int) -> "Geometry":
        return Geometry("E", d)

    @staticmethod
    def hyperbolic(d: int) -> "Geometry":
        return Geometry("H", d)

    @staticmethod
    def spherical(d: int) -> "Geometry":
        return Geometry("S", d)

    def basepoint(self) -> "Point":
        """Model basepoint: origin for E^d, time-axis point for H^d, a pole for S^d."""
        v = np.zeros(self.ambient_dim)
        if self.kind != "E":
            v[0] = 1.0
        return Point(self, v)

    def __repr__(self):
        return f"{self.kind}^{self.d}"


def minkowski_dot(x: np.ndarray, y: np.ndarray) -> float:
    """<x, y>_M = -x0*y0 + sum_i xi*yi (time-first signature (d, 1))."""
    return float(x[1:] @ y[1:] - x[0] * y[0])


def _as_array(coords) -> np.ndarray:
    a = np.array(coords, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Point:
    geometry: Geometry
    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", _as_array(self.coords))
        g = self.geometry
        if self.coords.shape != (g.ambient_dim,):
            raise GeometryError(
                f"expected {g.ambient_dim} ambient coordinates for {g}, "
                f"got shape {self.coords.shape}")
        if g.kind == "S":
            n = np.linalg.norm(self.coords)
            if abs(n - 1.0) > 1e-9:
                raise GeometryError(f"spherical point has norm {n}")
        elif g.kind == "H":
            q = minkowski_dot(self.coords, self.coords)
            if abs(q + 1.0) > 1e-9 or self.coords[0] <= 0:
                raise GeometryError(
                    f"hyperbolic point violates <x,x>_M=-1, x0>0 (got {q}, x0={self.coords[0]})")

    def __repr__(self):
        return f"Point({self.geometry}, {np.array2string(self.coords, precision=6)})"


@dataclass(frozen=True)
class Hyperplane:
    """Totally geodesic hypersurface; ``offset`` is used only in E^d."""

    geometry: Geometry
    normal: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "normal", _as_array(self.normal))
        g = self.geometry
        if self.normal.shape != (g.ambient_dim,):
            raise GeometryError("normal has wrong ambient dimension")
        if g.kind == "H":
            q = minkowski_dot(self.normal, self.normal)
            if abs(q - 1.0) > 1e-9:
                raise GeometryError(f"hyperbolic normal must be spacelike unit, <u,u>_M={q}")
        else:
            n = np.linalg.norm(self.normal)
            if abs(n - 1.0) > 1e-9:
                raise GeometryError(f"normal has norm {n}")

    def poles(self) -> tuple[Point, Point]:
        """The two poles +-u of a spherical hyperplane."""
        if self.geometry.kind != "S":
            raise GeometryError("poles are defined for spherical hyperplanes only")
        return Point(self.geometry, self.normal), Point(self.geometry, -self.normal)


@dataclass(frozen=True)
class Line:
    """Geodesic through two distinct points, used as a symmetrization axis."""

    p: Point
    q: Point

    def __post_init__(self):
        _check_same_geometry(self.p, self.q)
        if distance(self.p, self.q) < EXCLUSION_TOL:
            raise GeometryError("line needs two distinct points")

    @property
    def geometry(self) -> Geometry:
        return self.p.geometry


def _check_same_geometry(*objs):
    g = objs[0].geometry
    for o in objs[1:]:
        if o.geometry != g:
            raise GeometryError(f"geometry mismatch: {o.geometry} vs {g}")
    return g


def _clamped(x: float, lo: float, hi: float) -> float:
    if x < lo - CLAMP_TOL or x > hi + CLAMP_TOL:
        raise GeometryError(f"value {x} outside [{lo}, {hi}] beyond tolerance")
    return min(max(x, lo), hi)


def _normalize_sphere(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    if n < 1e-14:
        raise GeometryError("cannot normalize near-zero vector")
    return v / n


def _normalize_hyperboloid(v: np.ndarray) -> np.ndarray:
    q = minkowski_dot(v, v)
    if q >= -1e-14:
        raise GeometryError("vector is not timelike")
    w = v / math.sqrt(-q)
    return w if w[0] > 0 else -w


# ---------------------------------------------------------------------------
# metric operations
# ---------------------------------------------------------------------------

def distance(p: Point, q: Point) -> float:
    """Geodesic distance. Spherical antipodal pairs are rejected."""
    g = _check_same_geometry(p, q)
    if g.kind == "E":
        return float(np.linalg.norm(p.coords - q.coords))
    if g.kind == "S":
        c = float(p.coords @ q.coords)
        if c < -1.0 + EXCLUSION_TOL:
            raise GeometryError("antipodal spherical pair")
        return math.acos(_clamped(c, -1.0, 1.0))
    m = -minkowski_dot(p.coords, q.coords)
    return math.acosh(_clamped(m, 1.0, math.inf))


def midpoint(p: Point, q: Point) -> Point:
    g = _check_same_geometry(p, q)
    if g.kind == "E":
        return Point(g, 0.5 * (p.coords + q.coords))
    if g.kind == "S":
        if float(p.coords @ q.coords) < -1.0 + EXCLUSION_TOL:
            raise GeometryError("antipodal spherical pair")
        return Point(g, _normalize_sphere(p.coords + q.coords))
    return Point(g, _normalize_hyperboloid(p.coords + q.coords))


def bisector(p: Point, q: Point) -> Hyperplane:
    """Perpendicular bisector of [p, q], oriented from p towards q.

    Satisfies ``point_hyperplane_distance(h, p) = -point_hyperplane_distance(h, q)``
    and ``reflect(h, p) = q``.
    """
    g = _check_same_geometry(p, q)
    w = q.coords - p.coords
    if g.kind == "E":
        u = w / np.linalg.norm(w)
        m = 0.5 * (p.coords + q.coords)
        return Hyperplane(g, u, float(u @ m))
    if g.kind == "S":
        if float(p.coords @ q.coords) < -1.0 + EXCLUSION_TOL:
            raise GeometryError("antipodal spherical pair")
        return Hyperplane(g, _normalize_sphere(w))
    qq = minkowski_dot(w, w)
    if qq <= 1e-14:
        raise GeometryError("bisector of coincident points")
    return Hyperplane(g, w / math.sqrt(qq))


def point_hyperplane_distance(h: Hyperplane, p: Point) -> float:
    """Signed geodesic distance from p to h (zero iff p lies on h)."""
    g = _check_same_geometry(h, p)
    if g.kind == "E":
        return float(h.normal @ p.coords) - h.offset
    if g.kind == "S":
        return math.asin(_clamped(float(h.normal @ p.coords), -1.0, 1.0))
    return math.asinh(minkowski_dot(p.coords, h.normal))


def reflect(h: Hyperplane, p: Point) -> Point:
    """Isometric reflection in h; an involution fixing h pointwise."""
    g = _check_same_geometry(h, p)
    if g.kind == "E":
        s = float(h.normal @ p.coords) - h.offset
        return Point(g, p.coords - 2.0 * s * h.normal)
    if g.kind == "S":
        return Point(g, p.coords - 2.0 * float(h.normal @ p.coords) * h.normal)
    return Point(g, p.coords - 2.0 * minkowski_dot(p.coords, h.normal) * h.normal)


def project_orthogonal(h: Hyperplane, p: Point) -> Point:
    """Orthogonal (nearest-point) projection onto h, for E^d and S^d.

    Spherical points at a pole of h have no well-defined projection and are
    rejected.
    """
    g = _check_same_geometry(h, p)
    if g.kind == "E":
        s = float(h.normal @ p.coords) - h.offset
        return Point(g, p.coords - s * h.normal)
    if g.kind == "S":
        s = float(h.normal @ p.coords)
        if 1.0 - abs(s) < EXCLUSION_TOL:
            raise GeometryError("cannot project a pole of the hyperplane")
        return Point(g, _normalize_sphere(p.coords - s * h.normal))
    raise GeometryError("use project_g_orthogonal in H^d")


def project_g_orthogonal(h: Hyperplane, axis: Line, p: Point) -> Point:
    """Hyperbolic g-orthogonal projection onto h with axis perpendicular to h.

    Sends p to the intersection with h of the unique g-line (the axis itself,
    or a hypercycle with that axis) through p.  Fixes h pointwise and preserves
    the distance to the axis.
    """
    g = _check_same_geometry(h, axis.p, p)
    if g.kind != "H":
        raise GeometryError("g-orthogonal projection is a hyperbolic operation")
    m, u_tan = _axis_foot_on_hyperplane(h, axis)
    # decompose p over the Minkowski-orthogonal frame (m timelike, u_tan spacelike)
    a = -minkowski_dot(p.coords, m)          # cosh(s) * cosh(t)
    b = minkowski_dot(p.coords, u_tan)       # sinh(s) * cosh(t)
    w = p.coords - a * m - b * u_tan
    ww = minkowski_dot(w, w)
    if ww <= 1e-20:
        return Point(g, m)                   # p lies on the axis
    # p = (m cosh s + u sinh s) cosh t + n sinh t  with  sinh t = |w|_M
    return Point(g, m * math.sqrt(1.0 + ww) + w)


def _axis_foot_on_hyperplane(h: Hyperplane, axis: Line) -> tuple[np.ndarray, np.ndarray]:
    """Intersection m of axis with h, and the axis' unit tangent at m.

    Raises unless the axis is perpendicular to h at m.
    """
    x, y = axis.p.coords, axis.q.coords
    hx, hy = minkowski_dot(x, h.normal), minkowski_dot(y, h.normal)
    z = hy * x - hx * y
    qq = minkowski_dot(z, z)
    if qq >= -1e-14:
        raise GeometryError("axis does not cross the hyperplane")
    m = z / math.sqrt(-qq)
    if m[0] < 0:
        m = -m
    # unit tangent of the axis at m
    t = y + minkowski_dot(y, m) * m
    tt = minkowski_dot(t, t)
    if tt <= 1e-20:
        t = x + minkowski_dot(x, m) * m
        tt = minkowski_dot(t, t)
    t = t / math.sqrt(tt)
    if abs(abs(minkowski_dot(t, h.normal)) - 1.0) > 1e-8:
        raise GeometryError("axis is not perpendicular to the hyperplane")
    return m, t


def geodesic_point(p: Point, tangent: np.ndarray, s: float) -> Point:
    """Point at arc length s along the geodesic from p with the given unit tangent.

    The tangent lives in the ambient model: orthogonal to p for S^d,
    Minkowski-orthogonal spacelike for H^d, free direction for E^d.
    """
    g = p.geometry
    if g.kind == "E":
        return Point(g, p.coords + s * tangent)
    if g.kind == "S":
        return Point(g, math.cos(s) * p.coords + math.sin(s) * tangent)
    return Point(g, math.cosh(s) * p.coords + math.sinh(s) * tangent)


# ---------------------------------------------------------------------------
# charts
# ---------------------------------------------------------------------------

def _frame_basis(geometry: Geometry, center: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of the tangent space at ``center``.

    Columns are ambient vectors. Reduces to the coordinate axes when the
    center is the model basepoint.
    """
    d, n = geometry.d, geometry.ambient_dim
    if geometry.kind == "E":
        return np.eye(d)
    if geometry.kind == "S":
        # drop the ambient axis most parallel to the center, Gram-Schmidt the rest
        drop = int(np.argmax(np.abs(center)))
        cand = [np.eye(n)[i] for i in range(n) if i != drop]
        dot = lambda a, b: float(a @ b)
        sign = -1.0
    else:
        # spatial axes projected into the Minkowski-orthogonal complement of center
        cand = [np.eye(n)[i] for i in range(1, n)]
        dot = minkowski_dot
        sign = +1.0
    basis = []
    for v in cand:
        w = v + sign * dot(v, center) * center
        for b in basis:
            w = w - dot(w, b) * b
        q = dot(w, w)
        if q <= 1e-18:
            raise GeometryError("degenerate chart frame")
        basis.append(w / math.sqrt(q))
    return np.column_stack(basis)


@dataclass(frozen=True)
class ChartFrame:
    """Projective chart (Klein for H^d, gnomonic for S^d) at a center point.

    Geodesic segments map to Euclidean segments, so convex hulls can be taken
    in chart coordinates.  For E^d the chart is the identity.
    """

    geometry: Geometry
    center: Point
    basis: np.ndarray = field(default=None)  # ambient x d, orthonormal tangent frame

    def __post_init__(self):
        if self.center.geometry != self.geometry:
            raise GeometryError("chart center has wrong geometry")
        if self.basis is None:
            object.__setattr__(self, "basis", _frame_basis(self.geometry, self.center.coords))
        b = np.array(self.basis, dtype=float)
        b.flags.writeable = False
        object.__setattr__(self, "basis", b)

    @staticmethod
    def at_basepoint(geometry: Geometry) -> "ChartFrame":
        return ChartFrame(geometry, geometry.basepoint())

    # -- points ------------------------------------------------------------

    def to_chart(self, p: Point) -> np.ndarray:
        g = _check_same_geometry(self, p)
        if g.kind == "E":
            return np.array(p.coords)
        if g.kind == "S":
            t = float(p.coords @ self.center.coords)
            if t < EXCLUSION_TOL:
                raise GeometryError("point outside the open hemisphere of the chart")
            return (p.coords @ self.basis) / t
        t = -minkowski_dot(p.coords, self.center.coords)
        y = np.array([minkowski_dot(p.coords, self.basis[:, j]) for j in range(g.d)])
        return y / t

    def from_chart(self, v: np.ndarray) -> Point:
        g = self.geometry
        v = np.asarray(v, dtype=float)
        if g.kind == "E":
            return Point(g, v)
        raw = self.center.coords + self.basis @ v
        if g.kind == "S":
            return Point(g, _normalize_sphere(raw))
        return Point(g, _normalize_hyperboloid(raw))

    def to_chart_many(self, points) -> np.ndarray:
        return np.array([self.to_chart(p) for p in points])

    # -- hyperplanes ---------------------------------------------------------

    def hyperplane_to_chart(self, h: Hyperplane) -> tuple[np.ndarray, float]:
        """Chart-space equation (a, b) with h = {v : <a, v> = b}, |a| = 1."""
        g = _check_same_geometry(self, h)
        if g.kind == "E":
            return np.array(h.normal), h.offset
        if g.kind == "S":
            a = h.normal @ self.basis
            b = -float(h.normal @ self.center.coords)
        else:
            a = np.array([minkowski_dot(h.normal, self.basis[:, j]) for j in range(g.d)])
            b = minkowski_dot(h.normal, self.center.coords)
        n = np.linalg.norm(a)
        if n < 1e-14:
            raise GeometryError("hyperplane does not meet the chart domain")
        return a / n, b / n

    def hyperplane_from_chart(self, a: np.ndarray, b: float) -> Hyperplane:
        g = self.geometry
        a = np.asarray(a, dtype=float)
        if g.kind == "E":
            n = np.linalg.norm(a)
            return Hyperplane(g, a / n, b / n)
        if g.kind == "S":
            u = self.basis @ a - b * self.center.coords
            return Hyperplane(g, _normalize_sphere(u))
        u = self.basis @ a + b * self.center.coords
        q = minkowski_dot(u, u)
        if q <= 1e-14:
            raise GeometryError("chart hyperplane misses hyperbolic space")
        return Hyperplane(g, u / math.sqrt(q))


def chart(p: Point, center: Point | None = None) -> np.ndarray:
    """Chart coordinates of p (Klein for H^d, gnomonic for S^d, identity for E^d)."""
    g = p.geometry
    frame = ChartFrame(g, center) if center is not None else ChartFrame.at_basepoint(g)
    return frame.to_chart(p)


def unchart(geometry: Geometry, v, center: Point | None = None) -> Point:
    frame = ChartFrame(geometry, center) if center is not None else ChartFrame.at_basepoint(geometry)
    return frame.from_chart(v)
