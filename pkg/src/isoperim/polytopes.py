"""Vertex-list polytopes with chart-space hulls and few-vertex combinatorics.

A polytope is the convex hull of n >= d+1 points in E^d, H^d or S^d.  All
convexity computations run in a projective chart (see ``geometry``), where
geodesic convexity coincides with Euclidean convexity.  For n = d+2 the face
lattice is computed combinatorially from the Gale diagram of the unique
affine (Radon) dependence of the chart vertices; the chart hull only backs
membership tests, volumes and the independent face-lattice cross-check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .geometry import (
    ChartFrame,
    Geometry,
    GeometryError,
    Hyperplane,
    Point,
    point_hyperplane_distance,
)
from .seb import smallest_enclosing_ball

__all__ = [
    "PolytopeError",
    "DegenerateInputError",
    "NoSeparatingHyperplane",
    "Facet",
    "RadonSplit",
    "GaleDiagram",
    "Polytope",
    "gale_is_face",
    "faces_via_hull",
    "separating_hyperplane_through_rest",
]

# Coefficients below this fraction of the largest one are classified as the
# zero class of the Radon dependence.
RADON_ZERO_TOL = 1e-10
MEMBERSHIP_TOL = 1e-9


class PolytopeError(ValueError):
    pass


class DegenerateInputError(PolytopeError):
    """Vertices do not span a d-dimensional set (or dependence is not 1-D)."""


class NoSeparatingHyperplane(PolytopeError):
    """No hyperplane through the remaining vertices crosses the given edge."""


@dataclass(frozen=True)
class Facet:
    """One facet: chart equation <a, x> <= b and the incident vertex indices."""

    chart_normal: np.ndarray   # unit vector, outward in chart space
    chart_offset: float
    vertex_ids: tuple[int, ...]
    hyperplane: Hyperplane     # ambient representation, outward oriented


@dataclass(frozen=True)
class RadonSplit:
    """Radon partition of d+2 chart points into two simplices plus zeros.

    ``point`` is the common point of the two open chart simplices.  The split
    is *proper* when both sides have at least two points; a singleton side
    means that vertex lies inside the hull of the complementary side.
    """

    I1: tuple[int, ...]
    I2: tuple[int, ...]
    I0: tuple[int, ...]
    point: np.ndarray

    @property
    def proper(self) -> bool:
        return len(self.I1) >= 2 and len(self.I2) >= 2

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self.I1) | frozenset(self.I2)


@dataclass(frozen=True)
class GaleDiagram:
    """Gale diagram of a (d+2)-vertex polytope: one label in {-1, 0, +1} per vertex."""

    labels: tuple[int, ...]

    def __post_init__(self):
        if any(v not in (-1, 0, 1) for v in self.labels):
            raise PolytopeError("labels must be -1, 0 or +1")

    @property
    def multiplicities(self) -> tuple[int, int, int]:
        """(k1+1, r, k2+1): counts of -1, 0, +1 labels."""
        ls = self.labels
        return (sum(v == -1 for v in ls), sum(v == 0 for v in ls), sum(v == 1 for v in ls))

    @staticmethod
    def from_multiplicities(m_minus: int, m_zero: int, m_plus: int) -> "GaleDiagram":
        return GaleDiagram((-1,) * m_minus + (0,) * m_zero + (1,) * m_plus)


def gale_is_face(g: GaleDiagram, subset) -> bool:
    """Whether a vertex subset spans a face, by the 1-D relative-interior rule.

    The subset is a face iff the labels of the *complement* capture 0 in the
    relative interior of their convex hull: they include both a -1 and a +1,
    or consist of 0's only.
    """
    subset = frozenset(subset)
    rest = [g.labels[i] for i in range(len(g.labels)) if i not in subset]
    return (any(v < 0 for v in rest) and any(v > 0 for v in rest)) or all(v == 0 for v in rest)


def _radon_split_of_chart(X: np.ndarray) -> RadonSplit:
    n, d = X.shape
    if n != d + 2:
        raise PolytopeError(f"Radon split needs d+2 = {d + 2} points, got {n}")
    # (d+1) x (d+2) matrix: the kernel is one-dimensional iff the row rank is full
    M = np.vstack([X.T, np.ones(n)])
    _, s, Vt = np.linalg.svd(M)
    if s[-1] <= 1e-8 * s[0]:
        raise DegenerateInputError("affine-dependence kernel is not one-dimensional")
    c = Vt[-1]
    thr = RADON_ZERO_TOL * np.max(np.abs(c))
    big = np.flatnonzero(np.abs(c) >= thr)
    if c[big[0]] < 0:
        c = -c
    I1 = tuple(int(i) for i in np.flatnonzero(c >= thr))
    I2 = tuple(int(i) for i in np.flatnonzero(c <= -thr))
    I0 = tuple(int(i) for i in np.flatnonzero(np.abs(c) < thr))
    w = c[list(I1)]
    p = (w @ X[list(I1)]) / w.sum()
    return RadonSplit(I1, I2, I0, p)


# ---------------------------------------------------------------------------
# chart hull helpers
# ---------------------------------------------------------------------------

def _hull_facets(X: np.ndarray) -> list[tuple[np.ndarray, float, tuple[int, ...]]]:
    """Merged facets of conv(X): (unit outward normal, offset, vertex ids)."""
    try:
        hull = ConvexHull(X)
    except QhullError as e:
        raise DegenerateInputError(f"chart hull failed: {e}") from e
    eqs = hull.equations            # rows (a, b) with a.x + b <= 0 inside
    scale = max(1.0, float(np.max(np.abs(eqs[:, -1]))))
    groups: list[list[int]] = []
    reps: list[np.ndarray] = []
    for i, eq in enumerate(eqs):
        for gi, rep in enumerate(reps):
            if np.all(np.abs(eq - rep) <= 1e-7 * scale):
                groups[gi].append(i)
                break
        else:
            groups.append([i])
            reps.append(eq)
    out = []
    for gi, rows in enumerate(groups):
        ids = sorted({int(v) for r in rows for v in hull.simplices[r]})
        a = reps[gi][:-1]
        b = -float(reps[gi][-1])
        # absorb vertices lying on the facet that qhull assigned elsewhere
        on = np.flatnonzero(np.abs(X @ a - b) <= 1e-9 * scale)
        ids = sorted(set(ids) | {int(v) for v in on})
        out.append((a.copy(), b, tuple(ids)))
    return out


def _extreme_point_ids(X: np.ndarray) -> list[int]:
    try:
        hull = ConvexHull(X)
        return sorted(int(i) for i in hull.vertices)
    except QhullError:
        # lower-dimensional input: project to its affine span first
        mean = X.mean(axis=0)
        C = X - mean
        U, s, Vt = np.linalg.svd(C, full_matrices=False)
        rank = int(np.sum(s > 1e-10 * (s[0] if len(s) else 1.0)))
        if rank == 0:
            return [0]
        Y = C @ Vt[:rank].T
        if rank == 1:
            return sorted({int(np.argmin(Y[:, 0])), int(np.argmax(Y[:, 0]))})
        hull = ConvexHull(Y)
        return sorted(int(i) for i in hull.vertices)


# ---------------------------------------------------------------------------
# polytope
# ---------------------------------------------------------------------------

class Polytope:
    """Geometry tag + ordered vertex list + cached chart-space hull data.

    The constructor validates full-dimensionality and minimality (no vertex
    inside the hull of the others); use :meth:`hull_of` to build from a point
    soup that may contain non-extreme points.
    """

    def __init__(self, geometry: Geometry, vertices, frame: ChartFrame | None = None):
        self.geometry = geometry
        self.vertices: tuple[Point, ...] = tuple(vertices)
        n, d = len(self.vertices), geometry.d
        if n < d + 1:
            raise DegenerateInputError(f"need at least d+1 = {d + 1} vertices, got {n}")
        for v in self.vertices:
            if v.geometry != geometry:
                raise GeometryError("vertex has wrong geometry")
        self.frame = frame if frame is not None else _default_frame(geometry, self.vertices)
        X = self.frame.to_chart_many(self.vertices)
        self.chart_vertices = X
        # full-dimensionality
        C = X - X.mean(axis=0)
        s = np.linalg.svd(C, compute_uv=False)
        if len(s) < d or s[d - 1] <= 1e-10 * max(s[0], 1e-30):
            raise DegenerateInputError("vertices are not full-dimensional in chart space")
        # minimality
        if n == d + 2:
            if not self.radon_split.proper:
                raise PolytopeError("a vertex lies in the hull of the others")
        elif n > d + 2:
            if len(_extreme_point_ids(X)) != n:
                raise PolytopeError("a vertex lies in the hull of the others")

    @classmethod
    def hull_of(cls, geometry: Geometry, points, frame: ChartFrame | None = None) -> "Polytope":
        """Polytope on the extreme points of the given point soup."""
        points = list(points)
        fr = frame if frame is not None else _default_frame(geometry, points)
        X = fr.to_chart_many(points)
        keep = _extreme_point_ids(X)
        return cls(geometry, [points[i] for i in keep], frame=fr)

    @classmethod
    def from_chart(cls, frame: ChartFrame, chart_points) -> "Polytope":
        pts = [frame.from_chart(v) for v in np.asarray(chart_points, dtype=float)]
        return cls(frame.geometry, pts, frame=frame)

    # -- basic data ----------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def d(self) -> int:
        return self.geometry.d

    @cached_property
    def radon_split(self) -> RadonSplit:
        return _radon_split_of_chart(self.chart_vertices)

    @cached_property
    def gale_diagram(self) -> GaleDiagram:
        sp = self.radon_split
        labels = [0] * self.n
        for i in sp.I1:
            labels[i] = -1
        for i in sp.I2:
            labels[i] = 1
        return GaleDiagram(tuple(labels))

    @cached_property
    def facets(self) -> list[Facet]:
        out = []
        interior = self.chart_vertices.mean(axis=0)
        for a, b, ids in _hull_facets(self.chart_vertices):
            if float(a @ interior) > b:            # orient outward
                a, b = -a, -b
            h = self.frame.hyperplane_from_chart(a, b)
            # ambient normal outward as well: interior point on the negative side
            if point_hyperplane_distance(h, self.frame.from_chart(interior)) > 0:
                h = Hyperplane(h.geometry, -h.normal, -h.offset)
            out.append(Facet(a, b, ids, h))
        return out

    def contains(self, p: Point, tol: float = MEMBERSHIP_TOL) -> bool:
        """Membership via chart facet inequalities (boundary counts as inside)."""
        try:
            v = self.frame.to_chart(p)
        except GeometryError as e:
            raise GeometryError(f"chart failure: {e}") from e
        return all(float(f.chart_normal @ v) <= f.chart_offset + tol * (1 + abs(f.chart_offset))
                   for f in self.facets)

    # -- face lattice ----------------------------------------------------------

    def faces_k(self, k: int) -> list[tuple[int, ...]]:
        """All k-faces as sorted vertex index tuples (n <= d+2 only).

        For n = d+2 this is the exact Gale-diagram enumeration; for n = d+1
        every (k+1)-subset of the simplex.
        """
        n, d = self.n, self.d
        if not 0 <= k <= d - 1:
            raise PolytopeError(f"k must be in 0..{d - 1}")
        if n == d + 1:
            return [tuple(c) for c in itertools.combinations(range(n), k + 1)]
        if n != d + 2:
            raise PolytopeError("face lattice is available for n <= d+2 only")
        g = self.gale_diagram
        support = self.radon_split.support
        faces = [c for c in itertools.combinations(range(n), k + 1)
                 if not support <= set(c) and gale_is_face(g, c)]
        if k + 2 <= n:
            faces += [c for c in itertools.combinations(range(n), k + 2)
                      if support <= set(c) and gale_is_face(g, c)]
        return sorted(faces)

    def edges(self) -> list[tuple[int, int]]:
        return [tuple(e) for e in self.faces_k(1)]

    def vertex_array(self) -> np.ndarray:
        return np.array([v.coords for v in self.vertices])

    def __repr__(self):
        return f"Polytope({self.geometry}, n={self.n})"


def _default_frame(geometry: Geometry, points) -> ChartFrame:
    if geometry.kind == "E":
        return ChartFrame.at_basepoint(geometry)
    A = np.array([p.coords for p in points])
    c = A.sum(axis=0)
    if geometry.kind == "H":
        from .geometry import _normalize_hyperboloid
        return ChartFrame(geometry, Point(geometry, _normalize_hyperboloid(c)))
    nc = np.linalg.norm(c)
    if nc > 1e-12:
        z = c / nc
        if np.all(A @ z > 1e-9):
            return ChartFrame(geometry, Point(geometry, z))
    # centroid direction fails: center the smallest enclosing cap instead
    center, _ = smallest_enclosing_ball(A)
    nc = np.linalg.norm(center)
    if nc < 1e-12:
        raise GeometryError("spherical vertex set is not inside an open hemisphere")
    z = center / nc
    if not np.all(A @ z > 1e-9):
        raise GeometryError("spherical vertex set is not inside an open hemisphere")
    return ChartFrame(geometry, Point(geometry, z))


# ---------------------------------------------------------------------------
# operations on top of the lattice
# ---------------------------------------------------------------------------

def faces_via_hull(P: Polytope) -> dict[int, list[tuple[int, ...]]]:
    """Face lattice from the chart hull, independent of the Gale route.

    Proper faces are the closed intersections of facet vertex sets; the
    dimension of each face is the affine rank of its chart vertices.
    """
    X = P.chart_vertices
    facet_sets = [frozenset(f.vertex_ids) for f in P.facets]
    faces: set[frozenset] = set(facet_sets)
    queue = list(facet_sets)
    while queue:
        f = queue.pop()
        for g in facet_sets:
            h = f & g
            if h and h not in faces:
                faces.add(h)
                queue.append(h)
    out: dict[int, list[tuple[int, ...]]] = {}
    for f in faces:
        ids = sorted(f)
        C = X[ids] - X[ids].mean(axis=0)
        s = np.linalg.svd(C, compute_uv=False)
        dim = int(np.sum(s > 1e-8 * max(float(s[0]) if len(s) else 0.0, 1e-12)))
        out.setdefault(dim, []).append(tuple(ids))
    for k in out:
        out[k] = sorted(out[k])
    return out


def separating_hyperplane_through_rest(P: Polytope, q1: int, q2: int,
                                       crossing_tol: float = 1e-9) -> Hyperplane:
    """A hyperplane through all vertices except q1, q2, crossing [q1, q2].

    When the remaining d vertices span only a (d-2)-flat, the free rotation is
    fixed by routing the hyperplane through the chart midpoint of [q1, q2].
    """
    X = P.chart_vertices
    n, d = X.shape
    rest = [i for i in range(n) if i not in (q1, q2)]
    if len(rest) != d:
        raise PolytopeError("separating hyperplane requires n = d+2")
    A = X[rest]
    mean = A.mean(axis=0)
    C = A - mean
    U, s, Vt = np.linalg.svd(C, full_matrices=True)
    scale = max(float(s[0]) if len(s) else 0.0, 1e-30)
    rank = int(np.sum(s > 1e-9 * scale))
    if rank == d - 1:
        a = Vt[-1]
        b = float(a @ mean)
        s1 = float(a @ X[q1]) - b
        s2 = float(a @ X[q2]) - b
        lim = crossing_tol * max(abs(s1), abs(s2), 1.0)
        if s1 * s2 > lim * lim:
            raise NoSeparatingHyperplane(
                f"hyperplane through the rest does not cross [{q1},{q2}]")
    elif rank <= d - 2:
        mid = 0.5 * (X[q1] + X[q2])
        A2 = np.vstack([A, mid])
        mean = A2.mean(axis=0)
        C2 = A2 - mean
        _, s2v, Vt2 = np.linalg.svd(C2, full_matrices=True)
        if int(np.sum(s2v > 1e-9 * max(float(s2v[0]), 1e-30))) > d - 1:
            raise NoSeparatingHyperplane("degenerate rest-set does not admit the construction")
        a = Vt2[-1]
        b = float(a @ mean)
    else:
        raise NoSeparatingHyperplane("rest vertices affinely span the whole space")
    return P.frame.hyperplane_from_chart(a, b)
