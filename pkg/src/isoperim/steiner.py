"""Steiner symmetrization operators for polytopes with few vertices.

The three operators act on a polytope P and a vertex pair (p1, p2) under the
hyperplane hypothesis: some hyperplane through all other vertices crosses
[p1, p2].  In E^d the returned polytope *is* the Steiner symmetral of P with
respect to the bisector of [p1, p2]; in H^d and S^d it is the bounding
polytope conv([p1,p2] u {projections}), which contains the symmetral and
dominates its volume.  The hyperbolic projection is g-orthogonal with axis
through [p1, p2]; the spherical one is the orthogonal projection, with the
bisector's poles excluded.

A fiber-membership oracle for the symmetral itself (chord bisection along the
geometry's fiber family) is provided to validate the containment lemmas
numerically; the polytope operators never materialize curved symmetrals.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .geometry import (
    GeometryError,
    Geometry,
    Hyperplane,
    Line,
    Point,
    _axis_foot_on_hyperplane,
    bisector,
    minkowski_dot,
    point_hyperplane_distance,
    project_g_orthogonal,
    project_orthogonal,
)
from .polytopes import (
    NoSeparatingHyperplane,
    Polytope,
    separating_hyperplane_through_rest,
)

__all__ = [
    "edge_hypothesis_hyperplane",
    "steiner_euclidean",
    "steiner_hyperbolic_bound",
    "steiner_spherical_bound",
    "symmetrized_points",
    "shadow_volume",
    "fiber_symmetral_membership",
]

POLE_MARGIN = 1e-9
BISECT_MAX_DEPTH = 60
ENDPOINT_TOL = 1e-8


def edge_hypothesis_hyperplane(P: Polytope, i: int, j: int) -> Hyperplane:
    """The hyperplane H' through all vertices but i, j that crosses [p_i, p_j].

    For simplices H' is routed through the chart midpoint of the pair (it
    always exists); for n = d+2 it is the separating hyperplane of the Radon
    structure.  Raises :class:`NoSeparatingHyperplane` when the hypothesis of
    the symmetrization lemmas fails.
    """
    n, d = P.n, P.d
    if n == d + 2:
        return separating_hyperplane_through_rest(P, i, j)
    if n != d + 1:
        raise NoSeparatingHyperplane("hypothesis check supports n in {d+1, d+2}")
    X = P.chart_vertices
    rest = [r for r in range(n) if r not in (i, j)]
    A = np.vstack([X[rest], 0.5 * (X[i] + X[j])])
    mean = A.mean(axis=0)
    _, s, Vt = np.linalg.svd(A - mean, full_matrices=True)
    if len(s) == d and s[-1] > 1e-9 * s[0]:
        raise NoSeparatingHyperplane("midpoint construction degenerate")
    a = Vt[-1]
    return P.frame.hyperplane_from_chart(a, float(a @ mean))


def symmetrized_points(geometry: Geometry, points: list[Point], i: int, j: int) -> list[Point]:
    """Raw vertex list [p_i, p_j] + projections of the rest onto the bisector.

    This is the engine shared by the three polytope operators; it performs no
    hypothesis or minimality checks.
    """
    p1, p2 = points[i], points[j]
    h = bisector(p1, p2)
    rest = [p for k, p in enumerate(points) if k not in (i, j)]
    if geometry.kind == "H":
        axis = Line(p1, p2)
        proj = [project_g_orthogonal(h, axis, q) for q in rest]
    else:
        proj = [project_orthogonal(h, q) for q in rest]
    return [p1, p2] + proj


def _check_hypothesis(P: Polytope, i: int, j: int) -> Hyperplane:
    return edge_hypothesis_hyperplane(P, i, j)


def steiner_euclidean(P: Polytope, edge: tuple[int, int]) -> Polytope:
    """Steiner symmetral of a Euclidean polytope over the bisector of an edge.

    Volume is preserved exactly; the result is symmetric to the bisector and
    its inradius is at least that of P.
    """
    if P.geometry.kind != "E":
        raise GeometryError("steiner_euclidean requires E^d")
    i, j = edge
    _check_hypothesis(P, i, j)
    pts = symmetrized_points(P.geometry, list(P.vertices), i, j)
    return Polytope.hull_of(P.geometry, pts, frame=P.frame)


def steiner_hyperbolic_bound(P: Polytope, edge: tuple[int, int]) -> Polytope:
    """Bounding polytope of the hyperbolic Steiner symmetral over an edge.

    Contains sigma(P); its volume and inradius dominate those of P, with
    equality iff P is symmetric to the bisector.
    """
    if P.geometry.kind != "H":
        raise GeometryError("steiner_hyperbolic_bound requires H^d")
    i, j = edge
    _check_hypothesis(P, i, j)
    pts = symmetrized_points(P.geometry, list(P.vertices), i, j)
    return Polytope.hull_of(P.geometry, pts)


def steiner_spherical_bound(P: Polytope, edge: tuple[int, int]) -> Polytope:
    """Bounding polytope of the spherical Steiner symmetral over an edge.

    Requires P to be disjoint from the poles of the bisector.
    """
    if P.geometry.kind != "S":
        raise GeometryError("steiner_spherical_bound requires S^d")
    i, j = edge
    _check_hypothesis(P, i, j)
    h = bisector(P.vertices[i], P.vertices[j])
    for pole in h.poles():
        try:
            pole_inside = P.contains(pole)
        except GeometryError:
            pole_inside = False   # pole outside the chart hemisphere, so outside P
        if pole_inside:
            raise GeometryError("polytope touches a pole of the bisector")
    for k, v in enumerate(P.vertices):
        if k not in (i, j) and 1.0 - abs(float(v.coords @ h.normal)) < POLE_MARGIN:
            raise GeometryError("vertex at a pole of the bisector")
    pts = symmetrized_points(P.geometry, list(P.vertices), i, j)
    return Polytope.hull_of(P.geometry, pts)


def steiner_bound(P: Polytope, edge: tuple[int, int]) -> Polytope:
    """Geometry-dispatching wrapper over the three operators."""
    return {
        "E": steiner_euclidean,
        "H": steiner_hyperbolic_bound,
        "S": steiner_spherical_bound,
    }[P.geometry.kind](P, edge)


# ---------------------------------------------------------------------------
# shadow (linear parameter) systems
# ---------------------------------------------------------------------------

def shadow_volume(points, lambdas, v, t: float) -> float:
    """(k-1)-volume of conv{p_i + lambda_i * t * v} via the Gram determinant.

    Degenerate hulls return 0.  As a function of t this is convex, strictly so
    when the p_i together with v are affinely independent.
    """
    pts = np.asarray(points, dtype=float)
    lam = np.asarray(lambdas, dtype=float)
    moved = pts + np.outer(lam, np.asarray(v, dtype=float)) * t
    k = len(moved)
    if k == 1:
        return 0.0
    E = moved[1:] - moved[0]
    G = E @ E.T
    det = float(np.linalg.det(G))
    return math.sqrt(max(det, 0.0)) / math.factorial(k - 1)


# ---------------------------------------------------------------------------
# fiber oracle for the true symmetral
# ---------------------------------------------------------------------------

def _fiber_through(h: Hyperplane, axis: Line | None, x: Point):
    """Unit-speed-monotone parametrization of x's fiber, and x's parameter.

    Fibers: lines orthogonal to h (E^d), g-lines with the given axis (H^d),
    open half-circles through the poles of h (S^d).  The parameter is the
    signed coordinate along the fiber with 0 on h; for H^d it is the axis
    parameter s (arc length is s * cosh t, a fixed multiple along one fiber,
    so centering in s equals centering in arc length).
    """
    g = h.geometry
    if g.kind == "E":
        foot = project_orthogonal(h, x)
        t_x = point_hyperplane_distance(h, x)
        return (lambda t: Point(g, foot.coords + t * h.normal)), t_x, (-64.0, 64.0)
    if g.kind == "S":
        s = float(x.coords @ h.normal)
        if 1.0 - abs(s) < POLE_MARGIN:
            raise GeometryError("fiber degenerate at a pole")
        w = project_orthogonal(h, x)
        lim = math.pi / 2 - 1e-9
        return (lambda t: Point(g, math.cos(t) * w.coords + math.sin(t) * h.normal)), math.asin(s), (-lim, lim)
    if axis is None:
        raise GeometryError("hyperbolic fiber oracle needs an axis")
    m, u_tan = _axis_foot_on_hyperplane(h, axis)
    a = -minkowski_dot(x.coords, m)
    b = minkowski_dot(x.coords, u_tan)
    w = x.coords - a * m - b * u_tan
    ww = max(minkowski_dot(w, w), 0.0)
    cosh_t = math.sqrt(1.0 + ww)
    s_x = math.asinh(b / cosh_t)

    def fiber(s: float) -> Point:
        base = m * math.cosh(s) + u_tan * math.sinh(s)
        return Point(g, base * cosh_t + w)

    return fiber, s_x, (-16.0, 16.0)


def fiber_symmetral_membership(body: Callable[[Point], bool], h: Hyperplane,
                               axis: Line | None, x: Point,
                               samples: int = 256) -> bool:
    """Decide x in sigma(body) by centering the body's fiber chord on h.

    ``body`` must be a membership oracle of a convex set (caller's
    responsibility); the chord endpoints are located by coarse scanning plus
    bisection to 1e-8.
    """
    fiber, t_x, (lo, hi) = _fiber_through(h, axis, x)
    inside = lambda t: body(fiber(t))

    ts = np.linspace(lo, hi, samples)
    flags = [inside(t) for t in ts]
    if not any(flags):
        ts = np.linspace(lo, hi, 4 * samples)
        flags = [inside(t) for t in ts]
        if not any(flags):
            return False
    i_min = flags.index(True)
    i_max = len(flags) - 1 - flags[::-1].index(True)

    def refine(t_in: float, t_out: float) -> float:
        for _ in range(BISECT_MAX_DEPTH):
            if abs(t_out - t_in) < ENDPOINT_TOL:
                break
            mid = 0.5 * (t_in + t_out)
            if inside(mid):
                t_in = mid
            else:
                t_out = mid
        return 0.5 * (t_in + t_out)

    t_lo = ts[i_min] if i_min == 0 else refine(ts[i_min], ts[i_min - 1])
    t_hi = ts[i_max] if i_max == len(ts) - 1 else refine(ts[i_max], ts[i_max + 1])
    half = 0.5 * (t_hi - t_lo)
    return abs(t_x) <= half + ENDPOINT_TOL
