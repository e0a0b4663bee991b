"""Inballs, circumballs and the circumradius/inradius ratio functionals.

Both radii are geodesic min-max/max-min problems solved in chart coordinates
with the native distance as objective (charts only supply a convex parameter
domain).  Exact shortcuts are used where available: Welzl's algorithm gives
the Euclidean circumball directly and the spherical one through the ambient
linear model; the Euclidean inball is a linear program over the chart facet
inequalities.  The general route is an SLSQP epigraph solve with analytic
gradients, started at the chart centroid; results are deterministic for a
fixed input.

Reported values are always *certified one-sided*: a circumball radius is the
true maximum vertex distance from the returned center (an upper bound on the
circumradius), an inball radius the true minimum facet distance (a lower
bound on the inradius).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog, minimize

from .geometry import (
    Geometry,
    GeometryError,
    Point,
    distance,
    minkowski_dot,
    point_hyperplane_distance,
)
from .polytopes import Polytope
from .seb import smallest_enclosing_ball

__all__ = [
    "Ball",
    "ConvergenceError",
    "circumball",
    "inball",
    "inball_euclidean_lp",
    "ratio_gap",
    "ball_in_polytope",
    "polytope_in_ball",
]

SPHERICAL_RADIUS_CAP = math.pi / 2 - 1e-6


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class Ball:
    center: Point
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")
        if self.center.geometry.kind == "S" and self.radius >= math.pi / 2:
            raise ValueError("spherical balls are restricted to radius < pi/2")


# ---------------------------------------------------------------------------
# chart-space distance models (value + gradient wrt chart coordinates)
# ---------------------------------------------------------------------------

class _ChartModel:
    """Distances from a chart-parametrized center to fixed vertices/facets."""

    def __init__(self, P: Polytope):
        self.P = P
        self.g = P.geometry
        self.frame = P.frame
        self.B = np.array(P.frame.basis)          # ambient x d
        self.z = np.array(P.frame.center.coords)
        self.kind = self.g.kind

    def point(self, c: np.ndarray) -> Point:
        return self.frame.from_chart(c)

    def _lift(self, c):
        y = self.z + self.B @ c
        if self.kind == "S":
            s = math.sqrt(1.0 + float(c @ c))
        elif self.kind == "H":
            s2 = 1.0 - float(c @ c)
            if s2 <= 1e-14:
                raise GeometryError("chart point outside the Klein ball")
            s = math.sqrt(s2)
        else:
            s = 1.0
        return y, s

    def vertex_distance(self, c: np.ndarray, v: np.ndarray):
        """distance(center(c), v) and its gradient in c."""
        if self.kind == "E":
            diff = c - v
            r = float(np.linalg.norm(diff))
            grad = diff / r if r > 1e-15 else np.zeros_like(diff)
            return r, grad
        y, s = self._lift(c)
        if self.kind == "S":
            m = float(y @ v) / s
            dm = (self.B.T @ v) / s - float(y @ v) * c / s**3
            m_c = min(max(m, -1.0), 1.0)
            denom = max(math.sqrt(max(1.0 - m_c * m_c, 0.0)), 1e-12)
            return math.acos(m_c), -dm / denom
        w = minkowski_dot(y, v)
        m = -w / s
        dm = -np.array([minkowski_dot(self.B[:, j], v) for j in range(self.B.shape[1])]) / s \
            - w * c / s**3
        m_c = max(m, 1.0)
        denom = max(math.sqrt(max(m_c * m_c - 1.0, 0.0)), 1e-12)
        return math.acosh(m_c), dm / denom

    def facet_inner_distance(self, c: np.ndarray, normal: np.ndarray, offset: float):
        """Signed distance towards the interior of one facet, with gradient.

        ``normal``/``offset`` are the ambient outward data of the facet; the
        interior distance is positive inside the polytope.
        """
        if self.kind == "E":
            val = offset - float(normal @ c)
            return val, -normal
        y, s = self._lift(c)
        if self.kind == "S":
            gval = float(y @ normal) / s
            dg = (self.B.T @ normal) / s - float(y @ normal) * c / s**3
            gc = min(max(gval, -1.0), 1.0)
            denom = max(math.sqrt(max(1.0 - gc * gc, 0.0)), 1e-12)
            return -math.asin(gc), -dg / denom
        gval = minkowski_dot(y, normal) / s
        dg = np.array([minkowski_dot(self.B[:, j], normal) for j in range(self.B.shape[1])]) / s \
            + (-minkowski_dot(y, normal)) * (-c) / s**3
        denom = math.sqrt(1.0 + gval * gval)
        return -math.asinh(gval), -dg / denom


# ---------------------------------------------------------------------------
# circumball
# ---------------------------------------------------------------------------

def circumball(P: Polytope) -> Ball:
    """Smallest ball containing P (all vertices, hence the polytope).

    Exact in E^d and S^d via smallest enclosing Euclidean balls; SLSQP on the
    geodesically convex epigraph problem in H^d.  The returned radius is the
    exact maximum vertex distance from the returned center.
    """
    g = P.geometry
    V = P.vertex_array()
    if g.kind == "E":
        c, _ = smallest_enclosing_ball(V)
        center = Point(g, c)
    elif g.kind == "S":
        c, _ = smallest_enclosing_ball(V)
        nc = np.linalg.norm(c)
        if nc < 1e-12:
            raise GeometryError("vertex set spans no enclosing cap below a hemisphere")
        center = Point(g, c / nc)
    else:
        center = _circumball_slsqp(P)
    radius = max(distance(center, v) for v in P.vertices)
    if g.kind == "S" and radius >= math.pi / 2:
        raise GeometryError("spherical circumball would exceed a quarter turn")
    return Ball(center, radius)


def _circumball_slsqp(P: Polytope) -> Point:
    model = _ChartModel(P)
    X = P.chart_vertices
    d = P.d
    V = P.vertex_array()
    c0 = X.mean(axis=0)
    r0 = max(model.vertex_distance(c0, v)[0] for v in V)
    z0 = np.append(c0, r0 + 1e-6)

    def cons_f(z):
        return np.array([z[-1] - model.vertex_distance(z[:d], v)[0] for v in V])

    def cons_j(z):
        rows = []
        for v in V:
            _, gr = model.vertex_distance(z[:d], v)
            rows.append(np.append(-gr, 1.0))
        return np.array(rows)

    constraints = [{"type": "ineq", "fun": cons_f, "jac": cons_j}]
    if P.geometry.kind == "H":
        constraints.append({
            "type": "ineq",
            "fun": lambda z: np.array([1.0 - 1e-9 - float(z[:d] @ z[:d])]),
            "jac": lambda z: np.append(-2.0 * z[:d], 0.0)[None, :],
        })
    obj_grad = np.zeros(d + 1)
    obj_grad[-1] = 1.0
    res = minimize(lambda z: z[-1], z0, jac=lambda z: obj_grad,
                   constraints=constraints, method="SLSQP",
                   options={"maxiter": 500, "ftol": 1e-14})
    best = res.x[:d] if np.all(np.isfinite(res.x)) else c0
    # the reported ball is valid regardless of solver status
    return model.point(best)


# ---------------------------------------------------------------------------
# inball
# ---------------------------------------------------------------------------

def inball(P: Polytope) -> Ball:
    """Largest ball contained in P.

    The center maximizes the minimum interior facet distance (a linear
    program in E^d, SLSQP in H^d/S^d).  The returned radius is the exact
    minimum facet distance from the returned center.
    """
    g = P.geometry
    if g.kind == "E":
        center = _inball_lp_center(P)
    else:
        center = _inball_slsqp(P)
    radius = min(-point_hyperplane_distance(f.hyperplane, center) for f in P.facets)
    if radius < 0:
        raise ConvergenceError("inball center left the polytope")
    if g.kind == "S":
        radius = min(radius, SPHERICAL_RADIUS_CAP)
    return Ball(center, radius)


def _inball_lp_center(P: Polytope) -> Point:
    A = np.array([f.chart_normal for f in P.facets])
    b = np.array([f.chart_offset for f in P.facets])
    m, d = A.shape
    c = np.zeros(d + 1)
    c[-1] = -1.0
    A_ub = np.hstack([A, np.ones((m, 1))])
    res = linprog(c, A_ub=A_ub, b_ub=b, bounds=[(None, None)] * d + [(0, None)],
                  method="highs")
    if res.status != 0:
        raise ConvergenceError(f"inball LP failed: {res.message}")
    return P.frame.from_chart(res.x[:d])


def inball_euclidean_lp(P: Polytope) -> Ball:
    """Chebyshev-center linear program; cross-check oracle for E^d inballs."""
    if P.geometry.kind != "E":
        raise GeometryError("LP inball is Euclidean only")
    center = _inball_lp_center(P)
    radius = min(-point_hyperplane_distance(f.hyperplane, center) for f in P.facets)
    return Ball(center, radius)


def _inball_slsqp(P: Polytope) -> Point:
    model = _ChartModel(P)
    d = P.d
    facets = [(np.array(f.hyperplane.normal), f.hyperplane.offset) for f in P.facets]
    c0 = P.chart_vertices.mean(axis=0)
    t0 = min(model.facet_inner_distance(c0, nrm, off)[0] for nrm, off in facets)
    z0 = np.append(c0, max(t0 - 1e-6, 1e-9))

    def cons_f(z):
        return np.array([model.facet_inner_distance(z[:d], nrm, off)[0] - z[-1]
                         for nrm, off in facets])

    def cons_j(z):
        rows = []
        for nrm, off in facets:
            _, gr = model.facet_inner_distance(z[:d], nrm, off)
            rows.append(np.append(gr, -1.0))
        return np.array(rows)

    constraints = [{"type": "ineq", "fun": cons_f, "jac": cons_j}]
    if P.geometry.kind == "H":
        constraints.append({
            "type": "ineq",
            "fun": lambda z: np.array([1.0 - 1e-9 - float(z[:d] @ z[:d])]),
            "jac": lambda z: np.append(-2.0 * z[:d], 0.0)[None, :],
        })
    obj_grad = np.zeros(d + 1)
    obj_grad[-1] = -1.0
    res = minimize(lambda z: -z[-1], z0, jac=lambda z: obj_grad,
                   constraints=constraints, method="SLSQP",
                   options={"maxiter": 500, "ftol": 1e-14})
    cand = [res.x[:d]] if np.all(np.isfinite(res.x)) else []
    cand.append(c0)
    best = max(cand, key=lambda c: min(model.facet_inner_distance(c, n_, o_)[0]
                                       for n_, o_ in facets))
    return model.point(best)


# ---------------------------------------------------------------------------
# ratio functional and containment checks
# ---------------------------------------------------------------------------

def ratio_gap(S: Polytope) -> float:
    """Slack of the circumradius/inradius bound for simplices.

    tanh(cirr) - d tanh(ir) in H^d, tan(cirr) - d tan(ir) in S^d (d <= 3),
    cirr - d*ir in E^d; nonnegative with equality exactly at regular
    simplices.
    """
    g = S.geometry
    if S.n != g.d + 1:
        raise ValueError("ratio_gap is defined for simplices")
    if g.kind == "S" and g.d > 3:
        raise GeometryError("spherical ratio bound is available for d <= 3 only")
    R = circumball(S).radius
    r = inball(S).radius
    if g.kind == "E":
        return R - g.d * r
    if g.kind == "H":
        return math.tanh(R) - g.d * math.tanh(r)
    return math.tan(R) - g.d * math.tan(r)


def ball_in_polytope(P: Polytope, ball: Ball, tol: float = 1e-9) -> bool:
    """Whether Ball(center, r) is contained in P (facet distances from center)."""
    if not P.contains(ball.center, tol=max(tol, 1e-9)):
        return False
    dmin = min(-point_hyperplane_distance(f.hyperplane, ball.center) for f in P.facets)
    return dmin >= ball.radius - tol


def polytope_in_ball(P: Polytope, ball: Ball, tol: float = 1e-9) -> bool:
    return all(distance(ball.center, v) <= ball.radius + tol for v in P.vertices)
