"""Extremal configurations and their closed forms.

Constructors for regular simplices, orthogonal joins of two regular simplices,
the spherical spike simplex with small total edge length, and the candidate
families for the hyperbolic minimal-edge-length problem, plus the scalar
functions governing the Euclidean circumscribed-volume bound:

    f_k(t)   volume of the unit-inball join with component inradii
             sqrt(1+e^t), sqrt(1+e^-t)
    g_d(k)  = f_k(t*) with t* = ln((d-k)/k), the in-family minimum
    euvolir_bound(d) = g_d(floor(d/2)), the minimum over k

Vertices are emitted from shared subexpressions so that the symmetry group
acts to machine precision; equality-case tests rely on this.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize

from .geometry import ChartFrame, Geometry, GeometryError, Point, distance
from .measures import k_content
from .polytopes import Polytope
from .radii import Ball, ball_in_polytope, inball

__all__ = [
    "ExtremalParams",
    "regular_simplex",
    "orthogonal_join",
    "f_k",
    "t_star",
    "g_d",
    "euvolir_bound",
    "euvol",
    "unit_inball_join_volume",
    "unit_inball_join_min_volume",
    "regular_simplex_volume_unit_inradius",
    "spherical_regular_TEL",
    "spike_simplex_spherical",
    "edgelength_HH_candidates",
    "annulus_triangles",
    "annulus_overlap_regular",
    "annulus_overlap_isosceles",
]


@dataclass(frozen=True)
class ExtremalParams:
    """Unit-inball orthogonal-join parameters (r1^2-1)(r2^2-1) = 1."""

    d: int
    k: int
    r1: float
    r2: float
    t: float

    def __post_init__(self):
        if not 1 <= self.k <= self.d - 1:
            raise ValueError("need 1 <= k <= d-1")
        if abs((self.r1**2 - 1.0) * (self.r2**2 - 1.0) - 1.0) > 1e-12:
            raise ValueError("component inradii are not on the unit-inball locus")

    @staticmethod
    def from_t(d: int, k: int, t: float) -> "ExtremalParams":
        return ExtremalParams(d, k, math.sqrt(1.0 + math.exp(t)),
                              math.sqrt(1.0 + math.exp(-t)), t)


# ---------------------------------------------------------------------------
# regular simplices
# ---------------------------------------------------------------------------

def _regular_directions(d: int) -> np.ndarray:
    """d+1 unit vectors in R^d forming a regular simplex of circumradius 1.

    Built from e_i - centroid in R^(d+1) pushed through the Helmert basis of
    the sum-zero hyperplane; all coordinates share the same subexpressions.
    """
    n = d + 1
    U = np.eye(n) - np.ones((n, n)) / n
    H = np.zeros((d, n))
    for k in range(1, n):
        H[k - 1, :k] = 1.0
        H[k - 1, k] = -float(k)
        H[k - 1] /= math.sqrt(k * (k + 1))
    X = U @ H.T
    return X / np.linalg.norm(X[0])


def _chart_scale_for(geometry: Geometry, value: float) -> float:
    """Chart radius corresponding to a geodesic radius from the chart center."""
    if geometry.kind == "E":
        return value
    if geometry.kind == "H":
        return math.tanh(value)
    if not 0 < value < math.pi / 2:
        raise GeometryError("spherical radii must lie in (0, pi/2)")
    return math.tan(value)


def regular_simplex(geometry: Geometry, d: int, constraint: str = "inradius",
                    value: float = 1.0, center: Point | None = None) -> Polytope:
    """Regular d-simplex centered at the model basepoint (or ``center``).

    ``constraint`` fixes the inradius, circumradius or edge length to
    ``value``; radii invert in closed form through the chart, the edge by
    monotone root finding on the chart scale.
    """
    g = geometry
    if g.d != d:
        raise GeometryError("geometry dimension mismatch")
    frame = ChartFrame(g, center) if center is not None else ChartFrame.at_basepoint(g)
    dirs = _regular_directions(d)
    if constraint == "circumradius":
        scale = _chart_scale_for(g, value)
    elif constraint == "inradius":
        if g.kind == "S" and not 0 < value < math.pi / 2:
            raise GeometryError("spherical inradius must lie in (0, pi/2)")
        scale = d * _chart_scale_for(g, value)
    elif constraint == "edge":
        scale = _edge_scale(g, frame, dirs, value)
    else:
        raise ValueError(f"unknown constraint {constraint!r}")
    return Polytope.from_chart(frame, scale * dirs)


def _edge_scale(g: Geometry, frame: ChartFrame, dirs: np.ndarray, edge: float) -> float:
    if edge <= 0:
        raise GeometryError("edge length must be positive")
    base = float(np.linalg.norm(dirs[0] - dirs[1]))
    if g.kind == "E":
        return edge / base

    def edge_at(s: float) -> float:
        return distance(frame.from_chart(s * dirs[0]), frame.from_chart(s * dirs[1]))

    if g.kind == "H":
        hi = 1.0 - 1e-9
        if edge_at(hi) < edge:
            raise GeometryError("edge length not attainable")  # pragma: no cover
        return brentq(lambda s: edge_at(s) - edge, 1e-12, hi, xtol=1e-14)
    cap = math.acos(-1.0 / g.d)
    if edge >= cap - 1e-12:
        raise GeometryError(f"spherical edge must be below arccos(-1/d) = {cap}")
    hi = math.tan(math.pi / 2 - 1e-8)
    return brentq(lambda s: edge_at(s) - edge, 1e-12, hi, xtol=1e-14, rtol=1e-15)


def regular_simplex_volume_unit_inradius(d: int) -> float:
    """Euclidean volume of the regular d-simplex with inradius 1."""
    return d ** (d / 2.0) * (d + 1) ** ((d + 1) / 2.0) / math.factorial(d)


# ---------------------------------------------------------------------------
# orthogonal joins
# ---------------------------------------------------------------------------

def orthogonal_join(geometry: Geometry, d: int, k: int, size1: float, size2: float,
                    by: str = "inradius", center: Point | None = None) -> Polytope:
    """conv(S1 u S2): regular k- and (d-k)-simplices in orthogonal subspaces.

    The subspaces are totally geodesic through the common center (coordinate
    blocks of the chart); ``by`` says whether the sizes are the components'
    inradii or circumradii within their own subspaces.
    """
    g = geometry
    if g.d != d:
        raise GeometryError("geometry dimension mismatch")
    if not 1 <= k <= d - 1:
        raise ValueError("need 1 <= k <= d-1")
    frame = ChartFrame(g, center) if center is not None else ChartFrame.at_basepoint(g)
    if by == "inradius":
        a1 = k * _chart_scale_for(g, size1)
        a2 = (d - k) * _chart_scale_for(g, size2)
    elif by == "circumradius":
        a1 = _chart_scale_for(g, size1)
        a2 = _chart_scale_for(g, size2)
    else:
        raise ValueError(f"unknown size convention {by!r}")
    if g.kind == "H" and (a1 >= 1.0 or a2 >= 1.0):
        raise GeometryError("component does not fit inside hyperbolic space")
    X = np.zeros((d + 2, d))
    X[: k + 1, :k] = a1 * _regular_directions(k)
    X[k + 1:, k:] = a2 * _regular_directions(d - k)
    return Polytope.from_chart(frame, X)


def euvol(d: int, k: int, r1: float, r2: float) -> float:
    """Euclidean volume of the orthogonal join with component inradii r1, r2.

    Gram-determinant closed form: the join is covered by (k+1)(d-k+1)
    congruent cones over its facets, and the determinant of the vertex Gram
    matrix factors over the two orthogonal blocks:

        vol = r1^k r2^(d-k) k^(k/2) (d-k)^((d-k)/2)
              (k+1)^((k+1)/2) (d-k+1)^((d-k+1)/2) / d!

    Agrees with chart triangulation to machine precision for all k; at k = 0
    it degenerates to the regular-simplex volume.
    """
    return (r1**k * r2 ** (d - k) * k ** (k / 2.0) * (d - k) ** ((d - k) / 2.0)
            * (k + 1) ** ((k + 1) / 2.0) * (d - k + 1) ** ((d - k + 1) / 2.0)
            / math.factorial(d))


def f_k(d: int, k: int, t: float) -> float:
    """Benchmark family for the circumscribed-volume bound, as a function of
    the log-ratio t of the unit-inball parametrization.

    Caution: this reproduces the classical displayed constants (minimized by
    :func:`g_d`); it coincides with the measured join volume only for d = 2.
    Use :func:`unit_inball_join_volume` for the volume itself.
    """
    if not 1 <= k <= d - 1:
        raise ValueError("need 1 <= k <= d-1")
    return ((1.0 + math.exp(t)) ** (k / 2.0) * (1.0 + math.exp(-t)) ** ((d - k) / 2.0)
            * k ** (k + 0.5) * (d - k) ** (d - k + 0.5)
            * (k + 1) * (d - k + 1) / math.factorial(d))


def t_star(d: int, k: int) -> float:
    """Stationary point of f_k (and of the measured volume): t* = ln((d-k)/k)."""
    if not 1 <= k <= d - 1:
        raise ValueError("need 1 <= k <= d-1")
    return math.log((d - k) / k)


def g_d(d: int, k: float) -> float:
    """In-family minimum f_k(t*); defined for real k in (0, d) as well.

    g_4(1) = g_4(2) = 48 is the tied pair of this constant family.
    """
    if not 0 < k < d:
        raise ValueError("need 0 < k < d")
    return (d ** (d / 2.0) * k ** ((k + 1) / 2.0) * (d - k) ** ((d - k + 1) / 2.0)
            * (k + 1) * (d - k + 1) / math.factorial(d))


def euvolir_bound(d: int) -> float:
    """Benchmark-constant bound at the balanced split: g_d(floor(d/2))."""
    return g_d(d, d // 2)


def unit_inball_join_volume(d: int, k: int, t: float) -> float:
    """Measured volume of the unit-inball join at log-ratio t (see euvol)."""
    p = ExtremalParams.from_t(d, k, t)
    return euvol(d, k, p.r1, p.r2)


def unit_inball_join_min_volume(d: int, k: int) -> float:
    """Minimal measured volume over the unit-inball join family for fixed k.

    Attained at t* = ln((d-k)/k):

        d^(d/2)/d! * (k+1)^((k+1)/2) (d-k+1)^((d-k+1)/2)

    This is the volume benchmark used by circumscribed-volume experiments;
    it extends continuously to the regular simplex at k = 0.
    """
    if not 0 <= k <= d:
        raise ValueError("need 0 <= k <= d")
    return (d ** (d / 2.0) * (k + 1) ** ((k + 1) / 2.0)
            * (d - k + 1) ** ((d - k + 1) / 2.0) / math.factorial(d))


# ---------------------------------------------------------------------------
# spherical total edge length
# ---------------------------------------------------------------------------

def spherical_regular_TEL(r: float, d: int) -> float:
    """Total edge length of the regular spherical d-simplex with inradius r."""
    if not 0 < r < math.pi / 2:
        raise ValueError("inradius must lie in (0, pi/2)")
    t2 = math.tan(r) ** 2
    edge = math.acos((1.0 - d * t2) / (1.0 + d * d * t2))
    return math.comb(d + 1, 2) * edge


def spike_simplex_spherical(d: int, eps: float, x: float) -> Polytope:
    """Simplex with total edge length below d*pi + eps on S^d.

    A tiny regular (d-1)-simplex S0 (total edge length < eps) centered at c'
    plus the point p such that the basepoint c is the midpoint of [c', p];
    x = d(c', c) < pi/2.  For x close enough to pi/2 the result contains
    large balls around c while its edges stay just short of half turns.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if not 0 < x < math.pi / 2:
        raise ValueError("x must lie in (0, pi/2)")
    g = Geometry.spherical(d)
    n = g.ambient_dim
    c = np.zeros(n)
    c[0] = 1.0
    axis = np.zeros(n)
    axis[1] = 1.0
    c_prime = math.cos(x) * c - math.sin(x) * axis
    p = math.cos(x) * c + math.sin(x) * axis
    # chart circumradius of S0 from its edge budget
    edge = min(eps / (2.0 * math.comb(d, 2)), 0.05)
    ce = math.cos(edge)
    a = math.sqrt((1.0 - ce) / (ce + 1.0 / (d - 1))) if d >= 2 else 0.0
    dirs = _regular_directions(d - 1)
    # tangent frame at c' orthogonal to the axis: ambient axes 2..d
    verts = []
    for x_hat in dirs:
        t_vec = np.zeros(n)
        t_vec[2:] = x_hat
        v = c_prime + a * t_vec
        verts.append(Point(g, v / np.linalg.norm(v)))
    verts.append(Point(g, p))
    return Polytope(g, verts)


# ---------------------------------------------------------------------------
# hyperbolic minimal total edge length: candidate families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HHCandidate:
    label: str
    polytope: Polytope
    total_edge_length: float


def _tel(P: Polytope) -> float:
    return k_content(P, 1)


def _join_inradius_hyperbolic(t1: float, t2: float) -> float:
    """Inradius of the join from the components' chart inradii t1, t2."""
    return math.atanh(t1 * t2 / math.sqrt(t1 * t1 + t2 * t2))


def _hh_join_candidate(d: int, k: int, r: float) -> Polytope | None:
    """Family (i): orthogonal join circumscribed about Ball(o, r), TEL-minimal

    over the one-parameter trade-off between the component inradii."""
    T = math.tanh(r)
    if T * math.sqrt(2.0) >= 1.0 - 1e-9:
        return None                     # components would need infinite size
    s_max = math.log(1.0 / (T * T) - 1.0)
    g = Geometry.hyperbolic(d)

    def build(s: float) -> Polytope:
        t1 = T * math.sqrt(1.0 + math.exp(s))
        t2 = T * math.sqrt(1.0 + math.exp(-s))
        return orthogonal_join(g, d, k, math.atanh(t1), math.atanh(t2), by="inradius")

    def tel_of(s: float) -> float:
        return _tel(build(s))

    lo, hi = -s_max + 1e-6, s_max - 1e-6
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c1 = b - gr * (b - a)
    c2 = a + gr * (b - a)
    f1, f2 = tel_of(c1), tel_of(c2)
    for _ in range(80):
        if f1 < f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - gr * (b - a)
            f1 = tel_of(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + gr * (b - a)
            f2 = tel_of(c2)
    return build(0.5 * (a + b))


def _hh_segments_candidate(d: int, r: float) -> Polytope | None:
    """Family (ii): two perpendicular segments through q1 plus a regular
    simplex on d-2 vertices around q2, with the ball center on [q1, q2].

    Parameters (offset of q1, half-length of the segments, offset of q2 and
    the simplex size) are optimized for total edge length; containment is
    enforced by dilating the chart about the center when needed.
    """
    g = Geometry.hyperbolic(d)
    frame = ChartFrame.at_basepoint(g)
    n = g.ambient_dim
    e = np.eye(n)
    dirs = _regular_directions(d - 3) if d >= 4 else None

    def build(params: np.ndarray) -> Polytope | None:
        u, ell, D = abs(params[0]), abs(params[1]), abs(params[2])
        rho = abs(params[3]) if d >= 4 else 0.0
        if ell < 1e-6 or D < 1e-6:
            return None
        q1 = math.cosh(u) * e[0] - math.sinh(u) * e[1]
        q2 = math.cosh(D) * e[0] + math.sinh(D) * e[1]
        verts = []
        for sgn in (+1.0, -1.0):
            verts.append(math.cosh(ell) * q1 + sgn * math.sinh(ell) * e[2])
            verts.append(math.cosh(ell) * q1 + sgn * math.sinh(ell) * e[3])
        if d == 3:
            verts.append(q2)
        else:
            for x_hat in dirs:
                t_vec = np.zeros(n)
                t_vec[4:] = x_hat
                verts.append(math.cosh(rho) * q2 + math.sinh(rho) * t_vec)
        pts = [Point(g, v) for v in verts]
        try:
            P = Polytope(g, pts, frame=frame)
        except Exception:
            return None
        return _dilate_to_contain(P, r)

    # heuristic start: everything at the scale of the circumscribed simplex
    start = np.array([0.3 * r, 1.2 * r + 0.7, 0.5 * r + 0.3, 0.6 * r + 0.3][: (4 if d >= 4 else 3)])

    def objective(params):
        P = build(params)
        return _tel(P) if P is not None else 1e9

    res = minimize(objective, start, method="Nelder-Mead",
                   options={"maxiter": 400, "xatol": 1e-6, "fatol": 1e-9})
    P = build(res.x)
    return P


def _dilate_to_contain(P: Polytope, r: float) -> Polytope | None:
    """Dilate the chart about its center until Ball(center, r) fits in P."""
    center = Ball(P.frame.center, r)
    if ball_in_polytope(P, center, tol=1e-12):
        return P
    lo, hi = 1.0, 2.0
    X = P.chart_vertices

    def fits(gamma: float) -> Polytope | None:
        Y = gamma * X
        if P.geometry.kind == "H" and np.max(np.linalg.norm(Y, axis=1)) >= 1.0 - 1e-12:
            return None
        try:
            Q = Polytope.from_chart(P.frame, Y)
        except Exception:
            return None
        return Q if ball_in_polytope(Q, Ball(P.frame.center, r), tol=1e-12) else None

    for _ in range(60):
        if fits(hi) is not None:
            break
        hi *= 1.5
        if P.geometry.kind == "H" and hi * np.max(np.linalg.norm(X, axis=1)) >= 1.0:
            return None
    else:
        return None
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if fits(mid) is not None:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-12 * hi:
            break
    return fits(hi)


def edgelength_HH_candidates(d: int, B: Ball) -> list[HHCandidate]:
    """The three candidate families for minimal total edge length in H^d.

    (i) orthogonal joins circumscribed about B, one per split dimension k;
    (ii) two perpendicular segments plus a small regular simplex, with the
    ball center on the connecting segment; (iii) the circumscribed regular
    simplex.  Families are optimized over their free scale parameters; each
    returned polytope contains B.
    """
    g = B.center.geometry
    if g.kind != "H" or g.d != d:
        raise GeometryError("candidates live in H^d around a hyperbolic ball")
    r = B.radius
    out = []
    reg = regular_simplex(g, d, "inradius", r, center=B.center)
    out.append(HHCandidate("regular_simplex", reg, _tel(reg)))
    for k in range(1, d // 2 + 1):
        P = _hh_join_candidate(d, k, r)
        if P is not None:
            out.append(HHCandidate(f"orthogonal_join_k{k}", P, _tel(P)))
    if d >= 3:
        P = _hh_segments_candidate(d, r)
        if P is not None:
            out.append(HHCandidate("segments_plus_simplex", P, _tel(P)))
    return out


# ---------------------------------------------------------------------------
# the annulus-density example
# ---------------------------------------------------------------------------

def annulus_triangles(eps: float) -> tuple[Polytope, Polytope]:
    """(T_reg, T_iso): regular vs thin isosceles triangles inscribed in the
    unit disk; the isosceles triangle has base altitude eps."""
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    g = Geometry.euclidean(2)
    angles = [math.pi / 2 + i * 2 * math.pi / 3 for i in range(3)]
    t_reg = Polytope(g, [Point(g, [math.cos(a), math.sin(a)]) for a in angles])
    s = math.sqrt(2 * eps - eps * eps)
    t_iso = Polytope(g, [Point(g, [0.0, 1.0]),
                         Point(g, [s, 1.0 - eps]),
                         Point(g, [-s, 1.0 - eps])])
    return t_reg, t_iso


def annulus_overlap_isosceles(eps: float) -> float:
    """Exact area of T_iso inside the annulus [1-eps, 1] (it is all of T_iso)."""
    return eps * math.sqrt(2 * eps - eps * eps)


def annulus_overlap_regular(eps: float) -> float:
    """Exact area of T_reg inside the annulus [1-eps, 1]."""
    rho = 1.0 - eps
    area_t = 3.0 * math.sqrt(3.0) / 4.0
    if rho <= 0.5:
        return area_t - math.pi * rho * rho
    seg = rho * rho * math.acos(0.5 / rho) - 0.5 * math.sqrt(rho * rho - 0.25)
    return area_t - (math.pi * rho * rho - 3.0 * seg)
