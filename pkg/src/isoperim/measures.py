"""Volumes, skeleton contents, radial-density integrals and spherical functionals.

Euclidean volumes are exact (chart triangulation via qhull); spherical and
hyperbolic volumes are exact in dimension 2 (angle excess/defect) and Monte
Carlo otherwise, integrating the projective-model density over the chart
polytope:

* Klein chart of H^d:     dV = (1 - |x|^2)^(-(d+1)/2) dx
* gnomonic chart of S^d:  dV = (1 + |x|^2)^(-(d+1)/2) dx

All Monte Carlo estimates carry a standard error and are bit-reproducible for
a fixed (seed, stream, sample count).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .geometry import Geometry, GeometryError, Point, distance
from .polytopes import Polytope, PolytopeError

__all__ = [
    "MCConfig",
    "Estimate",
    "DensityFn",
    "simplex_volume_euclidean",
    "polytope_volume",
    "k_content",
    "density_integral",
    "gaussian_measure",
    "sphere_volume",
    "spherical_cap_area",
    "sphere_voronoi_moment",
    "spherical_polar_dual",
    "u1",
]


@dataclass(frozen=True)
class MCConfig:
    """Monte Carlo budget: sample count, RNG seed and substream id."""

    n_samples: int = 2_000_000
    seed: int = 0
    stream: int = 0

    def __post_init__(self):
        if self.n_samples < 1_000:
            raise ValueError("n_samples must be at least 1000")

    def rng(self, extra: int = 0) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream, extra))
        return np.random.default_rng(ss)


@dataclass(frozen=True)
class Estimate:
    """A value with a (possibly zero) Monte Carlo standard error."""

    value: float
    stderr: float = 0.0

    def __float__(self):
        return self.value

    def within(self, other: float, n_sigma: float = 3.0, atol: float = 1e-12) -> bool:
        return abs(self.value - other) <= n_sigma * self.stderr + atol


# ---------------------------------------------------------------------------
# radial densities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DensityFn:
    """Rotationally symmetric radial density rho on [0, r0).

    kinds: constant | gaussian (standard normal on E^dim) | power (tau^alpha) |
    annulus (indicator of [1-eps, 1]) | tabulated (linear interpolation).
    """

    kind: str
    dim: int = 0
    alpha: float = 0.0
    eps: float = 0.0
    knots: tuple = ()
    values: tuple = ()
    r0: float = math.inf

    @staticmethod
    def constant() -> "DensityFn":
        return DensityFn("constant")

    @staticmethod
    def gaussian(dim: int) -> "DensityFn":
        return DensityFn("gaussian", dim=dim)

    @staticmethod
    def power(alpha: float) -> "DensityFn":
        return DensityFn("power", alpha=alpha)

    @staticmethod
    def annulus(eps: float) -> "DensityFn":
        if not 0 < eps <= 1:
            raise ValueError("annulus width must be in (0, 1]")
        return DensityFn("annulus", eps=eps)

    @staticmethod
    def tabulated(knots, values) -> "DensityFn":
        knots = tuple(float(k) for k in knots)
        values = tuple(float(v) for v in values)
        if any(v < 0 for v in values):
            raise ValueError("density must be nonnegative")
        return DensityFn("tabulated", knots=knots, values=values, r0=knots[-1])

    def __call__(self, tau):
        tau = np.asarray(tau, dtype=float)
        if self.kind == "constant":
            out = np.ones_like(tau)
        elif self.kind == "gaussian":
            out = (2.0 * math.pi) ** (-self.dim / 2.0) * np.exp(-0.5 * tau**2)
        elif self.kind == "power":
            out = np.power(tau, self.alpha)
        elif self.kind == "annulus":
            out = ((tau >= 1.0 - self.eps) & (tau <= 1.0)).astype(float)
        elif self.kind == "tabulated":
            out = np.interp(tau, self.knots, self.values)
        else:
            raise ValueError(self.kind)
        return out if out.shape else float(out)

    def support(self) -> tuple[float, float]:
        """Radial window outside which the density is identically zero."""
        if self.kind == "annulus":
            return (1.0 - self.eps, 1.0)
        if self.kind == "tabulated":
            return (self.knots[0], self.knots[-1])
        return (0.0, math.inf)


# ---------------------------------------------------------------------------
# volumes
# ---------------------------------------------------------------------------

def simplex_volume_euclidean(vertices) -> float:
    """k-volume of the simplex on k+1 points via sqrt(det Gram)/k!.

    Rank-deficient inputs return 0.
    """
    V = np.asarray(vertices, dtype=float)
    k = len(V) - 1
    if k == 0:
        return 0.0
    E = V[1:] - V[0]
    det = float(np.linalg.det(E @ E.T))
    return math.sqrt(max(det, 0.0)) / math.factorial(k)


def _model_density(geometry: Geometry, r2: np.ndarray) -> np.ndarray:
    if geometry.kind == "E":
        return np.ones_like(r2)
    if geometry.kind == "S":
        return (1.0 + r2) ** (-(geometry.d + 1) / 2.0)
    return (1.0 - r2) ** (-(geometry.d + 1) / 2.0)


def _angle_area_2d(P: Polytope) -> float:
    """Exact spherical (excess) or hyperbolic (defect) polygon area."""
    g = P.geometry
    hull = ConvexHull(P.chart_vertices)
    order = [int(i) for i in hull.vertices]
    n = len(order)
    total = 0.0
    for idx in range(n):
        v = P.vertices[order[idx]].coords
        a = P.vertices[order[(idx - 1) % n]].coords
        b = P.vertices[order[(idx + 1) % n]].coords
        if g.kind == "S":
            ta = a - float(v @ a) * v
            tb = b - float(v @ b) * v
            ca = float(ta @ tb) / (np.linalg.norm(ta) * np.linalg.norm(tb))
        else:
            from .geometry import minkowski_dot
            ta = a + minkowski_dot(v, a) * v
            tb = b + minkowski_dot(v, b) * v
            ca = minkowski_dot(ta, tb) / math.sqrt(
                minkowski_dot(ta, ta) * minkowski_dot(tb, tb))
        total += math.acos(min(max(ca, -1.0), 1.0))
    if g.kind == "S":
        return total - (n - 2) * math.pi
    return (n - 2) * math.pi - total


def _chart_mc_volume(P: Polytope, cfg: MCConfig) -> Estimate:
    """Model-density integral over the chart polytope, antithetic pairs."""
    X = P.chart_vertices
    lo, hi = X.min(axis=0), X.max(axis=0)
    box_vol = float(np.prod(hi - lo))
    A = np.array([f.chart_normal for f in P.facets])
    b = np.array([f.chart_offset for f in P.facets])
    rng = cfg.rng()
    half = max(cfg.n_samples // 2, 1)
    batch = min(half, 500_000)
    sums = 0.0
    sums2 = 0.0
    count = 0
    while count < half:
        m = min(batch, half - count)
        U = rng.random((m, X.shape[1]))
        pair_vals = np.zeros(m)
        for pts in (lo + U * (hi - lo), lo + (1.0 - U) * (hi - lo)):
            inside = np.all(pts @ A.T <= b + 1e-12, axis=1)
            r2 = np.einsum("ij,ij->i", pts, pts)
            f = np.where(inside, _model_density(P.geometry, r2), 0.0)
            pair_vals += 0.5 * f
        sums += float(pair_vals.sum())
        sums2 += float((pair_vals**2).sum())
        count += m
    mean = sums / count
    var = max(sums2 / count - mean**2, 0.0)
    return Estimate(box_vol * mean, box_vol * math.sqrt(var / count))


def polytope_volume(P: Polytope, method: str = "auto", cfg: MCConfig | None = None) -> Estimate:
    """Volume of P: exact where a closed route exists, Monte Carlo otherwise.

    ``method`` is one of "auto", "exact" and "monte_carlo".  Exact routes:
    chart triangulation in E^d (any d), angle excess/defect for d = 2 in S/H.
    """
    g = P.geometry
    if method not in ("auto", "exact", "monte_carlo"):
        raise ValueError(method)
    if method != "monte_carlo":
        if g.kind == "E":
            return Estimate(float(ConvexHull(P.chart_vertices).volume))
        if g.d == 2:
            return Estimate(_angle_area_2d(P))
        if method == "exact":
            raise PolytopeError(f"no exact volume available for {g}")
    return _chart_mc_volume(P, cfg or MCConfig())


def k_content(P: Polytope, k: int) -> float:
    """Total k-content: sum of k-volumes over the k-faces of P.

    k = 1 (total geodesic edge length) works in all three geometries; k >= 2
    is Euclidean only.
    """
    if not 1 <= k <= P.d - 1:
        raise PolytopeError(f"k must be in 1..{P.d - 1}")
    if k == 1:
        return sum(distance(P.vertices[i], P.vertices[j]) for i, j in P.faces_k(1))
    if P.geometry.kind != "E":
        raise PolytopeError("k-content with k >= 2 is Euclidean only")
    total = 0.0
    X = P.chart_vertices
    for face in P.faces_k(k):
        pts = X[list(face)]
        if len(face) == k + 1:
            total += simplex_volume_euclidean(pts)
        else:
            C = pts - pts.mean(axis=0)
            _, _, Vt = np.linalg.svd(C, full_matrices=False)
            total += float(ConvexHull(C @ Vt[:k].T).volume)
    return total


# ---------------------------------------------------------------------------
# radial-density integrals over Euclidean polytopes
# ---------------------------------------------------------------------------

def _unit_ball_volume(d: int) -> float:
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def density_integral(P: Polytope, rho: DensityFn, cfg: MCConfig | None = None,
                     n_shells: int = 16) -> Estimate:
    """Monte Carlo estimate of the rho(|x|) integral over a Euclidean polytope.

    Sampling is stratified by radius: the radial window is the intersection
    of the polytope's radial range with the density's support, split into
    equal-width shells sampled uniformly (in volume) and independently.  This
    keeps thin supports such as annuli cheap to resolve.
    """
    if P.geometry.kind != "E":
        raise GeometryError("density_integral requires E^d")
    cfg = cfg or MCConfig()
    d = P.d
    X = P.chart_vertices
    r_max = float(np.max(np.linalg.norm(X, axis=1)))
    if r_max > rho.r0:
        raise ValueError("polytope radial range exceeds the density domain radius")
    lo_s, hi_s = rho.support()
    lo_r, hi_r = max(0.0, lo_s), min(r_max, hi_s)
    if hi_r <= lo_r:
        return Estimate(0.0, 0.0)
    A = np.array([f.chart_normal for f in P.facets])
    b = np.array([f.chart_offset for f in P.facets])
    edges = np.linspace(lo_r, hi_r, n_shells + 1)
    n_per = max(cfg.n_samples // n_shells, 100)
    total = 0.0
    var = 0.0
    for s_idx in range(n_shells):
        r0, r1 = float(edges[s_idx]), float(edges[s_idx + 1])
        shell_vol = _unit_ball_volume(d) * (r1**d - r0**d)
        rng = cfg.rng(extra=s_idx + 1)
        done = 0
        ssum = 0.0
        ssum2 = 0.0
        while done < n_per:
            m = min(500_000, n_per - done)
            dirs = rng.standard_normal((m, d))
            dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
            u = rng.random(m)
            r = (r0**d + u * (r1**d - r0**d)) ** (1.0 / d)
            pts = dirs * r[:, None]
            inside = np.all(pts @ A.T <= b + 1e-12, axis=1)
            f = np.where(inside, rho(r), 0.0)
            ssum += float(f.sum())
            ssum2 += float((f**2).sum())
            done += m
        mean = ssum / done
        total += shell_vol * mean
        var += shell_vol**2 * max(ssum2 / done - mean**2, 0.0) / done
    return Estimate(total, math.sqrt(var))


def gaussian_measure(P: Polytope, cfg: MCConfig | None = None) -> Estimate:
    """Standard Gaussian measure of a Euclidean polytope by direct sampling.

    With a shared config, two polytopes are evaluated on identical draws, so
    differences of measures carry strongly reduced variance.
    """
    if P.geometry.kind != "E":
        raise GeometryError("gaussian_measure requires E^d")
    cfg = cfg or MCConfig()
    A = np.array([f.chart_normal for f in P.facets])
    b = np.array([f.chart_offset for f in P.facets])
    rng = cfg.rng()
    n = cfg.n_samples
    hits = 0
    done = 0
    while done < n:
        m = min(1_000_000, n - done)
        Z = rng.standard_normal((m, P.d))
        hits += int(np.all(Z @ A.T <= b + 1e-12, axis=1).sum())
        done += m
    p = hits / n
    return Estimate(p, math.sqrt(max(p * (1 - p), 1e-300) / n))


# ---------------------------------------------------------------------------
# spherical functionals
# ---------------------------------------------------------------------------

def sphere_volume(d: int) -> float:
    """d-volume of the unit sphere S^d in R^(d+1)."""
    return 2.0 * math.pi ** ((d + 1) / 2.0) / math.gamma((d + 1) / 2.0)


def spherical_cap_area(r: float) -> float:
    """Area of a spherical cap of geodesic radius r on S^2."""
    return 2.0 * math.pi * (1.0 - math.cos(r))


@lru_cache(maxsize=8)
def _icosphere(level: int) -> tuple[np.ndarray, np.ndarray]:
    """Vertices and faces of the unit icosphere after ``level`` subdivisions."""
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    raw = []
    for a, c in [(1.0, phi), (-1.0, phi), (1.0, -phi), (-1.0, -phi)]:
        raw += [(0.0, a, c), (a, c, 0.0), (c, 0.0, a)]
    V = np.array(raw)
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    hull = ConvexHull(V)
    F = hull.simplices.copy()
    for _ in range(level):
        V, F = _subdivide(V, F)
    return V, F


def _subdivide(V: np.ndarray, F: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    verts = [v for v in V]
    cache: dict[tuple[int, int], int] = {}

    def mid(i, j):
        key = (min(i, j), max(i, j))
        if key not in cache:
            m = verts[i] + verts[j]
            verts.append(m / np.linalg.norm(m))
            cache[key] = len(verts) - 1
        return cache[key]

    out = []
    for a, b, c in F:
        ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
        out += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
    return np.array(verts), np.array(out, dtype=int)


def _corner_areas(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Spherical areas of triangles given corner coordinate arrays (m, 3)."""
    num = np.abs(np.einsum("ij,ij->i", a, np.cross(b, c)))
    den = 1.0 + np.einsum("ij,ij->i", a, b) + np.einsum("ij,ij->i", b, c) \
        + np.einsum("ij,ij->i", c, a)
    return 2.0 * np.arctan2(num, den)


@lru_cache(maxsize=8)
def _icosphere_quadrature(level: int):
    """Cached centroid-rule data: corners, centroids and areas per face."""
    V, F = _icosphere(level)
    a, b, c = V[F[:, 0]], V[F[:, 1]], V[F[:, 2]]
    cent = a + b + c
    cent /= np.linalg.norm(cent, axis=1, keepdims=True)
    areas = _corner_areas(a, b, c)
    return V, F, cent, areas


def _points_in_closed_hemisphere(pts: np.ndarray) -> bool:
    """True iff all points lie in some closed hemisphere.

    Equivalent to the origin not being interior to conv(points): some closed
    halfspace through 0 contains all of them.
    """
    try:
        hull = ConvexHull(pts)
    except QhullError:
        return True
    return bool(np.max(hull.equations[:, -1]) > -1e-9)


def sphere_voronoi_moment(points, rho, level: int = 6, refine: bool = True) -> float:
    """Integral of rho(tau(p)) over S^2, tau = distance to the nearest point.

    Quadrature on an icosphere (centroid rule) with one-level adaptive
    refinement of the cells that straddle a Voronoi boundary.  Requires at
    least 4 points not all contained in a closed hemisphere.
    """
    pts = np.asarray(points, dtype=float)
    if pts.shape[0] < 4:
        raise ValueError("need at least 4 points")
    pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    if _points_in_closed_hemisphere(pts):
        raise ValueError("points must not all lie in a closed hemisphere")
    V, F, cent, areas = _icosphere_quadrature(level)

    def tau_of(X: np.ndarray) -> np.ndarray:
        return np.arccos(np.clip((X @ pts.T).max(axis=1), -1.0, 1.0))

    straddle = np.zeros(len(F), dtype=bool)
    if refine:
        fn = (V @ pts.T).argmax(axis=1)[F]
        straddle = (fn[:, 0] != fn[:, 1]) | (fn[:, 1] != fn[:, 2])

    keep = ~straddle
    total = float(np.sum(areas[keep] * np.asarray(rho(tau_of(cent[keep])))))
    mixed = F[straddle]
    if len(mixed):
        a, b, c = V[mixed[:, 0]], V[mixed[:, 1]], V[mixed[:, 2]]
        norm = lambda x: x / np.linalg.norm(x, axis=1, keepdims=True)
        ab, bc, ca = norm(a + b), norm(b + c), norm(c + a)
        for x, y, z in ((a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)):
            sub_cent = norm(x + y + z)
            total += float(np.sum(_corner_areas(x, y, z) * np.asarray(rho(tau_of(sub_cent)))))
    return total


def spherical_polar_dual(S: Polytope) -> Polytope:
    """Polar dual K* = {x : <x, y> <= 0 for all y in K} of a spherical polytope.

    Vertices of the dual are the outward facet normals of K; for a simplex
    these are the sign-fixed normalized rows of the inverse transpose of the
    vertex matrix.
    """
    if S.geometry.kind != "S":
        raise GeometryError("polar dual is spherical")
    g = S.geometry
    if S.n == S.d + 1:
        M = S.vertex_array()
        if abs(np.linalg.det(M)) < 1e-12:
            raise PolytopeError("singular vertex matrix")
        W = -np.linalg.inv(M).T
        W /= np.linalg.norm(W, axis=1, keepdims=True)
        duals = [Point(g, w) for w in W]
    else:
        duals = [Point(g, f.hyperplane.normal) for f in S.facets]
    return Polytope.hull_of(g, duals)


def u1(S: Polytope, cfg: MCConfig | None = None) -> Estimate:
    """Spherical first intrinsic volume via the polar dual:
    U1(K) = 1/2 - vol(K*) / vol(S^d)."""
    dual = spherical_polar_dual(S)
    v = polytope_volume(dual, cfg=cfg)
    s = sphere_volume(S.d)
    return Estimate(0.5 - v.value / s, v.stderr / s)
