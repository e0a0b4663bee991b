"""Smallest enclosing Euclidean ball (Welzl's algorithm).

Used for exact circumballs (directly in E^d, via the ambient linear model in
S^d) and as a robust chart-center fallback for spherical vertex sets.
"""

from __future__ import annotations

import numpy as np


def _circumball_of_boundary(R: list[np.ndarray]) -> tuple[np.ndarray, float]:
    """Smallest ball with all points of R on its boundary.

    The center lies in the affine hull of R; for affinely dependent R the
    least-squares solve still returns the correct center of the minimal
    sphere through them.
    """
    if not R:
        return np.zeros(0), -1.0
    r0 = R[0]
    if len(R) == 1:
        return r0.copy(), 0.0
    A = 2.0 * (np.array(R[1:]) - r0)
    b = np.array([float((r - r0) @ (r - r0)) for r in R[1:]])
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    c = r0 + x
    return c, float(np.linalg.norm(r0 - c))


def smallest_enclosing_ball(points: np.ndarray, seed: int = 0) -> tuple[np.ndarray, float]:
    """Center and radius of the smallest ball containing all points.

    Deterministic for a fixed seed; intended for small point sets (the
    package never needs more than a few dozen).
    """
    pts = [np.asarray(p, dtype=float) for p in np.atleast_2d(points)]
    if not pts:
        raise ValueError("need at least one point")
    order = list(range(len(pts)))
    np.random.default_rng(seed).shuffle(order)
    pts = [pts[i] for i in order]
    dim = pts[0].shape[0]

    def welzl(n: int, R: list[np.ndarray]) -> tuple[np.ndarray, float]:
        if n == 0 or len(R) == dim + 1:
            return _circumball_of_boundary(R)
        p = pts[n - 1]
        c, r = welzl(n - 1, R)
        if r >= 0 and np.linalg.norm(p - c) <= r * (1 + 1e-12) + 1e-14:
            return c, r
        return welzl(n - 1, R + [p])

    c, r = welzl(len(pts), [])
    # tighten the radius to the actual farthest distance
    r = max(float(np.linalg.norm(p - c)) for p in pts)
    return c, r
