"""Hyperboloid -> Poincare disk and upper half-plane, with their distances.

The disk map is stereographic projection from (-1, 0, 0).  The half-plane
map is the Cayley transform ``u + i v = i (1 + z) / (1 - z)`` applied to
``z = y + i x``, which sends the disk centre to ``(0, 1)``.
"""
from __future__ import annotations

import numpy as np

from .errors import BoundaryPole, OutsideDisk
from .minkowski import check_on_hyperboloid

POLE_TOL = 1e-15


def to_disk(X) -> np.ndarray:
    X = check_on_hyperboloid(X)
    d = 1.0 + X[..., 0]
    return np.stack([X[..., 1] / d, X[..., 2] / d], axis=-1)


def to_half_plane(X) -> np.ndarray:
    p = to_disk(X)
    x, y = p[..., 0], p[..., 1]
    den = (1.0 - y) ** 2 + x * x
    if np.any(den <= POLE_TOL):
        raise BoundaryPole("point maps to the pole of the Cayley transform")
    return np.stack([-2.0 * x / den, (1.0 - x * x - y * y) / den], axis=-1)


def disk_distance(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    rp = 1.0 - np.sum(p * p, axis=-1)
    rq = 1.0 - np.sum(q * q, axis=-1)
    if np.any(rp <= 0) or np.any(rq <= 0):
        raise OutsideDisk("points must lie inside the open unit disk")
    d2 = np.sum((p - q) ** 2, axis=-1)
    return np.arccosh(1.0 + 2.0 * d2 / (rp * rq))


def half_plane_distance(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    d2 = np.sum((p - q) ** 2, axis=-1)
    return np.arccosh(1.0 + d2 / (2.0 * p[..., 1] * q[..., 1]))
