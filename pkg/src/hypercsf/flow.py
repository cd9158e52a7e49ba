"""Time evolution of curves: by isometries, and by discrete curve shortening.

A soliton moved by its isometry flow should coincide, as a point set, with
the same curve moved by the curve shortening flow itself.  ``csf_residual``
checks the normal velocity pointwise; ``soliton_flow_deviation`` runs an
explicit discretisation of the flow on the hyperboloid and measures how far
it drifts from the isometric motion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, KindMismatch, StepTooLarge, TooFewPoints
from .frame import FramedCurve
from .minkowski import (
    IsometryKind,
    check_on_hyperboloid,
    chord_distance,
    classify,
    lorentz_cross,
    minkowski_inner,
    soliton_isometry,
    ISOMETRY_FOR,
)

CFL = 0.25
DEFAULT_CFL_FRACTION = 0.4
MIDDLE_FRACTION = 0.5


@dataclass(frozen=True)
class EvolvedCurve:
    t: float
    s: np.ndarray
    X: np.ndarray
    provenance: str  # "isometry" or "direct"


def _apply(M, X):
    return X @ np.asarray(M).T


def evolve_by_isometry(curve: FramedCurve, kind: IsometryKind, a: float, t: float) -> EvolvedCurve:
    expected = ISOMETRY_FOR[classify(curve.e)]
    if kind is not expected:
        raise KindMismatch(f"curve vector e={tuple(curve.e)} moves by {expected.value}, not {kind.value}")
    return EvolvedCurve(t, curve.s, _apply(soliton_isometry(kind, a, t), curve.X), "isometry")


def csf_residual(curve: FramedCurve, kind: IsometryKind, a: float, t: float, dt: float) -> float:
    """``max |<dX^/dt, N^> - k|`` with a central difference in time.

    The kind is deliberately not checked against the curve, so a mismatched
    pairing can serve as a negative control.
    """
    if not 1e-8 <= dt <= 1e-3:
        raise InputError(f"dt must lie in [1e-8, 1e-3], got {dt}")
    # M(t +- dt) = M(t) M(+-dt): differencing near the identity avoids the
    # cancellation that M(t+dt) - M(t-dt) suffers far from the vertex
    M = soliton_isometry(kind, a, t)
    step = (soliton_isometry(kind, a, dt) - soliton_isometry(kind, a, -dt)) / (2.0 * dt)
    velocity = _apply(M @ step, curve.X)
    normal = _apply(M, curve.N)
    return float(np.max(np.abs(minkowski_inner(velocity, normal) - curve.k)))


def _geometry(X):
    """Unvalidated core of ``discrete_geometry`` on a (3, n) array of points.

    Derivatives come from quadratic interpolation in discrete hyperbolic arc
    length: centred at interior vertices, one-sided at the two ends.
    """
    x1, x2, x3 = X
    d1, d2, d3 = np.diff(X, axis=1)
    h = 2.0 * np.arcsinh(0.5 * np.sqrt(np.maximum(-d1 * d1 + d2 * d2 + d3 * d3, 0.0)))
    # nodes of each 3-point stencil relative to the evaluation point
    hm = np.empty(X.shape[1])
    hp = np.empty(X.shape[1])
    hm[1:-1], hp[1:-1] = h[:-1], h[1:]
    zl = -hm
    zr = hp
    zc = np.zeros_like(hm)
    zl[0], zc[0], zr[0] = 0.0, h[0], h[0] + h[1]
    zl[-1], zc[-1], zr[-1] = -(h[-1] + h[-2]), -h[-1], 0.0
    dl = (zl - zc) * (zl - zr)
    dc = (zc - zl) * (zc - zr)
    dr = (zr - zl) * (zr - zc)
    w1 = (-(zc + zr) / dl, -(zl + zr) / dc, -(zl + zc) / dr)
    w2 = (2.0 / dl, 2.0 / dc, 2.0 / dr)
    L = np.empty_like(X)
    C = X.copy()
    R = np.empty_like(X)
    L[:, 1:-1], R[:, 1:-1] = X[:, :-2], X[:, 2:]
    L[:, 0], C[:, 0], R[:, 0] = X[:, 0], X[:, 1], X[:, 2]
    L[:, -1], C[:, -1], R[:, -1] = X[:, -3], X[:, -2], X[:, -1]
    D1 = w1[0] * L + w1[1] * C + w1[2] * R
    D2 = w2[0] * L + w2[1] * C + w2[2] * R
    T = D1 + (-D1[0] * x1 + D1[1] * x2 + D1[2] * x3) * X
    T /= np.sqrt(-T[0] * T[0] + T[1] * T[1] + T[2] * T[2])
    t1, t2, t3 = T
    N = np.stack([-(x2 * t3 - x3 * t2), x3 * t1 - x1 * t3, x1 * t2 - x2 * t1])
    k = -D2[0] * N[0] + D2[1] * N[1] + D2[2] * N[2]
    return T, N, k, h


def discrete_geometry(points):
    """Tangent, normal, geodesic curvature and spacings of a polyline on H^2."""
    X = np.ascontiguousarray(np.asarray(points, dtype=float).T)
    T, N, k, h = _geometry(X)
    return T.T, N.T, k, h


def _step(X, dt, cfl):
    _, N, k, h = _geometry(X)
    limit = cfl * float(np.min(h)) ** 2
    if dt > limit:
        raise StepTooLarge(f"dt={dt:.3g} exceeds {cfl}*(min spacing)^2 = {limit:.3g}")
    w = (dt * k) * N
    norm = np.sqrt(np.maximum(-w[0] * w[0] + w[1] * w[1] + w[2] * w[2], 0.0))
    safe = np.where(norm > 0, norm, 1.0)
    Y = np.cosh(norm) * X + np.where(norm > 0, np.sinh(safe) / safe, 1.0) * w
    return Y / np.sqrt(Y[0] * Y[0] - Y[1] * Y[1] - Y[2] * Y[2])


def _validate(points):
    X = np.asarray(points, dtype=float)
    if X.ndim != 2 or X.shape[-1] != 3 or len(X) < 5:
        raise TooFewPoints("direct flow needs at least 5 points")
    check_on_hyperboloid(X)
    return np.ascontiguousarray(X.T)


def direct_flow_step(points, dt: float, cfl: float = CFL) -> np.ndarray:
    """One explicit step ``X <- exp_X(dt k N)`` followed by renormalisation."""
    return _step(_validate(points), dt, cfl).T


def run_direct_flow(points, t_end: float, dt: float, cfl: float = CFL) -> np.ndarray:
    X = _validate(points)
    if t_end <= 0:
        return X.T.copy()
    steps = max(1, math.ceil(t_end / dt - 1e-12))
    step = t_end / steps
    for _ in range(steps):
        X = _step(X, step, cfl)
    return X.T


def cfl_step(points, cfl: float = CFL, fraction: float = DEFAULT_CFL_FRACTION) -> float:
    X = np.asarray(points, dtype=float)
    h = chord_distance(X[:-1], X[1:])
    return fraction * cfl * float(np.min(h)) ** 2


def distance_to_polyline(P, ref) -> np.ndarray:
    """Hyperbolic distance from each point of ``P`` to the polyline ``ref``.

    The nearest vertex is found first; the distance is then taken to the
    geodesic through that vertex and its closer neighbour.
    """
    P = np.asarray(P, dtype=float)
    ref = np.asarray(ref, dtype=float)
    out = np.empty(len(P))
    chunk = max(1, 4_000_000 // max(1, len(ref)))
    for start in range(0, len(P), chunk):
        Pc = P[start : start + chunk]
        cosh_d = np.outer(Pc[:, 0], ref[:, 0]) - Pc[:, 1:] @ ref[:, 1:].T
        j = np.argmin(cosh_d, axis=1)
        lo = np.clip(j - 1, 0, len(ref) - 1)
        hi = np.clip(j + 1, 0, len(ref) - 1)
        other = np.where(
            cosh_d[np.arange(len(Pc)), lo] <= cosh_d[np.arange(len(Pc)), hi], lo, hi
        )
        A, B = ref[j], ref[other]
        normal = lorentz_cross(A, B)
        nn = minkowski_inner(normal, normal)
        vertex = np.arccosh(np.maximum(1.0, cosh_d[np.arange(len(Pc)), j]))
        line = np.arcsinh(np.abs(minkowski_inner(Pc, normal)) / np.sqrt(np.where(nn > 0, nn, 1.0)))
        out[start : start + len(Pc)] = np.where((nn > 0) & (other != j), np.minimum(line, vertex), vertex)
    return out


def soliton_flow_deviation(
    curve: FramedCurve,
    kind: IsometryKind,
    a: float,
    t_end: float,
    dt: float | None = None,
    middle: float = MIDDLE_FRACTION,
    cfl: float = CFL,
) -> float:
    """One-sided Hausdorff distance from the directly flowed middle of the curve
    to the isometrically evolved curve, in the hyperbolic metric.
    """
    X0 = curve.X
    if dt is None:
        dt = cfl_step(X0, cfl)
    flowed = run_direct_flow(X0, t_end, dt, cfl)
    reference = _apply(soliton_isometry(kind, a, t_end), X0)
    n = len(X0)
    cut = int(round(0.5 * (1.0 - middle) * n))
    interior = flowed[cut : n - cut]
    return float(np.max(distance_to_polyline(interior, reference)))
