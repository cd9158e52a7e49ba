"""Lorentzian linear algebra on R^3_1 and the hyperboloid model of H^2.

Vectors are plain ``numpy`` arrays whose last axis has length 3, with ``x1``
the timelike coordinate.  The inner product, cross product and causal
classification broadcast over leading axes.
"""
from __future__ import annotations

import enum

import numpy as np

from .errors import NonPositiveRate, NotOnHyperboloid, ZeroVector

TOL_ZERO = 1e-12
TOL_LIGHT = 1e-9
TOL_SURFACE = 1e-8

EPSILON = np.diag([-1.0, 1.0, 1.0])
IDENTITY = np.eye(3)
# x2 -> -x2; conjugates the printed parabolic subgroup onto the e2 null direction
_FLIP_X2 = np.diag([1.0, -1.0, 1.0])


class CausalKind(enum.Enum):
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"
    SPACELIKE = "spacelike"


class IsometryKind(enum.Enum):
    ROTATION = "rotation"
    PARABOLIC = "parabolic"
    BOOST = "boost"


ISOMETRY_FOR = {
    CausalKind.TIMELIKE: IsometryKind.ROTATION,
    CausalKind.LIGHTLIKE: IsometryKind.PARABOLIC,
    CausalKind.SPACELIKE: IsometryKind.BOOST,
}

_CANONICAL = {
    CausalKind.TIMELIKE: (-1.0, 0.0, 0.0),
    CausalKind.LIGHTLIKE: (-1.0, 1.0, 0.0),
    CausalKind.SPACELIKE: (0.0, 0.0, 1.0),
}


def minkowski_inner(u, v):
    """``-u1 v1 + u2 v2 + u3 v3``, broadcasting over leading axes."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return -u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] + u[..., 2] * v[..., 2]


def lorentz_cross(u, v):
    """Lorentzian cross product, defined by ``<u x v, z> = det(u, v, z)``.

    With this orientation the frame of a curve on H^2 satisfies both
    ``N = X x T`` and ``X x N = -T``.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    u1, u2, u3 = u[..., 0], u[..., 1], u[..., 2]
    v1, v2, v3 = v[..., 0], v[..., 1], v[..., 2]
    return np.stack(
        [-(u2 * v3 - u3 * v2), u3 * v1 - u1 * v3, u1 * v2 - u2 * v1], axis=-1
    )


def classify(v) -> CausalKind:
    v = np.asarray(v, dtype=float)
    if np.max(np.abs(v)) <= TOL_ZERO:
        raise ZeroVector(f"zero vector {tuple(v.tolist())}")
    q = float(minkowski_inner(v, v))
    if abs(q) <= TOL_LIGHT * max(1.0, float(v @ v)):
        return CausalKind.LIGHTLIKE
    return CausalKind.TIMELIKE if q < 0 else CausalKind.SPACELIKE


def canonical_direction(kind: CausalKind) -> np.ndarray:
    """The representative ``e`` of each causal class: e1, e2 or e3."""
    return np.array(_CANONICAL[kind])


def _check_rate(a):
    if not a > 0:
        raise NonPositiveRate(f"rate a must be positive, got {a}")


def one_param_isometry(kind: IsometryKind, a: float, t: float) -> np.ndarray:
    """The subgroups M1, M2, M3 evaluated at angle/rapidity ``phi = a t``.

    These are the matrices exactly as printed: their generators at t=0 are
    ``a*A1``, ``a*A2``, ``a*A3`` from :func:`lie_algebra_basis`.  To move a
    soliton with ``k = a <T, e>`` use :func:`soliton_isometry` instead.
    """
    _check_rate(a)
    phi = a * t
    if kind is IsometryKind.ROTATION:
        c, s = np.cos(phi), np.sin(phi)
        return np.array([[1.0, 0.0, 0.0], [0.0, c, s], [0.0, -s, c]])
    if kind is IsometryKind.PARABOLIC:
        h = 0.5 * phi * phi
        return np.array(
            [[1.0 + h, -h, phi], [h, 1.0 - h, phi], [phi, -phi, 1.0]]
        )
    if kind is IsometryKind.BOOST:
        c, s = np.cosh(phi), np.sinh(phi)
        return np.array([[c, s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    raise TypeError(f"not an IsometryKind: {kind!r}")


def soliton_isometry(kind: IsometryKind, a: float, t: float) -> np.ndarray:
    """Isometry flow carrying a curve with ``k = a <T, e>`` along the CSF.

    The generator is ``X -> (-a e) x X`` for the canonical ``e`` of ``kind``;
    a curve moved by it has normal velocity ``a <T, e>``.  For rotations and
    boosts this is the printed subgroup run backwards (``phi = -a t``); for the
    parabolic case it is the printed M2 conjugated by ``x2 -> -x2``, because
    the printed M2 translates along ``(1, 1, 0)`` rather than ``e2``.
    """
    _check_rate(a)
    if kind is IsometryKind.PARABOLIC:
        return _FLIP_X2 @ one_param_isometry(kind, a, t) @ _FLIP_X2
    return one_param_isometry(kind, a, -t)


def soliton_generator(kind: IsometryKind, a: float = 1.0) -> np.ndarray:
    """Matrix of ``X -> (-a e) x X``; the t-derivative of soliton_isometry at 0."""
    _check_rate(a)
    e = canonical_direction(_CAUSAL_FOR[kind])
    return np.stack([lorentz_cross(-a * e, col) for col in IDENTITY], axis=1)


_CAUSAL_FOR = {v: k for k, v in ISOMETRY_FOR.items()}


def causal_kind_of(kind: IsometryKind) -> CausalKind:
    return _CAUSAL_FOR[kind]


def is_o13(M, tol: float) -> bool:
    M = np.asarray(M, dtype=float)
    return bool(np.max(np.abs(M.T @ EPSILON @ M - EPSILON)) <= tol)


def lie_algebra_basis() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    A1 = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, -1.0, 0.0]])
    A2 = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [1.0, -1.0, 0.0]])
    A3 = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    return A1, A2, A3


def check_on_hyperboloid(X, tol: float = TOL_SURFACE) -> np.ndarray:
    """Validate points of the upper sheet; returns them as a float array.

    The residual ``<X,X> + 1`` is compared relative to ``max(1, |X|^2)`` since
    far-out points carry round-off proportional to their squared size.
    """
    X = np.asarray(X, dtype=float)
    resid = np.abs(minkowski_inner(X, X) + 1.0)
    scale = np.maximum(1.0, np.sum(X * X, axis=-1))
    if np.any(resid > tol * scale) or np.any(X[..., 0] <= 0):
        raise NotOnHyperboloid("point(s) not on the upper sheet of <X,X> = -1")
    return X


def chord_distance(P, Q):
    """``2 asinh(|P - Q| / 2)`` without validation; equals ``arccosh(-<P, Q>)``
    on H^2 but keeps full relative accuracy for nearby points."""
    D = np.asarray(P, dtype=float) - np.asarray(Q, dtype=float)
    return 2.0 * np.arcsinh(0.5 * np.sqrt(np.maximum(minkowski_inner(D, D), 0.0)))


def hyperbolic_distance(P, Q):
    """Distance on H^2, ``arccosh(-<P, Q>)``, evaluated in chord form."""
    return chord_distance(check_on_hyperboloid(P), check_on_hyperboloid(Q))


def exp_map(X, w):
    """Hyperbolic exponential at ``X`` of the tangent vector(s) ``w``."""
    X = np.asarray(X, dtype=float)
    w = np.asarray(w, dtype=float)
    norm = np.sqrt(np.maximum(minkowski_inner(w, w), 0.0))[..., None]
    # sinh(n)/n -> 1 as n -> 0
    safe = np.where(norm > 0, norm, 1.0)
    sinhc = np.where(norm > 0, np.sinh(safe) / safe, 1.0)
    return np.cosh(norm) * X + sinhc * w


def normalize_to_hyperboloid(X):
    X = np.asarray(X, dtype=float)
    q = -minkowski_inner(X, X)
    X = X / np.sqrt(q)[..., None]
    return np.where(X[..., :1] < 0, -X, X)
