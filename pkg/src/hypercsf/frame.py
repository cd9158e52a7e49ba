"""Rebuilding the soliton curve X(s) on H^2 from a solution of the reduced system.

The frame (X, T, N) obeys

    X' = T,    T' = k N + X,    N' = -k T,

and for a soliton ``k = a tau``.  The reduced state and the frame are
integrated together as one 12-dimensional system so both see the same steps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    DegenerateConstruction,
    IncompatiblePair,
    InputError,
    ToleranceNotMet,
    TooFewSamples,
)
from .minkowski import CausalKind, canonical_direction, lorentz_cross, minkowski_inner
from .soliton_ode import MAX_STEP, Trajectory, quadratic_invariant

GRAM = np.diag([-1.0, 1.0, 1.0])
FRAME_TOL = 1e-9


class Frame(NamedTuple):
    X: np.ndarray
    T: np.ndarray
    N: np.ndarray


@dataclass(frozen=True)
class FramedCurve:
    s: np.ndarray
    X: np.ndarray
    T: np.ndarray
    N: np.ndarray
    k: np.ndarray
    a: float
    e: np.ndarray
    trajectory: Trajectory | None = field(default=None, repr=False)

    def __len__(self):
        return self.s.size

    def frame(self, i: int) -> Frame:
        return Frame(self.X[i], self.T[i], self.N[i])

    def projections(self) -> np.ndarray:
        """``(<X,e>, <T,e>, <N,e>)`` per sample."""
        return np.stack(
            [minkowski_inner(V, self.e) for V in (self.X, self.T, self.N)], axis=-1
        )

    def restrict(self, mask) -> "FramedCurve":
        return FramedCurve(
            self.s[mask], self.X[mask], self.T[mask], self.N[mask], self.k[mask],
            self.a, self.e, self.trajectory,
        )


def gram_matrices(X, T, N) -> np.ndarray:
    """Minkowski Gram matrices of the frames, shape (n, 3, 3)."""
    F = np.stack([X, T, N], axis=-2)
    return np.einsum("...ik,kl,...jl->...ij", F, GRAM, F)


def gram_drift(curve: FramedCurve) -> float:
    G = gram_matrices(curve.X, curve.T, curve.N)
    return float(np.max(np.abs(G - GRAM)))


def relative_gram_drift(curve: FramedCurve) -> float:
    """Gram error with entry (i, j) divided by ``|F_i| |F_j|`` (Euclidean norms).

    Far from the vertex the frame vectors grow like e^|s| and float64 round-off
    in the indefinite products grows with them; this measures drift on that
    natural scale.
    """
    G = gram_matrices(curve.X, curve.T, curve.N)
    F = np.stack([curve.X, curve.T, curve.N], axis=-2)
    norms = np.linalg.norm(F, axis=-1)
    scale = norms[..., :, None] * norms[..., None, :]
    return float(np.max(np.abs(G - GRAM) / scale))


def orientation_drift(curve: FramedCurve) -> float:
    return float(np.max(np.abs(curve.N - lorentz_cross(curve.X, curve.T))))


def _canonical_kind(e) -> CausalKind:
    for kind in CausalKind:
        if np.array_equal(np.asarray(e, dtype=float), canonical_direction(kind)):
            return kind
    raise IncompatiblePair(f"e={tuple(e)} is not one of the canonical directions e1, e2, e3")


def initial_frame(psi0, e) -> Frame:
    """A frame with ``-alpha X + tau T + eta N = e`` at s = 0.

    The frame is only determined up to isometries fixing ``e``; this picks one
    deterministically.  For timelike ``e`` it is the pure boost taking the
    vertex frame to ``X = (alpha, tau, eta)``.  Otherwise ``X`` is the point
    of ``<X, e> = alpha`` closest to the vertex, and ``T`` solves
    ``(tau + eta J) T = e + alpha X`` with ``J = X x .`` on the plane normal to X.
    """
    alpha, tau, eta = map(float, psi0)
    e = np.asarray(e, dtype=float)
    kind = _canonical_kind(e)
    q = float(quadratic_invariant(np.array([alpha, tau, eta])))
    if abs(q - float(minkowski_inner(e, e))) > 1e-8:
        raise IncompatiblePair(
            f"invariant {q:.12g} of psi0 does not match <e,e> = {minkowski_inner(e, e):.0f}"
        )
    if kind is CausalKind.TIMELIKE:
        if alpha <= 0:
            raise IncompatiblePair("alpha must be positive for timelike e")
        c = 1.0 + alpha
        X = np.array([alpha, tau, eta])
        T = np.array([tau, 1.0 + tau * tau / c, tau * eta / c])
        N = np.array([eta, tau * eta / c, 1.0 + eta * eta / c])
    else:
        if kind is CausalKind.LIGHTLIKE:
            if alpha <= 0:
                raise IncompatiblePair("alpha must be positive for lightlike e")
            X = np.array([0.5 * (alpha + 1.0 / alpha), 0.5 * (alpha - 1.0 / alpha), 0.0])
        else:
            X = np.array([math.sqrt(1.0 + alpha * alpha), 0.0, alpha])
        w = e + alpha * X
        r2 = tau * tau + eta * eta
        if r2 == 0.0:
            raise DegenerateConstruction("tau = eta = 0 leaves the tangent undetermined")
        T = (tau * w - eta * lorentz_cross(X, w)) / r2
        N = lorentz_cross(X, T)
    frame = Frame(X, T, N)
    _check_frame(frame, np.array([alpha, tau, eta]), e)
    return frame


def _check_frame(frame: Frame, psi0, e):
    X, T, N = frame
    scale = max(1.0, float(np.max(np.abs(np.concatenate(frame)))) ** 2)
    gram = np.max(np.abs(gram_matrices(X, T, N) - GRAM))
    relation = np.max(np.abs(-psi0[0] * X + psi0[1] * T + psi0[2] * N - e))
    if gram > FRAME_TOL * scale or relation > FRAME_TOL * scale or X[0] <= 0:
        raise DegenerateConstruction(
            f"initial frame failed its checks (gram {gram:.2g}, relation {relation:.2g})"
        )


def _joint_ode(a):
    def f(_s, y):
        alpha, tau, eta = y[0], y[1], y[2]
        k = a * tau
        x1, x2, x3, t1, t2, t3, n1, n2, n3 = y[3:]
        return [
            tau, a * tau * eta + alpha, -a * tau * tau,
            t1, t2, t3,
            k * n1 + x1, k * n2 + x2, k * n3 + x3,
            -k * t1, -k * t2, -k * t3,
        ]

    return f


def _frame_ode(kfun):
    def f(s, y):
        k = kfun(s)
        x1, x2, x3, t1, t2, t3, n1, n2, n3 = y
        return [
            t1, t2, t3,
            k * n1 + x1, k * n2 + x2, k * n3 + x3,
            -k * t1, -k * t2, -k * t3,
        ]

    return f


def _two_sided(f, y0, s, rtol, atol):
    """Integrate from s=0 to both ends of ``s`` and evaluate at ``s``."""
    out = np.empty((s.size, len(y0)))
    for mask, end in ((s < 0, s.min()), (s >= 0, s.max())):
        if not np.any(mask):
            continue
        if end == 0.0:
            out[mask] = y0
            continue
        sol = solve_ivp(
            f, (0.0, end), y0, method="DOP853", rtol=rtol, atol=atol, dense_output=True,
            max_step=MAX_STEP,
        )
        if sol.status != 0:
            raise ToleranceNotMet(f"frame integration towards s={end} failed: {sol.message}")
        out[mask] = sol.sol(s[mask]).T
    return out


def reconstruct(
    traj: Trajectory, e=None, s=None, rtol: float = 1e-12, atol: float = 1e-12
) -> FramedCurve:
    """The soliton curve whose projections onto ``e`` reproduce ``traj``.

    ``s`` defaults to the trajectory's own sample grid and must lie inside its
    window.
    """
    canonical = canonical_direction(traj.family.causal_kind)
    e = canonical if e is None else np.asarray(e, dtype=float)
    if not np.array_equal(e, canonical):
        raise IncompatiblePair(
            f"family {traj.family.value} needs e={tuple(canonical)}, got {tuple(e)}"
        )
    s = traj.s if s is None else np.asarray(s, dtype=float)
    lo, hi = traj.window
    if s.min() < lo - 1e-12 or s.max() > hi + 1e-12:
        raise InputError(f"sample grid exceeds the trajectory window [{lo}, {hi}]")
    psi0 = traj(0.0)
    frame0 = initial_frame(psi0, e)
    y0 = np.concatenate([psi0, *frame0])
    y = _two_sided(_joint_ode(traj.a), y0, s, rtol, atol)
    return FramedCurve(
        s, y[:, 3:6], y[:, 6:9], y[:, 9:12], traj.a * y[:, 1], traj.a, e, traj
    )


def integrate_frame(
    kfun: Callable[[float], float], s, frame0: Frame, rtol: float = 1e-12, atol: float = 1e-12
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Frame of the arc-length curve with prescribed curvature ``kfun(s)``."""
    s = np.asarray(s, dtype=float)
    y = _two_sided(_frame_ode(kfun), np.concatenate(frame0), s, rtol, atol)
    return y[:, 0:3], y[:, 3:6], y[:, 6:9]


def closed_form_curve(l: float, branch: str, s) -> tuple[Frame, np.ndarray]:
    """Explicit constant-curvature solitons for ``a = 1`` and ``e = (0, 0, 1)``.

    Branch ``"i"`` projects to psi = (-s, -1, -s) and has k = -1; branch
    ``"ii"`` projects to psi = (s, 1, -s) and has k = +1.  The tangent is the
    exact derivative of X, so its third component is -1 on branch i.
    """
    if not l > 0:
        raise InputError(f"l must be positive, got {l}")
    if branch not in ("i", "ii"):
        raise InputError(f"branch must be 'i' or 'ii', got {branch!r}")
    s = np.asarray(s, dtype=float)
    sign = -1.0 if branch == "i" else 1.0
    one = np.ones_like(s)
    X = np.stack(
        [(1 + l * l + s * s) / (2 * l), (l * l - 1 - s * s) / (2 * l), sign * s], axis=-1
    )
    T = np.stack([s / l, -s / l, sign * one], axis=-1)
    N = lorentz_cross(X, T)
    return Frame(X, T, N), sign * one


def closed_form_framed_curve(l: float, branch: str, s) -> FramedCurve:
    s = np.asarray(s, dtype=float)
    (X, T, N), k = closed_form_curve(l, branch, s)
    return FramedCurve(s, X, T, N, k, 1.0, canonical_direction(CausalKind.SPACELIKE))


def soliton_residual(curve: FramedCurve, v) -> float:
    """``max |k(s) - <T(s), v>|`` over the samples."""
    if len(curve) == 0:
        raise TooFewSamples("empty curve")
    return float(np.max(np.abs(curve.k - minkowski_inner(curve.T, v))))


def curvature_from_frame(curve: FramedCurve) -> np.ndarray:
    """``<T', N>`` with T' from second-order finite differences in s."""
    if len(curve) < 3:
        raise TooFewSamples("need at least 3 samples")
    dT = np.gradient(curve.T, curve.s, axis=0, edge_order=2)
    return minkowski_inner(dT, curve.N)
