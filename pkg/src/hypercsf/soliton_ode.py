"""The reduced soliton system in the projections psi = (alpha, tau, eta).

For a soliton with ``k = a <T, e>`` the projections ``alpha = <X, e>``,
``tau = <T, e>`` and ``eta = <N, e>`` obey the autonomous system

    alpha' = tau,    tau' = a tau eta + alpha,    eta' = -a tau^2,

which conserves ``-alpha^2 + tau^2 + eta^2 = <e, e>``.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    InputError,
    InvalidSheet,
    InvariantBlowup,
    NonPositiveRate,
    NotOnInvariantSet,
    ToleranceNotMet,
)
from .minkowski import CausalKind

CLASSIFY_TOL = 1e-8
PARAMS_TOL = 1e-10
BLOWUP_DRIFT = 1e-6
DEFAULT_WINDOW = (-40.0, 40.0)
DEFAULT_DS = 0.01
# caps the step so the 7th-order dense interpolant stays as accurate as the steps
MAX_STEP = 0.1


class SolitonState(NamedTuple):
    alpha: float
    tau: float
    eta: float


class FamilyKind(enum.Enum):
    H = "H"
    C = "C"
    S = "S"

    @property
    def delta(self) -> int:
        return {"H": -1, "C": 0, "S": 1}[self.value]

    @property
    def causal_kind(self) -> CausalKind:
        return {
            "H": CausalKind.TIMELIKE,
            "C": CausalKind.LIGHTLIKE,
            "S": CausalKind.SPACELIKE,
        }[self.value]

    @classmethod
    def from_causal(cls, kind: CausalKind) -> "FamilyKind":
        return {
            CausalKind.TIMELIKE: cls.H,
            CausalKind.LIGHTLIKE: cls.C,
            CausalKind.SPACELIKE: cls.S,
        }[kind]


class Manifold(enum.Enum):
    UNSTABLE = "u"
    STABLE = "s"


def _check_rate(a):
    if not a > 0:
        raise NonPositiveRate(f"rate a must be positive, got {a}")


def rhs(a: float, psi) -> np.ndarray:
    _check_rate(a)
    alpha, tau, eta = np.asarray(psi, dtype=float).T
    return np.stack([tau, a * tau * eta + alpha, -a * tau * tau]).T


def quadratic_invariant(psi):
    psi = np.asarray(psi, dtype=float)
    return -psi[..., 0] ** 2 + psi[..., 1] ** 2 + psi[..., 2] ** 2


def classify_initial(psi0) -> FamilyKind:
    psi0 = np.asarray(psi0, dtype=float)
    q = float(quadratic_invariant(psi0))
    delta = round(q)
    if delta not in (-1, 0, 1) or abs(q - delta) > CLASSIFY_TOL:
        raise NotOnInvariantSet(
            f"-alpha^2+tau^2+eta^2 = {q:.12g} is not within {CLASSIFY_TOL} of -1, 0 or 1"
        )
    if delta == 0 and np.max(np.abs(psi0)) <= CLASSIFY_TOL:
        raise NotOnInvariantSet("the origin is excluded from the cone family C")
    if delta <= 0 and psi0[0] <= 0:
        raise InvalidSheet(f"alpha must be positive on H and C, got {psi0[0]}")
    return {-1: FamilyKind.H, 0: FamilyKind.C, 1: FamilyKind.S}[delta]


@dataclass(frozen=True)
class SolitonParams:
    a: float
    family: FamilyKind
    psi0: SolitonState
    s_min: float = DEFAULT_WINDOW[0]
    s_max: float = DEFAULT_WINDOW[1]
    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    n_samples: int | None = None

    def __post_init__(self):
        _check_rate(self.a)
        object.__setattr__(self, "psi0", SolitonState(*map(float, self.psi0)))
        if not self.s_min < 0 < self.s_max:
            raise InputError(f"window must bracket 0, got [{self.s_min}, {self.s_max}]")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise InputError("tolerances must be positive")
        q = float(quadratic_invariant(self.psi0))
        if abs(q - self.family.delta) > PARAMS_TOL:
            raise NotOnInvariantSet(
                f"psi0 has invariant {q:.12g}, family {self.family.value} needs {self.family.delta}"
            )
        if self.family is not FamilyKind.S and self.psi0.alpha <= 0:
            raise InvalidSheet("alpha must be positive on H and C")
        if self.family is FamilyKind.C and max(map(abs, self.psi0)) == 0:
            raise NotOnInvariantSet("the origin is excluded from the cone family C")

    def grid(self) -> np.ndarray:
        n = self.n_samples
        if n is None:
            n = int(round((self.s_max - self.s_min) / DEFAULT_DS)) + 1
        return np.linspace(self.s_min, self.s_max, n)


@dataclass(frozen=True)
class Trajectory:
    """Samples of psi(s) plus dense output over the whole window.

    ``segments`` holds the solver's piecewise interpolants (backward piece
    first); calling the trajectory evaluates them at arbitrary ``s``.
    """

    s: np.ndarray
    psi: np.ndarray
    a: float
    family: FamilyKind
    max_invariant_drift: float
    dense: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    segments: tuple = field(default=(), repr=False)

    def __call__(self, s):
        return self.dense(s)

    @property
    def alpha(self):
        return self.psi[:, 0]

    @property
    def tau(self):
        return self.psi[:, 1]

    @property
    def eta(self):
        return self.psi[:, 2]

    @property
    def window(self) -> tuple[float, float]:
        return float(self.s[0]), float(self.s[-1])

    def tau_prime(self, s=None):
        psi = self.psi if s is None else self(s)
        return self.a * psi[..., 1] * psi[..., 2] + psi[..., 0]

    def is_trivial(self, tol: float = 1e-10) -> bool:
        return float(np.ptp(self.tau)) <= tol


def _drift(psi, family: FamilyKind) -> float:
    return float(np.max(np.abs(quadratic_invariant(psi) - family.delta)))


def _ode(a):
    def f(_s, y):
        alpha, tau, eta = y
        return [tau, a * tau * eta + alpha, -a * tau * tau]

    return f


def _piecewise_dense(backward, forward):
    def evaluate(s):
        s = np.asarray(s, dtype=float)
        flat = np.atleast_1d(s).ravel()
        out = np.empty((flat.size, 3))
        neg = flat < 0
        if np.any(neg):
            out[neg] = backward(flat[neg]).T
        if np.any(~neg):
            out[~neg] = forward(flat[~neg]).T
        return out.reshape(s.shape + (3,))

    return evaluate


def integrate(params: SolitonParams) -> Trajectory:
    """Integrate the reduced system outward from s=0 in both directions.

    The invariant is monitored but never projected back: the drift is the
    accuracy diagnostic and is stored on the result.
    """
    f = _ode(params.a)
    y0 = list(params.psi0)
    pieces = []
    for end in (params.s_min, params.s_max):
        sol = solve_ivp(
            f, (0.0, end), y0, method="DOP853",
            rtol=params.rel_tol, atol=params.abs_tol, dense_output=True, max_step=MAX_STEP,
        )
        if sol.status != 0:
            raise ToleranceNotMet(f"integration towards s={end} failed: {sol.message}")
        pieces.append(sol.sol)
    dense = _piecewise_dense(*pieces)
    s = params.grid()
    psi = dense(s)
    drift = _drift(psi, params.family)
    if drift > BLOWUP_DRIFT:
        raise InvariantBlowup(f"invariant drift {drift:.3g} exceeds {BLOWUP_DRIFT}")
    return Trajectory(s, psi, params.a, params.family, drift, dense, tuple(pieces))


def integrate_state(a, psi0, window=DEFAULT_WINDOW, **kw) -> Trajectory:
    """Shorthand: classify ``psi0`` and integrate over ``window``."""
    family = classify_initial(psi0)
    return integrate(SolitonParams(a, family, SolitonState(*psi0), *window, **kw))


@dataclass(frozen=True)
class TrivialSolution:
    """A closed-form solution with constant tau.

    ``psi(s, alpha0)`` evaluates it; the singular solutions ignore ``alpha0``.
    """

    label: str
    a: float
    tau: float
    psi: Callable[..., np.ndarray] = field(repr=False)

    def trajectory(self, s, alpha0: float = 0.0) -> Trajectory:
        s = np.asarray(s, dtype=float)
        values = self.psi(s, alpha0)
        return Trajectory(
            s, values, self.a, FamilyKind.S, _drift(values, FamilyKind.S),
            lambda x: self.psi(np.asarray(x, dtype=float), alpha0),
        )


def _singular(eta0):
    def psi(s, alpha0=0.0):
        s = np.asarray(s, dtype=float)
        return np.stack(np.broadcast_arrays(0.0 * s, 0.0 * s, eta0 + 0.0 * s), axis=-1)

    return psi


def _linear(sa, sb, sc):
    # (sa*s + alpha0, sb, -s + sc*alpha0)
    def psi(s, alpha0=0.0):
        s = np.asarray(s, dtype=float)
        return np.stack(
            np.broadcast_arrays(sa * s + alpha0, sb + 0.0 * s, -s + sc * alpha0), axis=-1
        )

    return psi


def _linear_branches(a):
    """Sign triples of ``(+-s + alpha0, +-1, -s +- alpha0)`` that solve the system.

    Branches are kept by substitution: the residual of the right-hand side
    must vanish for several generic ``(s, alpha0)``.
    """
    probes = [(-1.3, 0.7), (0.4, -2.1), (2.9, 3.3)]
    kept = []
    for sa, sb, sc in itertools.product((1.0, -1.0), repeat=3):
        branch = _linear(sa, sb, sc)
        ok = True
        for s0, alpha0 in probes:
            h = 1e-6
            deriv = (branch(s0 + h, alpha0) - branch(s0 - h, alpha0)) / (2 * h)
            if np.max(np.abs(deriv - rhs(a, branch(s0, alpha0)))) > 1e-6:
                ok = False
                break
        if ok:
            kept.append((sa, sb, sc))
    return kept


def trivial_solutions(a: float) -> list[TrivialSolution]:
    _check_rate(a)
    out = [
        TrivialSolution("singular+", a, 0.0, _singular(1.0)),
        TrivialSolution("singular-", a, 0.0, _singular(-1.0)),
    ]
    if math.isclose(a, 1.0, rel_tol=0, abs_tol=1e-12):
        for sa, sb, sc in _linear_branches(1.0):
            label = f"linear(tau={sb:+.0f})"
            out.append(TrivialSolution(label, a, sb, _linear(sa, sb, sc)))
    return out


@dataclass(frozen=True)
class SaddleEigen:
    lambda_plus: float
    lambda_minus: float
    eigvec_plus: tuple[float, float]
    eigvec_minus: tuple[float, float]


def saddle_eigen(a: float) -> SaddleEigen:
    """Eigen-data of the linearisation at p = (0, 0, 1) on the plane eta = 0.

    The roots of ``lambda^2 - a lambda - 1 = 0``; eigenvectors are the unit
    multiples of ``(1, lambda)``.
    """
    _check_rate(a)
    root = math.sqrt(a * a + 4.0)
    lp = 0.5 * (a + root)
    lm = -1.0 / lp  # same root as (a - root)/2 without the cancellation

    def unit(lam):
        n = math.hypot(1.0, lam)
        return (1.0 / n, lam / n)

    return SaddleEigen(lp, lm, unit(lp), unit(lm))


def seed_invariant_manifold(a: float, which: Manifold, epsilon: float, sign: int) -> SolitonState:
    """A point of S near p, displaced along the unstable or stable eigenvector.

    After the step in the (alpha, tau) plane, eta is recomputed as the positive
    root that puts the state exactly on S.
    """
    if not 0 < epsilon <= 1e-4:
        raise InputError(f"epsilon must lie in (0, 1e-4], got {epsilon}")
    if sign not in (1, -1):
        raise InputError(f"sign must be +1 or -1, got {sign}")
    eig = saddle_eigen(a)
    w = eig.eigvec_plus if which is Manifold.UNSTABLE else eig.eigvec_minus
    alpha = sign * epsilon * w[0]
    tau = sign * epsilon * w[1]
    return SolitonState(alpha, tau, math.sqrt(1.0 + alpha * alpha - tau * tau))
