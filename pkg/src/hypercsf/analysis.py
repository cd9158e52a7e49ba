"""Qualitative diagnostics of trajectories and curves.

Each checker turns one qualitative statement about the reduced system into
a number or a boolean computed from dense output: monotone eta, the critical
points of alpha and tau, the curvature limits at both ends, and embeddedness.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import MultipleCriticalPoints, TooFewPoints, TooFewSamples, WindowTooShort
from .soliton_ode import FamilyKind, Trajectory

ETA_SLACK = 1e-9
ROOT_XTOL = 1e-10
S_TAIL = 40.0
SNAP = 0.05
TAIL_FRACTION = 0.05
# |tau'| below this fraction of |alpha| + a|tau eta| is cancellation noise
TAU_PRIME_NOISE = 1e-9
SADDLE_RADIUS = 1e-3
UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class CriticalPoint:
    s: float
    alpha: float
    kind: str  # "min" or "max"


def check_eta_monotone(traj: Trajectory) -> bool:
    if traj.s.size < 2:
        raise TooFewSamples("need at least 2 samples")
    return bool(np.all(np.diff(traj.eta) <= ETA_SLACK))


def _roots(values, fn, s):
    """Sign changes of sampled ``values``, refined with brentq.

    Zero samples are skipped when comparing signs, so a change across a run
    of zeros counts once and sits at the middle of the run.
    """
    sign = np.sign(values)
    idx = np.flatnonzero(sign)
    roots = []
    for i, j in zip(idx[:-1], idx[1:]):
        if sign[i] == sign[j]:
            continue
        if j == i + 1:
            roots.append(brentq(fn, float(s[i]), float(s[j]), xtol=ROOT_XTOL, rtol=1e-15))
        else:
            roots.append(0.5 * float(s[i + 1] + s[j - 1]))
    return roots


def find_alpha_critical(traj: Trajectory) -> CriticalPoint | None:
    """The zero of tau, i.e. the critical point of alpha, if any.

    On H and C there is at most one such point and it is the global minimum of
    alpha; more than one signals a numerical failure.  On S the point is a
    minimum when alpha > 0 there and a maximum when alpha < 0.
    """
    if traj.is_trivial():
        return None
    roots = _roots(traj.tau, lambda x: float(traj(x)[1]), traj.s)
    if not roots:
        return None
    if len(roots) > 1:
        if traj.family is not FamilyKind.S:
            raise MultipleCriticalPoints(
                f"alpha has {len(roots)} critical points at s={roots}; at most one is possible"
            )
        roots = roots[:1]
    s0 = roots[0]
    alpha = float(traj(s0)[0])
    return CriticalPoint(s0, alpha, "min" if alpha > 0 else "max")


def tau_prime_noise_mask(traj: Trajectory, psi=None) -> np.ndarray:
    psi = traj.psi if psi is None else psi
    scale = np.abs(psi[:, 0]) + traj.a * np.abs(psi[:, 1] * psi[:, 2])
    tp = traj.a * psi[:, 1] * psi[:, 2] + psi[:, 0]
    return np.abs(tp) <= TAU_PRIME_NOISE * scale


def count_tau_critical(traj: Trajectory) -> tuple[int, list[float]]:
    """Sign changes of ``tau' = a tau eta + alpha`` inside the window."""
    tp = traj.tau_prime()
    tp = np.where(tau_prime_noise_mask(traj), 0.0, tp)
    roots = _roots(tp, lambda x: float(traj.tau_prime(np.array([x]))[0]), traj.s)
    return len(roots), roots


def _snap(value: float, snap: float):
    nearest = min((-1, 0, 1), key=lambda c: abs(value - c))
    return nearest if abs(value - nearest) <= snap else UNRESOLVED


def curvature_limits(
    traj: Trajectory,
    a: float | None = None,
    s_tail: float = S_TAIL,
    snap: float = SNAP,
    fraction: float = TAIL_FRACTION,
):
    """Tail averages of ``k = a tau`` at both ends and their snapped classes.

    Returns ``(k_minus, k_plus, class_minus, class_plus)``; a class is -1, 0 or
    1 when the average lies within ``snap`` of it, else ``"unresolved"``.
    """
    a = traj.a if a is None else a
    lo, hi = traj.window
    if lo > -s_tail + 1e-9 or hi < s_tail - 1e-9:
        raise WindowTooShort(f"window [{lo}, {hi}] does not reach |s| >= {s_tail}")
    m = max(1, math.ceil(fraction * traj.s.size))
    k_minus = float(a * np.mean(traj.tau[:m]))
    k_plus = float(a * np.mean(traj.tau[-m:]))
    return k_minus, k_plus, _snap(k_minus, snap), _snap(k_plus, snap)


def _orient(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _on_box(ax, ay, bx, by, px, py):
    return (
        (np.minimum(ax, bx) <= px) & (px <= np.maximum(ax, bx))
        & (np.minimum(ay, by) <= py) & (py <= np.maximum(ay, by))
    )


def _segments_hit(p, q, P, Q):
    """Does segment pq meet any of the segments P[i]Q[i]?  (Touching counts.)"""
    ax, ay, bx, by = p[0], p[1], q[0], q[1]
    cx, cy, dx, dy = P[:, 0], P[:, 1], Q[:, 0], Q[:, 1]
    d1 = _orient(cx, cy, dx, dy, ax, ay)
    d2 = _orient(cx, cy, dx, dy, bx, by)
    d3 = _orient(ax, ay, bx, by, cx, cy)
    d4 = _orient(ax, ay, bx, by, dx, dy)
    proper = (d1 * d2 < 0) & (d3 * d4 < 0)
    touch = (
        ((d1 == 0) & _on_box(cx, cy, dx, dy, ax, ay))
        | ((d2 == 0) & _on_box(cx, cy, dx, dy, bx, by))
        | ((d3 == 0) & _on_box(ax, ay, bx, by, cx, cy))
        | ((d4 == 0) & _on_box(ax, ay, bx, by, dx, dy))
    )
    return bool(np.any(proper | touch))


def self_intersects(points2d) -> bool:
    """True iff two non-adjacent segments of the open polyline meet.

    Segments are swept in order of their left end; each is tested only against
    later-starting segments whose x-range overlaps its own.
    """
    pts = np.asarray(points2d, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 4:
        raise TooFewPoints("need at least 4 planar points")
    P, Q = pts[:-1], pts[1:]
    xmin = np.minimum(P[:, 0], Q[:, 0])
    xmax = np.maximum(P[:, 0], Q[:, 0])
    ymin = np.minimum(P[:, 1], Q[:, 1])
    ymax = np.maximum(P[:, 1], Q[:, 1])
    order = np.argsort(xmin, kind="stable")
    xs = xmin[order]
    for rank, i in enumerate(order):
        stop = np.searchsorted(xs, xmax[i], side="right")
        cand = order[rank + 1 : stop]
        cand = cand[(np.abs(cand - i) >= 2) & (ymin[cand] <= ymax[i]) & (ymax[cand] >= ymin[i])]
        if cand.size and _segments_hit(P[i], Q[i], P[cand], Q[cand]):
            return True
    return False


@dataclass
class QualReport:
    family: str
    a: float
    psi0: list[float]
    eta_monotone: bool
    alpha_critical: dict | None
    tau_critical_count: int
    tau_critical_points: list[float]
    tau_bound: float
    k_limit_neg: float
    k_limit_pos: float
    k_limit_class_neg: int | str
    k_limit_class_pos: int | str
    embedded: bool | None
    invariant_drift: float
    near_saddle_neg: bool
    near_saddle_pos: bool
    window: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _near_saddle(psi) -> bool:
    return bool(min(np.linalg.norm(psi - [0, 0, 1]), np.linalg.norm(psi - [0, 0, -1])) <= SADDLE_RADIUS)


def embedded_check(traj: Trajectory, half_width: float = 20.0, n: int = 4001) -> bool:
    """Reconstruct on ``|s| <= half_width`` and test the disk image for crossings."""
    from .frame import reconstruct
    from .models import to_disk

    lo, hi = traj.window
    s = np.linspace(max(lo, -half_width), min(hi, half_width), n)
    curve = reconstruct(traj, s=s)
    return not self_intersects(to_disk(curve.X))


def qualitative_report(
    traj: Trajectory,
    check_embedded: bool = True,
    s_tail: float = S_TAIL,
    snap: float = SNAP,
    embed_half_width: float = 20.0,
    embed_samples: int = 4001,
) -> QualReport:
    crit = find_alpha_critical(traj)
    count, locs = (0, []) if traj.is_trivial() else count_tau_critical(traj)
    k_neg, k_pos, c_neg, c_pos = curvature_limits(traj, s_tail=s_tail, snap=snap)
    embedded = (
        embedded_check(traj, embed_half_width, embed_samples) if check_embedded else None
    )
    return QualReport(
        family=traj.family.value,
        a=traj.a,
        psi0=[float(x) for x in traj(0.0)],
        eta_monotone=check_eta_monotone(traj),
        alpha_critical=None if crit is None else asdict(crit),
        tau_critical_count=count,
        tau_critical_points=locs,
        tau_bound=float(np.max(np.abs(traj.tau))),
        k_limit_neg=k_neg,
        k_limit_pos=k_pos,
        k_limit_class_neg=c_neg,
        k_limit_class_pos=c_pos,
        embedded=embedded,
        invariant_drift=traj.max_invariant_drift,
        near_saddle_neg=_near_saddle(traj.psi[0]),
        near_saddle_pos=_near_saddle(traj.psi[-1]),
        window=list(traj.window),
    )
