import dataclasses
import math

import numpy as np
import pytest
import shapely
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from hypercsf.analysis import (
    UNRESOLVED,
    check_eta_monotone,
    count_tau_critical,
    curvature_limits,
    find_alpha_critical,
    qualitative_report,
    self_intersects,
)
from hypercsf.errors import MultipleCriticalPoints, TooFewPoints, TooFewSamples, WindowTooShort
from hypercsf.soliton_ode import (
    FamilyKind,
    Manifold,
    SolitonParams,
    integrate,
    integrate_state,
    seed_invariant_manifold,
    trivial_solutions,
)
from oracles import rk4_reduced, sign_changes

SQRT2 = math.sqrt(2.0)


@pytest.fixture(scope="module")
def h_traj():
    return integrate_state(1.0, (SQRT2, 1.0, 0.0), (-30, 30))


@pytest.fixture(scope="module")
def h_oracle():
    return rk4_reduced(1.0, [SQRT2, 1.0, 0.0], -30, 30, record_every=1)


def linear_traj(window=(-40, 40)):
    sol = [t for t in trivial_solutions(1.0) if t.tau == -1.0][0]
    return sol.trajectory(np.linspace(*window, 8001))


def test_eta_monotone_examples():
    assert check_eta_monotone(linear_traj())
    singular = trivial_solutions(1.0)[0].trajectory(np.linspace(-5, 5, 11))
    assert check_eta_monotone(singular)
    tr = linear_traj()
    reversed_ = dataclasses.replace(tr, psi=tr.psi[::-1].copy())
    assert not check_eta_monotone(reversed_)


def test_eta_monotone_needs_two_samples():
    tr = linear_traj()
    with pytest.raises(TooFewSamples):
        check_eta_monotone(dataclasses.replace(tr, s=tr.s[:1], psi=tr.psi[:1]))


def test_alpha_critical_h_family(h_traj, h_oracle):
    crit = find_alpha_critical(h_traj)
    s_ref, psi_ref = h_oracle
    (i,) = sign_changes(psi_ref[:, 1])
    t0, t1 = psi_ref[i, 1], psi_ref[i + 1, 1]
    s_star = s_ref[i] + (s_ref[i + 1] - s_ref[i]) * t0 / (t0 - t1)
    assert crit.s == pytest.approx(s_star, abs=1e-8)
    assert crit.kind == "min"
    assert crit.alpha <= psi_ref[:, 0].min() + 1e-12
    assert abs(h_traj(crit.s)[1]) <= 1e-10


def test_alpha_critical_none_for_linear():
    assert find_alpha_critical(linear_traj()) is None


def test_alpha_critical_maximum_on_s():
    tr = integrate_state(1.0, (-2.0, 0.0, math.sqrt(5.0)), (-10, 10))
    crit = find_alpha_critical(tr)
    assert crit.s == pytest.approx(0.0, abs=1e-10)
    assert crit.kind == "max"
    assert crit.alpha == pytest.approx(-2.0)
    assert np.all(tr.alpha <= crit.alpha + 1e-12)


def test_multiple_critical_points_rejected_on_h(h_traj):
    fake = dataclasses.replace(
        h_traj, psi=np.column_stack([h_traj.alpha, np.sin(h_traj.s), h_traj.eta]),
        dense=lambda x: np.stack(np.broadcast_arrays(0 * np.asarray(x), np.sin(x), 0 * np.asarray(x)), -1),
    )
    with pytest.raises(MultipleCriticalPoints):
        find_alpha_critical(fake)


def test_tau_critical_h_family(h_traj, h_oracle):
    count, locs = count_tau_critical(h_traj)
    assert count == 2
    s_ref, psi_ref = h_oracle
    tp = psi_ref[:, 1] * psi_ref[:, 2] + psi_ref[:, 0]
    oracle = s_ref[sign_changes(tp)]
    assert oracle.size == 2
    np.testing.assert_allclose(locs, oracle, atol=2e-4)
    s_star = find_alpha_critical(h_traj).s
    assert locs[0] < s_star < locs[1]
    for s0 in locs:
        assert h_traj(s0)[1] ** 2 > 1.0


def test_tau_critical_linear_is_zero():
    assert count_tau_critical(linear_traj())[0] == 0


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_tau_critical_c_family_positive_tau(a):
    # near the unstable direction of the origin; further back, round-off along
    # the stable direction overtakes tau ~ 1e-6 e^s and flips its sign
    tr = integrate_state(a, (1e-6, 1e-6, 0.0), (-12, 30))
    assert tr.tau.min() > 0
    assert count_tau_critical(tr)[0] <= 1


@pytest.mark.parametrize("psi0", [(1.0, 1.0, 0.0), (2.0, 1.2, 1.6)])
def test_tau_critical_c_family_sign_change(psi0):
    # once tau changes sign the bound no longer applies: a minimum with tau < 0
    # and a maximum with tau > 0
    tr = integrate_state(1.0, psi0, (-30, 30))
    count, locs = count_tau_critical(tr)
    assert count == 2
    assert sorted(np.sign([tr(x)[1] for x in locs])) == [-1, 1]


@given(st.floats(-2, 2), st.floats(0, 2 * math.pi), st.floats(0.3, 3.0))
@settings(max_examples=20)
def test_s_family_tau_critical_values(x, th, a):
    r = math.sqrt(1 + x * x)
    tr = integrate_state(a, (x, r * math.cos(th), r * math.sin(th)), (-20, 20))
    if tr.is_trivial():
        return
    _, locs = count_tau_critical(tr)
    for s0 in locs:
        _, tau, eta = tr(s0)
        # on S at tau' = 0 the invariant gives tau^2 - 1 = -eta^2 (1 - a^2 tau^2)
        # and (a^2 tau^2 - 1)(1 - a^2 eta^2) = a^2 - 1: so tau^2 != 1 unless
        # eta = 0 (the orbit meets (0, +-1, 0), see below) and a^2 tau^2 != 1
        # unless a = 1, with margins proportional to eta^2 and |a^2 - 1|
        scale = 1e-8 * (1 + tau * tau) * (1 + a * a * eta * eta) * (1 + a * a)
        assert tau * tau - 1 == pytest.approx(-eta * eta * (1 - a * a * tau * tau), abs=scale)
        assert (a * a * tau * tau - 1) * (1 - a * a * eta * eta) == pytest.approx(a * a - 1, abs=scale)


@pytest.mark.parametrize("a", [0.5, 2.0])
def test_s_family_tau_critical_at_unit_tau(a):
    tr = integrate_state(a, (0.0, 1.0, 0.0), (-5, 5))
    _, locs = count_tau_critical(tr)
    (s0,) = [x for x in locs if abs(x) < 1e-6]
    assert tr(s0)[1] == pytest.approx(1.0, abs=1e-9)


def test_curvature_limits_h_family():
    tr = integrate_state(1.0, (SQRT2, 1.0, 0.0), (-40, 40))
    km, kp, cm, cp = curvature_limits(tr)
    assert {cm, cp} == {-1, 1}
    assert km * kp < 0


def test_curvature_limits_linear():
    assert curvature_limits(linear_traj())[2:] == (-1, -1)


def test_curvature_limits_unstable_manifold():
    psi0 = seed_invariant_manifold(1.0, Manifold.UNSTABLE, 1e-6, 1)
    tr = integrate(SolitonParams(1.0, FamilyKind.S, psi0, -40, 40))
    assert curvature_limits(tr)[2] == 0


def test_curvature_limits_unresolved_and_short_window():
    tr = integrate_state(1.0, (SQRT2, 1.0, 0.0), (-10, 10))
    with pytest.raises(WindowTooShort):
        curvature_limits(tr)
    km, kp, cm, cp = curvature_limits(tr, s_tail=10, snap=1e-6)
    assert cm == UNRESOLVED and cp == UNRESOLVED


def figure_eight(n=200):
    t = np.linspace(0, 2 * math.pi, n)
    return np.column_stack([np.sin(t), np.sin(t) * np.cos(t)])


def test_self_intersects_examples():
    assert self_intersects(figure_eight())
    line = np.column_stack([np.linspace(0, 1, 50), np.zeros(50)])
    assert not self_intersects(line)
    with pytest.raises(TooFewPoints):
        self_intersects(line[:3])


def test_self_intersects_touching_vertex():
    pts = np.array([[0, 0], [2, 0], [2, 1], [1, 0], [1, -1]], float)  # vertex lands on segment 0
    assert self_intersects(pts)


@given(arrays(np.float64, (st.integers(4, 14).map(lambda n: (n, 2))), elements=st.integers(-6, 6).map(float)))
@settings(max_examples=300)
def test_self_intersects_matches_shapely(pts):
    steps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    if np.any(steps == 0) or np.array_equal(pts[0], pts[-1]):
        return
    # collinear reversals are an overlap of adjacent segments, which shapely
    # flags and the non-adjacent definition does not; skip that corner case
    d = np.diff(pts, axis=0)
    cross = d[:-1, 0] * d[1:, 1] - d[:-1, 1] * d[1:, 0]
    dot = np.sum(d[:-1] * d[1:], axis=1)
    if np.any((cross == 0) & (dot < 0)):
        return
    assert self_intersects(pts) == (not shapely.LineString(pts).is_simple)


def test_qualitative_report_h(h_traj):
    tr = integrate_state(1.0, (SQRT2, 1.0, 0.0), (-40, 40))
    rep = qualitative_report(tr)
    assert rep.family == "H" and rep.eta_monotone and rep.embedded
    assert rep.tau_critical_count == 2
    assert {rep.k_limit_class_neg, rep.k_limit_class_pos} == {-1, 1}
    assert rep.alpha_critical["kind"] == "min"
    assert np.isfinite(rep.tau_bound) and rep.invariant_drift <= 1e-9
    assert set(rep.to_dict()) >= {"family", "a", "k_limit_neg", "embedded"}
