import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypercsf.errors import BoundaryPole, NotOnHyperboloid, OutsideDisk
from hypercsf.minkowski import hyperbolic_distance
from hypercsf.models import disk_distance, half_plane_distance, to_disk, to_half_plane
from oracles import inner, random_h2


def point(r, th):
    return np.array([math.cosh(r), math.sinh(r) * math.cos(th), math.sinh(r) * math.sin(th)])


def test_to_disk_examples():
    np.testing.assert_allclose(to_disk([1.0, 0, 0]), [0, 0])
    np.testing.assert_allclose(to_disk(point(1.0, 0.0)), [math.tanh(0.5), 0], atol=1e-15)
    np.testing.assert_allclose(to_disk([math.sqrt(2), 1, 0]), [1 / (1 + math.sqrt(2)), 0], atol=1e-15)


def test_to_half_plane_vertex():
    np.testing.assert_allclose(to_half_plane([1.0, 0, 0]), [0, 1])


def test_rejects_points_off_the_surface():
    with pytest.raises(NotOnHyperboloid):
        to_disk([1.0, 1.0, 0])
    with pytest.raises(NotOnHyperboloid):
        to_half_plane([-1.0, 0, 0])


def test_boundary_pole():
    # the disk point (0, 1) is the pole of the Cayley transform; it is never
    # reached from H^2, so the guard is exercised on the disk side directly
    with pytest.raises(BoundaryPole):
        to_half_plane(point(40.0, math.pi / 2))


def test_disk_distance_examples():
    p = to_disk([1.0, 0, 0])
    q = to_disk(point(1.0, 0.0))
    assert disk_distance(p, p) == 0.0
    assert disk_distance(p, q) == pytest.approx(1.0, abs=1e-12)
    assert disk_distance(q, p) == disk_distance(p, q)
    with pytest.raises(OutsideDisk):
        disk_distance([0.0, 1.0], [0.0, 0.0])


def test_distances_match_hyperboloid_on_random_pairs():
    rng = np.random.default_rng(12)
    P, Q = random_h2(rng, 10_000, 5.0), random_h2(rng, 10_000, 5.0)
    d = hyperbolic_distance(P, Q)
    assert d.max() <= 10.0
    assert np.max(np.abs(disk_distance(to_disk(P), to_disk(Q)) - d)) <= 1e-9
    assert np.max(np.abs(half_plane_distance(to_half_plane(P), to_half_plane(Q)) - d)) <= 1e-9


@given(st.floats(0, 5), st.floats(0, 2 * math.pi), st.floats(0, 5), st.floats(0, 2 * math.pi))
def test_model_images(r1, t1, r2, t2):
    P, Q = point(r1, t1), point(r2, t2)
    p = to_disk(P)
    assert p @ p < 1
    assert to_half_plane(P)[1] > 0
    # chord form; arccosh(-<P,Q>) loses sqrt(eps) for nearby points
    chord = P - Q
    d = 2 * math.asinh(math.sqrt(max(inner(chord, chord), 0.0)) / 2)
    assert float(disk_distance(p, to_disk(Q))) == pytest.approx(d, abs=1e-9)


@given(st.floats(0, 5), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_to_disk_separates_nearby_points(r, th, direction):
    P = point(r, th)
    w = np.array([0.0, math.cos(direction), math.sin(direction)])
    t = w + inner(w, P) * P  # tangent at P
    t /= math.sqrt(inner(t, t))
    Q = math.cosh(1e-6) * P + math.sinh(1e-6) * t
    assert not np.array_equal(to_disk(P), to_disk(Q))
