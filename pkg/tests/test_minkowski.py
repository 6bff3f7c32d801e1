import math

import numpy as np
import pytest

from quake_lab import minkowski as mk
from oracles import cross_by_determinants, distance_to_imaginary_axis, halfplane_distance


def _unit_tangent(rng, p):
    u = mk.tangent_toward(p, mk.halfplane_to_hyperboloid(complex(rng.normal(), math.exp(rng.normal()))))
    return u


def random_point(rng, radius=2.0):
    """Point within ``radius`` of the base point (far points lose digits like e^{2d})."""
    t = rng.uniform(0.0, radius)
    return mk.normalize_point(mk.geodesic_point(mk.E0, _unit_tangent(rng, mk.E0), t))


def random_geodesic(rng):
    p = random_point(rng)
    return mk.geodesic_through(p, _unit_tangent(rng, p))


def random_sl2(rng):
    """Isometry moving the base point at most about 3."""
    while True:
        m = rng.normal(size=(2, 2))
        det = np.linalg.det(m)
        if abs(det) < 0.2:
            continue
        if det < 0:
            m[:, 0] *= -1
        m /= math.sqrt(abs(det))
        if np.abs(m).max() < 3.0:
            return m


def test_inner_signature():
    assert mk.inner(mk.E0, mk.E0) == -1.0
    assert mk.inner([0, 1, 0], [0, 1, 0]) == 1.0
    assert mk.inner([1, 1, 0], [1, 0, 1]) == -1.0


def test_cross_basis_and_antisymmetry(rng):
    assert np.allclose(mk.cross([0, 1, 0], [0, 0, 1]), [-1, 0, 0])
    x = rng.normal(size=3)
    assert np.allclose(mk.cross(x, x), 0.0)


def test_cross_matches_determinant_definition(rng):
    for _ in range(50):
        x, y = rng.normal(size=(2, 3))
        assert np.allclose(mk.cross(x, y), cross_by_determinants(x, y), atol=1e-12)


def test_classify():
    assert mk.classify(mk.E0) == "timelike"
    assert mk.classify([0, 0, 1]) == "spacelike"
    assert mk.classify([1, 0, 1]) == "null"


def test_geodesic_from_endpoints_normal_and_swap():
    g = mk.geodesic_from_endpoints([1, 1, 0], [1, -1, 0])
    assert np.allclose(np.abs(g.normal), [0, 0, 1])
    h = mk.geodesic_from_endpoints([1, -1, 0], [1, 1, 0])
    assert np.allclose(h.normal, -g.normal)
    axis = mk.halfplane_geodesic(0.0, float("inf"))
    assert mk.sqnorm(axis.normal) == pytest.approx(1.0, abs=1e-12)


def test_geodesic_from_endpoints_rejects_proportional():
    with pytest.raises(mk.GeometryError):
        mk.geodesic_from_endpoints([1, 1, 0], [2, 2, 0])


def test_signed_distance_examples(rng):
    axis = mk.halfplane_geodesic(0.0, float("inf"))
    p = mk.halfplane_to_hyperboloid(1 + 1j)
    assert math.tanh(abs(mk.dist_point_to_geodesic(p, axis))) == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    assert mk.dist_point_to_geodesic(mk.E0, axis) == pytest.approx(0.0, abs=1e-15)
    for _ in range(50):
        z = complex(rng.normal(), math.exp(rng.normal()))
        d = abs(mk.dist_point_to_geodesic(mk.halfplane_to_hyperboloid(z), axis))
        assert d == pytest.approx(distance_to_imaginary_axis(z), abs=1e-10)
        assert math.tanh(d) == pytest.approx(abs(math.cos(np.angle(z))), abs=1e-10)


def test_distance_invariant_under_isometry(rng):
    for _ in range(30):
        p = random_point(rng)
        g = random_geodesic(rng)
        h = mk.sl2_to_so21(random_sl2(rng))
        assert mk.dist_point_to_geodesic(h @ p, g.transformed(h)) == pytest.approx(
            mk.dist_point_to_geodesic(p, g), abs=1e-10
        )


def test_intersections(rng):
    g1 = mk.halfplane_geodesic(-1.0, 1.0)
    g2 = mk.halfplane_geodesic(0.0, float("inf"))
    p, c = mk.intersect_geodesics(g1, g2)
    assert c == pytest.approx(0.0, abs=1e-15)
    assert np.allclose(p, mk.E0)
    assert mk.intersect_geodesics(g1, g1) is None
    hits = 0
    while hits < 30:
        a, b = random_geodesic(rng), random_geodesic(rng)
        res = mk.intersect_geodesics(a, b)
        if res is None:
            continue
        hits += 1
        q, _ = res
        assert abs(mk.inner(q, a.normal)) < 1e-10 and abs(mk.inner(q, b.normal)) < 1e-10


def test_quarter_turn_is_counterclockwise_in_the_chart():
    # at i the tangent d/dx must turn into d/dy
    p = mk.E0
    eps = 1e-6
    ux = (mk.halfplane_to_hyperboloid(eps + 1j) - mk.halfplane_to_hyperboloid(-eps + 1j)) / (2 * eps)
    uy = (mk.halfplane_to_hyperboloid(1j * (1 + eps)) - mk.halfplane_to_hyperboloid(1j * (1 - eps))) / (2 * eps)
    assert np.allclose(mk.rotate_quarter(p, ux), uy, atol=1e-8)


def test_generator_flow(rng):
    for _ in range(10):
        g = random_geodesic(rng)
        v = mk.generator_v(g)
        assert np.allclose(mk.exp_generator(v, 0.0), np.eye(3))
        for t in (0.1, 1.0, 2.0):
            m = mk.exp_generator(v, t)
            assert mk.is_isometry(m)
            for e in (g.start, g.end):
                img = m @ e
                assert np.allclose(img / img[0], e, atol=1e-9)
            assert mk.translation_length_so21(m) == pytest.approx(t, abs=1e-9)
            # pushes points toward the end point
            o = g.foot(mk.E0)
            assert g.signed_position(o, m @ o) == pytest.approx(t, abs=1e-9)


def test_model_conversion_round_trip_and_distance(rng):
    assert np.allclose(mk.halfplane_to_hyperboloid(1j), mk.E0)
    z = 2 + 3j
    assert abs(mk.hyperboloid_to_halfplane(mk.halfplane_to_hyperboloid(z)) - z) < 1e-12
    p, q = mk.halfplane_to_hyperboloid(1j), mk.halfplane_to_hyperboloid(2j)
    assert mk.point_distance(p, q) == pytest.approx(math.log(2), abs=1e-12)
    for _ in range(30):
        z, w = (complex(rng.normal(), math.exp(rng.normal())) for _ in range(2))
        d = mk.point_distance(mk.halfplane_to_hyperboloid(z), mk.halfplane_to_hyperboloid(w))
        assert d == pytest.approx(halfplane_distance(z, w), rel=1e-9, abs=1e-9)


def test_sl2_action_commutes_with_conversion(rng):
    for _ in range(30):
        m = rng.normal(size=(2, 2))
        det = np.linalg.det(m)
        if det < 0:
            m[:, 0] *= -1
            det = -det
        m /= math.sqrt(det)
        z = complex(rng.normal(), math.exp(rng.normal()))
        lhs = mk.sl2_to_so21(m) @ mk.halfplane_to_hyperboloid(z)
        rhs = mk.halfplane_to_hyperboloid(mk.mobius(m, z))
        assert np.allclose(lhs, rhs, rtol=1e-10, atol=1e-10)


def test_normalizing_map(rng):
    a, b, c = (mk.ideal_to_null(t) for t in rng.normal(size=3))
    m = mk.normalizing_map(a, b, c)
    for src, dst in ((a, mk.STANDARD_ZERO), (b, mk.STANDARD_INF), (c, mk.STANDARD_ONE)):
        img = m @ src
        assert np.allclose(img / img[0], dst, atol=1e-9)
    assert np.allclose(m.T @ mk.J @ m, mk.J, atol=1e-9)
    assert np.allclose(mk.isometry_inverse(m) @ m, np.eye(3), atol=1e-9)


def test_distance_oracles_agree(rng):
    # the cross-ratio oracle used by the acceptance suite, against brute force
    from oracles import brute_geodesic_distance, ultraparallel_cosh_distance

    for _ in range(3):
        left, right = np.sort(rng.uniform(0.2, 5, 2)), np.sort(rng.uniform(0.2, 5, 2))
        a, b, c, d = -left[0], right[0], -left[1], right[1]
        want = brute_geodesic_distance(a, b, c, d)
        assert math.acosh(ultraparallel_cosh_distance(a, b, c, d)) == pytest.approx(want, abs=1e-9)
        got = mk.geodesic_distance(mk.halfplane_geodesic(a, b), mk.halfplane_geodesic(c, d))
        assert got == pytest.approx(want, abs=1e-9)
