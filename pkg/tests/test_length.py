import math
from fractions import Fraction

import numpy as np
import pytest

from quake_lab import minkowski as mk
from quake_lab.circuital import decompose
from quake_lab.lamination import LaminationTuple, MeasuredLamination, closed, spiral
from quake_lab.length import (
    AnchorError,
    anchor_height,
    anchor_point,
    anchor_tanh_distance,
    circuit_leaves,
    circuit_length,
    circuit_loop,
    compact_length,
    length_function,
    reference_lift,
    total_length,
)
from quake_lab.surface import axis_of, make_point
from oracles import distance_to_imaginary_axis, semicircle_height_at_one, torus_dual_length

A_PLUS = spiral("A", (0, "+"), (0, "+"), 1, "a+")
B_MINUS = spiral("B", (0, "-"), (0, "-"), 1, "b-")


@pytest.mark.parametrize("b", [0.3, 1.0, 2.5])
@pytest.mark.parametrize("k", [0, 1, 2, 5])
def test_anchor_closed_forms_match_root_finding(b, k):
    for phi in (0.0, 0.4, 1.2):
        x_end = math.exp(b * k) / math.cos(phi) ** 2
        if x_end <= 1.0:
            continue
        y = anchor_height(b, phi, k)
        assert y == pytest.approx(semicircle_height_at_one(x_end), rel=1e-10)
        z = complex(1.0, y)
        d = distance_to_imaginary_axis(z)
        assert anchor_tanh_distance(b, phi, k) == pytest.approx(math.tanh(d), rel=1e-10)


def test_anchor_lies_on_both_lifts(torus):
    for k in (1, 2, 4):
        a = anchor_point(torus, B_MINUS, A_PLUS, k)
        lift_in = reference_lift(torus, B_MINUS)
        lift_out = reference_lift(torus, A_PLUS)
        assert abs(mk.inner(a.point_in, lift_in.normal)) < 1e-9
        assert abs(mk.inner(a.point_out, lift_out.normal)) < 1e-9
        assert a.chart_point.real == 1.0 and a.chart_point.imag > 0
        assert a.tanh_distance == pytest.approx(anchor_tanh_distance(a.b, a.phi, k), rel=1e-12)


def test_anchor_deck_relation(torus):
    # the two copies differ by the arriving arc and a power of the boundary
    rep = torus.holonomy
    c = rep.eval3(torus.topology.boundary_words[0])
    c_inv = mk.isometry_inverse(c)
    for k in (1, 3):
        a = anchor_point(torus, B_MINUS, A_PLUS, k)
        pulled = mk.isometry_inverse(rep.eval3(B_MINUS.arc)) @ a.point_in
        n = a.translate + k
        hits = [np.linalg.matrix_power(m, n) @ pulled for m in (c, c_inv)]
        # far anchors have large coordinates; compare relative to their size
        err = min(np.abs(h - a.point_out).max() / np.abs(h).max() for h in hits)
        assert err < 1e-10


def test_anchor_distance_to_boundary_lift(torus):
    rep = torus.holonomy
    for k in (1, 2):
        a = anchor_point(torus, B_MINUS, A_PLUS, k)
        q = rep.eval3(B_MINUS.arc)
        boundary = axis_of(rep, torus.topology.boundary_words[0]).transformed(q)
        assert abs(mk.dist_point_to_geodesic(a.point_in, boundary)) == pytest.approx(a.distance, rel=1e-8)


def test_anchor_rejects_same_sense(torus):
    with pytest.raises(AnchorError):
        anchor_point(torus, A_PLUS, A_PLUS.reversed().reversed(), 1)
    with pytest.raises(ValueError):
        anchor_point(torus, B_MINUS, A_PLUS, -1)


@pytest.mark.parametrize("name", ["torus", "sphere"])
def test_truncation_identity(name, torus, sphere, torus_fixtures):
    if name == "torus":
        point, t = torus, torus_fixtures["spiral"]
    else:
        # a circuit through boundaries 0 and 1 of the sphere
        point = sphere
        t = LaminationTuple((
            MeasuredLamination((spiral("B", (0, "+"), (1, "+"), 1, "x"),)),
            MeasuredLamination((spiral("", (1, "-"), (0, "-"), 1, "y"),)),
        ))
    d = decompose(t, point.topology.n_boundary)
    for c in d.circuits:
        leaves = circuit_leaves(t, d, c)
        base = circuit_loop(point, leaves, 1.0, 1)
        for k in (2, 3, 5):
            lk = circuit_length(point, leaves, 1.0, k)
            assert lk - base.value == pytest.approx((k - 1) * base.boundary_sum, abs=1e-8)


def test_compact_length_matches_trigonometry(rng):
    for _ in range(10):
        b, ell, tau = rng.uniform(0.3, 2.5), rng.uniform(0.4, 2.5), rng.uniform(-2, 2)
        p = make_point("one-holed-torus", [b], [ell], [tau])
        lam = MeasuredLamination((closed("A", 2), closed("B", "1/2")))
        want = 2 * ell + 0.5 * torus_dual_length(ell, tau, b)
        assert compact_length(p, lam) == pytest.approx(want, rel=1e-11)
    with pytest.raises(ValueError):
        compact_length(p, MeasuredLamination((A_PLUS,)))


def test_total_is_additive(torus, torus_fixtures):
    spiral_only = total_length(torus, torus_fixtures["spiral"]).total
    compact_only = total_length(torus, torus_fixtures["compact"]).total
    mixed = total_length(torus, torus_fixtures["mixed"])
    assert mixed.total == pytest.approx(spiral_only + compact_only, rel=1e-12)
    assert mixed.compact == pytest.approx(compact_only, rel=1e-12)
    assert len(mixed.circuits) == 1


def test_spiral_length_is_positive_and_scales(torus, torus_fixtures):
    t = torus_fixtures["spiral"]
    one = total_length(torus, t).total
    assert one > 0
    assert total_length(torus, t.scaled(Fraction(5, 2))).total == pytest.approx(2.5 * one, rel=1e-12)


def test_length_function_pins_decomposition(torus, torus_fixtures):
    t = torus_fixtures["mixed"]
    f = length_function(t, template=torus)
    assert f([1.5, 0.3]) == pytest.approx(total_length(torus, t).total, rel=1e-14)
    with pytest.raises(ValueError):
        length_function(t)


def test_json_breakdown(torus, torus_fixtures):
    doc = total_length(torus, torus_fixtures["mixed"]).to_json()
    assert set(doc) == {"total", "compact", "circuits", "B_h", "decomposition_hash"}
    assert doc["B_h"] == [pytest.approx(2.0)]
    assert len(doc["circuits"][0]["anchors"]) == 2
