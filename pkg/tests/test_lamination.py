from fractions import Fraction

import numpy as np
import pytest

from quake_lab import minkowski as mk
from quake_lab.lamination import (
    LaminationTuple,
    MeasuredLamination,
    MixedSenseError,
    as_fraction,
    closed,
    curve_crossings,
    disjointness_certificate,
    fills_surface,
    is_sharp,
    is_simple,
    leaves_cross,
    realize_leaf,
    signed_mass,
    spiral,
    straighten_leaf,
    validate_leaf,
)
from quake_lab.surface import axis_of


def test_weights_are_exact():
    assert as_fraction("3/4") == Fraction(3, 4)
    assert as_fraction(0.1) == Fraction(1, 10)
    assert as_fraction(2) == Fraction(2)
    with pytest.raises(TypeError):
        as_fraction(True)
    with pytest.raises(ValueError, match="non-positive"):
        MeasuredLamination((closed("A", 0),))


def test_spiral_sign_parsing_and_reversal():
    leaf = spiral("AB", (0, "+"), (0, "-"), "1/2", "x")
    assert leaf.start == (0, 1) and leaf.end == (0, -1)
    r = leaf.reversed()
    assert r.start == (0, -1) and r.end == (0, 1) and r.arc == "ba"
    assert r.reversed() == leaf
    with pytest.raises(ValueError):
        spiral("A", (0, "?"), (0, "+"))


def test_signed_mass_and_sharpness():
    plus = MeasuredLamination((spiral("A", (0, "+"), (0, "+"), 2),))
    minus = MeasuredLamination((spiral("B", (0, "-"), (0, "-"), 2),))
    assert signed_mass(plus, 0) == 4
    assert signed_mass(minus, 0) == -4
    assert is_sharp(LaminationTuple((plus, minus)), 1)
    assert not is_sharp(LaminationTuple((plus,)), 1)
    assert is_sharp(LaminationTuple((plus.scaled(Fraction(1, 3)), minus.scaled(Fraction(1, 3)))), 1)
    mixed = MeasuredLamination((spiral("A", (0, "+"), (0, "-")),))
    with pytest.raises(MixedSenseError):
        signed_mass(mixed, 0)


def test_validate_leaf(torus):
    topo = torus.topology
    validate_leaf(closed("AB"), topo)
    with pytest.raises(ValueError, match="peripheral"):
        validate_leaf(closed("ABab"), topo)
    with pytest.raises(ValueError, match="peripheral"):
        validate_leaf(closed("BabA"), topo)
    with pytest.raises(ValueError, match="trivial"):
        validate_leaf(closed("Aa"), topo)
    with pytest.raises(ValueError, match="out of range"):
        validate_leaf(spiral("A", (1, "+"), (0, "+")), topo)
    with pytest.raises(ValueError, match="unknown"):
        validate_leaf(closed("C"), topo)


def test_closed_leaf_realization_is_the_axis(torus):
    rl = realize_leaf(torus, closed("AB"))
    ax = axis_of(torus.holonomy, "AB")
    # the realized lift is a translate of the axis with the same length
    assert rl.period == pytest.approx(2 * np.arccosh(abs(np.trace(torus.holonomy.eval2("AB"))) / 2))
    assert abs(abs(mk.inner(rl.geodesic.normal, rl.geodesic.normal)) - 1) < 1e-12
    assert ax is not None


def test_simplicity(torus):
    for w in ("A", "B", "AB", "Ab", "AAB"):
        assert is_simple(torus, w)
    for w in ("AABB", "AAbb", "ABAb"):
        assert not is_simple(torus, w)


def test_intersection_numbers_on_the_torus(torus):
    # slopes p/q and r/s meet |ps - qr| times
    rl = {w: realize_leaf(torus, closed(w)) for w in ("A", "B", "AB", "Ab")}
    assert len(curve_crossings(torus, "A", [rl["B"]])) == 1
    assert len(curve_crossings(torus, "A", [rl["AB"]])) == 1
    assert len(curve_crossings(torus, "AB", [rl["Ab"]])) == 2
    assert len(curve_crossings(torus, "A", [rl["A"]])) == 0


def test_crossing_points_lie_on_both_lifts(torus):
    rl = realize_leaf(torus, closed("B"))
    ax = axis_of(torus.holonomy, "AB")
    for _, c, s in curve_crossings(torus, "AB", [rl]):
        assert abs(mk.inner(c.point, c.geodesic.normal)) < 1e-10
        assert abs(mk.inner(c.point, ax.normal)) < 1e-10
        assert 0 <= s < 2 * np.arccosh(abs(np.trace(torus.holonomy.eval2("AB"))) / 2)


def test_leaves_cross(torus):
    a = realize_leaf(torus, closed("A"))
    b = realize_leaf(torus, closed("B"))
    sa = realize_leaf(torus, spiral("A", (0, "+"), (0, "+")))
    assert leaves_cross(torus, a, b)
    assert not leaves_cross(torus, a, sa)
    assert not leaves_cross(torus, sa, sa)


def test_fixture_laminations_are_disjoint(torus, torus_fixtures):
    for t in torus_fixtures.values():
        for lam in t.laminations:
            assert disjointness_certificate(torus, lam) == []
    crossing = MeasuredLamination((closed("A"), closed("B")))
    assert disjointness_certificate(torus, crossing) == [(0, 1)]


def test_filling(torus, torus_fixtures):
    for name in ("compact", "spiral", "mixed"):
        assert fills_surface(torus, torus_fixtures[name])
    assert not fills_surface(torus, torus_fixtures["single"])
    assert not fills_surface(torus, LaminationTuple(()))


def test_straighten_leaf(torus):
    qa, qb, length = straighten_leaf(torus, spiral("A", (0, "+"), (0, "+")))
    assert length > 0
    assert mk.point_distance(qa, qb) == pytest.approx(length, rel=1e-10)
