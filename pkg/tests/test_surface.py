import math

import numpy as np
import pytest

from quake_lab import minkowski as mk
from quake_lab.lamination import closed
from quake_lab.surface import (
    NotHyperbolicError,
    TopologyError,
    axis_of,
    collar_comparison,
    collar_width,
    curve_length,
    fn_readback,
    geodesic_axis_distance,
    make_point,
    symplectic_pair,
    topology_for,
    twist_flow,
)
from quake_lab.variation import curve_cosine_sum, fd_derivative, kerckhoff_sum
from oracles import torus_dual_length


def random_torus(rng):
    return make_point("one-holed-torus", [rng.uniform(0.3, 3)], [rng.uniform(0.4, 3)], [rng.uniform(-2, 2)])


def random_sphere(rng):
    return make_point("four-holed-sphere", rng.uniform(0.4, 2.0, size=4), [rng.uniform(0.8, 3)], [rng.uniform(-2, 2)])


def test_topologies():
    assert topology_for(1, 1).name == "one-holed-torus"
    assert topology_for(0, 4).name == "four-holed-sphere"
    assert topology_for(1, 1).euler_characteristic == -1
    assert topology_for(0, 4).n_curves == 1
    with pytest.raises(TopologyError, match="not hyperbolic"):
        topology_for(0, 2)
    with pytest.raises(TopologyError, match="not supported"):
        topology_for(2, 1)


def test_point_validation():
    with pytest.raises(ValueError):
        make_point("one-holed-torus", [1.0], [-1.0], [0.0])
    with pytest.raises(ValueError):
        make_point("one-holed-torus", [1.0, 2.0], [1.0], [0.0])
    with pytest.raises(ValueError):
        make_point("one-holed-torus", [1.0], [1.0], [float("nan")])


def test_trace_readback(rng):
    for _ in range(20):
        for p in (random_torus(rng), random_sphere(rng)):
            back = fn_readback(p)
            assert np.allclose(back["lengths"], p.lengths, atol=1e-10)
            assert np.allclose(back["boundary_lengths"], p.boundary_lengths, atol=1e-9)
            assert p.relator_residual() < 1e-10


def test_torus_dual_curve_matches_trigonometry(rng):
    for _ in range(20):
        p = random_torus(rng)
        want = torus_dual_length(p.lengths[0], p.twists[0], p.boundary_lengths[0])
        assert curve_length(p.holonomy, "B") == pytest.approx(want, rel=1e-12)


def test_generators_are_isometries(rng):
    p = random_sphere(rng)
    for ch in "ABCabc":
        assert mk.is_isometry(p.holonomy.gen3(ch))


def test_trivial_word_not_hyperbolic(torus):
    with pytest.raises(NotHyperbolicError):
        curve_length(torus.holonomy, "")


def test_twist_flow_and_symplectic_pairing(torus):
    q = twist_flow(torus, 0, 0.5, weight=2.0)
    assert q.twists[0] == pytest.approx(torus.twists[0] + 1.0)
    assert q.lengths == torus.lengths
    with pytest.raises(IndexError):
        twist_flow(torus, 1, 0.1)
    dl, dt = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    assert symplectic_pair(dl, dt) == 2.0
    assert symplectic_pair(dt, dl) == -2.0
    assert symplectic_pair(dl, dl) == 0.0


@pytest.mark.parametrize(
    "topology, word",
    [("one-holed-torus", "B"), ("one-holed-torus", "AB"), ("four-holed-sphere", "BC")],
)
def test_twist_sign_convention(rng, topology, word):
    # the left twist about the pants curve changes a crossing curve's length
    # at the rate sum cos(angle from the pants curve to the crossing curve)
    for _ in range(3):
        p = random_torus(rng) if topology == "one-holed-torus" else random_sphere(rng)
        kappa = p.topology.pants_curves[0]
        fd = fd_derivative(lambda s: curve_length(twist_flow(p, 0, s).holonomy, word), 0.0)
        cosines = curve_cosine_sum(p, _lam(kappa), word)
        assert fd.value == pytest.approx(cosines, abs=1e-7)
        # the same number read from the other side: the twist derivative of
        # the closed leaf's length, angles from the leaf to the pants curve
        assert kerckhoff_sum(p, _lam(word), kappa) == pytest.approx(cosines, abs=1e-9)


def _lam(word):
    from quake_lab.lamination import MeasuredLamination

    return MeasuredLamination((closed(word),))


# ---------------------------------------------------------------------------
# collars


def test_collar_width_formula():
    for b in (0.1, 1.0, 3.0):
        w = collar_width(b)
        assert math.cosh(w) == pytest.approx(1 / math.tanh(b / 2), rel=1e-12)
        assert math.sinh(w) * math.sinh(b / 2) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(ValueError):
        collar_width(0.0)


def test_collar_is_sharp_in_the_chart():
    b = 1.3
    w = collar_width(b)
    # a lift with endpoints 1 and e^b is exactly tangent to the collar edge
    assert geodesic_axis_distance(1.0, math.exp(b)) == pytest.approx(w, rel=1e-12)
    assert geodesic_axis_distance(1.0, math.exp(b) * 0.99) > w


def test_collar_comparison_fields():
    c = collar_comparison(1.0)
    assert c["lemma_as_cosh"] == pytest.approx(c["derived"], rel=1e-12)
    assert c["lemma_value"] > c["derived"]
    assert c["remark_value"] == pytest.approx(c["derived"], rel=1e-12)


def test_simple_closed_lifts_avoid_the_collar(torus):
    rep = torus.holonomy
    boundary = axis_of(rep, "ABab")
    w = collar_width(torus.boundary_lengths[0])
    for word in ("A", "B", "AB", "Ab"):
        ax = axis_of(rep, word)
        for g in ("", "A", "B", "a", "b", "AB", "ba", "AAB"):
            lift = ax.transformed(rep.eval3(g))
            assert mk.geodesic_distance(boundary, lift) >= w - 1e-9
