"""Length functional for sharp tuples of laminations.

Compact leaves contribute weight times length.  Each circuit of spiralling
leaves contributes

    L_k = w * ( length(rho_k) + 2 * sum_i log cosh d(p_k[i], D_i) )

where p_k[i] is the k-th anchor: the k-th intersection, counted into the
collar, of the leaf arriving at boundary D_i with the leaf leaving it, and
rho_k is the loop made of leaf arcs between consecutive anchors.  Changing k
only adds (k - 1) * w * (sum of the boundary lengths D_i).

Anchors are computed in a half-plane chart where the boundary lift is the
imaginary axis, the arriving leaf is Re z = 1 (ending at infinity) and the
boundary holonomy is z -> e^b z.  Translates of the leaving leaf then have
endpoints 0 and X0 * e^{bk} with X0 in (1, e^b], and cross Re z = 1 at
1 + i sqrt(X0 e^{bk} - 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import minkowski as mk
from .circuital import Circuit, Decomposition, decompose, oriented_leaf
from .lamination import LaminationTuple, MeasuredLamination, SpiralLeaf, boundary_fixed_point
from .surface import TeichmullerPoint, curve_length


class AnchorError(ValueError):
    """The two leaves do not spiral into a common boundary in opposite senses."""


# --------------------------------------------------------------------------
# closed forms in the normalized chart


def anchor_height(b: float, phi: float, k: int) -> float:
    """Imaginary part of the k-th anchor on the line Re z = 1."""
    return float(np.sqrt(np.exp(b * k) / np.cos(phi) ** 2 - 1.0))


def anchor_tanh_distance(b: float, phi: float, k: int) -> float:
    """tanh of the distance from the k-th anchor to the boundary lift."""
    return float(np.exp(-b * k / 2.0) * np.cos(phi))


def _log_cosh_atanh(t: float) -> float:
    # log cosh(artanh t) = -log(1 - t^2) / 2
    return float(-0.5 * np.log1p(-t * t))


# --------------------------------------------------------------------------
# anchors on the surface


def reference_lift(point: TeichmullerPoint, leaf: SpiralLeaf) -> mk.OrientedGeodesic:
    """Lift from a fixed point of h(c_start) to h(arc) of a fixed point of h(c_end)."""
    (i, si), (j, sj) = leaf.start, leaf.end
    start = boundary_fixed_point(point, i, si)
    end = point.holonomy.eval3(leaf.arc) @ boundary_fixed_point(point, j, sj)
    return mk.geodesic_from_endpoints(start, end)


@dataclass(frozen=True)
class SpiralAnchor:
    boundary: int
    incoming: SpiralLeaf
    outgoing: SpiralLeaf
    b: float
    phi: float  # argument of the zeroth intersection in the chart
    k: int
    translate: int  # k0: index of the first translate of the leaving leaf that meets the arriving one
    chart_point: complex  # 1 + i * height
    point_in: np.ndarray  # anchor on the reference lift of the arriving leaf
    point_out: np.ndarray  # same surface point on the reference lift of the leaving leaf
    p0_in: np.ndarray  # zeroth intersection, for diagnostics
    distance: float
    position_in: float = 0.0  # arclength along the arriving lift from its hub foot
    position_out: float = 0.0  # arclength along the leaving lift from its hub foot

    @property
    def tanh_distance(self) -> float:
        return float(np.tanh(self.distance))


def anchor_point(point: TeichmullerPoint, incoming: SpiralLeaf, outgoing: SpiralLeaf, k: int = 1) -> SpiralAnchor:
    """k-th anchor where ``incoming`` (oriented into the boundary) meets ``outgoing``."""
    if k < 0 or int(k) != k:
        raise ValueError("anchor index must be a non-negative integer")
    (bd, s_in), (bd_out, s_out) = incoming.end, outgoing.start
    if bd != bd_out:
        raise AnchorError(f"leaves are not incident to a common boundary ({bd} vs {bd_out})")
    if s_in == s_out:
        raise AnchorError(f"leaves spiral into boundary {bd} in the same sense")
    rep = point.holonomy
    b = point.boundary_lengths[bd]
    q = rep.eval3(incoming.arc)
    q_inv = mk.isometry_inverse(q)
    lift_in = reference_lift(point, incoming)
    lift_out = reference_lift(point, outgoing)
    a_plus = lift_in.end
    a_minus = q @ boundary_fixed_point(point, bd, -s_in)
    chart = mk.normalizing_map(a_minus, a_plus, lift_in.start)
    chart_inv = mk.isometry_inverse(chart)
    x = mk.null_to_ideal(chart @ (q @ lift_out.end))
    if not x > 0:
        raise mk.GeometryError("leaving leaf lies on the wrong side of the boundary lift")
    k0 = int(np.floor(-np.log(x) / b)) + 1
    x0 = x * np.exp(b * k0)
    # guard the half-open interval (1, e^b] against rounding at its ends
    if x0 <= 1.0:
        k0 += 1
        x0 *= np.exp(b)
    elif x0 > np.exp(b) * (1 + 1e-15):
        k0 -= 1
        x0 /= np.exp(b)
    phi = float(np.arccos(1.0 / np.sqrt(x0)))
    height = float(np.sqrt(x0 * np.exp(b * k) - 1.0))
    z = complex(1.0, height)
    p_in = chart_inv @ mk.halfplane_to_hyperboloid(z)
    p_out = q_inv @ (chart_inv @ mk.halfplane_to_hyperboloid(z / np.exp(b * (k0 + k))))
    p0 = chart_inv @ mk.halfplane_to_hyperboloid(complex(1.0, np.sqrt(max(x0 - 1.0, 0.0))))
    tanh_d = 1.0 / abs(z)
    # Arclength positions measured from the hub foot of each reference lift.
    # On Re z = 1 arclength is log Im z; on the translate with endpoints 0 and
    # X = x0 e^{bk} the map z -> z / (X - z) straightens it and sends the
    # anchor to i / height, so its arclength is -log(height).  Only the
    # k-independent reference points go through the chart, which keeps far
    # anchors accurate.
    ref_in = chart_inv @ mk.halfplane_to_hyperboloid(1j + 1.0)
    ref_out = q_inv @ (chart_inv @ mk.halfplane_to_hyperboloid(complex(x / 2.0, x / 2.0)))
    pos_in = lift_in.signed_position(lift_in.foot(mk.E0), mk.normalize_point(ref_in)) + np.log(height)
    pos_out = lift_out.signed_position(lift_out.foot(mk.E0), mk.normalize_point(ref_out)) - np.log(height)
    return SpiralAnchor(
        boundary=bd,
        incoming=incoming,
        outgoing=outgoing,
        b=float(b),
        phi=phi,
        k=int(k),
        translate=k0,
        chart_point=z,
        point_in=mk.normalize_point(p_in),
        point_out=mk.normalize_point(p_out),
        p0_in=mk.normalize_point(p0),
        distance=float(np.arctanh(tanh_d)),
        position_in=float(pos_in),
        position_out=float(pos_out),
    )


# --------------------------------------------------------------------------
# circuits


@dataclass(frozen=True)
class CircuitLoop:
    leaves: tuple  # oriented spiralling leaves mu_1 ... mu_I
    weight: float
    k: int
    anchors: tuple  # anchors[i] sits at the start boundary of leaves[i]
    arcs: tuple  # arcs[i]: length of leaves[i] between its two anchors
    boundary_sum: float  # B_h

    @property
    def rho_length(self) -> float:
        return float(sum(self.arcs))

    @property
    def correction(self) -> float:
        return float(sum(2.0 * _log_cosh_atanh(a.tanh_distance) for a in self.anchors))

    @property
    def value(self) -> float:
        return self.weight * (self.rho_length + self.correction)


def circuit_leaves(t: LaminationTuple, decomp: Decomposition, circuit: Circuit) -> tuple:
    return tuple(oriented_leaf(decomp.graph, t, step) for step in circuit.steps)


def circuit_loop(point: TeichmullerPoint, leaves, weight=1.0, k: int = 1) -> CircuitLoop:
    """Anchors and arcs of rho_k for the circuit mu_1, ..., mu_I."""
    leaves = tuple(leaves)
    if not leaves:
        raise ValueError("a circuit needs at least one leaf")
    if k < 1:
        raise ValueError("truncation level k must be at least 1")
    n = len(leaves)
    anchors = tuple(anchor_point(point, leaves[i - 1], leaves[i], k) for i in range(n))
    arcs = []
    for i, leaf in enumerate(leaves):
        s0 = anchors[i].position_out
        s1 = anchors[(i + 1) % n].position_in
        if not s1 > s0:
            raise mk.GeometryError(f"anchors on leaf {leaf.leaf_id or leaf.arc!r} are out of order")
        arcs.append(float(s1 - s0))
    bsum = float(sum(point.boundary_lengths[a.boundary] for a in anchors))
    return CircuitLoop(leaves, float(weight), int(k), anchors, tuple(arcs), bsum)


def circuit_length(point: TeichmullerPoint, leaves, weight=1.0, k: int = 1) -> float:
    """L_k of a weighted circuit (k = 1 gives L)."""
    return circuit_loop(point, leaves, weight, k).value


def compact_length(point: TeichmullerPoint, lam: MeasuredLamination) -> float:
    rep = point.holonomy
    total = 0.0
    for leaf in lam.leaves:
        if leaf.kind != "closed":
            raise ValueError("compact_length received a spiralling leaf")
        total += float(leaf.weight) * curve_length(rep, leaf.word)
    return total


@dataclass(frozen=True)
class LengthBreakdown:
    total: float
    compact: float
    circuits: tuple  # CircuitLoop per circuit, in decomposition order
    decomposition_hash: str

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "compact": self.compact,
            "circuits": [
                {
                    "omega": c.weight,
                    "rho_length": c.rho_length,
                    "correction": c.correction,
                    "value": c.value,
                    "B_h": c.boundary_sum,
                    "anchors": [
                        {"boundary": a.boundary, "d": a.distance, "phi": a.phi} for a in c.anchors
                    ],
                }
                for c in self.circuits
            ],
            "B_h": [c.boundary_sum for c in self.circuits],
            "decomposition_hash": self.decomposition_hash,
        }


def total_length(point: TeichmullerPoint, t: LaminationTuple, decomp: Decomposition | None = None) -> LengthBreakdown:
    """The length functional of a sharp tuple on its pinned decomposition."""
    if decomp is None:
        decomp = decompose(t, point.topology.n_boundary)
    compact = sum(compact_length(point, lam) for lam in decomp.compact.laminations)
    loops = []
    for c in decomp.circuits:
        loops.append(circuit_loop(point, circuit_leaves(t, decomp, c), float(c.weight), 1))
    total = float(compact + sum(lp.value for lp in loops))
    return LengthBreakdown(total, float(compact), tuple(loops), decomp.digest())


def length_function(t: LaminationTuple, decomp: Decomposition | None = None, template: TeichmullerPoint | None = None):
    """Callable h -> total length on FN coordinates, with the decomposition pinned."""
    if template is None:
        raise ValueError("a template point fixes topology and boundary lengths")
    if decomp is None:
        decomp = decompose(t, template.topology.n_boundary)

    def f(coords) -> float:
        return total_length(template.with_coordinates(coords), t, decomp).total

    return f
