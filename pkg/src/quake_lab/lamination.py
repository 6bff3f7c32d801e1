"""Finite measured laminations: weighted closed leaves and spiralling leaves.

A spiralling leaf is recorded by the boundary components it starts and ends
at, the sense in which each end winds (+1 toward the attracting fixed point of
the boundary holonomy, -1 toward the repelling one) and an arc word g.  Its
reference lift runs from a fixed point of h(c_start) to the image under h(g)
of a fixed point of h(c_end), where c_i are the boundary words of the
topology.  Weights are kept as exact fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from . import minkowski as mk
from .cover import reduce_to_hub, Crossing, Piece, RayFamily, crossings_with_piece, crossings_with_rays
from .surface import TeichmullerPoint, axis_of, collar_width, curve_length
from .words import check_word, cyclic_reduce, invert, reduce


def as_fraction(x) -> Fraction:
    """Exact rational from an int, decimal string, float or Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("weight must be a number")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        # the shortest decimal representation is what a user typed
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read weight {x!r}")


def _sign(s) -> int:
    if s in (1, "+", "+1", "positive"):
        return 1
    if s in (-1, "-", "-1", "negative"):
        return -1
    raise ValueError(f"spiral sign must be + or -, got {s!r}")


@dataclass(frozen=True)
class ClosedLeaf:
    word: str
    weight: Fraction
    leaf_id: str = ""

    kind = "closed"

    def scaled(self, c) -> "ClosedLeaf":
        return ClosedLeaf(self.word, self.weight * as_fraction(c), self.leaf_id)


@dataclass(frozen=True)
class SpiralLeaf:
    arc: str
    start: tuple  # (boundary index, sign)
    end: tuple
    weight: Fraction
    leaf_id: str = ""

    kind = "spiral"

    def scaled(self, c) -> "SpiralLeaf":
        return SpiralLeaf(self.arc, self.start, self.end, self.weight * as_fraction(c), self.leaf_id)

    def reversed(self) -> "SpiralLeaf":
        """Same leaf traversed backwards (the arc word is inverted)."""
        return SpiralLeaf(invert(self.arc), self.end, self.start, self.weight, self.leaf_id)


Leaf = Union[ClosedLeaf, SpiralLeaf]


def closed(word: str, weight=1, leaf_id: str = "") -> ClosedLeaf:
    return ClosedLeaf(word, as_fraction(weight), leaf_id)


def spiral(arc: str, start, end, weight=1, leaf_id: str = "") -> SpiralLeaf:
    s = (int(start[0]), _sign(start[1]))
    e = (int(end[0]), _sign(end[1]))
    return SpiralLeaf(arc, s, e, as_fraction(weight), leaf_id)


@dataclass(frozen=True)
class MeasuredLamination:
    leaves: tuple = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "leaves", tuple(self.leaves))
        for leaf in self.leaves:
            if leaf.weight <= 0:
                raise ValueError(f"leaf {leaf.leaf_id or '?'} has non-positive weight")

    @property
    def is_compact(self) -> bool:
        return all(leaf.kind == "closed" for leaf in self.leaves)

    def compact_part(self) -> "MeasuredLamination":
        return MeasuredLamination(tuple(x for x in self.leaves if x.kind == "closed"), self.name)

    def spiral_part(self) -> "MeasuredLamination":
        return MeasuredLamination(tuple(x for x in self.leaves if x.kind == "spiral"), self.name)

    def scaled(self, c) -> "MeasuredLamination":
        return MeasuredLamination(tuple(x.scaled(c) for x in self.leaves), self.name)

    def oplus(self, other: "MeasuredLamination") -> "MeasuredLamination":
        """Sum of laminations with disjoint supports (leaf lists are joined)."""
        return MeasuredLamination(self.leaves + other.leaves, self.name or other.name)


@dataclass(frozen=True)
class LaminationTuple:
    laminations: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "laminations", tuple(self.laminations))

    def __len__(self):
        return len(self.laminations)

    def __iter__(self):
        return iter(self.laminations)

    def scaled(self, c) -> "LaminationTuple":
        return LaminationTuple(tuple(lam.scaled(c) for lam in self.laminations))

    @property
    def is_empty(self) -> bool:
        return all(len(lam.leaves) == 0 for lam in self.laminations)

    def all_leaves(self):
        """(lamination index, leaf index, leaf) triples in input order."""
        for n, lam in enumerate(self.laminations):
            for k, leaf in enumerate(lam.leaves):
                yield n, k, leaf


class MixedSenseError(ValueError):
    """One lamination spirals in both senses into the same boundary."""


def validate_leaf(leaf: Leaf, topology) -> None:
    if leaf.kind == "closed":
        check_word(leaf.word, topology.letters)
        w = cyclic_reduce(leaf.word)
        if not w:
            raise ValueError(f"closed leaf {leaf.leaf_id or leaf.word!r} is trivial")
        for bw in topology.boundary_words:
            # peripheral words are conjugates of powers of boundary words
            for power in (bw, invert(bw)):
                if _is_conjugate_power(w, cyclic_reduce(power)):
                    raise ValueError(f"closed leaf {leaf.word!r} is peripheral")
    else:
        check_word(leaf.arc, topology.letters)
        for i, _ in (leaf.start, leaf.end):
            if not 0 <= i < topology.n_boundary:
                raise ValueError(f"boundary index {i} out of range")


def _is_conjugate_power(w: str, b: str) -> bool:
    if not b or len(w) % len(b):
        return False
    target = b * (len(w) // len(b))
    return len(w) == len(target) and w in (target + target)


def signed_mass(lam: MeasuredLamination, i: int) -> Fraction:
    """Signed transverse measure of a loop parallel to boundary i."""
    total = Fraction(0)
    senses = set()
    for leaf in lam.leaves:
        if leaf.kind != "spiral":
            continue
        for b, s in (leaf.start, leaf.end):
            if b == i:
                senses.add(s)
                total += s * leaf.weight
    if len(senses) > 1:
        raise MixedSenseError(f"lamination {lam.name or '?'} spirals in both senses into boundary {i}")
    return total


def unsigned_mass(lam: MeasuredLamination, i: int) -> Fraction:
    return abs(signed_mass(lam, i))


def is_sharp(t: LaminationTuple, n_boundary: int) -> bool:
    for i in range(n_boundary):
        if sum((signed_mass(lam, i) for lam in t.laminations), Fraction(0)) != 0:
            return False
    return True


# --------------------------------------------------------------------------
# realization


@dataclass(frozen=True)
class RealizedLeaf:
    leaf: Leaf
    lamination_index: int
    leaf_index: int
    geodesic: mk.OrientedGeodesic
    pieces: tuple
    rays: tuple = ()
    period: float = 0.0  # closed leaves: length
    core_length: float = 0.0  # spiral leaves: length outside the collars

    @property
    def weight(self) -> float:
        return float(self.leaf.weight)


def boundary_fixed_point(point: TeichmullerPoint, i: int, sign: int):
    rep = point.holonomy
    ax = axis_of(rep, point.topology.boundary_words[i])
    return ax.end if sign > 0 else ax.start


def realize_leaf(point: TeichmullerPoint, leaf: Leaf, lamination_index: int = 0, leaf_index: int = 0) -> RealizedLeaf:
    rep = point.holonomy
    topo = point.topology
    if leaf.kind == "closed":
        ax = axis_of(rep, leaf.word)
        ell = curve_length(rep, leaf.word)
        # use the lift that passes closest to the hub point
        _, g0, _ = reduce_to_hub(rep, ax.foot(mk.E0))
        ax = ax.transformed(g0)
        o = ax.foot(mk.E0)
        u = ax.direction_at(o)
        piece = Piece(ax, mk.geodesic_point(o, u, -ell / 2.0), mk.geodesic_point(o, u, ell / 2.0), full_line=True)
        return RealizedLeaf(leaf, lamination_index, leaf_index, ax, (piece,), (), ell, 0.0)

    (i, si), (j, sj) = leaf.start, leaf.end
    start = boundary_fixed_point(point, i, si)
    g = rep.eval3(leaf.arc)
    end = g @ boundary_fixed_point(point, j, sj)
    geo = mk.geodesic_from_endpoints(start, end)
    n_start = axis_of(rep, topo.boundary_words[i]).normal
    n_end = g @ axis_of(rep, topo.boundary_words[j]).normal
    o = geo.foot(mk.E0)
    u = geo.direction_at(o)
    eps_s = collar_width(point.boundary_lengths[i])
    eps_e = collar_width(point.boundary_lengths[j])
    a_s = float(mk.inner(o + u, n_start)) / 2.0
    a_e = float(mk.inner(o - u, n_end)) / 2.0
    if abs(a_s) < 1e-300 or abs(a_e) < 1e-300:
        raise mk.GeometryError("spiral leaf lies on a boundary axis")
    t_s = float(np.log(np.sinh(eps_s) / abs(a_s)))
    t_e = float(np.log(abs(a_e) / np.sinh(eps_e)))
    if not t_s < t_e:
        raise mk.GeometryError(
            f"spiral leaf {leaf.leaf_id or leaf.arc!r} has overlapping end collars; the arc class is not realizable"
        )
    p = mk.geodesic_point(o, u, t_s)
    q = mk.geodesic_point(o, u, t_e)
    core = Piece(geo, p, q)
    end_word = reduce(leaf.arc + topo.boundary_words[j] + invert(leaf.arc))
    rays = (
        RayFamily(topo.boundary_words[i], geo, at_end=False, width=eps_s),
        RayFamily(end_word, geo, at_end=True, width=eps_e),
    )
    return RealizedLeaf(leaf, lamination_index, leaf_index, geo, (core,), rays, 0.0, t_e - t_s)


def realize_tuple(point: TeichmullerPoint, t: LaminationTuple) -> list[RealizedLeaf]:
    return [realize_leaf(point, leaf, n, k) for n, k, leaf in t.all_leaves()]


def segment_crossings(point: TeichmullerPoint, realized, p, q, **kw) -> list[tuple[RealizedLeaf, Crossing]]:
    """All leaf lifts crossed by the segment [p, q], one entry per lift."""
    rep = point.holonomy
    out = []
    for rl in realized:
        found = []
        for piece in rl.pieces:
            found.extend(crossings_with_piece(rep, piece, p, q, **kw))
        for fam in rl.rays:
            found.extend(crossings_with_rays(rep, fam, p, q, **kw))
        kept: list[Crossing] = []
        for c in found:
            if any(np.abs(c.geodesic.normal - k.geodesic.normal).max() < 1e-8 for k in kept):
                continue
            kept.append(c)
        out.extend((rl, c) for c in kept)
    return out


def curve_crossings(point: TeichmullerPoint, word: str, realized, offset: float = 0.1234567, **kw):
    """Transverse intersections of the closed geodesic of ``word`` with leaves.

    Returns (realized leaf, crossing, position along one period in [0, length)).
    Each intersection point of the surface appears exactly once.
    """
    rep = point.holonomy
    ax = axis_of(rep, word)
    ell = curve_length(rep, word)
    o0 = ax.foot(mk.E0)
    u0 = ax.direction_at(o0)
    o = mk.geodesic_point(o0, u0, offset)
    u = ax.direction_at(o)
    pad = 1e-6
    # centred on the hub so no crossing lies more than half a period away;
    # lifts far from the hub lose accuracy roughly like exp(2 * distance)
    p = mk.geodesic_point(o, u, -ell / 2.0 - pad)
    q = mk.geodesic_point(o, u, ell / 2.0 + pad)
    out = []
    for rl, c in segment_crossings(point, realized, p, q, **kw):
        if abs(abs(float(mk.inner(c.geodesic.normal, ax.normal))) - 1.0) < 1e-12:
            continue  # the axis itself
        s = ax.signed_position(o, c.point) + ell / 2.0
        if s < 0.0 or s >= ell:
            continue
        out.append((rl, c, s))
    out.sort(key=lambda item: item[2])
    return out


def is_simple(point: TeichmullerPoint, word: str) -> bool:
    """True when the closed geodesic of the word has no transverse self-intersection."""
    rl = realize_leaf(point, ClosedLeaf(word, Fraction(1)))
    return not curve_crossings(point, word, [rl])


def leaves_cross(point: TeichmullerPoint, a: RealizedLeaf, b: RealizedLeaf) -> bool:
    """Transverse intersection test between two realized leaves (or a leaf and itself)."""
    rep = point.holonomy
    same = a is b
    for src, dst in ((a, b), (b, a)):
        for piece in src.pieces:
            p, q = piece.p, piece.q
            if src.leaf.kind == "closed":
                # slightly shorter than a period so the segment ends do not double count
                u = piece.geodesic.direction_at(p)
                q = mk.geodesic_point(p, u, src.period * (1 - 1e-9))
            targets = []
            for tp in dst.pieces:
                targets.extend(crossings_with_piece(rep, tp, p, q))
            for fam in dst.rays:
                targets.extend(crossings_with_rays(rep, fam, p, q))
            for c in targets:
                if same and abs(abs(float(mk.inner(c.geodesic.normal, src.geodesic.normal))) - 1.0) < 1e-9:
                    continue
                if abs(abs(float(mk.inner(c.geodesic.normal, piece.geodesic.normal))) - 1.0) < 1e-9:
                    continue
                return True
        if same:
            break
    return False


def disjointness_certificate(point: TeichmullerPoint, lam: MeasuredLamination) -> list[tuple[int, int]]:
    """Pairs of leaf indices that cross; an empty list certifies disjointness."""
    realized = [realize_leaf(point, leaf, 0, k) for k, leaf in enumerate(lam.leaves)]
    bad = []
    for x in range(len(realized)):
        for y in range(x, len(realized)):
            if leaves_cross(point, realized[x], realized[y]):
                bad.append((x, y))
    return bad


def straighten_leaf(point: TeichmullerPoint, leaf: SpiralLeaf):
    """Common perpendicular between the two boundary lifts a spiral leaf joins.

    Returns (foot on the start boundary lift, foot on the end boundary lift,
    length).
    """
    rep = point.holonomy
    topo = point.topology
    (i, _), (j, _) = leaf.start, leaf.end
    a = axis_of(rep, topo.boundary_words[i])
    b = axis_of(rep, topo.boundary_words[j]).transformed(rep.eval3(leaf.arc))
    c = abs(float(mk.inner(a.normal, b.normal)))
    if c <= 1.0:
        raise mk.GeometryError("boundary lifts are not disjoint")
    qa, qb = mk.common_perpendicular(a, b)
    return qa, qb, float(np.arccosh(c))


def fills_surface(point: TeichmullerPoint, t: LaminationTuple, witnesses=None) -> bool:
    witnesses = tuple(witnesses if witnesses is not None else point.topology.witnesses)
    if not witnesses:
        raise ValueError("witness set is empty")
    realized = realize_tuple(point, t)
    if not realized:
        return False
    for w in witnesses:
        if not curve_crossings(point, w, realized):
            return False
    return True
