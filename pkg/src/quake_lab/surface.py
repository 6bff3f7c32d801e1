"""Surfaces, Fenchel-Nielsen coordinates and holonomy representations.

Two topologies are supported, both with a two dimensional Teichmüller slice
once the boundary lengths are frozen:

``one-holed-torus``
    free group on A, B; boundary word ``ABab``; decomposition curve ``A``.
``four-holed-sphere``
    free group on A, B, C; boundary words ``A``, ``B``, ``C``, ``cba``;
    decomposition curve ``AB``.

Holonomies are built by gluing right-angled hexagon data in SL(2, R) and then
converted to SO_0(2, 1).  Lengths are in hyperbolic units; twists are signed
distances along the decomposition curve.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import minkowski as mk

# Sign relating the twist coordinate to the direction of the left earthquake,
# per topology (the two gluings run the shift in opposite senses).  Fixed by
# comparing a finite-difference twist derivative of a transverse curve length
# with the cosine sum over intersection angles (see tests/test_surface.py).
TWIST_SIGNS = {"one-holed-torus": 1, "four-holed-sphere": -1}


class TopologyError(ValueError):
    pass


class NotHyperbolicError(ValueError):
    """A word maps to an elliptic or parabolic isometry."""


@dataclass(frozen=True)
class SurfaceTopology:
    name: str
    genus: int
    n_boundary: int
    letters: str
    boundary_words: tuple[str, ...]
    pants_curves: tuple[str, ...]
    witnesses: tuple[str, ...]

    @property
    def euler_characteristic(self) -> int:
        return 2 - 2 * self.genus - self.n_boundary

    @property
    def n_curves(self) -> int:
        return 3 * self.genus - 3 + self.n_boundary


TOPOLOGIES = {
    "one-holed-torus": SurfaceTopology(
        name="one-holed-torus",
        genus=1,
        n_boundary=1,
        letters="AB",
        boundary_words=("ABab",),
        pants_curves=("A",),
        witnesses=("A", "B", "AB"),
    ),
    "four-holed-sphere": SurfaceTopology(
        name="four-holed-sphere",
        genus=0,
        n_boundary=4,
        letters="ABC",
        boundary_words=("A", "B", "C", "cba"),
        pants_curves=("AB",),
        witnesses=("AB", "BC", "ABCb"),
    ),
}


def topology_for(genus: int, n_boundary: int) -> SurfaceTopology:
    for topo in TOPOLOGIES.values():
        if topo.genus == genus and topo.n_boundary == n_boundary:
            return topo
    chi = 2 - 2 * genus - n_boundary
    if chi >= 0 or n_boundary < 1:
        raise TopologyError(f"genus {genus} with {n_boundary} boundary components is not hyperbolic with boundary")
    raise TopologyError(f"genus {genus} with {n_boundary} boundary components is not supported")


# --------------------------------------------------------------------------
# SL(2,R) building blocks


def _dilation(t: float) -> np.ndarray:
    return np.diag([np.exp(t / 2.0), np.exp(-t / 2.0)])


def _pants_pair(x_len: float, y_len: float, axis_len: float):
    """X, Y in SL(2,R) with traces 2cosh(x/2), 2cosh(y/2) and XY = -diag(e^{l/2}, e^{-l/2}).

    The product's axis is the imaginary axis; the axes of X and Y lie in the
    half Re z > 0, so the pants they generate sit on that side.
    """
    tx = 2.0 * np.cosh(x_len / 2.0)
    ty = 2.0 * np.cosh(y_len / 2.0)
    e = np.exp(axis_len / 2.0)
    # X^{-1} (-K) has trace -(d e + a/e) = ty with a + d = tx
    d = -(ty + tx / e) / (e - 1.0 / e)
    a = tx - d
    off = np.sqrt(1.0 - a * d)
    x = np.array([[a, -off], [off, d]])
    y = np.linalg.inv(x) @ (-np.diag([e, 1.0 / e]))
    return x, y


def _torus_generators(ell: float, tau: float, b: float, sign: int):
    s = np.cosh(b / 4.0) / np.sinh(ell / 2.0)
    half = np.arcsinh(s)
    perp = np.array([[np.cosh(half), np.sinh(half)], [np.sinh(half), np.cosh(half)]])
    a = _dilation(ell)
    bmat = _dilation(sign * tau) @ perp
    return {"A": a, "B": bmat}, {}


def _sphere_generators(ell: float, tau: float, bs, sign: int):
    x1, y1 = _pants_pair(bs[0], bs[1], ell)
    x2, y2 = _pants_pair(bs[2], bs[3], ell)
    rot = np.array([[0.0, -1.0], [1.0, 0.0]])
    shift = _dilation(sign * tau)
    conj = shift @ rot
    conj_inv = np.linalg.inv(conj)
    c = conj @ x2 @ conj_inv
    d = conj @ y2 @ conj_inv
    return {"A": x1, "B": y1, "C": c}, {"D": d}


# --------------------------------------------------------------------------


class HolonomyRep:
    """Holonomy of a marked hyperbolic surface, evaluated on words."""

    def __init__(self, letters: str, gens2: dict, extra2: dict | None = None):
        self.letters = letters
        self._g2 = {}
        for k in letters:
            m = np.asarray(gens2[k], dtype=float)
            self._g2[k] = m
            self._g2[k.lower()] = np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])
        self._g3 = {k: mk.sl2_to_so21(v) for k, v in self._g2.items()}
        self.extra2 = {k: np.asarray(v, dtype=float) for k, v in (extra2 or {}).items()}
        self._cache2: dict[str, np.ndarray] = {}
        self._cache3: dict[str, np.ndarray] = {}

    def gen2(self, letter: str) -> np.ndarray:
        return self._g2[letter]

    def gen3(self, letter: str) -> np.ndarray:
        return self._g3[letter]

    def eval2(self, word: str) -> np.ndarray:
        if word in self._cache2:
            return self._cache2[word]
        m = np.eye(2)
        for ch in word:
            m = m @ self._g2[ch]
        if len(self._cache2) < 4096:
            self._cache2[word] = m
        return m

    def eval3(self, word: str) -> np.ndarray:
        if word in self._cache3:
            return self._cache3[word]
        m = np.eye(3)
        for ch in word:
            m = m @ self._g3[ch]
        if len(self._cache3) < 4096:
            self._cache3[word] = m
        return m

    def conjugated(self, g2) -> "HolonomyRep":
        g2 = np.asarray(g2, dtype=float)
        gi = np.linalg.inv(g2)
        gens = {k: g2 @ self._g2[k] @ gi for k in self.letters}
        extra = {k: g2 @ v @ gi for k, v in self.extra2.items()}
        return HolonomyRep(self.letters, gens, extra)

    def max_displacement(self, base=mk.E0) -> float:
        return max(mk.point_distance(base, self._g3[k] @ base) for k in self.letters)


def curve_length(rep: HolonomyRep, word: str) -> float:
    """Length of the closed geodesic in the free homotopy class of the word."""
    tr = abs(float(np.trace(rep.eval2(word))))
    if tr <= 2.0 + 1e-14:
        kind = "parabolic" if abs(tr - 2.0) <= 1e-9 else "elliptic"
        raise NotHyperbolicError(f"word {word!r} has {kind} holonomy (|tr| = {tr:.12g})")
    return 2.0 * float(np.arccosh(tr / 2.0))


def _null_from_eigvec(v) -> np.ndarray:
    # boundary point v0/v1 as the null vector of the rank one matrix v v^T
    x = np.array([(v[0] ** 2 + v[1] ** 2) / 2.0, v[0] * v[1], (v[0] ** 2 - v[1] ** 2) / 2.0])
    return x / x[0]


def _eigvec2(m, lam) -> np.ndarray:
    a, b = m[0, 0] - lam, m[0, 1]
    c, d = m[1, 0], m[1, 1] - lam
    v = np.array([-b, a]) if abs(a) + abs(b) >= abs(c) + abs(d) else np.array([-d, c])
    return v / np.hypot(v[0], v[1])


def axis_from_sl2(m) -> mk.OrientedGeodesic:
    """Axis of a hyperbolic 2x2 matrix, oriented toward its attracting fixed point."""
    m = np.asarray(m, dtype=float)
    tr = m[0, 0] + m[1, 1]
    if abs(tr) <= 2.0 + 1e-14:
        raise NotHyperbolicError(f"matrix with |tr| = {abs(tr):.12g} is not hyperbolic")
    disc = np.sqrt(tr * tr - 4.0)
    big = (tr + np.copysign(disc, tr)) / 2.0
    att = _null_from_eigvec(_eigvec2(m, big))
    rep = _null_from_eigvec(_eigvec2(m, 1.0 / big))
    return mk.geodesic_from_endpoints(rep, att)


def axis_of(rep: HolonomyRep, word: str) -> mk.OrientedGeodesic:
    """Translation axis of h(word), oriented toward the attracting fixed point."""
    try:
        return axis_from_sl2(rep.eval2(word))
    except NotHyperbolicError:
        raise NotHyperbolicError(f"word {word!r} is not hyperbolic") from None


def fixed_points(rep: HolonomyRep, word: str):
    """(repelling, attracting) null vectors of h(word)."""
    ax = axis_of(rep, word)
    return ax.start, ax.end


@dataclass(frozen=True)
class TeichmullerPoint:
    """Fenchel-Nielsen point of the Teichmüller slice with fixed boundary lengths."""

    topology: SurfaceTopology
    boundary_lengths: tuple
    lengths: tuple
    twists: tuple
    twist_sign: int = field(default=0, compare=False)

    def __post_init__(self):
        topo = self.topology
        object.__setattr__(self, "boundary_lengths", tuple(float(x) for x in self.boundary_lengths))
        object.__setattr__(self, "lengths", tuple(float(x) for x in self.lengths))
        object.__setattr__(self, "twists", tuple(float(x) for x in self.twists))
        if self.twist_sign == 0:
            object.__setattr__(self, "twist_sign", TWIST_SIGNS[topo.name])
        if len(self.boundary_lengths) != topo.n_boundary:
            raise ValueError(f"expected {topo.n_boundary} boundary lengths, got {len(self.boundary_lengths)}")
        if len(self.lengths) != topo.n_curves or len(self.twists) != topo.n_curves:
            raise ValueError(f"expected {topo.n_curves} lengths and twists")
        for x in self.boundary_lengths + self.lengths:
            if not (np.isfinite(x) and x > 0):
                raise ValueError("lengths must be positive and finite")
        for x in self.twists:
            if not np.isfinite(x):
                raise ValueError("twists must be finite")

    @property
    def coordinates(self) -> np.ndarray:
        """Interleaved (l_1, tau_1, l_2, tau_2, ...)."""
        out = []
        for ell, tau in zip(self.lengths, self.twists):
            out.extend((ell, tau))
        return np.array(out)

    def with_coordinates(self, coords) -> "TeichmullerPoint":
        coords = np.asarray(coords, dtype=float)
        return TeichmullerPoint(
            self.topology,
            self.boundary_lengths,
            tuple(coords[0::2]),
            tuple(coords[1::2]),
            self.twist_sign,
        )

    @cached_property
    def holonomy(self) -> HolonomyRep:
        topo = self.topology
        if topo.name == "one-holed-torus":
            gens, extra = _torus_generators(self.lengths[0], self.twists[0], self.boundary_lengths[0], self.twist_sign)
        elif topo.name == "four-holed-sphere":
            gens, extra = _sphere_generators(self.lengths[0], self.twists[0], self.boundary_lengths, self.twist_sign)
        else:  # pragma: no cover - guarded by topology_for
            raise TopologyError(topo.name)
        return HolonomyRep(topo.letters, gens, extra)

    def boundary_word(self, i: int) -> str:
        return self.topology.boundary_words[i]

    def relator_residual(self) -> float:
        """Distance from +-identity of the relation satisfied by the construction."""
        rep = self.holonomy
        if self.topology.name == "one-holed-torus":
            tr = float(np.trace(rep.eval2("ABab")))
            return abs(abs(tr) - 2.0 * np.cosh(self.boundary_lengths[0] / 2.0))
        prod = rep.eval2("ABC") @ rep.extra2["D"]
        return float(min(np.abs(prod - np.eye(2)).max(), np.abs(prod + np.eye(2)).max()))


def make_point(topology: str | SurfaceTopology, boundary_lengths, lengths, twists, twist_sign: int = 0) -> TeichmullerPoint:
    topo = TOPOLOGIES[topology] if isinstance(topology, str) else topology
    return TeichmullerPoint(topo, tuple(boundary_lengths), tuple(lengths), tuple(twists), twist_sign)


def twist_flow(point: TeichmullerPoint, j: int, t: float, weight: float = 1.0) -> TeichmullerPoint:
    """Left earthquake of size t*weight along decomposition curve j (0-based)."""
    if not 0 <= j < point.topology.n_curves:
        raise IndexError(f"curve index {j} out of range")
    tw = list(point.twists)
    tw[j] += t * weight
    return TeichmullerPoint(point.topology, point.boundary_lengths, point.lengths, tuple(tw), point.twist_sign)


def symplectic_pair(u, v) -> float:
    """Weil-Petersson pairing 2 sum dl_j ^ dtau_j on interleaved (l, tau) vectors."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape or u.ndim != 1 or u.size % 2:
        raise ValueError("tangent vectors must be interleaved (l, tau) pairs of equal size")
    return float(2.0 * np.sum(u[0::2] * v[1::2] - u[1::2] * v[0::2]))


def fn_readback(point: TeichmullerPoint) -> dict:
    """Lengths of decomposition and boundary curves recomputed from traces."""
    rep = point.holonomy
    return {
        "lengths": [curve_length(rep, w) for w in point.topology.pants_curves],
        "boundary_lengths": [curve_length(rep, w) for w in point.topology.boundary_words],
    }


# --------------------------------------------------------------------------
# collars


def collar_width(b: float) -> float:
    """Width of the boundary collar that simple complete geodesics cannot leave.

    A lift of a simple geodesic that does not spiral into the boundary has
    endpoints z < z' <= e^b z in the chart where the boundary lift is the
    imaginary axis, so its distance to the axis satisfies
    cosh d = (z' + z)/(z' - z) >= coth(b/2).  The width is therefore
    arccosh(coth(b/2)) = arcsinh(1/sinh(b/2)).
    """
    if not b > 0:
        raise ValueError("boundary length must be positive")
    return float(np.arcsinh(1.0 / np.sinh(b / 2.0)))


def collar_comparison(b: float) -> dict:
    """Derived width next to the two values quoted in the literature.

    ``lemma_value`` is the bare expression coth(b/2); read as a distance it
    overshoots, read as cosh of a distance it agrees with the derived width.
    ``remark_value`` is the width implied by the threshold Im z > sinh(b/2)
    on the line Re z = 1.
    """
    derived = collar_width(b)
    lemma = 1.0 / np.tanh(b / 2.0)
    # the point 1 + i*sinh(b/2) lies at tanh d = cos(arg) from the imaginary axis
    t = np.sinh(b / 2.0)
    remark = float(np.arctanh(1.0 / np.hypot(1.0, t)))
    return {
        "b": float(b),
        "derived": derived,
        "lemma_value": float(lemma),
        "lemma_as_cosh": float(np.arccosh(lemma)),
        "remark_value": remark,
        "lemma_minus_derived": float(lemma - derived),
        "remark_minus_derived": float(remark - derived),
    }


def geodesic_axis_distance(z: float, zp: float) -> float:
    """Distance from the half-plane geodesic (z, z') with 0 < z < z' to the imaginary axis."""
    return float(np.arccosh((zp + z) / (zp - z)))
