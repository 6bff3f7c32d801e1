"""First and second order variation of lengths along earthquakes.

Angles follow one rule throughout: theta is measured counterclockwise from
the leaf to the test curve, between unoriented lines, so it lies in (0, pi).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import minkowski as mk
from .lamination import (
    LaminationTuple,
    MeasuredLamination,
    curve_crossings,
    realize_tuple,
    segment_crossings,
)
from .surface import TeichmullerPoint, axis_of

TANGENCY_TOL = 1e-9


class TangencyError(ArithmeticError):
    """A leaf meets the test curve (almost) tangentially; perturb the metric."""


# --------------------------------------------------------------------------
# intersections and cosine sums


@dataclass(frozen=True)
class IntersectionDatum:
    point: np.ndarray
    cos: float
    leaf_id: str
    lamination_index: int
    leaf_index: int
    weight: float
    position: float  # arclength along one period of the test curve
    leaf_lift: mk.OrientedGeodesic
    curve_lift: mk.OrientedGeodesic


def _as_tuple(lams) -> LaminationTuple:
    if isinstance(lams, LaminationTuple):
        return lams
    if isinstance(lams, MeasuredLamination):
        return LaminationTuple((lams,))
    return LaminationTuple(tuple(lams))


def enumerate_intersections(point: TeichmullerPoint, word: str, lams) -> list[IntersectionDatum]:
    """Transverse intersections of the closed geodesic of ``word`` with the leaves.

    One datum per intersection point on the surface, ordered along the curve.
    """
    t = _as_tuple(lams)
    realized = realize_tuple(point, t)
    if not realized:
        return []
    axis = axis_of(point.holonomy, word)
    out = []
    for rl, c, s in curve_crossings(point, word, realized):
        cos = mk.line_angle_cos(c.point, c.geodesic, axis)
        if abs(cos) > 1.0 - TANGENCY_TOL:
            raise TangencyError(f"leaf {rl.leaf.leaf_id or '?'} is tangent to {word!r}; perturb the metric")
        out.append(
            IntersectionDatum(
                point=c.point,
                cos=float(cos),
                leaf_id=rl.leaf.leaf_id,
                lamination_index=rl.lamination_index,
                leaf_index=rl.leaf_index,
                weight=rl.weight,
                position=float(s),
                leaf_lift=c.geodesic,
                curve_lift=axis,
            )
        )
    return out


def kerckhoff_sum(point: TeichmullerPoint, lams, word: str) -> float:
    """Sum of weight * cos(theta) over intersections, theta from leaf to curve.

    This is the derivative of the length functional along the left twist
    about ``word`` (and, with the roles swapped, of the length of ``word``
    along the earthquake on the leaves).
    """
    return float(sum(d.weight * d.cos for d in enumerate_intersections(point, word, lams)))


def curve_cosine_sum(point: TeichmullerPoint, lams, word: str) -> float:
    """Sum of weight * cos(theta) with theta measured from the curve to the leaves."""
    return -kerckhoff_sum(point, lams, word)


# --------------------------------------------------------------------------
# cocycles


def adjoint(g3, v):
    """Ad(g) on so(2,1) written as vectors: the generator of g X g^{-1}."""
    return np.asarray(g3) @ np.asarray(v, dtype=float)


@dataclass
class Cocycle:
    """Values on generators, extended to words by e(xy) = e(x) + Ad(h(x)) e(y)."""

    point: TeichmullerPoint
    values: dict

    def __call__(self, word: str) -> np.ndarray:
        rep = self.point.holonomy
        total = np.zeros(3)
        prefix = np.eye(3)
        for ch in word:
            if ch.isupper():
                v = self.values[ch]
            else:
                g_inv = rep.gen3(ch)
                v = -adjoint(g_inv, self.values[ch.upper()])
            total = total + prefix @ v
            prefix = prefix @ rep.gen3(ch)
        return total

    def __add__(self, other: "Cocycle") -> "Cocycle":
        return Cocycle(self.point, {k: self.values[k] + other.values[k] for k in self.values})

    def scaled(self, c: float) -> "Cocycle":
        return Cocycle(self.point, {k: c * v for k, v in self.values.items()})

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.values[k] for k in sorted(self.values)])


# The left earthquake cocycle sums translation generators of the crossed
# leaves, each oriented so the segment's start lies on its positive side;
# this sign makes a closed leaf's cocycle equal the twist derivative of the
# holonomy (checked in tests/test_variation.py).
COCYCLE_SIGN = 1.0


def default_base_point(point: TeichmullerPoint) -> np.ndarray:
    """A point in the convex core, slightly off the first decomposition curve."""
    ax = axis_of(point.holonomy, point.topology.pants_curves[0])
    o = ax.foot(mk.E0)
    u = ax.direction_at(o)
    p = mk.geodesic_point(o, u, 0.1372)
    side = mk.rotate_quarter(p, ax.direction_at(p))
    return mk.normalize_point(mk.geodesic_point(p, side, 0.0617))


def _cocycle_on_segment(point: TeichmullerPoint, realized, z, gz) -> np.ndarray:
    total = np.zeros(3)
    for rl, c in segment_crossings(point, realized, z, gz):
        n = c.geodesic.normal
        side = float(mk.inner(z, n))
        if abs(side) < 1e-12:
            raise mk.GeometryError("cocycle base point lies on a leaf")
        total += rl.weight * (n if side > 0 else -n)
    return COCYCLE_SIGN * total


def direct_cocycle_value(point: TeichmullerPoint, lams, word: str, base=None) -> np.ndarray:
    """Cocycle on a word from the leaves crossing [z, h(word) z] directly."""
    t = _as_tuple(lams)
    z = default_base_point(point) if base is None else np.asarray(base, dtype=float)
    realized = realize_tuple(point, t)
    if not realized or not word:
        return np.zeros(3)
    gz = point.holonomy.eval3(word) @ z
    return _cocycle_on_segment(point, realized, z, gz)


def infinitesimal_cocycle(point: TeichmullerPoint, lams, base=None) -> Cocycle:
    """Infinitesimal left earthquake along the leaves, as a cocycle on generators."""
    t = _as_tuple(lams)
    z = default_base_point(point) if base is None else np.asarray(base, dtype=float)
    realized = realize_tuple(point, t)
    values = {}
    for s in point.topology.letters:
        if not realized:
            values[s] = np.zeros(3)
            continue
        values[s] = _cocycle_on_segment(point, realized, z, point.holonomy.eval3(s) @ z)
    return Cocycle(point, values)


def holonomy_derivative_cocycle(point: TeichmullerPoint, direction, step: float = 1e-5) -> Cocycle:
    """(d/ds h_s(x)) h(x)^{-1} along FN direction, by central differences."""
    x = point.coordinates
    d = np.asarray(direction, dtype=float)
    plus = point.with_coordinates(x + step * d).holonomy
    minus = point.with_coordinates(x - step * d).holonomy
    rep = point.holonomy
    values = {}
    for s in point.topology.letters:
        dg = (plus.gen3(s) - minus.gen3(s)) / (2.0 * step)
        values[s] = mk.vector_from_generator(dg @ mk.isometry_inverse(rep.gen3(s)))
    return Cocycle(point, values)


def coboundary_residual(c: Cocycle) -> tuple[float, np.ndarray]:
    """min over u of max-norm of c(s) - (u - Ad(h(s)) u) on generators.

    Returns (residual, best u).  Cocycles that differ by a coboundary define
    the same tangent vector, so this is the natural size of c as a class.
    """
    rep = c.point.holonomy
    letters = sorted(c.values)
    a = np.vstack([np.eye(3) - rep.gen3(s) for s in letters])
    rhs = np.concatenate([c.values[s] for s in letters])
    u, *_ = np.linalg.lstsq(a, rhs, rcond=None)
    res = rhs - a @ u
    return float(np.abs(res).max()), u


def cocycle_condition_residual(point: TeichmullerPoint, lams, w1: str, w2: str, base=None) -> float:
    """|e(w1 w2) - e(w1) - Ad(h(w1)) e(w2)| with every term recomputed from crossings."""
    z = default_base_point(point) if base is None else base
    rep = point.holonomy
    e12 = direct_cocycle_value(point, lams, w1 + w2, z)
    e1 = direct_cocycle_value(point, lams, w1, z)
    e2 = direct_cocycle_value(point, lams, w2, z)
    return float(np.abs(e12 - e1 - adjoint(rep.eval3(w1), e2)).max())


# --------------------------------------------------------------------------
# polygonal chains


def chain_length(points) -> float:
    return float(sum(mk.point_distance(points[m], points[m + 1]) for m in range(len(points) - 1)))


def chain_length_derivative(points, velocities) -> float:
    """Derivative of the length of the chain q_1 ... q_M under the motion q_m'.

    Each segment contributes <q_m', w_m^+> + <q_{m+1}', w_{m+1}^->, where
    w_m^+ is the unit tangent at q_m pointing away from q_{m+1} and
    w_{m+1}^- the unit tangent at q_{m+1} pointing away from q_m.
    """
    q = [np.asarray(p, dtype=float) for p in points]
    v = [np.asarray(x, dtype=float) for x in velocities]
    if len(q) < 2 or len(q) != len(v):
        raise ValueError("need at least two points and one velocity per point")
    for p, x in zip(q, v):
        if abs(float(mk.inner(p, x))) > 1e-9 * max(1.0, float(np.abs(x).max())):
            raise ValueError("velocities must be tangent to the hyperboloid")
    total = 0.0
    for m in range(len(q) - 1):
        ell = mk.point_distance(q[m], q[m + 1])
        if ell < 1e-12:
            raise ValueError(f"consecutive points {m} and {m + 1} coincide")
        sh, ch = np.sinh(ell), np.cosh(ell)
        w_plus = (ch * q[m] - q[m + 1]) / sh
        w_minus = (ch * q[m + 1] - q[m]) / sh
        total += float(mk.inner(v[m], w_plus) + mk.inner(v[m + 1], w_minus))
    return total


# --------------------------------------------------------------------------
# boundary frame


@dataclass(frozen=True)
class GeodesicFrame:
    p: np.ndarray
    n: np.ndarray
    d: float
    z_plus: np.ndarray
    z_minus: np.ndarray
    w_plus: np.ndarray
    w_minus: np.ndarray

    def pcool_residual(self, pdot) -> float:
        """<p', w+ + w-> + 2 sinh d / cosh^2 d <p', n>, which vanishes."""
        lhs = float(mk.inner(pdot, self.w_plus + self.w_minus))
        rhs = -2.0 * np.sinh(self.d) / np.cosh(self.d) ** 2 * float(mk.inner(pdot, self.n))
        return lhs - rhs


def boundary_frame(p, n) -> GeodesicFrame:
    """Ideal endpoints of the geodesic with normal n and unit tangents toward them from p."""
    p = np.asarray(p, dtype=float)
    n = np.asarray(n, dtype=float)
    if abs(float(mk.sqnorm(n)) - 1.0) > 1e-10:
        raise ValueError("boundary normal must be a unit spacelike vector")
    sh = float(mk.inner(p, n))
    d = float(np.arcsinh(sh))
    ch2 = 1.0 + sh * sh
    pn = mk.cross(p, n)
    z_plus = p - sh * n + pn
    z_minus = p - sh * n - pn
    w_plus = -(sh * sh * p + sh * n - pn) / ch2
    w_minus = -(sh * sh * p + sh * n + pn) / ch2
    return GeodesicFrame(p, n, d, z_plus, z_minus, w_plus, w_minus)


# --------------------------------------------------------------------------
# second order


@dataclass(frozen=True)
class SecondOrderData:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    cos: np.ndarray  # cos theta_k measured from the leaf to L_k
    r: np.ndarray  # r[i, k] = -a_i b_k
    cosh_dist: np.ndarray  # cosh d(L_i, L_k) = <w_i, w_k>
    derivative: float  # sum_k d/dt cos theta_k
    lower_bound: float
    m0: float


def _frame(delta: mk.OrientedGeodesic):
    xi = mk.normalize_null(delta.start)
    zeta = mk.normalize_null(delta.end)
    s = np.sqrt(-float(mk.inner(xi, zeta)))
    xi, zeta = xi / s, zeta / s  # now <xi, zeta> = -1
    n = mk.cross(xi, zeta)
    return xi, zeta, n


def _ordered_normals(delta: mk.OrientedGeodesic, lines):
    """Unit normals w_k of the crossing lines, oriented with <w_k, zeta> < 0, sorted from xi to zeta."""
    xi, zeta, n = _frame(delta)
    o = delta.foot(mk.E0)
    items = []
    for g in lines:
        hit = mk.intersect_geodesics(delta, g)
        if hit is None:
            raise TangencyError("line does not cross the leaf transversally")
        x, _ = hit
        w = np.array(g.normal, dtype=float)
        if float(mk.inner(w, zeta)) > 0:
            w = -w
        items.append((delta.signed_position(o, x), w))
    items.sort(key=lambda it: it[0])
    return xi, zeta, n, [w for _, w in items]


def second_order_terms(delta: mk.OrientedGeodesic, lines) -> SecondOrderData:
    """Coefficients of the crossing normals in the null frame of the leaf lift.

    Writing w_k = a_k xi + b_k zeta + c_k n gives c_k = cos theta_k and
    -a_k b_k = sin^2 theta_k / 2.  Along the left twist

        d/dt cos theta_k = -sum_{i<k} a_k b_i - sum_{i>=k} a_i b_k,

    and summing over k gives -sum a_k b_k - 2 sum_{i<k} a_k b_i: every pair
    contributes the later line's a times the earlier line's b.
    """
    xi, zeta, n, ws = _ordered_normals(delta, lines)
    m = len(ws)
    a = np.array([-float(mk.inner(w, zeta)) for w in ws])
    b = np.array([-float(mk.inner(w, xi)) for w in ws])
    c = np.array([float(mk.inner(w, n)) for w in ws])
    r = -np.outer(a, b)
    gram = np.array([[float(mk.inner(wi, wk)) for wk in ws] for wi in ws])
    deriv = float(-np.sum(a * b) - 2.0 * sum(a[k] * b[i] for i in range(m) for k in range(i + 1, m)))
    sin2 = 1.0 - c * c
    m0 = 0.0
    for i in range(m):
        for k in range(i + 1, m):
            m0 = max(m0, float(np.arccosh(max(abs(gram[i, k]), 1.0))))
    pair = sum(sin2[i] * sin2[k] for i in range(m) for k in range(i + 1, m))
    bound = 0.5 * (float(np.sum(sin2)) + pair / (2.0 * (np.cosh(m0) + 1.0)))
    return SecondOrderData(a, b, c, c.copy(), r, gram, deriv, float(bound), m0)


def twisted_cosine_sum(delta: mk.OrientedGeodesic, lines, t: float) -> float:
    """sum_k cos theta_k after the left twist of size t along the crossing lines.

    For the k-th term the gap between L_{k-1} and L_k is held fixed, so the
    leaf's endpoints move by exp(-t w_1) ... exp(-t w_{k-1}) and
    exp(t w_k) ... exp(t w_m).
    """
    xi, zeta, _, ws = _ordered_normals(delta, lines)
    m = len(ws)
    total = 0.0
    for k in range(m):
        x = xi.copy()
        for i in range(k - 1, -1, -1):
            x = mk.exp_generator(ws[i], -t) @ x
        y = zeta.copy()
        for i in range(m - 1, k - 1, -1):
            y = mk.exp_generator(ws[i], t) @ y
        nt = mk.cross(x, y) / (-float(mk.inner(x, y)))
        total += float(mk.inner(ws[k], nt))
    return total


# --------------------------------------------------------------------------
# finite differences


@dataclass(frozen=True)
class FDEstimate:
    value: float
    error: float

    def __float__(self) -> float:
        return self.value


def _first(f, t0, h):
    return (-f(t0 + 2 * h) + 8 * f(t0 + h) - 8 * f(t0 - h) + f(t0 - 2 * h)) / (12.0 * h)


def _second(f, t0, h):
    return (-f(t0 + 2 * h) + 16 * f(t0 + h) - 30 * f(t0) + 16 * f(t0 - h) - f(t0 - 2 * h)) / (12.0 * h * h)


def _checked(f):
    def g(t):
        y = float(f(t))
        if not np.isfinite(y):
            raise FloatingPointError(f"non-finite sample at t = {t!r}")
        return y

    return g


def fd_derivative(f, t0: float = 0.0, step: float = 1e-3) -> FDEstimate:
    """Fourth order central first derivative; error from halving the step."""
    g = _checked(f)
    d1 = _first(g, t0, step)
    d2 = _first(g, t0, step / 2.0)
    return FDEstimate(float(d2), float(abs(d2 - d1)))


def fd_second(f, t0: float = 0.0, step: float = 1e-2) -> FDEstimate:
    """Fourth order central second derivative; error from halving the step."""
    g = _checked(f)
    d1 = _second(g, t0, step)
    d2 = _second(g, t0, step / 2.0)
    return FDEstimate(float(d2), float(abs(d2 - d1)))
