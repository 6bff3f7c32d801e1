"""Hyperboloid model of the hyperbolic plane inside Minkowski space R^{2,1}.

Vectors are plain numpy arrays of shape ``(3,)`` (or ``(..., 3)`` for the
vectorised helpers) with the bilinear form

    <x, y> = -x0*y0 + x1*y1 + x2*y2.

Conventions used everywhere in the package:

* The volume form satisfies dV(e0, e1, e2) = +1 and the cross product is the
  vector with <x ⊠ y, z> = dV(x, y, z).  With J = diag(-1, 1, 1) this is
  ``J @ np.cross(x, y)``.
* A geodesic is stored as a unit spacelike normal n; its points are the x on
  the hyperboloid with <x, n> = 0.  For an oriented geodesic running from the
  ideal point a to the ideal point b, n = (a ⊠ b) / |a ⊠ b|.
* Ideal points are null rays normalised so that x0 = 1.
* The half-plane chart z = x + iy corresponds to the symmetric matrix
  (1/y) [[|z|^2, x], [x, 1]] = [[x0 + x2, x1], [x1, x0 - x2]].  It sends i to
  e0 and is orientation preserving for the orientation in which p ⊠ u is the
  counterclockwise quarter turn of a tangent vector u at p.
* An SL(2, R) matrix M acts on symmetric matrices by S -> M S M^T, which gives
  the homomorphism to SO_0(2, 1) used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

J = np.diag([-1.0, 1.0, 1.0])
E0 = np.array([1.0, 0.0, 0.0])

ALGEBRAIC_TOL = 1e-12
GEOMETRIC_TOL = 1e-10


class GeometryError(ValueError):
    """Raised when an input violates a geometric precondition."""


def inner(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return -x[..., 0] * y[..., 0] + x[..., 1] * y[..., 1] + x[..., 2] * y[..., 2]


def cross(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c = np.cross(x, y)
    c[..., 0] = -c[..., 0]
    return c


def sqnorm(x):
    return inner(x, x)


def classify(v, tol: float = ALGEBRAIC_TOL) -> str:
    q = float(sqnorm(v))
    if q < -tol:
        return "timelike"
    if q > tol:
        return "spacelike"
    return "null"


def normalize_point(p):
    """Scale a timelike vector onto the future sheet of the hyperboloid."""
    p = np.asarray(p, dtype=float)
    q = sqnorm(p)
    if q >= 0:
        raise GeometryError("vector is not timelike")
    p = p / np.sqrt(-q)
    return p if p[0] > 0 else -p


def normalize_spacelike(v):
    v = np.asarray(v, dtype=float)
    q = sqnorm(v)
    if q <= 0:
        raise GeometryError("vector is not spacelike")
    return v / np.sqrt(q)


def normalize_null(v):
    v = np.asarray(v, dtype=float)
    if abs(v[0]) < 1e-300:
        raise GeometryError("null vector with vanishing time component")
    return v / v[0]


def point_distance(p, q) -> float:
    c = -float(inner(p, q))
    return float(np.arccosh(max(c, 1.0)))


def geodesic_point(p, u, t):
    """Point at arclength t from p in the unit tangent direction u."""
    return np.cosh(t) * np.asarray(p) + np.sinh(t) * np.asarray(u)


def interpolate(p, q, s: float):
    """Point at arclength s from p on the segment [p, q] (stable for long segments)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    ell = point_distance(p, q)
    if ell < 1e-12:
        return p.copy()
    x = np.sinh(ell - s) * p + np.sinh(s) * q
    return normalize_point(x)


def tangent_toward(p, q):
    """Unit tangent at p pointing along the geodesic toward q."""
    c = -float(inner(p, q))
    v = np.asarray(q) - c * np.asarray(p)
    return v / np.sqrt(float(sqnorm(v)))


def rotate_quarter(p, u):
    """Counterclockwise quarter turn of the tangent vector u at p."""
    return cross(p, u)


# --------------------------------------------------------------------------
# geodesics


@dataclass(frozen=True)
class OrientedGeodesic:
    """Oriented geodesic of H^2 given by its unit spacelike normal.

    ``start`` and ``end`` are the ideal endpoints (null, x0 = 1).  The normal
    is ``start ⊠ end`` rescaled to unit length, so reversing the orientation
    negates it.
    """

    normal: np.ndarray
    start: np.ndarray
    end: np.ndarray

    def reversed(self) -> "OrientedGeodesic":
        return OrientedGeodesic(-self.normal, self.end, self.start)

    def transformed(self, g3) -> "OrientedGeodesic":
        return geodesic_from_endpoints(g3 @ self.start, g3 @ self.end)

    def contains(self, p, tol: float = GEOMETRIC_TOL) -> bool:
        return abs(float(inner(p, self.normal))) <= tol

    def foot(self, p):
        """Orthogonal projection of the point p on the geodesic."""
        q = np.asarray(p) - float(inner(p, self.normal)) * self.normal
        return normalize_point(q)

    def direction_at(self, p):
        """Unit tangent at a point p of the geodesic, pointing to ``end``."""
        return cross(self.normal, p)

    def signed_position(self, origin, p) -> float:
        """Arclength coordinate of (the foot of) p with respect to origin."""
        u = self.direction_at(origin)
        q = self.foot(p)
        return float(np.arcsinh(inner(q, u)))


def geodesic_from_endpoints(a, b) -> OrientedGeodesic:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    for v in (a, b):
        if abs(float(sqnorm(v))) > 1e-9 * max(1.0, float(v @ v)):
            raise GeometryError("ideal endpoints must be null vectors")
    a = normalize_null(a)
    b = normalize_null(b)
    c = cross(a, b)
    q = float(sqnorm(c))
    if q <= 1e-24:
        raise GeometryError("ideal endpoints are proportional")
    return OrientedGeodesic(c / np.sqrt(q), a, b)


def geodesic_from_normal(n) -> OrientedGeodesic:
    """Recover the oriented endpoints of the geodesic with unit normal n."""
    n = normalize_spacelike(n)
    # projecting e0 along n lands on the geodesic's plane, inside the cone
    p = normalize_point(E0 + float(inner(E0, n)) * n)
    u = cross(n, p)
    return OrientedGeodesic(n, normalize_null(p - u), normalize_null(p + u))


def geodesic_through(p, u) -> OrientedGeodesic:
    """Geodesic through the point p with unit tangent u."""
    p = np.asarray(p, dtype=float)
    u = np.asarray(u, dtype=float)
    return geodesic_from_endpoints(p - u, p + u)


def dist_point_to_geodesic(p, g: OrientedGeodesic) -> float:
    """Signed distance: positive on the side the normal points to."""
    return float(np.arcsinh(inner(p, g.normal)))


def intersect_geodesics(g1: OrientedGeodesic, g2: OrientedGeodesic):
    """Intersection point and cosine of the counterclockwise angle from g1 to g2.

    Returns ``None`` when the geodesics are disjoint, asymptotic or equal.
    The angle is the one between the oriented tangents, so its cosine is
    simply <n1, n2>.
    """
    c = float(inner(g1.normal, g2.normal))
    if abs(c) >= 1.0 - 1e-14:
        return None
    p = normalize_point(cross(g1.normal, g2.normal))
    return p, c


def oriented_angle(p, g1: OrientedGeodesic, g2: OrientedGeodesic):
    """(cos, sin) of the counterclockwise angle at p from g1's tangent to g2's."""
    u1 = g1.direction_at(p)
    u2 = g2.direction_at(p)
    return float(inner(u1, u2)), float(inner(rotate_quarter(p, u1), u2))


def line_angle_cos(p, first: OrientedGeodesic, second: OrientedGeodesic) -> float:
    """Cosine of the counterclockwise angle in (0, pi) from one line to another.

    Orientations are ignored: the angle is measured between unoriented lines.
    """
    c, s = oriented_angle(p, first, second)
    return c if s >= 0 else -c


def geodesic_distance(g1: OrientedGeodesic, g2: OrientedGeodesic) -> float:
    """Distance between two disjoint geodesics (0 if they meet)."""
    c = abs(float(inner(g1.normal, g2.normal)))
    return float(np.arccosh(c)) if c > 1.0 else 0.0


def common_perpendicular(g1: OrientedGeodesic, g2: OrientedGeodesic):
    """Feet of the common perpendicular of two ultraparallel geodesics."""
    c = float(inner(g1.normal, g2.normal))
    if abs(c) <= 1.0:
        raise GeometryError("geodesics are not ultraparallel")
    m = cross(g1.normal, g2.normal)  # normal of the perpendicular, spacelike
    perp = OrientedGeodesic(normalize_spacelike(m), np.zeros(3), np.zeros(3))
    q1 = normalize_point(cross(g1.normal, perp.normal))
    q2 = normalize_point(cross(g2.normal, perp.normal))
    return q1, q2


# --------------------------------------------------------------------------
# so(2,1)


def generator_matrix(v):
    """Matrix of x -> v ⊠ x, the Killing field attached to v."""
    v = np.asarray(v, dtype=float)
    skew = np.array([[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]])
    return J @ skew


def generator_v(g: OrientedGeodesic):
    """so(2,1) element whose flow translates along g at unit speed.

    With the identification x -> v ⊠ x, the generator is the normal itself:
    n ⊠ end = end, so the flow pushes points toward ``g.end``.
    """
    return np.array(g.normal, dtype=float)


def exp_generator(v, t: float = 1.0):
    """exp(t X_v) for the Killing field X_v(x) = v ⊠ x.

    For unit spacelike v the matrix satisfies X^3 = X, for unit timelike v it
    satisfies X^3 = -X; the general case falls back on scipy.
    """
    v = np.asarray(v, dtype=float)
    x = generator_matrix(v)
    q = float(sqnorm(v))
    if abs(q - 1.0) < 1e-13:
        return np.eye(3) + np.sinh(t) * x + (np.cosh(t) - 1.0) * (x @ x)
    from scipy.linalg import expm

    return expm(t * x)


def vector_from_generator(x):
    """Inverse of ``generator_matrix``."""
    skew = J @ np.asarray(x, dtype=float)
    return np.array([skew[2, 1], skew[0, 2], skew[1, 0]])


# --------------------------------------------------------------------------
# half-plane chart and SL(2,R)


def halfplane_to_hyperboloid(z):
    z = complex(z)
    x, y = z.real, z.imag
    if not y > 0:
        raise GeometryError("half-plane point must have positive imaginary part")
    r = x * x + y * y
    return np.array([(r + 1.0) / (2.0 * y), x / y, (r - 1.0) / (2.0 * y)])


def hyperboloid_to_halfplane(p) -> complex:
    p = np.asarray(p, dtype=float)
    y = 1.0 / (p[0] - p[2])
    return complex(p[1] * y, y)


def ideal_to_null(t):
    """Null ray (x0 = 1) of a boundary point of the half-plane; t may be inf."""
    if t is None or (isinstance(t, float) and np.isinf(t)):
        return np.array([1.0, 0.0, 1.0])
    t = float(t)
    s = t * t + 1.0
    return np.array([1.0, 2.0 * t / s, (t * t - 1.0) / s])


def null_to_ideal(v) -> float:
    v = np.asarray(v, dtype=float)
    den = v[0] - v[2]
    if abs(den) <= 1e-14 * abs(v[0]):
        return float("inf")
    return float(v[1] / den)


def halfplane_geodesic(a, b) -> OrientedGeodesic:
    """Oriented geodesic of the half-plane from boundary point a to b."""
    return geodesic_from_endpoints(ideal_to_null(a), ideal_to_null(b))


def sl2_to_so21(m):
    """Image of a 2x2 matrix of determinant 1 in SO_0(2,1)."""
    m = np.asarray(m, dtype=float)
    basis = (np.eye(2), np.array([[0.0, 1.0], [1.0, 0.0]]), np.array([[1.0, 0.0], [0.0, -1.0]]))
    g = np.empty((3, 3))
    for k, e in enumerate(basis):
        s = m @ e @ m.T
        g[:, k] = ((s[0, 0] + s[1, 1]) / 2.0, s[0, 1], (s[0, 0] - s[1, 1]) / 2.0)
    return g


def mobius(m, z: complex) -> complex:
    m = np.asarray(m, dtype=float)
    return (m[0, 0] * z + m[0, 1]) / (m[1, 0] * z + m[1, 1])


def mobius_boundary(m, t):
    """Action of a real 2x2 matrix on a boundary point (inf allowed)."""
    m = np.asarray(m, dtype=float)
    if np.isinf(t):
        return float("inf") if m[1, 0] == 0 else float(m[0, 0] / m[1, 0])
    den = m[1, 0] * t + m[1, 1]
    if den == 0:
        return float("inf")
    return float((m[0, 0] * t + m[0, 1]) / den)


def is_isometry(g, tol: float = GEOMETRIC_TOL) -> bool:
    g = np.asarray(g, dtype=float)
    return bool(np.allclose(g.T @ J @ g, J, atol=tol) and abs(np.linalg.det(g) - 1.0) < tol and g[0, 0] > 0)


def fixed_points_sl2(m):
    """(repelling, attracting) boundary fixed points of a hyperbolic matrix."""
    m = np.asarray(m, dtype=float)
    tr = m[0, 0] + m[1, 1]
    if abs(tr) <= 2.0:
        raise GeometryError("matrix is not hyperbolic")
    disc = np.sqrt(tr * tr - 4.0)
    lam_big = (tr + np.sign(tr) * disc) / 2.0
    lam_small = 1.0 / lam_big

    def eigvec(lam):
        # (m - lam I) v = 0
        a, b = m[0, 0] - lam, m[0, 1]
        c, d = m[1, 0], m[1, 1] - lam
        if abs(b) + abs(a) >= abs(c) + abs(d):
            v = np.array([-b, a])
        else:
            v = np.array([-d, c])
        return float("inf") if abs(v[1]) <= 1e-300 else float(v[0] / v[1])

    return eigvec(lam_small), eigvec(lam_big)


def axis_sl2(m) -> OrientedGeodesic:
    """Translation axis of a hyperbolic matrix, oriented from repelling to attracting."""
    rep, att = fixed_points_sl2(m)
    return halfplane_geodesic(rep, att)


def translation_length_sl2(m) -> float:
    tr = abs(float(np.trace(m)))
    if tr <= 2.0:
        raise GeometryError("matrix is not hyperbolic")
    return 2.0 * float(np.arccosh(tr / 2.0))


def translation_length_so21(g) -> float:
    c = (float(np.trace(g)) - 1.0) / 2.0
    return float(np.arccosh(max(c, 1.0)))


def hyperbolic_translation(length: float):
    """2x2 translation along the imaginary axis toward infinity."""
    return np.diag([np.exp(length / 2.0), np.exp(-length / 2.0)])


def perpendicular_translation(length: float):
    """2x2 translation along the unit-circle geodesic, moving i toward +1."""
    c, s = np.cosh(length / 2.0), np.sinh(length / 2.0)
    return np.array([[c, s], [s, c]])


STANDARD_ZERO = np.array([1.0, 0.0, -1.0])
STANDARD_INF = np.array([1.0, 0.0, 1.0])
STANDARD_ONE = np.array([1.0, 1.0, 0.0])


def normalizing_map(to_zero, to_inf, to_one):
    """Isometry sending three ideal points to the half-plane points 0, inf, 1.

    The result lies in O(2,1), preserves the future cone, and may reverse
    orientation (in the half-plane it is then z -> T(conj z)); distances and
    incidences are all that callers rely on.
    """
    src = [normalize_null(v) for v in (to_zero, to_inf, to_one)]
    dst = (STANDARD_ZERO, STANDARD_INF, STANDARD_ONE)
    p = float(inner(dst[0], dst[1])) / float(inner(src[0], src[1]))
    q = float(inner(dst[0], dst[2])) / float(inner(src[0], src[2]))
    r = float(inner(dst[1], dst[2])) / float(inner(src[1], src[2]))
    if min(p, q, r) <= 0:
        raise GeometryError("ideal points must be distinct")
    alpha = np.sqrt(p * q / r)
    beta = p / alpha
    gamma = q / alpha
    a = np.column_stack([alpha * src[0], beta * src[1], gamma * src[2]])
    b = np.column_stack(dst)
    return b @ np.linalg.inv(a)


def isometry_inverse(g):
    """Inverse of an element of O(2,1): J g^T J."""
    return J @ np.asarray(g).T @ J
