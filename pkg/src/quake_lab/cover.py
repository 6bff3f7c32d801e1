"""Orbit enumeration in the universal cover and lifts crossing a segment.

Everything here works with 3x3 holonomy matrices.  Group elements are found
by a breadth first walk over reduced words; a branch is pruned once its image
of the base point leaves a ball slightly larger than the target ball.  The
extra margin is a multiple of the largest generator displacement, which is
what a quasi-geodesic word path can stray from the straight segment.  Callers
that need a stronger guarantee can rerun with a larger margin and compare.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import minkowski as mk
from .surface import HolonomyRep, axis_of, curve_length
from .words import invert, reduce

DEFAULT_SLACK_FACTOR = 1.5
DEFAULT_MAX_NODES = 400_000
CHUNK_LENGTH = 1.0


class SearchBoundExceeded(RuntimeError):
    """Orbit enumeration hit its node budget before exhausting the ball."""

    def __init__(self, bound: int, radius: float):
        super().__init__(f"orbit search exceeded {bound} nodes (radius {radius:.3f})")
        self.bound = bound
        self.radius = radius


def _segment_distance(pts, a, c):
    """Hyperbolic distance from each row of pts to the segment [a, c]."""
    da = np.arccosh(np.maximum(-mk.inner(pts, a), 1.0))
    dc = np.arccosh(np.maximum(-mk.inner(pts, c), 1.0))
    ell = mk.point_distance(a, c)
    if ell < 1e-6:
        # arccosh resolves only ~1e-8 here; a lower bound keeps pruning safe
        return np.minimum(da, dc) - ell
    u = mk.tangent_toward(a, c)
    n = mk.cross(a, u)
    h = mk.inner(pts, n)
    # foot position along the line, measured from a toward c
    foot = pts - h[:, None] * n[None, :]
    s = np.arcsinh(mk.inner(foot, u) / np.sqrt(1.0 + h * h))
    inside = (s >= 0.0) & (s <= ell)
    return np.where(inside, np.arcsinh(np.abs(h)), np.minimum(da, dc))


def orbit_ball(
    rep: HolonomyRep,
    base,
    center,
    radius: float,
    slack_factor: float = DEFAULT_SLACK_FACTOR,
    max_nodes: int = DEFAULT_MAX_NODES,
):
    """Group elements g with d(g.base, center) <= radius.

    Returns a list of (word, 3x3 matrix); the identity is included when it
    qualifies.  The walk keeps a word while its image of ``base`` stays in a
    tube around the segment from ``base`` to ``center``; the tube is wider
    than ``radius`` by ``slack_factor`` generator displacements.
    """
    base = np.asarray(base, dtype=float)
    center = np.asarray(center, dtype=float)
    # pull both points next to the hub first; the search then runs between
    # nearby points where generator displacements are small
    w0, m0, base_h = reduce_to_hub(rep, base)
    w1, m1, center_h = reduce_to_hub(rep, center)
    found = _orbit_ball_near(rep, base_h, center_h, radius, slack_factor, max_nodes)
    m1_inv = mk.isometry_inverse(m1)
    w1_inv = invert(w1)
    return [(reduce(w1_inv + w + w0), m1_inv @ g @ m0) for w, g in found]


def reduce_to_hub(rep: HolonomyRep, x, hub=mk.E0, max_steps: int = 10_000):
    """Greedy descent of x toward the hub along its orbit: (word, matrix, g.x)."""
    letters = rep.letters + rep.letters.lower()
    x = mk.normalize_point(x)
    word = ""
    mat = np.eye(3)
    d = -float(mk.inner(x, hub))
    for _ in range(max_steps):
        best = None
        for ch in letters:
            y = rep.gen3(ch) @ x
            dy = -float(mk.inner(y, hub))
            if dy < d - 1e-12 and (best is None or dy < best[0]):
                best = (dy, ch, y)
        if best is None:
            break
        d, ch, x = best
        x = mk.normalize_point(x)
        word = ch + word
        mat = rep.gen3(ch) @ mat
    return reduce(word), mat, x


def _orbit_ball_near(rep, base, center, radius, slack_factor, max_nodes):
    letters = rep.letters + rep.letters.lower()
    gens = np.stack([rep.gen3(ch) for ch in letters])
    disp = max(mk.point_distance(base, g @ base) for g in gens)
    tube = radius + slack_factor * disp + 1e-9
    cosh_radius = np.cosh(radius) + 1e-12

    found = []
    if -float(mk.inner(base, center)) <= cosh_radius:
        found.append(("", np.eye(3)))
    mats = np.eye(3)[None]
    words = [""]
    last = np.array([-1])
    nl = len(letters)
    inverse_of = np.array([(i + nl // 2) % nl for i in range(nl)])
    total = 1
    while len(words):
        new_mats = []
        new_words = []
        new_last = []
        for i in range(nl):
            mask = last != inverse_of[i]
            if not mask.any():
                continue
            cand = mats[mask] @ gens[i]
            pts = cand @ base
            keep = _segment_distance(pts, base, center) <= tube
            if not keep.any():
                continue
            idx = np.nonzero(mask)[0][keep]
            cand = cand[keep]
            ch = -mk.inner(pts[keep], center)
            for j, k in enumerate(idx):
                w = words[k] + letters[i]
                new_words.append(w)
                if ch[j] <= cosh_radius:
                    found.append((w, cand[j]))
            new_mats.append(cand)
            new_last.append(np.full(len(idx), i))
        if not new_words:
            break
        total += len(new_words)
        if total > max_nodes:
            raise SearchBoundExceeded(max_nodes, radius)
        mats = np.concatenate(new_mats)
        words = new_words
        last = np.concatenate(new_last)
    return found


# --------------------------------------------------------------------------
# lifted pieces of leaves


@dataclass(frozen=True)
class Piece:
    """Compact segment [p, q] of a leaf lift; translates of it cover the leaf's thick part."""

    geodesic: mk.OrientedGeodesic
    p: np.ndarray
    q: np.ndarray
    full_line: bool = False  # closed leaves: the whole lift counts

    @property
    def center(self):
        return mk.normalize_point(self.p + self.q)

    @property
    def radius(self) -> float:
        return mk.point_distance(self.p, self.q) / 2.0


@dataclass(frozen=True)
class RayFamily:
    """End of a spiralling leaf inside the collar of a boundary component.

    ``boundary_word`` is a word whose holonomy has the ray's ideal endpoint as
    a fixed point; ``geodesic`` is the leaf lift carrying the ray.
    """

    boundary_word: str
    geodesic: mk.OrientedGeodesic
    at_end: bool
    width: float


@dataclass(frozen=True)
class Crossing:
    geodesic: mk.OrientedGeodesic  # the crossed lift, with the leaf's orientation
    point: np.ndarray
    word: str  # deck transformation carrying the reference lift to this one


def _chunks(p, q, size: float = CHUNK_LENGTH):
    """Centers and radii of consecutive pieces of [p, q] no longer than size."""
    ell = mk.point_distance(p, q)
    n = max(1, int(np.ceil(ell / size)))
    if ell < 1e-12:
        return [(np.asarray(p, dtype=float), 0.0)]
    h = ell / n
    return [(mk.interpolate(p, q, (k + 0.5) * h), h / 2.0) for k in range(n)]


def _segment_parameter(p, q, x) -> float:
    """Arclength of the foot of x along [p, q] measured from p."""
    u = mk.tangent_toward(p, q)
    g = mk.geodesic_through(p, u)
    return g.signed_position(p, x)


def _cross_segment(line: mk.OrientedGeodesic, p, q, tol=1e-12):
    """Point where the segment [p, q] crosses the line, if it does."""
    sp = float(mk.inner(p, line.normal))
    sq = float(mk.inner(q, line.normal))
    if sp * sq > 0 or (abs(sp) < tol and abs(sq) < tol):
        return None
    seg = mk.geodesic_through(p, mk.tangent_toward(p, q))
    hit = mk.intersect_geodesics(seg, line)
    return None if hit is None else hit[0]


def _on_piece(piece: Piece, x, tol=1e-11) -> bool:
    if piece.full_line:
        return True
    ell = mk.point_distance(piece.p, piece.q)
    s = piece.geodesic.signed_position(piece.p, x) * np.sign(
        piece.geodesic.signed_position(piece.p, piece.q) or 1.0
    )
    return -tol <= s <= ell + tol


def crossings_with_piece(rep: HolonomyRep, piece: Piece, p, q, **kw) -> list[Crossing]:
    """Translates g.piece crossed by the segment [p, q]."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    out: list[Crossing] = []
    seen: list[np.ndarray] = []
    candidates = {}
    # both segments are cut into short chunks so each search ball stays small
    for pc, pr in _chunks(piece.p, piece.q):
        for sc, sr in _chunks(p, q):
            for word, g in orbit_ball(rep, pc, sc, pr + sr + 1e-9, **kw):
                candidates.setdefault(word, g)
    for word in sorted(candidates, key=lambda w: (len(w), w)):
        g = candidates[word]
        line = mk.OrientedGeodesic(g @ piece.geodesic.normal, g @ piece.geodesic.start, g @ piece.geodesic.end)
        x = _cross_segment(line, p, q)
        if x is None:
            continue
        if not piece.full_line:
            gi = mk.isometry_inverse(g)
            if not _on_piece(piece, gi @ x):
                continue
        if any(np.abs(line.normal - n).max() < 1e-8 for n in seen):
            continue
        seen.append(line.normal)
        out.append(Crossing(line, x, word))
    return out


def crossings_with_rays(rep: HolonomyRep, family: RayFamily, p, q, **kw) -> list[Crossing]:
    """Ray translates (inside the collar) crossed by the segment [p, q]."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    mid = mk.normalize_point(p + q)
    r = mk.point_distance(p, q) / 2.0
    bword = family.boundary_word
    axis = axis_of(rep, bword)
    b = curve_length(rep, bword)
    base = axis.foot(mk.E0)
    gamma0 = rep.eval3(bword)
    tip = family.geodesic.end if family.at_end else family.geodesic.start
    other = family.geodesic.start if family.at_end else family.geodesic.end
    if abs(float(mk.inner(tip, axis.normal))) > 1e-8:
        raise mk.GeometryError("ray endpoint is not on the boundary axis")
    tip_is_end = np.abs(mk.normalize_null(tip) - axis.end).max() < np.abs(mk.normalize_null(tip) - axis.start).max()
    far = axis.start if tip_is_end else axis.end
    sinh_w = np.sinh(family.width)

    out: list[Crossing] = []
    seen_axes: list[np.ndarray] = []
    for _word, g in orbit_ball(rep, base, mid, r + family.width + b / 2.0 + 1e-9, **kw):
        n_axis = g @ axis.normal
        if any(np.abs(n_axis - n).max() < 1e-8 for n in seen_axes):
            continue
        seen_axes.append(n_axis)
        # quick reject: the segment stays farther than the collar width
        sp, sq = float(mk.inner(p, n_axis)), float(mk.inner(q, n_axis))
        if sp * sq > 0 and min(abs(sp), abs(sq)) > sinh_w and _segment_far(p, q, n_axis, sinh_w):
            continue
        chart = mk.normalizing_map(g @ far, g @ tip, g @ other)
        big_gamma = g @ gamma0 @ mk.isometry_inverse(g)
        scale = mk.null_to_ideal(chart @ big_gamma @ g @ other)
        wp = mk.hyperboloid_to_halfplane(chart @ p)
        wq = mk.hyperboloid_to_halfplane(chart @ q)
        lo, hi = sorted((wp.real, wq.real))
        if lo <= 0:
            raise mk.GeometryError("segment leaves the convex core (crosses a boundary lift)")
        log_s = np.log(scale)
        k_a, k_b = sorted((np.log(lo) / log_s, np.log(hi) / log_s))
        for k in range(int(np.floor(k_a)) - 1, int(np.ceil(k_b)) + 2):
            gk = np.linalg.matrix_power(big_gamma, k) if k >= 0 else np.linalg.matrix_power(mk.isometry_inverse(big_gamma), -k)
            h = gk @ g
            line = mk.OrientedGeodesic(h @ family.geodesic.normal, h @ family.geodesic.start, h @ family.geodesic.end)
            x = _cross_segment(line, p, q)
            if x is None:
                continue
            if abs(float(mk.inner(x, n_axis))) > sinh_w:
                continue
            out.append(Crossing(line, x, ""))
    return out


def _segment_far(p, q, n, sinh_w) -> bool:
    # signed sinh-distance to a line is <x, n>; along a segment it is a
    # combination cosh/sinh, whose minimum modulus we bound by sampling ends
    # and the critical point
    ell = mk.point_distance(p, q)
    if ell < 1e-6:
        return True  # both ends were already checked by the caller
    u = mk.tangent_toward(p, q)
    a = float(mk.inner(p, n))
    c = float(mk.inner(u, n))
    # f(t) = a cosh t + c sinh t, critical where tanh t = -c/a
    ts = [0.0, ell]
    if abs(a) > abs(c) and a != 0:
        t_star = np.arctanh(-c / a)
        if 0.0 < t_star < ell:
            ts.append(t_star)
    vals = [a * np.cosh(t) + c * np.sinh(t) for t in ts]
    if min(vals) * max(vals) <= 0:
        return False
    return min(abs(v) for v in vals) > sinh_w
