"""Independent reference computations used by the tests.

None of these call into the package's geometry kernel: they use determinants,
half-plane formulas, root finding and brute-force enumeration instead.
"""

from __future__ import annotations

import itertools
import math

import mpmath

import numpy as np
from scipy.optimize import brentq

J = np.diag([-1.0, 1.0, 1.0])


def lorentz(x, y):
    return float(x @ J @ y)


def cross_by_determinants(x, y):
    """The vector c with <c, z> = det(x, y, z) for every z."""
    basis = np.eye(3)
    dets = np.array([np.linalg.det(np.column_stack([x, y, e])) for e in basis])
    return J @ dets


def halfplane_distance(z: complex, w: complex) -> float:
    return math.acosh(1.0 + abs(z - w) ** 2 / (2.0 * z.imag * w.imag))


def distance_to_imaginary_axis(z: complex) -> float:
    return math.asinh(abs(z.real) / z.imag)


def semicircle_height_at_one(x_end: float) -> float:
    """Height where the geodesic from 0 to x_end (> 1) crosses Re z = 1, by root finding."""
    return brentq(lambda y: abs(complex(1.0, y) - x_end / 2.0) - x_end / 2.0, 1e-12, x_end)


def torus_dual_length(ell: float, tau: float, b: float) -> float:
    """Length of the curve dual to the pants curve on a one-holed torus.

    Cutting along the pants curve gives a pair of pants whose seam between
    the two copies satisfies sinh(ell/2) sinh(perp/2) = cosh(b/4) (a right
    angled pentagon relation); twisting by tau multiplies the half trace by
    cosh(tau/2).
    """
    perp = 2.0 * math.asinh(math.cosh(b / 4.0) / math.sinh(ell / 2.0))
    return 2.0 * math.acosh(math.cosh(tau / 2.0) * math.cosh(perp / 2.0))


# --------------------------------------------------------------------------
# switching cycles by brute force


def _ends(edge, direction):
    """(leave vertex, leave mark, arrive vertex, arrive mark) of a traversal."""
    if direction > 0:
        return edge.tail, edge.tail_mark, edge.head, edge.head_mark
    return edge.head, edge.head_mark, edge.tail, edge.tail_mark


def all_switching_cycles(edges, max_len: int | None = None):
    """Every cyclic sequence of traversals (each edge at most twice) that flips
    the mark at each junction, up to rotation."""
    n = len(edges)
    max_len = max_len or 2 * n
    steps = [(i, d) for i in range(n) for d in (1, -1)]
    found = set()

    def closes(seq):
        for k in range(len(seq)):
            e, d = seq[k]
            f, g = seq[(k + 1) % len(seq)]
            _, _, av, am = _ends(edges[e], d)
            lv, lm, _, _ = _ends(edges[f], g)
            if av != lv or am != -lm:
                return False
        return True

    def canon(seq):
        rots = [tuple(seq[k:] + seq[:k]) for k in range(len(seq))]
        return min(rots)

    def extend(seq, counts):
        if seq and closes(seq):
            found.add(canon(seq))
        if len(seq) >= max_len:
            return
        for st in steps:
            if counts[st[0]] >= 2:
                continue
            if seq:
                e, d = seq[-1]
                _, _, av, am = _ends(edges[e], d)
                lv, lm, _, _ = _ends(edges[st[0]], st[1])
                if av != lv or am != -lm:
                    continue
            counts[st[0]] += 1
            extend(seq + [st], counts)
            counts[st[0]] -= 1

    extend([], [0] * n)
    return found


def canonical_rotation(seq):
    seq = list(seq)
    return min(tuple(seq[k:] + seq[:k]) for k in range(len(seq)))


def has_switching_cycle(edges, live) -> bool:
    sub = [edges[i] for i in live]
    return bool(all_switching_cycles(sub, max_len=2 * len(sub)))


def subsets(n):
    for r in range(1, n + 1):
        yield from itertools.combinations(range(n), r)


def anchor_height_mp(b: float, phi: float, k: int, dps: int = 80) -> float:
    """Height where the geodesic from 0 to e^{bk}/cos^2(phi) meets Re z = 1.

    Bisection on the circle equation at high precision, so the cancellation
    between the two radii does not limit the accuracy.
    """
    with mpmath.workdps(dps):
        x_end = mpmath.e ** (mpmath.mpf(b) * k) / mpmath.cos(mpmath.mpf(phi)) ** 2
        lo, hi = mpmath.mpf(0), x_end
        for _ in range(4 * dps):
            mid = (lo + hi) / 2
            if abs(mpmath.mpc(1, mid) - x_end / 2) < x_end / 2:
                lo = mid
            else:
                hi = mid
        return float((lo + hi) / 2)


def axis_crossing_cos(left: float, right: float) -> float:
    """cos of the counterclockwise angle from the upward imaginary axis to the
    semicircle with endpoints -left and right (both positive)."""
    return (left - right) / (left + right)


def ultraparallel_cosh_distance(a: float, b: float, c: float, d: float) -> float:
    """cosh of the distance between disjoint half-plane geodesics (a, b) and (c, d), by cross ratio."""
    return abs(((a - c) * (b - d) + (a - d) * (b - c)) / ((a - b) * (c - d)))


def brute_geodesic_distance(a: float, b: float, c: float, d: float) -> float:
    """Same distance by minimizing over pairs of points on the two semicircles."""
    from scipy.optimize import minimize

    c1, r1 = (a + b) / 2, abs(b - a) / 2
    c2, r2 = (c + d) / 2, abs(d - c) / 2

    def angle(t):
        return math.pi / (1.0 + math.exp(-t))

    def f(t):
        return halfplane_distance(c1 + r1 * np.exp(1j * angle(t[0])), c2 + r2 * np.exp(1j * angle(t[1])))

    opts = dict(xatol=1e-12, fatol=1e-15, maxiter=4000)
    runs = [minimize(f, [u, v], method="Nelder-Mead", options=opts) for u in (-1.0, 0.0, 1.0) for v in (-1.0, 0.0, 1.0)]
    return float(min(r.fun for r in runs))


def semicircle_axis_distance(x: float, y: float) -> float:
    """Distance from the half-plane geodesic (x, y), 0 < x < y, to the imaginary axis,
    minimizing distance_to_imaginary_axis along the semicircle."""
    from scipy.optimize import minimize_scalar

    c, r = (x + y) / 2, (y - x) / 2
    res = minimize_scalar(lambda t: distance_to_imaginary_axis(complex(c + r * math.cos(t), r * math.sin(t))),
                          bounds=(1e-9, math.pi - 1e-9), method="bounded", options={"xatol": 1e-12})
    return float(res.fun)
