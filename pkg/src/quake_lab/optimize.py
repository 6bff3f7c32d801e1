"""Minimizing the length functional over the Teichmüller slice.

For a filling sharp tuple the functional is proper and strictly convex along
twists, so it has exactly one minimum.  The search is quasi-Newton on
Fenchel-Nielsen coordinates with finite-difference gradients, finished by a
few Newton steps on a Richardson-extrapolated Hessian.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import minkowski as mk
from .circuital import decompose
from .lamination import (
    LaminationTuple,
    MeasuredLamination,
    closed,
    curve_crossings,
    fills_surface,
    is_sharp,
    realize_leaf,
)
from .length import total_length
from .surface import TeichmullerPoint, axis_of
from .variation import coboundary_residual, infinitesimal_cocycle, kerckhoff_sum, second_order_terms

LENGTH_FLOOR = 1e-3
ESCAPE_NORM = 1e3
ESCAPE_GRADIENT = 1e-4
ESCAPE_PATIENCE = 50
MAX_STEP = 1.0  # coordinate-space cap on a single quasi-Newton step


class NotFillingError(ValueError):
    """Recovery needs a filling pair (the inverse map is defined only there)."""


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class StartResult:
    start: np.ndarray
    x: np.ndarray
    value: float
    grad_norm: float
    iterations: int
    status: str
    trajectory: list = field(default_factory=list)  # (x, value, grad norm) per iteration


@dataclass
class OptimizationReport:
    minimizer: np.ndarray
    value: float
    grad_norm: float
    iterations: int
    status: str  # converged | no-critical-point-suspected | budget-exceeded
    starts: list
    hessian_eigenvalues: np.ndarray | None = None
    spread: float = 0.0  # max coordinate disagreement between converged starts
    twist_check: list = field(default_factory=list)  # (curve, FD component, cosine sum)

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "minimizer": [float(v) for v in self.minimizer],
            "value": float(self.value),
            "grad_norm": float(self.grad_norm),
            "iterations": int(self.iterations),
            "spread": float(self.spread),
            "hessian_eigenvalues": None
            if self.hessian_eigenvalues is None
            else [float(v) for v in self.hessian_eigenvalues],
            "twist_check": [
                {"curve": c, "fd": float(a), "cosine_sum": float(b)} for c, a, b in self.twist_check
            ],
            "starts": [
                {
                    "start": [float(v) for v in s.start],
                    "x": [float(v) for v in s.x],
                    "value": float(s.value),
                    "grad_norm": float(s.grad_norm),
                    "iterations": s.iterations,
                    "status": s.status,
                    "trajectory": [
                        {"x": [float(v) for v in x], "value": float(f), "grad_norm": float(g)}
                        for x, f, g in s.trajectory
                    ],
                }
                for s in self.starts
            ],
        }


# --------------------------------------------------------------------------
# finite differences in several variables


def fd_gradient(f, x, step: float = 1e-3, lower=None) -> np.ndarray:
    """Fourth order central gradient.

    Components whose stencil would cross ``lower`` (per coordinate, or None)
    fall back to a second order forward difference.
    """
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        if lower is not None and lower[i] is not None and x[i] - 2 * step <= lower[i]:
            g[i] = (-3 * f(x) + 4 * f(x + e) - f(x + 2 * e)) / (2.0 * step)
        else:
            g[i] = (-f(x + 2 * e) + 8 * f(x + e) - 8 * f(x - e) + f(x - 2 * e)) / (12.0 * step)
    return g


def _fn_lower(n):
    # lengths sit at even positions and must stay positive
    return [0.0 if i % 2 == 0 else None for i in range(n)]


def _hessian_central(f, x, h):
    n = x.size
    hm = np.zeros((n, n))
    f0 = f(x)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h
        hm[i, i] = (f(x + ei) - 2 * f0 + f(x - ei)) / (h * h)
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = h
            v = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4 * h * h)
            hm[i, j] = hm[j, i] = v
    return hm


def fd_hessian(f, x, step: float = 1e-3) -> np.ndarray:
    """Symmetric central-difference Hessian, Richardson extrapolated over step and step/2."""
    x = np.asarray(x, dtype=float)
    h1 = _hessian_central(f, x, step)
    h2 = _hessian_central(f, x, step / 2.0)
    hm = (4.0 * h2 - h1) / 3.0
    return (hm + hm.T) / 2.0


def hessian_check(f, x, step: float = 1e-3) -> np.ndarray:
    """Eigenvalues (ascending) of the FD Hessian at x."""
    return np.linalg.eigvalsh(fd_hessian(f, x, step))


# --------------------------------------------------------------------------
# one start


def _feasible(x) -> bool:
    return bool(np.all(x[0::2] >= LENGTH_FLOOR) and np.all(np.isfinite(x)))


def _clip(x):
    y = np.array(x, dtype=float)
    y[0::2] = np.maximum(y[0::2], LENGTH_FLOOR)
    return y


def _run_start(f, x0, tol, max_iter, grad_step) -> StartResult:
    x = _clip(x0)
    fx = f(x)
    g = fd_gradient(f, x, grad_step, _fn_lower(x.size))
    n = x.size
    hinv = np.eye(n)
    traj = [(x.copy(), fx, float(np.linalg.norm(g)))]
    stuck = 0
    newton = False
    for it in range(1, max_iter + 1):
        gn = float(np.linalg.norm(g))
        if gn <= tol:
            return StartResult(np.asarray(x0, float), x, fx, gn, it - 1, "converged", traj)
        pinned = np.any(x[0::2] <= LENGTH_FLOOR * (1 + 1e-9))
        if (np.linalg.norm(x) > ESCAPE_NORM or pinned) and gn >= ESCAPE_GRADIENT:
            stuck += 1
            if stuck >= ESCAPE_PATIENCE:
                return StartResult(np.asarray(x0, float), x, fx, gn, it - 1, "no-critical-point-suspected", traj)
        else:
            stuck = 0
        if not newton and gn < 1e-5:
            newton = True
        direction = None
        near_floor = bool(np.any(x[0::2] - 2e-3 <= LENGTH_FLOOR))
        if newton and not near_floor:
            hm = fd_hessian(f, x)
            try:
                w = np.linalg.eigvalsh(hm)
                if w[0] > 0:
                    direction = -np.linalg.solve(hm, g)
            except np.linalg.LinAlgError:
                direction = None
        if direction is None:
            direction = -hinv @ g
            if float(direction @ g) >= 0:
                hinv = np.eye(n)
                direction = -g
        # project out pushes through the length floor
        for i in range(0, n, 2):
            if x[i] <= LENGTH_FLOOR * (1 + 1e-9) and direction[i] < 0:
                direction[i] = 0.0
        dn = float(np.linalg.norm(direction))
        if dn == 0.0:
            continue
        step = min(1.0, MAX_STEP / dn)
        accepted = False
        while step > 1e-12:
            xn = _clip(x + step * direction)
            if _feasible(xn):
                try:
                    fn = f(xn)
                except mk.GeometryError:
                    fn = np.inf
                if fn <= fx + 1e-4 * float(g @ (xn - x)) or (newton and fn <= fx + 1e-13 * max(1.0, abs(fx))):
                    accepted = True
                    break
            step *= 0.5
        if not accepted:
            if newton and not near_floor:
                # f is at its noise floor and the gradient is still above tol
                return StartResult(np.asarray(x0, float), x, fx, gn, it, "stalled", traj)
            hinv = np.eye(n)
            newton = True
            continue
        gn_new = fd_gradient(f, xn, grad_step, _fn_lower(xn.size))
        s = xn - x
        y = gn_new - g
        sy = float(s @ y)
        if sy > 1e-14:
            rho = 1.0 / sy
            i_n = np.eye(n)
            hinv = (i_n - rho * np.outer(s, y)) @ hinv @ (i_n - rho * np.outer(y, s)) + rho * np.outer(s, s)
        x, fx, g = xn, fn, gn_new
        traj.append((x.copy(), fx, float(np.linalg.norm(g))))
    return StartResult(np.asarray(x0, float), x, fx, float(np.linalg.norm(g)), max_iter, "budget-exceeded", traj)


# --------------------------------------------------------------------------
# public operations


def random_starts(template: TeichmullerPoint, count: int, seed: int = 0) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        x = np.empty(2 * template.topology.n_curves)
        x[0::2] = rng.uniform(0.5, 3.0, size=template.topology.n_curves)
        x[1::2] = rng.uniform(-2.0, 2.0, size=template.topology.n_curves)
        out.append(x)
    return out


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("QUAKE_LAB_THREADS", "1")))
    except ValueError:
        return 1


def minimize(
    t: LaminationTuple,
    template: TeichmullerPoint,
    starts=None,
    tol: float = 1e-8,
    max_iter: int = 500,
    grad_step: float = 1e-3,
    seed: int = 0,
    n_starts: int = 5,
    check_twists: bool = True,
) -> OptimizationReport:
    """Minimize the length functional from several starts.

    ``template`` fixes the topology and boundary lengths; its own coordinates
    are not used unless no starts are given and ``n_starts`` is 0.
    """
    if t.is_empty:
        raise ValueError("the empty tuple has no minimum")
    if not is_sharp(t, template.topology.n_boundary):
        raise ValueError("tuple is not sharp")
    decomp = decompose(t, template.topology.n_boundary)

    def f(x):
        return total_length(template.with_coordinates(x), t, decomp).total

    if starts is None:
        starts = random_starts(template, n_starts, seed) if n_starts > 0 else [template.coordinates]
    starts = [np.asarray(s, dtype=float) for s in starts]
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(lambda s: _run_start(f, s, tol, max_iter, grad_step), starts))

    conv = [r for r in results if r.status == "converged"]
    if any(r.status == "no-critical-point-suspected" for r in results):
        status = "no-critical-point-suspected"
    elif len(conv) == len(results):
        status = "converged"
    else:
        status = "budget-exceeded"
    pool_ = conv or results
    best = min(pool_, key=lambda r: r.value)
    spread = 0.0
    if len(conv) > 1:
        xs = np.array([r.x for r in conv])
        spread = float((xs.max(axis=0) - xs.min(axis=0)).max())
    eig = None
    checks = []
    if status == "converged":
        eig = hessian_check(f, best.x)
        if check_twists:
            h0 = template.with_coordinates(best.x)
            g = fd_gradient(f, best.x, grad_step, _fn_lower(best.x.size))
            for j, word in enumerate(template.topology.pants_curves):
                checks.append((word, float(g[2 * j + 1]), kerckhoff_sum(h0, t, word)))
    iters = sum(r.iterations for r in results)
    return OptimizationReport(best.x, best.value, best.grad_norm, iters, status, results, eig, spread, checks)


def twist_hessian_lower_bound(point: TeichmullerPoint, t: LaminationTuple, j: int) -> float:
    """Lower bound for the second twist derivative along the j-th pants curve.

    Sums, over the closed leaves, weight times the bound built from the
    crossing angles with the lifts of the pants curve met along one period.
    Only compact tuples are supported.
    """
    kappa = point.topology.pants_curves[j]
    twist_leaf = realize_leaf(point, closed(kappa))
    total = 0.0
    for _, _, leaf in t.all_leaves():
        if leaf.kind != "closed":
            raise ValueError("the twist lower bound is implemented for closed leaves only")
        lines = [c.geodesic for _, c, _ in curve_crossings(point, leaf.word, [twist_leaf])]
        if lines:
            so = second_order_terms(axis_of(point.holonomy, leaf.word), lines)
            total += float(leaf.weight) * so.lower_bound
    return total


@dataclass
class Recovery:
    report: OptimizationReport
    point: TeichmullerPoint
    tau: object  # Cocycle of the left earthquake along the negative lamination
    cocycle_plus: object
    residual: float


def recover_representation(
    lam_plus: MeasuredLamination,
    lam_minus: MeasuredLamination,
    template: TeichmullerPoint,
    **kw,
) -> Recovery:
    """Metric h0 and translation cocycle tau for a filling pair.

    At the minimum the infinitesimal left earthquakes along the two
    laminations cancel as tangent vectors, i.e. their cocycles sum to a
    coboundary; the residual is the distance of that sum from coboundaries.
    """
    pair = LaminationTuple((lam_plus, lam_minus))
    if pair.is_empty:
        raise ValueError("the empty pair is excluded")
    if not is_sharp(pair, template.topology.n_boundary):
        raise ValueError("pair is not sharp")
    if not fills_surface(template, pair):
        raise NotFillingError(
            "recovery requires a filling pair: some simple closed curve misses both laminations"
        )
    report = minimize(pair, template, **kw)
    if report.status != "converged":
        raise BudgetExceeded(f"minimization ended with status {report.status}")
    h0 = template.with_coordinates(report.minimizer)
    e_minus = infinitesimal_cocycle(h0, lam_minus)
    e_plus = infinitesimal_cocycle(h0, lam_plus)
    residual, _ = coboundary_residual(e_minus + e_plus)
    return Recovery(report, h0, e_minus, e_plus, residual)


@dataclass
class ProbeReport:
    coordinate: int
    values: list
    lengths: list
    increasing_tail: bool
    constant: bool

    def to_json(self) -> dict:
        return {
            "coordinate": self.coordinate,
            "samples": [{"value": float(v), "length": float(f)} for v, f in zip(self.values, self.lengths)],
            "increasing_tail": self.increasing_tail,
            "constant": self.constant,
        }


def properness_probe(t: LaminationTuple, template: TeichmullerPoint, coordinate: int, values) -> ProbeReport:
    """Sample the functional along one FN coordinate ray from the template point."""
    decomp = decompose(t, template.topology.n_boundary)
    base = template.coordinates
    lengths = []
    for v in values:
        x = base.copy()
        x[coordinate] = v
        lengths.append(total_length(template.with_coordinates(x), t, decomp).total)
    arr = np.array(lengths)
    k = int(np.argmin(arr))
    tail = arr[k:]
    increasing = bool(len(tail) >= 2 and np.all(np.diff(tail) > 0))
    constant = bool(np.ptp(arr) <= 1e-9 * max(1.0, float(np.abs(arr).max())))
    return ProbeReport(coordinate, [float(v) for v in values], [float(v) for v in lengths], increasing, constant)
