"""Command line front end: ``quake-lab <command> --surface S --laminations L --out DIR``.

Exit codes: 0 success, 2 invalid input, 3 a tolerance check failed,
4 a search or iteration budget ran out, 5 recovery asked for a non-filling
pair.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import SCHEMA_VERSION, __version__
from .circuital import NotSharpError, decompose
from .cover import SearchBoundExceeded
from .io import InputError, csv_text, dumps, load_laminations, load_surface, surface_to_json
from .lamination import LaminationTuple, is_sharp
from .length import total_length
from .optimize import BudgetExceeded, NotFillingError, minimize, properness_probe, recover_representation
from .surface import twist_flow
from .variation import fd_derivative, kerckhoff_sum

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_TOLERANCE = 3
EXIT_BUDGET = 4
EXIT_NOT_FILLING = 5

COMMANDS = ("eval-length", "decompose", "verify-hamiltonian", "minimize", "recover", "probe-properness")


class _Run:
    """Parsed inputs plus the output directory."""

    def __init__(self, args):
        self.args = args
        self.point = load_surface(args.surface)
        self.t = load_laminations(args.laminations, self.point.topology)
        self.out = Path(args.out)
        self.out.mkdir(parents=True, exist_ok=True)

    def header(self, command: str) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "quake_lab_version": __version__,
            "command": command,
            "seed": self.args.seed,
            "tol_rel": self.args.tol_rel,
            "surface": surface_to_json(self.point),
        }

    def write(self, name: str, text: str) -> None:
        (self.out / name).write_text(text)

    def require_sharp(self, t: LaminationTuple | None = None) -> None:
        t = self.t if t is None else t
        if not is_sharp(t, self.point.topology.n_boundary):
            raise NotSharpError("laminations: signed masses do not cancel at every boundary (tuple is not sharp)")


def _cmd_eval_length(run: _Run) -> int:
    run.require_sharp()
    decomp = decompose(run.t, run.point.topology.n_boundary)
    lb = total_length(run.point, run.t, decomp)
    doc = run.header("eval-length")
    doc["length"] = lb.to_json()
    run.write("length.json", dumps(doc))
    rows = [("compact", "", "", "", "", lb.compact)]
    for i, c in enumerate(lb.circuits):
        rows.append((f"circuit {i}", c.weight, c.rho_length, c.correction, c.boundary_sum, c.value))
    rows.append(("total", "", "", "", "", lb.total))
    run.write("length.csv", csv_text(("component", "omega", "rho_length", "correction", "B_h", "value"), rows))
    if run.args.plot:
        from .plotting import plot_flow

        ts = np.linspace(-2.0, 2.0, 41)
        for j, curve in enumerate(run.point.topology.pants_curves):
            vals = [total_length(twist_flow(run.point, j, float(s)), run.t, decomp).total for s in ts]
            plot_flow(run.out / f"length_flow_{curve}.svg", ts, vals, curve)
    return EXIT_OK


def _cmd_decompose(run: _Run) -> int:
    decomp = decompose(run.t, run.point.topology.n_boundary)
    doc = run.header("decompose")
    doc["decomposition"] = decomp.to_json()
    doc["decomposition_hash"] = decomp.digest()
    run.write("decomposition.json", dumps(doc))
    rows = []
    for i, c in enumerate(decomp.circuits):
        for e, d in c.steps:
            edge = decomp.graph.edges[e]
            rows.append((i, str(c.weight), edge.leaf_id, edge.lamination_index, edge.leaf_index, d))
    run.write("circuits.csv", csv_text(("circuit", "weight", "leaf_id", "lamination", "leaf", "direction"), rows))
    return EXIT_OK


def hamiltonian_rows(point, t, flip_sign: bool = False):
    """Per pants curve: FD derivative of the functional along the twist flow and the cosine sum."""
    decomp = decompose(t, point.topology.n_boundary)
    sign = -1.0 if flip_sign else 1.0
    rows = []
    for j, curve in enumerate(point.topology.pants_curves):
        fd = fd_derivative(lambda s, j=j: total_length(twist_flow(point, j, sign * s), t, decomp).total, 0.0)
        closed_form = kerckhoff_sum(point, t, curve) if not t.is_empty else 0.0
        abs_err = abs(fd.value - closed_form)
        rows.append((curve, fd.value, closed_form, abs_err, abs_err / (1.0 + abs(closed_form))))
    return rows


def _cmd_verify_hamiltonian(run: _Run) -> int:
    run.require_sharp()
    rows = hamiltonian_rows(run.point, run.t, run.args.debug_flip_twist_sign)
    tol = run.args.tol_rel
    table = [(c, fd, cf, a, r, "pass" if r <= tol else "fail") for c, fd, cf, a, r in rows]
    run.write("hamiltonian.csv", csv_text(("curve", "fd", "cosine_sum", "abs_error", "rel_error", "result"), table))
    doc = run.header("verify-hamiltonian")
    doc["flipped_twist_sign"] = bool(run.args.debug_flip_twist_sign)
    doc["rows"] = [
        {"curve": c, "fd": fd, "cosine_sum": cf, "abs_error": a, "rel_error": r, "pass": r <= tol}
        for c, fd, cf, a, r in rows
    ]
    run.write("hamiltonian.json", dumps(doc))
    return EXIT_OK if all(r <= tol for *_, r in rows) else EXIT_TOLERANCE


def _status_exit(status: str) -> int:
    return EXIT_OK if status == "converged" else EXIT_BUDGET


def _write_report(run: _Run, name: str, report, extra=None) -> None:
    doc = run.header(name)
    doc["optimization"] = report.to_json()
    if extra:
        doc.update(extra)
    run.write("optimization.json", dumps(doc))
    rows = []
    for i, s in enumerate(report.starts):
        for it, (x, f, g) in enumerate(s.trajectory):
            rows.append((i, it, *[float(v) for v in x], f, g))
    n = run.point.topology.n_curves
    coords = [f"{k}_{j + 1}" for j in range(n) for k in ("length", "twist")]
    run.write("trajectories.csv", csv_text(("start", "iteration", *coords, "value", "grad_norm"), rows))
    if run.args.plot:
        from .plotting import plot_convergence

        plot_convergence(run.out / "convergence.svg", report)


def _cmd_minimize(run: _Run) -> int:
    run.require_sharp()
    report = minimize(run.t, run.point, seed=run.args.seed, n_starts=run.args.starts)
    _write_report(run, "minimize", report)
    return _status_exit(report.status)


def _cmd_recover(run: _Run) -> int:
    if len(run.t) != 2:
        raise InputError(f"laminations: field $.laminations: recover needs exactly two laminations, got {len(run.t)}")
    lam_plus, lam_minus = run.t.laminations
    rec = recover_representation(lam_plus, lam_minus, run.point, seed=run.args.seed, n_starts=run.args.starts)
    h0 = rec.point
    extra = {
        "recovery": {
            "h0": surface_to_json(h0),
            "tau": {k: [float(v) for v in rec.tau.values[k]] for k in sorted(rec.tau.values)},
            "cocycle_plus": {k: [float(v) for v in rec.cocycle_plus.values[k]] for k in sorted(rec.cocycle_plus.values)},
            "residual": rec.residual,
            "residual_tolerance": 1e-6,
        }
    }
    _write_report(run, "recover", rec.report, extra)
    return EXIT_OK if rec.residual <= 1e-6 else EXIT_TOLERANCE


def _cmd_probe(run: _Run) -> int:
    run.require_sharp()
    n = run.point.topology.n_curves
    reports = []
    for j in range(n):
        reports.append(properness_probe(run.t, run.point, 2 * j, [1.0, 2.0, 4.0, 8.0, 16.0]))
        reports.append(properness_probe(run.t, run.point, 2 * j + 1, [0.0, 5.0, 10.0, 20.0, 40.0]))
    doc = run.header("probe-properness")
    doc["probes"] = [r.to_json() for r in reports]
    run.write("probe.json", dumps(doc))
    rows = [(r.coordinate, v, f) for r in reports for v, f in zip(r.values, r.lengths)]
    run.write("probe.csv", csv_text(("coordinate", "value", "length"), rows))
    if run.args.plot:
        from .plotting import plot_series

        for r in reports:
            plot_series(run.out / f"probe_{r.coordinate}.svg", [("", r.values, r.lengths)],
                        f"FN coordinate {r.coordinate}", "length functional")
    return EXIT_OK


_HANDLERS = {
    "eval-length": _cmd_eval_length,
    "decompose": _cmd_decompose,
    "verify-hamiltonian": _cmd_verify_hamiltonian,
    "minimize": _cmd_minimize,
    "recover": _cmd_recover,
    "probe-properness": _cmd_probe,
}


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quake-lab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--surface", required=True, help="surface JSON (topology, boundary lengths, FN coordinates)")
        sp.add_argument("--laminations", required=True, help="laminations JSON")
        sp.add_argument("--out", required=True, help="output directory")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol-rel", type=_positive, default=1e-5)
        sp.add_argument("--plot", action="store_true", help="also write SVG plots")
        if name in ("minimize", "recover"):
            sp.add_argument("--starts", type=int, default=5, help="number of random starts")
        if name == "verify-hamiltonian":
            sp.add_argument("--debug-flip-twist-sign", action="store_true",
                            help="run the flow with the opposite twist convention (every row should fail)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run = _Run(args)
        return _HANDLERS[args.command](run)
    except (InputError, NotSharpError) as exc:
        print(f"quake-lab: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NotFillingError as exc:
        print(f"quake-lab: {exc}", file=sys.stderr)
        return EXIT_NOT_FILLING
    except (SearchBoundExceeded, BudgetExceeded) as exc:
        print(f"quake-lab: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
