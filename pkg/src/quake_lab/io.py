"""Reading surface/lamination JSON and writing deterministic outputs."""

from __future__ import annotations

import csv
import io as _io
import json
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema

from . import SCHEMA_VERSION
from .lamination import LaminationTuple, MeasuredLamination, closed, spiral, validate_leaf
from .surface import TOPOLOGIES, TeichmullerPoint, make_point


class InputError(ValueError):
    """Malformed or invalid input document; the message names the field."""


@lru_cache(maxsize=1)
def schema() -> dict:
    text = resources.files("quake_lab").joinpath("schema/quake_lab.schema.json").read_text()
    return json.loads(text)


def _subschema(name: str) -> dict:
    root = schema()
    return {"$defs": root["$defs"], "$ref": f"#/$defs/{name}"}


def _field_path(path) -> str:
    out = "$"
    for part in path:
        out += f"[{part}]" if isinstance(part, int) else f".{part}"
    return out


def _load_json(source, label: str):
    if isinstance(source, (dict, list)):
        return source
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{label}: cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{label}: {path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _validate(doc, name: str, label: str) -> None:
    validator = jsonschema.Draft202012Validator(_subschema(name))
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        # the deepest error usually names the real culprit
        err = max(errors, key=lambda e: len(e.absolute_path))
        raise InputError(f"{label}: field {_field_path(err.absolute_path)}: {err.message}")
    version = doc.get("schema_version")
    if version.split(".")[0] != SCHEMA_VERSION.split(".")[0]:
        raise InputError(f"{label}: field $.schema_version: unsupported version {version!r} (expected {SCHEMA_VERSION})")


def load_surface(source) -> TeichmullerPoint:
    doc = _load_json(source, "surface")
    _validate(doc, "surface", "surface")
    topo = TOPOLOGIES[doc["topology"]]
    for key, n in (("boundary_lengths", topo.n_boundary), ("lengths", topo.n_curves), ("twists", topo.n_curves)):
        if len(doc[key]) != n:
            raise InputError(f"surface: field $.{key}: {topo.name} needs {n} entries, got {len(doc[key])}")
    return make_point(topo, doc["boundary_lengths"], doc["lengths"], doc["twists"])


def _leaf_from_json(d: dict):
    if d["kind"] == "closed":
        return closed(d["word"], d["weight"], d.get("id", ""))
    s, e = d["start"], d["end"]
    return spiral(d["arc"], (s["boundary"], s["sense"]), (e["boundary"], e["sense"]), d["weight"], d.get("id", ""))


def load_laminations(source, topology=None) -> LaminationTuple:
    doc = _load_json(source, "laminations")
    _validate(doc, "laminations", "laminations")
    lams = []
    for n, lam in enumerate(doc["laminations"]):
        leaves = []
        for k, d in enumerate(lam["leaves"]):
            where = f"$.laminations[{n}].leaves[{k}]"
            try:
                leaf = _leaf_from_json(d)
            except (ValueError, ZeroDivisionError) as exc:
                raise InputError(f"laminations: field {where}: {exc}") from None
            if leaf.weight <= 0:
                raise InputError(f"laminations: field {where}.weight: weight must be positive")
            if topology is not None:
                try:
                    validate_leaf(leaf, topology)
                except ValueError as exc:
                    raise InputError(f"laminations: field {where}: {exc}") from None
            leaves.append(leaf)
        lams.append(MeasuredLamination(tuple(leaves), lam.get("name", "")))
    return LaminationTuple(tuple(lams))


def surface_to_json(point: TeichmullerPoint) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "topology": point.topology.name,
        "boundary_lengths": [float(v) for v in point.boundary_lengths],
        "lengths": [float(v) for v in point.lengths],
        "twists": [float(v) for v in point.twists],
    }


def _leaf_to_json(leaf) -> dict:
    out = {"kind": leaf.kind}
    if leaf.leaf_id:
        out["id"] = leaf.leaf_id
    if leaf.kind == "closed":
        out["word"] = leaf.word
    else:
        out["arc"] = leaf.arc
        out["start"] = {"boundary": leaf.start[0], "sense": "+" if leaf.start[1] > 0 else "-"}
        out["end"] = {"boundary": leaf.end[0], "sense": "+" if leaf.end[1] > 0 else "-"}
    w = leaf.weight
    out["weight"] = str(w) if w.denominator != 1 else int(w)
    return out


def laminations_to_json(t: LaminationTuple) -> dict:
    lams = []
    for lam in t.laminations:
        d = {"leaves": [_leaf_to_json(leaf) for leaf in lam.leaves]}
        if lam.name:
            d["name"] = lam.name
        lams.append(d)
    return {"schema_version": SCHEMA_VERSION, "laminations": lams}


# --------------------------------------------------------------------------
# writers


def dumps(doc) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, doc) -> None:
    Path(path).write_text(dumps(doc))


def csv_text(header, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def write_csv(path, header, rows) -> None:
    Path(path).write_text(csv_text(header, rows))
