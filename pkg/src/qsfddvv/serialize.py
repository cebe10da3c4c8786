"""JSON/CSV I/O for instance files and reports."""

from __future__ import annotations

import csv
import io
import json
import warnings
from importlib import resources

import jsonschema
import numpy as np

from .ambient import SpaceFormAmbient
from .errors import InvalidArgument
from .quatlin import AdaptedFrame, QuatStructure, standard_quaternionic_structure
from .rmap import MapInstance, Sff, ZetaAsymmetryWarning, zeta_asymmetry

INSTANCE_SCHEMA_ID = "qsfddvv.instance/1"
REPORT_SCHEMA_ID = "qsfddvv.report/1"
ZETA_WARN_TOL = 1e-9
ZETA_REJECT_TOL = 1e-6
FRAME_TOL = 1e-8


class InstanceFileError(InvalidArgument):
    """An instance document violates the file format; ``invariant`` names the broken rule."""

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


def load_schema(name: str) -> dict:
    text = resources.files("qsfddvv").joinpath("schema", f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)


def dumps(doc) -> str:
    # float repr is the shortest string that round-trips, so parse(dump(x)) == x bit for bit
    return json.dumps(doc, indent=2, sort_keys=False, ensure_ascii=False, allow_nan=False) + "\n"


def instance_to_dict(inst: MapInstance) -> dict:
    n = inst.n
    J = inst.amb.J
    if J.equals(standard_quaternionic_structure(n // 4)):
        J_doc = "standard"
    else:
        J_doc = [a.tolist() for a in J]
    frame = inst.frame.columns
    frame_doc = "identity" if np.array_equal(frame, np.eye(n)) else frame.tolist()
    return {
        "c": inst.c,
        "r": inst.r,
        "n": n,
        "J": J_doc,
        "frame": frame_doc,
        "zeta": inst.zeta.tolist(),
    }


def instance_from_dict(doc: dict) -> MapInstance:
    try:
        jsonschema.validate(doc, load_schema("instance"))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InstanceFileError("schema", f"at {where}: {exc.message}") from None

    n, r = doc["n"], doc["r"]
    if n % 4:
        raise InstanceFileError("n divisible by 4", f"n={n}")
    if not 0 < r < n:
        raise InstanceFileError("0 < r < n", f"r={r}, n={n}")

    if doc["J"] == "standard":
        J = standard_quaternionic_structure(n // 4)
    else:
        mats = [np.asarray(a, dtype=float) for a in doc["J"]]
        if any(a.shape != (n, n) for a in mats):
            raise InstanceFileError("J shape", f"each J must be {n}x{n}")
        J = QuatStructure(*mats)
    try:
        amb = SpaceFormAmbient(doc["c"], J)
    except InvalidArgument as exc:
        raise InstanceFileError("J quaternionic", str(exc)) from None

    if doc["frame"] == "identity":
        frame_cols = np.eye(n)
    else:
        frame_cols = np.asarray(doc["frame"], dtype=float)
        if frame_cols.shape != (n, n):
            raise InstanceFileError("frame shape", f"frame must be {n}x{n}, got {frame_cols.shape}")
    frame = AdaptedFrame(r, frame_cols)
    res = frame.orthonormality_residual()
    if res > FRAME_TOL:
        raise InstanceFileError("frame orthonormality", f"residual {res:.3e} exceeds {FRAME_TOL:g}")

    try:
        zeta = np.asarray(doc["zeta"], dtype=float)
    except ValueError:
        raise InstanceFileError("zeta shape", "zeta is ragged") from None
    if zeta.shape != (n - r, r, r):
        raise InstanceFileError("zeta shape", f"expected {(n - r, r, r)} (q = n - r), got {zeta.shape}")
    asym = zeta_asymmetry(zeta)
    if asym > ZETA_REJECT_TOL:
        raise InstanceFileError("zeta symmetry", f"asymmetry {asym:.3e} exceeds {ZETA_REJECT_TOL:g}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ZetaAsymmetryWarning)
        sff = Sff(zeta)
    if asym > ZETA_WARN_TOL:
        warnings.warn(f"zeta asymmetry {asym:.3e}; symmetrized", ZetaAsymmetryWarning, stacklevel=2)
    return MapInstance(amb, frame, sff)


def parse_instance(text: str) -> MapInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFileError("json", f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return instance_from_dict(doc)


def build_report(verdicts, *, mode: str, tol: float, eq_tol: float, source: str | None = None) -> dict:
    return {
        "schema": REPORT_SCHEMA_ID,
        "source": source,
        "mode": mode,
        "tolerances": {"tol": tol, "eq_tol": eq_tol},
        "all_hold": all(v.holds for v in verdicts),
        "checks": [v.to_dict() for v in verdicts],
    }


def validate_report(doc: dict) -> None:
    jsonschema.validate(doc, load_schema("report"))


CSV_FIELDS = ("name", "lhs", "rhs", "gap", "holds", "equality", "mode", "tol", "eq_tol", "conditions")


def report_to_csv(report: dict) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for check in report["checks"]:
        row = {key: check[key] for key in CSV_FIELDS if key != "conditions"}
        for key in ("lhs", "rhs", "gap", "tol", "eq_tol"):
            row[key] = repr(float(row[key]))
        row["mode"] = row["mode"] or ""
        row["conditions"] = ";".join(
            f"{c['name']}|{c['satisfied']}|{float(c['residual'])!r}" for c in check["conditions"]
        )
        writer.writerow(row)
    return buf.getvalue()
