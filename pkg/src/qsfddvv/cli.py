"""Command-line driver.

Exit codes: 0 when every requested inequality holds, 2 when a violation was
found, 1 on bad input.

    qsfddvv gen --kind totally-geodesic --r 3 --q 2 --out inst.json
    qsfddvv check inst.json --theorem all
    qsfddvv fuzz --count 10000 --seed 42 --jobs 4 --out summary.json
    qsfddvv search --target lemma2 --r 2 --q 2
    qsfddvv suite --count 1000 --seed 7
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from .ddvv import EQ_TOL, TOL, theorem1_check, theorem2_check
from .errors import InvalidArgument
from .invariants import IDENTITY_TOL, identity_suite
from .rmap import COMMUTATOR_ONLY, FULL
from .search import (
    EQUALITY_KINDS,
    FRAME_MODES,
    TARGETS,
    FuzzConfig,
    construct_equality_instance,
    fuzz,
    maximize_violation,
    random_instance,
)
from .serialize import (
    InstanceFileError,
    build_report,
    dumps,
    instance_to_dict,
    parse_instance,
    report_to_csv,
)

EXIT_OK, EXIT_INPUT, EXIT_VIOLATION = 0, 1, 2
SEED_ENV = "DDVV_SEED"

log = logging.getLogger("qsfddvv")


class UsageError(Exception):
    pass


def _int_range(text: str) -> tuple[int, int]:
    try:
        parts = [int(p) for p in text.split(":")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or LO:HI, got {text!r}") from None
    if len(parts) == 1:
        return parts[0], parts[0]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected N or LO:HI, got {text!r}")
    return parts[0], parts[1]


def _float_range(text: str) -> tuple[float, float]:
    try:
        parts = [float(p) for p in text.split(":")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected X or LO:HI, got {text!r}") from None
    if len(parts) == 1:
        return parts[0], parts[0]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected X or LO:HI, got {text!r}")
    return parts[0], parts[1]


def _seed(args) -> int:
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return args.seed


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _parse_x(text: str | None, r: int) -> np.ndarray:
    if text is None:
        return np.eye(r)[0]
    parts = text.split(",")
    if len(parts) == 1:
        try:
            k = int(parts[0])
        except ValueError:
            raise UsageError(f"--x must be an index or a comma-separated vector, got {text!r}") from None
        if not 0 <= k < r:
            raise UsageError(f"--x index {k} out of range [0, {r})")
        return np.eye(r)[k]
    try:
        x = np.array([float(p) for p in parts])
    except ValueError:
        raise UsageError(f"--x vector has non-numeric entries: {text!r}") from None
    if x.shape != (r,):
        raise UsageError(f"--x vector must have r={r} entries, got {x.size}")
    norm = np.linalg.norm(x)
    if norm == 0:
        raise UsageError("--x vector must be nonzero")
    return x / norm


def _config(args, count: int | None = None) -> FuzzConfig:
    return FuzzConfig(
        count=count if count is not None else args.count,
        r_range=args.r,
        q_range=args.q,
        c_range=args.c_range,
        zeta_scale=args.scale,
        seed=_seed(args),
        frame_mode=args.frame,
    )


def cmd_check(args) -> int:
    try:
        text = Path(args.path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {args.path}: {exc.strerror}") from None
    inst = parse_instance(text)
    verdicts = []
    if args.theorem in ("1", "all"):
        X = _parse_x(args.x, inst.r)
        v = theorem1_check(inst, X, args.tol, args.eq_tol)
        verdicts.append(v)
    if args.theorem in ("2", "all"):
        verdicts.append(theorem2_check(inst, args.tol, args.eq_tol, mode=args.mode))
    report = build_report(verdicts, mode=args.mode, tol=args.tol, eq_tol=args.eq_tol, source=str(args.path))
    if args.theorem in ("1", "all"):
        report["checks"][0]["x"] = X.tolist()
    _write(report_to_csv(report) if args.format == "csv" else dumps(report), args.out)
    return EXIT_OK if report["all_hold"] else EXIT_VIOLATION


def cmd_fuzz(args) -> int:
    summary = fuzz(_config(args), jobs=args.jobs, tol=args.tol)
    _write(dumps(summary.to_dict()), args.out)
    log.info("fuzz: %d instances, min gaps %s", summary.instances_run, summary.min_gap)
    return EXIT_OK if summary.ok else EXIT_VIOLATION


def cmd_search(args) -> int:
    cfg = _config(args, count=max(args.restarts, 1))
    result = maximize_violation(
        args.target, cfg, iters=args.iters, restarts=args.restarts, free_c=args.free_c, free_frame=args.free_frame
    )
    doc = result.to_dict()
    doc["config"] = cfg.to_dict()
    doc["iters"] = args.iters
    doc["restarts"] = args.restarts
    _write(dumps(doc), args.out)
    log.info("search %s: best gap %.3e", args.target, result.best_gap)
    return EXIT_OK if result.best_gap >= -args.tol else EXIT_VIOLATION


def cmd_suite(args) -> int:
    cfg = _config(args)
    worst, failures = 0.0, []
    for i in range(cfg.count):
        rep = identity_suite(random_instance(cfg, i), IDENTITY_TOL)
        worst = max(worst, rep.max_residual)
        if not rep.ok:
            bad = max(rep.results, key=lambda res: res.residual)
            failures.append({"index": i, "identity": bad.name, "residual": bad.residual})
    doc = {
        "config": cfg.to_dict(),
        "tol": IDENTITY_TOL,
        "instances_run": cfg.count,
        "max_residual": worst,
        "failures": failures,
    }
    _write(dumps(doc), args.out)
    return EXIT_OK if not failures else EXIT_VIOLATION


def cmd_gen(args) -> int:
    params = {"frame": args.frame, "scale": args.scale}
    if args.lam is not None:
        params["lambda"] = args.lam
    inst = construct_equality_instance(args.kind, args.r, args.q, args.c, params, _seed(args))
    _write(dumps(instance_to_dict(inst)), args.out)
    return EXIT_OK


def _add_campaign_args(p, count_default: int, frame_default: str = "random") -> None:
    p.add_argument("--count", type=int, default=count_default)
    p.add_argument("--r", type=_int_range, default=(2, 5), help="rank, N or LO:HI")
    p.add_argument("--q", type=_int_range, default=(1, 5), help="normal directions, N or LO:HI")
    p.add_argument("--c-range", type=_float_range, default=(-4.0, 4.0), help="curvature, X or LO:HI")
    p.add_argument("--scale", type=float, default=2.0, help="zeta entries drawn from [-scale, scale]")
    p.add_argument("--seed", type=int, default=0, help=f"overridden by ${SEED_ENV}")
    p.add_argument("--frame", choices=FRAME_MODES, default=frame_default)
    p.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsfddvv", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="evaluate the inequalities on an instance file")
    p.add_argument("path")
    p.add_argument("--theorem", choices=("1", "2", "all"), default="all")
    p.add_argument("--x", help="horizontal frame index, or a comma-separated vector (normalized)")
    p.add_argument("--mode", choices=(FULL, COMMUTATOR_ONLY), default=COMMUTATOR_ONLY)
    p.add_argument("--tol", type=float, default=TOL)
    p.add_argument("--eq-tol", type=float, default=EQ_TOL)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("fuzz", help="random campaign over all checks")
    _add_campaign_args(p, 1000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--tol", type=float, default=TOL)
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("search", help="adversarial minimization of a gap")
    _add_campaign_args(p, 0)
    p.add_argument("--target", choices=TARGETS, required=True)
    p.add_argument("--iters", type=int, default=500)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--free-c", action="store_true", help="also search over c in --c-range")
    p.add_argument("--free-frame", action="store_true", help="also search over the adapted frame")
    p.add_argument("--tol", type=float, default=TOL)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("suite", help="identity residuals over random instances")
    _add_campaign_args(p, 1000)
    p.set_defaults(func=cmd_suite, r=(2, 6), q=(1, 6))

    p = sub.add_parser("gen", help="write an equality-case instance file")
    p.add_argument("--kind", choices=EQUALITY_KINDS, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--frame", choices=FRAME_MODES, default="identity")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = lambda msg, *a, **k: log.warning("%s", msg)
            return args.func(args)
    except InstanceFileError as exc:
        print(f"error: invalid instance: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (UsageError, InvalidArgument) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
