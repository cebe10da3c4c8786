"""Random instances, fuzz campaigns, adversarial gap minimization and equality constructions.

Every random draw is seeded from ``(seed, index, stream)`` through
:class:`numpy.random.SeedSequence`, so results do not depend on how work is
split across processes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .ambient import SpaceFormAmbient
from .ddvv import TOL, MatrixFamily, lemma2_check, theorem1_check, theorem2_check
from .errors import InvalidArgument
from .invariants import identity_suite
from .quatlin import (
    AdaptedFrame,
    orthonormalize,
    quaternionic_basis,
    random_orthogonal,
    standard_quaternionic_structure,
)
from .rmap import MapInstance, Sff
from .serialize import instance_to_dict

FRAME_MODES = ("identity", "random", "j-invariant")
TARGETS = ("theorem1", "theorem2", "lemma2")
RANDOM_X_PER_INSTANCE = 8

# stream labels for SeedSequence entropy
_INSTANCE, _XS, _EQUALITY = 0, 1, 2


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *key]))


@dataclass(frozen=True)
class FuzzConfig:
    count: int = 1000
    r_range: tuple = (2, 5)
    q_range: tuple = (1, 5)
    c_range: tuple = (-4.0, 4.0)
    zeta_scale: float = 2.0
    seed: int = 0
    frame_mode: str = "random"

    def __post_init__(self):
        object.__setattr__(self, "r_range", tuple(int(v) for v in self.r_range))
        object.__setattr__(self, "q_range", tuple(int(v) for v in self.q_range))
        object.__setattr__(self, "c_range", tuple(float(v) for v in self.c_range))
        if self.count < 1:
            raise InvalidArgument(f"count must be >= 1, got {self.count}")
        for name, (lo, hi) in (("r_range", self.r_range), ("q_range", self.q_range), ("c_range", self.c_range)):
            if lo > hi:
                raise InvalidArgument(f"{name} is empty: {lo} > {hi}")
        if self.r_range[0] < 2:
            raise InvalidArgument("r must be at least 2")
        if self.q_range[0] < 1:
            raise InvalidArgument("q must be at least 1")
        if self.zeta_scale < 0:
            raise InvalidArgument("zeta_scale must be nonnegative")
        if self.seed < 0:
            raise InvalidArgument("seed must be nonnegative")
        if self.frame_mode not in FRAME_MODES:
            raise InvalidArgument(f"frame_mode must be one of {FRAME_MODES}")

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("r_range", "q_range", "c_range"):
            d[key] = list(d[key])
        return d


def _uniform_or_fixed(rng: np.random.Generator, lo: float, hi: float) -> float:
    return float(lo) if lo == hi else float(rng.uniform(lo, hi))


def random_symmetric(rng: np.random.Generator, q: int, r: int, scale: float) -> np.ndarray:
    """``q`` symmetric ``r x r`` matrices with i.i.d. uniform upper triangles."""
    raw = rng.uniform(-scale, scale, size=(q, r, r)) if scale > 0 else np.zeros((q, r, r))
    upper = np.triu(raw)
    return upper + np.swapaxes(np.triu(raw, 1), 1, 2)


def make_frame(mode: str, n: int, r: int, J, rng: np.random.Generator) -> AdaptedFrame:
    if mode == "identity":
        return AdaptedFrame(r, np.eye(n))
    if mode == "random":
        return AdaptedFrame(r, random_orthogonal(n, rng))
    if mode == "j-invariant":
        return AdaptedFrame(r, quaternionic_basis(J, rng))
    raise InvalidArgument(f"unknown frame mode {mode!r}")


def target_dimension(r: int, q: int) -> int:
    return 4 * math.ceil((r + q) / 4)


def random_instance(cfg: FuzzConfig, index: int) -> MapInstance:
    """Deterministic in ``(cfg.seed, index)``.

    The target has dimension ``n = 4 ceil((r+q)/4)``; the first ``q`` normal
    directions carry random zeta entries and any padding directions carry zero.
    """
    if index < 0:
        raise InvalidArgument("index must be nonnegative")
    rng = _rng(cfg.seed, _INSTANCE, index)
    r = int(rng.integers(cfg.r_range[0], cfg.r_range[1] + 1))
    q = int(rng.integers(cfg.q_range[0], cfg.q_range[1] + 1))
    c = _uniform_or_fixed(rng, *cfg.c_range)
    n = target_dimension(r, q)
    J = standard_quaternionic_structure(n // 4)
    frame = make_frame(cfg.frame_mode, n, r, J, rng)
    zeta = np.zeros((n - r, r, r))
    zeta[:q] = random_symmetric(rng, q, r, cfg.zeta_scale)
    return MapInstance(SpaceFormAmbient(c, J), frame, Sff(zeta))


def random_unit_vectors(rng: np.random.Generator, count: int, r: int) -> np.ndarray:
    X = rng.standard_normal((count, r))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def traceless_family(zeta: np.ndarray) -> MatrixFamily:
    return MatrixFamily(zeta).traceless()


# --- fuzz campaign --------------------------------------------------------------------


def evaluate_instance(cfg: FuzzConfig, index: int, tol: float = TOL, eq_tol: float = 1e-8) -> dict:
    """Run every check on one instance; the result is a plain picklable dict."""
    inst = random_instance(cfg, index)
    r = inst.r
    xs = np.vstack([np.eye(r), random_unit_vectors(_rng(cfg.seed, _XS, index), RANDOM_X_PER_INSTANCE, r)])
    t1_gap, t1_x, eq_hits, mismatches = math.inf, None, 0, 0
    for k, X in enumerate(xs):
        v = theorem1_check(inst, X, tol, eq_tol)
        if v.gap < t1_gap:
            t1_gap, t1_x = v.gap, k
        eq_hits += v.equality
        mismatches += v.equality != v.conditions_met
    v2 = theorem2_check(inst, tol, eq_tol)
    vl = lemma2_check(traceless_family(inst.zeta), tol, eq_tol)
    ids = identity_suite(inst)
    return {
        "index": index,
        "r": r,
        "q": inst.q,
        "c": inst.c,
        "gaps": {"theorem1": t1_gap, "theorem2": v2.gap, "lemma2": vl.gap},
        "theorem1_worst_x": t1_x,
        "theorem1_checks": len(xs),
        "equality": {"theorem1": eq_hits, "theorem2": int(v2.equality), "lemma2": int(vl.equality)},
        "theorem1_mismatches": mismatches,
        "identity_max_residual": ids.max_residual,
        "identity_worst": max(ids.results, key=lambda res: res.residual).name,
    }


def _evaluate_chunk(args) -> list:
    cfg, indices, tol = args
    return [evaluate_instance(cfg, i, tol) for i in indices]


@dataclass
class FuzzSummary:
    config: dict
    instances_run: int
    checks_run: dict
    min_gap: dict
    violations: list
    equality_hits: int
    equality_hits_by_check: dict
    theorem1_condition_mismatches: int
    max_identity_residual: float
    identity_failures: list
    worst: dict
    worst_instance: dict = field(repr=False)
    tol: float = TOL

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return asdict(self)


def summarize(cfg: FuzzConfig, results: list, tol: float = TOL, identity_tol: float = 1e-9) -> FuzzSummary:
    results = sorted(results, key=lambda res: res["index"])
    min_gap = {t: math.inf for t in TARGETS}
    worst = {"check": None, "index": None, "gap": math.inf}
    violations, identity_failures = [], []
    eq_by = {t: 0 for t in TARGETS}
    mismatches, max_id = 0, 0.0
    checks = {t: 0 for t in TARGETS}
    for res in results:
        for name, gap in res["gaps"].items():
            min_gap[name] = min(min_gap[name], gap)
            if gap < worst["gap"]:
                worst = {"check": name, "index": res["index"], "gap": gap}
            if gap < -tol:
                violations.append({"index": res["index"], "check": name, "gap": gap})
            eq_by[name] += res["equality"][name]
        checks["theorem1"] += res["theorem1_checks"]
        checks["theorem2"] += 1
        checks["lemma2"] += 1
        mismatches += res["theorem1_mismatches"]
        max_id = max(max_id, res["identity_max_residual"])
        if res["identity_max_residual"] > identity_tol:
            identity_failures.append(
                {"index": res["index"], "identity": res["identity_worst"], "residual": res["identity_max_residual"]}
            )
    worst_instance = instance_to_dict(random_instance(cfg, worst["index"])) if results else {}
    return FuzzSummary(
        config=cfg.to_dict(),
        instances_run=len(results),
        checks_run=checks,
        min_gap=min_gap,
        violations=violations,
        equality_hits=sum(eq_by.values()),
        equality_hits_by_check=eq_by,
        theorem1_condition_mismatches=mismatches,
        max_identity_residual=max_id,
        identity_failures=identity_failures,
        worst=worst,
        worst_instance=worst_instance,
        tol=tol,
    )


def fuzz(cfg: FuzzConfig, jobs: int = 1, tol: float = TOL) -> FuzzSummary:
    """Evaluate ``cfg.count`` instances; the summary is identical for any ``jobs``."""
    indices = list(range(cfg.count))
    if jobs <= 1:
        results = _evaluate_chunk((cfg, indices, tol))
    else:
        size = max(1, math.ceil(len(indices) / (4 * jobs)))
        chunks = [(cfg, indices[k : k + size], tol) for k in range(0, len(indices), size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = [res for part in pool.map(_evaluate_chunk, chunks) for res in part]
    return summarize(cfg, results, tol)


# --- adversarial search ---------------------------------------------------------------


class _Objective:
    """Gap of one target as a function of the free zeta parameters.

    The parameter vector holds the upper triangles of all ``n - r`` normal
    matrices.  Because every gap is homogeneous in zeta, the decoded zeta (or
    its traceless part, for lemma2) is rescaled to a fixed Frobenius norm;
    otherwise the search would just shrink zeta to zero.
    """

    def __init__(self, target: str, inst: MapInstance, radius: float, free_c=None):
        self.target = target
        self.base = inst
        self.radius = radius
        self.free_c = free_c
        self.q, self.r = inst.zeta.shape[:2]
        self.iu = np.triu_indices(self.r)
        self.X = np.eye(self.r)[0]

    def encode(self, zeta: np.ndarray, c: float | None = None) -> np.ndarray:
        x = zeta[:, self.iu[0], self.iu[1]].ravel()
        if self.free_c is not None:
            x = np.append(x, c)
        return x

    def decode(self, x: np.ndarray) -> tuple[np.ndarray, float]:
        c = self.base.c
        if self.free_c is not None:
            x, c = x[:-1], float(np.clip(x[-1], *self.free_c))
        z = np.zeros((self.q, self.r, self.r))
        z[:, self.iu[0], self.iu[1]] = x.reshape(self.q, -1)
        z = z + np.swapaxes(np.triu(z, 1), 1, 2)
        if self.target == "lemma2":
            z = z - (np.trace(z, axis1=1, axis2=2) / self.r)[:, None, None] * np.eye(self.r)
        norm = float(np.sqrt(np.sum(z * z)))
        if norm > 0 and self.radius > 0:
            z *= self.radius / norm
        return z, c

    def instance(self, x: np.ndarray) -> MapInstance:
        z, c = self.decode(x)
        if self.free_c is not None and c != self.base.c:
            return MapInstance(SpaceFormAmbient(c, self.base.amb.J), self.base.frame, Sff(z))
        return self.base.with_zeta(z)

    def verdict(self, x: np.ndarray):
        inst = self.instance(x)
        if self.target == "theorem1":
            return theorem1_check(inst, self.X)
        if self.target == "theorem2":
            return theorem2_check(inst)
        return lemma2_check(MatrixFamily(inst.zeta))

    def __call__(self, x: np.ndarray) -> float:
        return self.verdict(x).gap


def _fd_gradient(f, x: np.ndarray, h: float) -> np.ndarray:
    g = np.empty_like(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        g[k] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def _descend(f, x: np.ndarray, iters: int, h: float, retract=None) -> tuple[np.ndarray, float, int]:
    """Finite-difference steepest descent with step halving; stops early when no step helps."""
    fx = f(x)
    step = 1.0
    taken = 0
    for _ in range(iters - 1):
        g = _fd_gradient(f, x, h)
        gn = float(np.linalg.norm(g))
        if gn == 0.0 or not np.isfinite(gn):
            break
        t = min(2.0 * step, 1.0)
        improved = False
        while t > 1e-14:
            cand = x - (t / gn) * g * max(1.0, float(np.linalg.norm(x)))
            if retract is not None:
                cand = retract(cand)
            fc = f(cand)
            if fc < fx:
                x, fx, step, improved = cand, fc, t, True
                break
            t *= 0.5
        if not improved:
            break
        taken += 1
    return x, fx, taken


@dataclass
class SearchResult:
    target: str
    best_gap: float
    best_restart: int
    instance: MapInstance = field(repr=False)
    verdict: object = field(repr=False)
    restart_gaps: list
    steps: list

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "best_gap": self.best_gap,
            "best_restart": self.best_restart,
            "restart_gaps": list(self.restart_gaps),
            "steps": list(self.steps),
            "verdict": self.verdict.to_dict(),
            "instance": instance_to_dict(self.instance),
        }


def maximize_violation(
    target: str,
    cfg: FuzzConfig,
    iters: int = 500,
    restarts: int = 32,
    *,
    free_c: bool = False,
    free_frame: bool = False,
) -> SearchResult:
    """Search for the most negative gap of ``target``.

    Restart ``k`` starts from ``random_instance(cfg, k)``.  zeta (and, when
    unfrozen, ``c`` within ``cfg.c_range`` and the frame) is moved by
    central-difference steepest descent on the gap, with step halving.  The
    frame is updated by a perturb-and-reorthonormalize retraction.
    """
    if target not in TARGETS:
        raise InvalidArgument(f"target must be one of {TARGETS}, got {target!r}")
    if iters < 1 or restarts < 1:
        raise InvalidArgument("iters and restarts must be >= 1")
    h = 1e-5 * max(cfg.zeta_scale, 1e-12)
    best = None
    restart_gaps, steps = [], []
    for k in range(restarts):
        start = random_instance(cfg, k)
        if target == "lemma2":
            z0 = np.asarray(traceless_family(start.zeta).matrices)
        else:
            z0 = start.zeta
        radius = float(np.sqrt(np.sum(z0 * z0)))
        objective = _Objective(target, start, radius, cfg.c_range if free_c else None)
        x0 = objective.encode(start.zeta, start.c)
        x, fx, taken = _descend(objective, x0, iters, h)
        inst = objective.instance(x)
        if free_frame and iters > 1:
            inst, fx, more = _descend_frame(target, inst, objective, x, iters, h)
            taken += more
        verdict = _final_verdict(target, inst, objective.X)
        restart_gaps.append(verdict.gap)
        steps.append(taken)
        if best is None or verdict.gap < best[0]:
            best = (verdict.gap, k, inst, verdict)
    return SearchResult(target, best[0], best[1], best[2], best[3], restart_gaps, steps)


def _final_verdict(target: str, inst: MapInstance, X: np.ndarray):
    if target == "theorem1":
        return theorem1_check(inst, X)
    if target == "theorem2":
        return theorem2_check(inst)
    return lemma2_check(traceless_family(inst.zeta))


def _descend_frame(target, inst, objective, x, iters, h):
    """Second phase: move the frame through a QR retraction with zeta held fixed."""
    n = inst.n
    zeta = inst.zeta

    def build(y):
        cols = orthonormalize(inst.frame.columns + y.reshape(n, n))
        return MapInstance(inst.amb, AdaptedFrame(inst.r, cols), Sff(zeta))

    def f(y):
        return _final_verdict(target, build(y), objective.X).gap

    y, fy, taken = _descend(f, np.zeros(n * n), iters, h)
    return build(y), fy, taken


# --- equality constructions -----------------------------------------------------------

EQUALITY_KINDS = ("totally-geodesic", "umbilical", "theorem1-general")


def construct_equality_instance(
    kind: str, r: int, q: int, c: float = 0.0, params: dict | None = None, seed: int = 0
) -> MapInstance:
    """Instance on which the Ricci inequality is an equality at ``X = e_1``.

    ``params`` may hold ``scale`` (entry range, default 1), ``lambda`` (umbilical
    factors, scalar or one per normal direction) and ``frame`` (a frame mode).
    """
    params = dict(params or {})
    if r < 2 or q < 1:
        raise InvalidArgument(f"need r >= 2 and q >= 1, got r={r}, q={q}")
    if kind not in EQUALITY_KINDS:
        raise InvalidArgument(f"kind must be one of {EQUALITY_KINDS}, got {kind!r}")
    rng = _rng(seed, _EQUALITY)
    n = target_dimension(r, q)
    J = standard_quaternionic_structure(n // 4)
    frame = make_frame(params.get("frame", "identity"), n, r, J, rng)
    scale = float(params.get("scale", 1.0))
    zeta = np.zeros((n - r, r, r))
    if kind == "umbilical":
        if r != 2:
            raise InvalidArgument("umbilical equality needs r = 2 (otherwise lambda = (r-1) lambda forces 0)")
        lam = params.get("lambda")
        lam = rng.uniform(-scale, scale, size=q) if lam is None else np.broadcast_to(np.asarray(lam, float), (q,))
        zeta[:q] = lam[:, None, None] * np.eye(r)
    elif kind == "theorem1-general":
        z = random_symmetric(rng, q, r, scale)
        z[:, 0, :] = 0.0
        z[:, :, 0] = 0.0
        z[:, 0, 0] = np.trace(z, axis1=1, axis2=2)
        zeta[:q] = z
    return MapInstance(SpaceFormAmbient(c, J), frame, Sff(zeta))
