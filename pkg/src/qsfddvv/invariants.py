"""Scalar curvature invariants of the horizontal space and normal bundle, plus an identity suite."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import InvalidArgument
from .rmap import (
    COMMUTATOR_ONLY,
    FULL,
    MapInstance,
    casorati,
    horizontal_curvature_tensor,
    normal_curvature_tensor,
    trace_zeta_norm_sq,
    zeta_norm_sq,
)

UNIT_TOL = 1e-9
IDENTITY_TOL = 1e-9
# residuals are absolute below this magnitude of the left side, relative above it
RELATIVE_THRESHOLD = 1.0


def _unit_horizontal(inst: MapInstance, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.shape != (inst.r,):
        raise InvalidArgument(f"X must have length r={inst.r}, got shape {X.shape}")
    norm = float(np.linalg.norm(X))
    if abs(norm - 1.0) > UNIT_TOL:
        raise InvalidArgument(f"X must be a unit vector, |X| = {norm!r}")
    return X


def _require_r2(inst: MapInstance) -> None:
    if inst.r < 2:
        raise InvalidArgument(f"normalization needs r >= 2, got r={inst.r}")


def ricci_from_tensor(T: np.ndarray, X: np.ndarray) -> float:
    return float(np.einsum("iabi,a,b->", T, X, X))


def ricci_horizontal(inst: MapInstance, X) -> float:
    """``Ric(X) = sum_i g1(R^M(e_i, X) X, e_i)`` for a unit horizontal ``X`` (frame coordinates)."""
    X = _unit_horizontal(inst, X)
    return ricci_from_tensor(horizontal_curvature_tensor(inst), X)


def scalar_from_tensor(T: np.ndarray) -> float:
    iu, ju = np.triu_indices(T.shape[0], k=1)
    return float(np.sum(T[iu, ju, ju, iu]))


def scalar_horizontal(inst: MapInstance) -> float:
    _require_r2(inst)
    return scalar_from_tensor(horizontal_curvature_tensor(inst))


def normalized_scalar(inst: MapInstance) -> float:
    r = inst.r
    return 2.0 * scalar_horizontal(inst) / (r * (r - 1))


def normal_scalar(inst: MapInstance, mode: str = FULL) -> float:
    """``sqrt(sum_{i<j} sum_{beta<gamma} R^perp_{ij beta gamma}^2)``."""
    _require_r2(inst)
    if inst.q == 0:
        return 0.0
    T = normal_curvature_tensor(inst, mode)
    iu, ju = np.triu_indices(inst.r, k=1)
    bu, gu = np.triu_indices(inst.q, k=1)
    block = T[iu, ju][:, bu, gu]
    return float(np.sqrt(np.sum(block**2)))


def normalized_normal_scalar(inst: MapInstance, mode: str = FULL) -> float:
    r = inst.r
    return normal_scalar(inst, mode) / (r * (r - 1))


def normal_scalar_from_zeta(zeta) -> float:
    """The commutator normal scalar curvature written directly in the zeta entries.

    Explicit loops over ``i<j``, ``beta<gamma`` and ``k``; kept independent of
    the tensor path in :func:`normal_scalar` so either can check the other.
    """
    zeta = np.asarray(zeta, dtype=float)
    q, r, _ = zeta.shape
    total = 0.0
    for b in range(q):
        for g in range(b + 1, q):
            for i in range(r):
                for j in range(i + 1, r):
                    s = 0.0
                    for k in range(r):
                        s += zeta[b, j, k] * zeta[g, i, k] - zeta[b, i, k] * zeta[g, j, k]
                    total += s * s
    return float(np.sqrt(total))


@dataclass(frozen=True)
class InvariantReport:
    ric_X: float
    tau_h: float
    rho_h: float
    tau_perp: float
    tau_perp_full: float
    rho_perp: float
    casorati: float
    trace_zeta_norm_sq: float

    def to_dict(self) -> dict:
        return asdict(self)


def invariant_report(inst: MapInstance, X=None) -> InvariantReport:
    """All scalar invariants; ``X`` defaults to the first horizontal frame vector."""
    _require_r2(inst)
    r = inst.r
    if X is None:
        X = np.eye(r)[0]
    X = _unit_horizontal(inst, X)
    T = horizontal_curvature_tensor(inst)
    tau = scalar_from_tensor(T)
    tau_perp = normal_scalar(inst, COMMUTATOR_ONLY)
    return InvariantReport(
        ric_X=ricci_from_tensor(T, X),
        tau_h=tau,
        rho_h=2.0 * tau / (r * (r - 1)),
        tau_perp=tau_perp,
        tau_perp_full=normal_scalar(inst, FULL),
        rho_perp=tau_perp / (r * (r - 1)),
        casorati=casorati(inst),
        trace_zeta_norm_sq=trace_zeta_norm_sq(inst),
    )


# --- identity suite -------------------------------------------------------------------


@dataclass(frozen=True)
class IdentityResult:
    name: str
    lhs: float
    rhs: float
    residual: float
    relative: bool


@dataclass(frozen=True)
class IdentityReport:
    results: tuple
    tol: float = IDENTITY_TOL

    @property
    def max_residual(self) -> float:
        return max((res.residual for res in self.results), default=0.0)

    @property
    def ok(self) -> bool:
        return self.max_residual <= self.tol

    def by_name(self) -> dict:
        return {res.name: res for res in self.results}

    def to_dict(self) -> dict:
        return {
            "tol": self.tol,
            "relative_threshold": RELATIVE_THRESHOLD,
            "max_residual": self.max_residual,
            "ok": self.ok,
            "results": [asdict(res) for res in self.results],
        }


def _result(name: str, lhs: float, rhs: float) -> IdentityResult:
    diff = abs(lhs - rhs)
    if abs(lhs) > RELATIVE_THRESHOLD:
        return IdentityResult(name, lhs, rhs, diff / abs(lhs), True)
    return IdentityResult(name, lhs, rhs, diff, False)


def norm_split_rhs(zeta: np.ndarray, first: int = 0) -> float:
    """Decomposition of ``|zeta|^2`` singling out the index ``first``."""
    q, r, _ = zeta.shape
    rest = [i for i in range(r) if i != first]
    tr = np.trace(zeta, axis1=1, axis2=2)
    total = 0.5 * float(tr @ tr)
    for b in range(q):
        z = zeta[b]
        split = z[first, first] - sum(z[i, i] for i in rest)
        total += 0.5 * split * split
        total += 2.0 * sum(z[first, i] ** 2 for i in rest)
        for a_pos, i in enumerate(rest):
            for j in rest[a_pos + 1 :]:
                total -= 2.0 * (z[i, i] * z[j, j] - z[i, j] ** 2)
    return float(total)


def trace_square_rhs(zeta: np.ndarray) -> float:
    q, r, _ = zeta.shape
    total = 0.0
    for b in range(q):
        d = np.diag(zeta[b])
        for i in range(r):
            for j in range(i + 1, r):
                total += (d[i] - d[j]) ** 2 + 2 * r * d[i] * d[j]
    return float(total)


def gauss_pair_sum(zeta: np.ndarray, start: int = 0) -> float:
    """``sum_beta sum_{start <= i < j} (zeta_ii zeta_jj - zeta_ij^2)``."""
    q, r, _ = zeta.shape
    total = 0.0
    for b in range(q):
        z = zeta[b]
        for i in range(start, r):
            for j in range(i + 1, r):
                total += z[i, i] * z[j, j] - z[i, j] ** 2
    return float(total)


def identity_suite(inst: MapInstance, tol: float = IDENTITY_TOL) -> IdentityReport:
    """Evaluate both sides of the algebraic identities behind the two inequalities.

    The curvature side always comes from the Gauss-equation tensor, the zeta
    side from explicit sums, so agreement cross-checks the ambient engine, the
    Gauss correction and the zeta bookkeeping together.
    """
    zeta = inst.zeta
    r, c = inst.r, inst.c
    P = inst.geometry.j_range
    jsq_all = float(np.sum(P**2))
    iu, ju = np.triu_indices(r, k=1)
    mask = iu >= 1
    jsq_tail = float(np.sum(P[:, iu[mask], ju[mask]] ** 2))

    norm_sq = zeta_norm_sq(inst)
    tr_sq = trace_zeta_norm_sq(inst)
    results = [_result("casorati", r * casorati(inst), norm_sq)]
    # the split holds for every distinguished index; report the worst
    worst = None
    for first in range(r):
        res = _result("norm_split", norm_sq, norm_split_rhs(zeta, first))
        if worst is None or res.residual > worst.residual:
            worst = res
    results.append(worst)
    results.append(_result("trace_square", (r - 1) * tr_sq, trace_square_rhs(zeta)))

    if r >= 2:
        T = horizontal_curvature_tensor(inst)
        tau = scalar_from_tensor(T)
        amb_side = 0.25 * c * r * (r - 1) + 0.75 * c * jsq_all
        results.append(_result("scalar_balance", amb_side, norm_sq - tr_sq + 2.0 * tau))
        results.append(
            _result(
                "scalar_expansion",
                tau,
                (r - 1) / 4.0 * (c / 2.0 * r) + 3.0 * c / 8.0 * jsq_all + gauss_pair_sum(zeta),
            )
        )
        ric_e1 = ricci_from_tensor(T, np.eye(r)[0])
        results.append(
            _result(
                "scalar_ricci_split",
                tau,
                c / 8.0 * (r - 1) * (r - 2)
                + 0.75 * c * jsq_tail
                + gauss_pair_sum(zeta, start=1)
                + ric_e1,
            )
        )
    return IdentityReport(tuple(results), tol)
