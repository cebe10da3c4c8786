"""Inequality verdicts.

Every check returns a :class:`Verdict` whose ``gap`` is ``rhs - lhs`` arranged
so that ``gap >= 0`` means the inequality holds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ambient import real_space_form_curvature
from .errors import InvalidArgument, UndefinedRatioError
from .invariants import (
    _unit_horizontal,
    normal_scalar,
    ricci_from_tensor,
    scalar_from_tensor,
)
from .rmap import (
    COMMUTATOR_ONLY,
    FULL,
    MapInstance,
    Sff,
    commutator_part,
    gauss_correction,
    horizontal_curvature_tensor,
    trace_zeta,
)

TOL = 1e-9
EQ_TOL = 1e-8
SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class Condition:
    name: str
    satisfied: bool
    residual: float


@dataclass(frozen=True)
class Verdict:
    name: str
    lhs: float
    rhs: float
    gap: float
    holds: bool
    equality: bool
    conditions: tuple = ()
    tol: float = TOL
    eq_tol: float = EQ_TOL
    mode: str | None = None
    diagnostics: dict = field(default_factory=dict, compare=False)

    @classmethod
    def build(cls, name, lhs, rhs, tol=TOL, eq_tol=EQ_TOL, conditions=(), mode=None, diagnostics=None):
        lhs, rhs = float(lhs), float(rhs)
        gap = rhs - lhs
        return cls(
            name=name,
            lhs=lhs,
            rhs=rhs,
            gap=gap,
            holds=gap >= -tol,
            equality=abs(gap) <= eq_tol,
            conditions=tuple(conditions),
            tol=tol,
            eq_tol=eq_tol,
            mode=mode,
            diagnostics=dict(diagnostics or {}),
        )

    @property
    def conditions_met(self) -> bool:
        return all(cond.satisfied for cond in self.conditions)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "holds": self.holds,
            "equality": self.equality,
            "conditions": [
                {"name": c.name, "satisfied": c.satisfied, "residual": c.residual}
                for c in self.conditions
            ],
            "mode": self.mode,
            "tol": self.tol,
            "eq_tol": self.eq_tol,
            "diagnostics": dict(self.diagnostics),
        }


def householder_to_first(X: np.ndarray) -> np.ndarray:
    """Symmetric orthogonal ``H`` with ``H X = e_1`` (identity when ``X`` already is ``e_1``)."""
    r = X.shape[0]
    v = X.copy()
    v[0] -= 1.0
    vv = float(v @ v)
    if vv < 1e-30:
        return np.eye(r)
    return np.eye(r) - (2.0 / vv) * np.outer(v, v)


def theorem1_conditions(zeta: np.ndarray, X: np.ndarray, eq_tol: float = EQ_TOL) -> tuple:
    """Equality conditions for the Ricci inequality, evaluated in a frame with ``e_1 = X``."""
    H = householder_to_first(X)
    rotated = np.einsum("ai,bij,jc->bac", H, zeta, H)
    tr = np.trace(zeta, axis1=1, axis2=2)
    off = float(np.max(np.abs(rotated[:, 0, 1:]))) if rotated.size and zeta.shape[1] > 1 else 0.0
    split = float(np.max(np.abs(rotated[:, 0, 0] - 0.5 * tr))) if zeta.shape[0] else 0.0
    return (
        Condition("zeta(X, Y) = 0 for Y orthogonal to X", off <= eq_tol, off),
        Condition("zeta(X, X) = trace(zeta) / 2", split <= eq_tol, split),
    )


def _check_r(r: int) -> None:
    if r < 2:
        raise InvalidArgument(f"need r >= 2, got r={r}")


def theorem1_check(inst: MapInstance, X, tol: float = TOL, eq_tol: float = EQ_TOL) -> Verdict:
    """``4 Ric(X) <= c(r-1) + |trace zeta|^2 + 3c sum_a sum_i <J_a F*X, F*e_i>^2``."""
    _check_r(inst.r)
    X = _unit_horizontal(inst, X)
    c, r = inst.c, inst.r
    ric = ricci_from_tensor(horizontal_curvature_tensor(inst), X)
    jx = np.einsum("a,xai->xi", X, inst.geometry.j_range)
    jsq = float(np.sum(jx**2))
    tr = trace_zeta(inst)
    rhs = c * (r - 1) + float(tr @ tr) + 3.0 * c * jsq
    conditions = theorem1_conditions(inst.zeta, X, eq_tol)
    return Verdict.build(
        "theorem1",
        4.0 * ric,
        rhs,
        tol,
        eq_tol,
        conditions,
        diagnostics={"ricci": ric, "j_sum_sq": jsq},
    )


def lemma2_sides(zeta: np.ndarray) -> tuple[float, float]:
    """Return ``(diagonal/off-diagonal side, 2r sqrt(commutator side))``."""
    q, r, _ = zeta.shape
    iu, ju = np.triu_indices(r, k=1)
    diag = np.diagonal(zeta, axis1=1, axis2=2)
    quad = float(np.sum((diag[:, iu] - diag[:, ju]) ** 2)) + 2 * r * float(np.sum(zeta[:, iu, ju] ** 2))
    if q < 2:
        return quad, 0.0
    comm = commutator_part(zeta)
    bu, gu = np.triu_indices(q, k=1)
    total = float(np.sum(comm[iu, ju][:, bu, gu] ** 2))
    return quad, 2.0 * r * float(np.sqrt(total))


def theorem2_check(
    inst: MapInstance, tol: float = TOL, eq_tol: float = EQ_TOL, mode: str = COMMUTATOR_ONLY
) -> Verdict:
    """``rho_perp + rho_h <= |trace zeta|^2 / r^2 + c/4 + 3c/(4r(r-1)) sum <J_a F*e_i, F*e_j>^2``.

    By default ``rho_perp`` uses the commutator-only normal curvature; the
    value with the ambient term included is always attached as a diagnostic.
    ``mode="full"`` puts the full value on the left side instead.
    """
    _check_r(inst.r)
    if mode not in (FULL, COMMUTATOR_ONLY):
        raise InvalidArgument(f"unknown mode {mode!r}")
    if inst.q < 1:
        raise InvalidArgument("need at least one normal direction")
    c, r = inst.c, inst.r
    norm = r * (r - 1)
    tau_h = scalar_from_tensor(horizontal_curvature_tensor(inst))
    rho_h = 2.0 * tau_h / norm
    tau_perp = normal_scalar(inst, COMMUTATOR_ONLY)
    tau_perp_full = normal_scalar(inst, FULL)
    rho_perp = (tau_perp_full if mode == FULL else tau_perp) / norm
    jsq = inst.geometry.j_range_sq_total
    tr = trace_zeta(inst)
    rhs = float(tr @ tr) / r**2 + 0.25 * c + 3.0 * c / (4.0 * norm) * jsq
    quad, _ = lemma2_sides(inst.zeta)
    diagnostics = {
        "rho_perp": rho_perp,
        "rho_h": rho_h,
        "tau_perp": tau_perp,
        "rho_perp_commutator": tau_perp / norm,
        "rho_perp_full": tau_perp_full / norm,
        "rho_perp_doubled": 2.0 * tau_perp / norm,
        "j_sum_sq": jsq,
        "commutator_bound_lhs": r * r * (r - 1) * tau_perp / norm,
        "commutator_bound_rhs": quad,
    }
    return Verdict.build(
        "theorem2",
        rho_perp + rho_h,
        rhs,
        tol,
        eq_tol,
        mode=mode,
        diagnostics=diagnostics,
    )


@dataclass(frozen=True)
class MatrixFamily:
    """Symmetric ``r x r`` matrices ``A_1 .. A_q`` stacked as shape ``(q, r, r)``."""

    matrices: np.ndarray

    def __post_init__(self):
        A = np.array(self.matrices, dtype=float)
        if A.ndim != 3 or A.shape[1] != A.shape[2]:
            raise InvalidArgument(f"family must have shape (q, r, r), got {A.shape}")
        if A.shape[0] == 0:
            raise InvalidArgument("family must be nonempty")
        asym = float(np.max(np.abs(A - np.swapaxes(A, 1, 2))))
        if asym > SYMMETRY_TOL:
            raise InvalidArgument(f"family members must be symmetric (residual {asym:.3e})")
        A.setflags(write=False)
        object.__setattr__(self, "matrices", A)

    @classmethod
    def of(cls, *mats) -> "MatrixFamily":
        shapes = {np.shape(m) for m in mats}
        if len(shapes) != 1:
            raise InvalidArgument(f"family members have different shapes: {sorted(shapes)}")
        return cls(np.stack([np.asarray(m, dtype=float) for m in mats]))

    @property
    def q(self) -> int:
        return self.matrices.shape[0]

    @property
    def r(self) -> int:
        return self.matrices.shape[1]

    def traceless(self) -> "MatrixFamily":
        A = self.matrices
        tr = np.trace(A, axis1=1, axis2=2) / self.r
        return MatrixFamily(A - tr[:, None, None] * np.eye(self.r))


def lemma2_check(fam: MatrixFamily, tol: float = TOL, eq_tol: float = EQ_TOL) -> Verdict:
    """Commutator bound on a symmetric family.

    The stored ``rhs`` is the sum of squared diagonal differences and
    off-diagonal entries, the stored ``lhs`` is ``2r`` times the square root of
    the summed squared commutator entries, so ``gap >= 0`` when the bound holds.
    """
    quad, comm = lemma2_sides(fam.matrices)
    return Verdict.build("lemma2", comm, quad, tol, eq_tol)


def ddvv_matrix_ratio(fam: MatrixFamily) -> float:
    """``sum_{r,s} |[A_r, A_s]|^2 / (sum_r |A_r|^2)^2``."""
    A = fam.matrices
    denom = float(np.sum(A * A)) ** 2
    if denom == 0.0:
        raise UndefinedRatioError("all matrices in the family vanish")
    prod = np.einsum("aij,bjk->abik", A, A)
    comm = prod - np.swapaxes(prod, 0, 1)
    return float(np.sum(comm * comm)) / denom


@dataclass(frozen=True)
class SubmanifoldData:
    """Isometric immersion into a real space form of curvature ``kappa``."""

    kappa: float
    sff: Sff

    @property
    def r(self) -> int:
        return self.sff.r


def _real_space_form_tensor(kappa: float, r: int) -> np.ndarray:
    basis = np.eye(r)
    T = np.zeros((r, r, r, r))
    for i in range(r):
        for j in range(r):
            for k in range(r):
                T[i, j, k] = real_space_form_curvature(kappa, basis[i], basis[j], basis[k])
    return T


def submanifold_ddvv_check(data: SubmanifoldData, tol: float = TOL, eq_tol: float = EQ_TOL) -> Verdict:
    """``rho + rho_perp <= |H|^2 + kappa`` for a submanifold of a real space form."""
    r = data.r
    _check_r(r)
    zeta = data.sff.zeta
    norm = r * (r - 1)
    T = _real_space_form_tensor(data.kappa, r) + gauss_correction(zeta)
    rho = 2.0 * scalar_from_tensor(T) / norm
    if data.sff.q >= 2:
        comm = commutator_part(zeta)
        iu, ju = np.triu_indices(r, k=1)
        bu, gu = np.triu_indices(data.sff.q, k=1)
        rho_perp = float(np.sqrt(np.sum(comm[iu, ju][:, bu, gu] ** 2))) / norm
    else:
        rho_perp = 0.0
    tr = np.trace(zeta, axis1=1, axis2=2)
    mean_sq = float(tr @ tr) / r**2
    return Verdict.build(
        "submanifold_ddvv",
        rho + rho_perp,
        mean_sq + data.kappa,
        tol,
        eq_tol,
        mode=COMMUTATOR_ONLY,
        diagnostics={"rho": rho, "rho_perp": rho_perp, "mean_curvature_sq": mean_sq},
    )
