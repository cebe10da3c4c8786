"""Curvature of a quaternionic space form M(c) at a point, and of a real space form.

The metric is the dot product on R^{4m}.  For a quaternionic space form,

    R(X, Y)Z = c/4 { <Y,Z> X - <X,Z> Y
                     + sum_a ( <J_a Y, Z> J_a X - <J_a X, Z> J_a Y + 2 <J_a Y, X> J_a Z ) }.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePlaneError, InvalidArgument
from .quatlin import DEFAULT_TOL, QuatStructure, standard_quaternionic_structure, validate_quaternionic

DEGENERATE_PLANE_TOL = 1e-14


@dataclass(frozen=True)
class SpaceFormAmbient:
    c: float
    J: QuatStructure

    def __post_init__(self):
        object.__setattr__(self, "c", float(self.c))
        report = validate_quaternionic(self.J, DEFAULT_TOL)
        if not report.ok:
            raise InvalidArgument(
                f"J is not a quaternionic structure: {report.worst_relation} "
                f"(alpha={report.worst_alpha}) residual {report.max_residual:.3e}"
            )

    @property
    def n(self) -> int:
        return self.J.n

    @classmethod
    def standard(cls, c: float, m: int) -> "SpaceFormAmbient":
        return cls(c, standard_quaternionic_structure(m))


def _vectors(amb: SpaceFormAmbient, *vs) -> list[np.ndarray]:
    out = []
    for v in vs:
        v = np.asarray(v, dtype=float)
        if v.shape != (amb.n,):
            raise InvalidArgument(f"expected a vector of length {amb.n}, got shape {v.shape}")
        out.append(v)
    return out


def qsf_curvature(amb: SpaceFormAmbient, X, Y, Z) -> np.ndarray:
    """``R(X, Y) Z`` as a vector."""
    X, Y, Z = _vectors(amb, X, Y, Z)
    out = (Y @ Z) * X - (X @ Z) * Y
    for Ja in amb.J:
        out = out + ((Ja @ Y) @ Z) * (Ja @ X) - ((Ja @ X) @ Z) * (Ja @ Y) + 2.0 * ((Ja @ Y) @ X) * (Ja @ Z)
    return 0.25 * amb.c * out


def qsf_curvature_component(amb: SpaceFormAmbient, X, Y, Z, W) -> float:
    """``<R(X, Y) Z, W>``."""
    (W,) = _vectors(amb, W)
    return float(qsf_curvature(amb, X, Y, Z) @ W)


def curvature_tensor(amb: SpaceFormAmbient, A, B, C, D) -> np.ndarray:
    """All components ``T[a, b, c, d] = <R(A_a, B_b) C_c, D_d>`` at once.

    ``A, B, C, D`` hold vectors as columns (shape ``(n, k)``).
    """
    A, B, C, D = (np.asarray(M, dtype=float) for M in (A, B, C, D))
    for M in (A, B, C, D):
        if M.ndim != 2 or M.shape[0] != amb.n:
            raise InvalidArgument(f"expected column blocks with {amb.n} rows, got {M.shape}")
    Js = amb.J.stacked
    JA = np.einsum("xij,jp->xip", Js, A)
    JB = np.einsum("xij,jp->xip", Js, B)
    JC = np.einsum("xij,jp->xip", Js, C)

    # h_PQ[x, p, q] = <J_x P_p, Q_q>
    h_bc = np.einsum("xib,ic->xbc", JB, C)
    h_ad = np.einsum("xia,id->xad", JA, D)
    h_ac = np.einsum("xia,ic->xac", JA, C)
    h_bd = np.einsum("xib,id->xbd", JB, D)
    h_ba = np.einsum("xib,ia->xba", JB, A)
    h_cd = np.einsum("xic,id->xcd", JC, D)

    T = np.einsum("bc,ad->abcd", B.T @ C, A.T @ D)
    T -= np.einsum("ac,bd->abcd", A.T @ C, B.T @ D)
    T += np.einsum("xbc,xad->abcd", h_bc, h_ad)
    T -= np.einsum("xac,xbd->abcd", h_ac, h_bd)
    T += 2.0 * np.einsum("xba,xcd->abcd", h_ba, h_cd)
    return 0.25 * amb.c * T


def sectional_curvature(amb: SpaceFormAmbient, X, Y) -> float:
    X, Y = _vectors(amb, X, Y)
    denom = (X @ X) * (Y @ Y) - (X @ Y) ** 2
    if denom <= DEGENERATE_PLANE_TOL:
        raise DegeneratePlaneError(f"X and Y span no plane (Gram determinant {denom:.3e})")
    return float(qsf_curvature(amb, X, Y, Y) @ X) / denom


def real_space_form_curvature(kappa: float, X, Y, Z) -> np.ndarray:
    """``R(X, Y) Z = kappa (<Y,Z> X - <X,Z> Y)`` in a real space form."""
    X, Y, Z = (np.asarray(v, dtype=float) for v in (X, Y, Z))
    if not (X.ndim == Y.ndim == Z.ndim == 1) or not (X.shape == Y.shape == Z.shape):
        raise InvalidArgument("X, Y, Z must be vectors of equal length")
    return float(kappa) * ((Y @ Z) * X - (X @ Z) * Y)
