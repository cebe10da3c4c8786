"""Pointwise model of a Riemannian map into M(c).

At a point the map is described by the ambient space form, an adapted frame
(``r`` columns spanning the range of the differential, ``q = n - r`` normal
columns) and the second fundamental form ``zeta[beta, i, j]`` with respect
to that frame.  Everything the inequalities need is a function of this data.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .ambient import SpaceFormAmbient, curvature_tensor
from .errors import InvalidArgument
from .quatlin import AdaptedFrame

SYMMETRY_WARN_TOL = 1e-9
FRAME_CHECK_TOL = 1e-8

FULL = "full"
COMMUTATOR_ONLY = "commutator-only"
MODES = (FULL, COMMUTATOR_ONLY)


class ZetaAsymmetryWarning(UserWarning):
    """The supplied second fundamental form was not symmetric and has been averaged."""


def zeta_asymmetry(zeta) -> float:
    z = np.asarray(zeta, dtype=float)
    if z.size == 0:
        return 0.0
    return float(np.max(np.abs(z - np.swapaxes(z, 1, 2))))


@dataclass(frozen=True)
class Sff:
    """Second fundamental form components ``zeta[beta, i, j]``, shape ``(q, r, r)``."""

    zeta: np.ndarray

    def __post_init__(self):
        z = np.array(self.zeta, dtype=float)
        if z.ndim != 3 or z.shape[1] != z.shape[2]:
            raise InvalidArgument(f"zeta must have shape (q, r, r), got {z.shape}")
        asym = zeta_asymmetry(z)
        if asym > SYMMETRY_WARN_TOL:
            warnings.warn(
                f"zeta asymmetry {asym:.3e} exceeds {SYMMETRY_WARN_TOL:g}; symmetrizing",
                ZetaAsymmetryWarning,
                stacklevel=3,
            )
        z = 0.5 * (z + np.swapaxes(z, 1, 2))
        z.setflags(write=False)
        object.__setattr__(self, "zeta", z)

    @property
    def q(self) -> int:
        return self.zeta.shape[0]

    @property
    def r(self) -> int:
        return self.zeta.shape[1]

    @classmethod
    def zeros(cls, q: int, r: int) -> "Sff":
        return cls(np.zeros((q, r, r)))


class _FrameGeometry:
    """Ambient quantities depending only on (c, J, frame); shared across zeta changes."""

    def __init__(self, amb: SpaceFormAmbient, frame: AdaptedFrame):
        self.amb = amb
        self.frame = frame

    @cached_property
    def j_range(self) -> np.ndarray:
        """``P[a, i, j] = <J_a F*e_i, F*e_j>``."""
        E = self.frame.range_part
        return np.einsum("xkl,ki,lj->xij", self.amb.J.stacked, E, E)

    @cached_property
    def j_range_sq_total(self) -> float:
        """``sum_a sum_{i,j} <J_a F*e_i, F*e_j>^2``."""
        return float(np.sum(self.j_range**2))

    @cached_property
    def horizontal_ambient(self) -> np.ndarray:
        E = self.frame.range_part
        return curvature_tensor(self.amb, E, E, E, E)

    @cached_property
    def normal_ambient(self) -> np.ndarray:
        E, V = self.frame.range_part, self.frame.normal_part
        return curvature_tensor(self.amb, E, E, V, V)


@dataclass(frozen=True)
class MapInstance:
    amb: SpaceFormAmbient
    frame: AdaptedFrame
    sff: Sff
    _geom: _FrameGeometry = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        n, r = self.amb.n, self.frame.r
        if self.frame.n != n:
            raise InvalidArgument(f"frame dimension {self.frame.n} != ambient dimension {n}")
        if self.sff.r != r:
            raise InvalidArgument(f"zeta has r={self.sff.r}, frame has r={r}")
        if self.sff.q != n - r:
            raise InvalidArgument(f"zeta has q={self.sff.q}, expected n - r = {n - r}")
        geom = self._geom
        if geom is None or geom.amb is not self.amb or geom.frame is not self.frame:
            res = self.frame.orthonormality_residual()
            if res > FRAME_CHECK_TOL:
                raise InvalidArgument(f"frame is not orthonormal (residual {res:.3e})")
            object.__setattr__(self, "_geom", _FrameGeometry(self.amb, self.frame))

    @property
    def c(self) -> float:
        return self.amb.c

    @property
    def n(self) -> int:
        return self.amb.n

    @property
    def r(self) -> int:
        return self.frame.r

    @property
    def q(self) -> int:
        return self.frame.q

    @property
    def zeta(self) -> np.ndarray:
        return self.sff.zeta

    @property
    def geometry(self) -> _FrameGeometry:
        return self._geom

    @cached_property
    def horizontal_tensor(self) -> np.ndarray:
        T = self._geom.horizontal_ambient + gauss_correction(self.sff.zeta)
        T.setflags(write=False)
        return T

    def with_zeta(self, zeta) -> "MapInstance":
        """Same ambient and frame, new second fundamental form (ambient caches are reused)."""
        return MapInstance(self.amb, self.frame, Sff(zeta), self._geom)

    def push(self, x) -> np.ndarray:
        """``F* x`` for ``x`` given in horizontal frame coordinates."""
        return self.frame.range_part @ np.asarray(x, dtype=float)


def _check_index(name: str, value: int, bound: int) -> int:
    if not isinstance(value, (int, np.integer)) or not 0 <= value < bound:
        raise InvalidArgument(f"{name}={value!r} out of range [0, {bound})")
    return int(value)


def _check_mode(mode: str) -> str:
    if mode not in MODES:
        raise InvalidArgument(f"mode must be one of {MODES}, got {mode!r}")
    return mode


def shape_operator(inst: MapInstance, beta: int) -> np.ndarray:
    """Matrix of ``S_{v_beta}`` in the ``F*e_i`` frame; entry (i, j) is ``zeta^beta_ij``."""
    beta = _check_index("beta", beta, inst.q)
    return inst.zeta[beta].copy()


def second_fundamental_vector(inst: MapInstance, i: int, j: int) -> np.ndarray:
    """``(nabla F*)(e_i, e_j) = sum_beta zeta^beta_ij v_beta`` in ambient coordinates."""
    i = _check_index("i", i, inst.r)
    j = _check_index("j", j, inst.r)
    return inst.frame.normal_part @ inst.zeta[:, i, j]


def trace_zeta(inst: MapInstance) -> np.ndarray:
    return np.trace(inst.zeta, axis1=1, axis2=2)


def zeta_norm_sq(inst: MapInstance) -> float:
    return float(np.sum(inst.zeta**2))


def trace_zeta_norm_sq(inst: MapInstance) -> float:
    t = trace_zeta(inst)
    return float(t @ t)


def casorati(inst: MapInstance) -> float:
    return zeta_norm_sq(inst) / inst.r


def gauss_correction(zeta: np.ndarray) -> np.ndarray:
    """``sum_beta (zeta_jk zeta_il - zeta_ik zeta_jl)`` as an (r, r, r, r) array."""
    return np.einsum("bjk,bil->ijkl", zeta, zeta) - np.einsum("bik,bjl->ijkl", zeta, zeta)


def horizontal_curvature_tensor(inst: MapInstance) -> np.ndarray:
    """``T[i, j, k, l] = g1(R^M(e_i, e_j) e_k, e_l)`` via the Gauss equation (read-only)."""
    return inst.horizontal_tensor


def horizontal_curvature_component(inst: MapInstance, i: int, j: int, k: int, l: int) -> float:
    idx = [_check_index(name, v, inst.r) for name, v in zip("ijkl", (i, j, k, l))]
    zeta = inst.zeta
    a, b, c_, d = idx
    corr = float(zeta[:, b, c_] @ zeta[:, a, d] - zeta[:, a, c_] @ zeta[:, b, d])
    return float(inst.geometry.horizontal_ambient[a, b, c_, d]) + corr


def commutator_part(zeta: np.ndarray) -> np.ndarray:
    """``C[i, j, beta, gamma] = ([zeta^gamma, zeta^beta])_ij = -<[S_gamma, S_beta] e_i, e_j>``."""
    prod = np.einsum("gik,bkj->ijbg", zeta, zeta)
    return prod - np.einsum("bik,gkj->ijbg", zeta, zeta)


def normal_curvature_tensor(inst: MapInstance, mode: str = FULL) -> np.ndarray:
    """``T[i, j, beta, gamma] = g2(R^perp(F*e_i, F*e_j) v_beta, v_gamma)`` via the Ricci equation.

    ``commutator-only`` drops the ambient term and keeps only the shape-operator part.
    """
    _check_mode(mode)
    comm = commutator_part(inst.zeta)
    if mode == COMMUTATOR_ONLY:
        return comm
    return inst.geometry.normal_ambient + comm


def normal_curvature_component(
    inst: MapInstance, i: int, j: int, beta: int, gamma: int, mode: str = FULL
) -> float:
    i = _check_index("i", i, inst.r)
    j = _check_index("j", j, inst.r)
    beta = _check_index("beta", beta, inst.q)
    gamma = _check_index("gamma", gamma, inst.q)
    _check_mode(mode)
    zg, zb = inst.zeta[gamma], inst.zeta[beta]
    value = float((zg @ zb - zb @ zg)[i, j])
    if mode == FULL:
        value += float(inst.geometry.normal_ambient[i, j, beta, gamma])
    return value
