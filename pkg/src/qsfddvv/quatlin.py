"""Quaternionic linear algebra on R^{4m}.

Almost quaternionic structures are stored as three orthogonal matrices
``J1, J2, J3`` acting on column vectors.  The standard structure acts on every
4-block as left multiplication by ``i, j, k`` in the basis ``(1, i, j, k)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument

DEFAULT_TOL = 1e-9
FRAME_TOL = 1e-12

# left multiplication by i, j, k on H = span(1, i, j, k)
_LEFT_I = np.array(
    [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], dtype=float
)
_LEFT_J = np.array(
    [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]], dtype=float
)
_LEFT_K = np.array(
    [[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]], dtype=float
)


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class QuatStructure:
    """Three complex structures ``J1, J2, J3`` on R^n, n = 4m."""

    J1: np.ndarray
    J2: np.ndarray
    J3: np.ndarray
    stacked: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        mats = [_frozen(a) for a in (self.J1, self.J2, self.J3)]
        shape = mats[0].shape
        if len(shape) != 2 or shape[0] != shape[1]:
            raise InvalidArgument(f"J1 must be square, got shape {shape}")
        if any(a.shape != shape for a in mats):
            raise InvalidArgument("J1, J2, J3 must have equal shapes")
        if shape[0] == 0 or shape[0] % 4:
            raise InvalidArgument(f"dimension must be a positive multiple of 4, got {shape[0]}")
        for name, a in zip(("J1", "J2", "J3"), mats):
            object.__setattr__(self, name, a)
        object.__setattr__(self, "stacked", _frozen(np.stack(mats)))

    @property
    def n(self) -> int:
        return self.J1.shape[0]

    def __iter__(self):
        return iter((self.J1, self.J2, self.J3))

    def conjugated(self, O: np.ndarray) -> "QuatStructure":
        """Return the structure ``O J O^T`` for an orthogonal ``O``."""
        return QuatStructure(*(O @ J @ O.T for J in self))

    def rotated(self, R: np.ndarray) -> "QuatStructure":
        """Return the basis change ``J'_a = sum_b R[a, b] J_b`` inside E."""
        R = np.asarray(R, dtype=float)
        mixed = np.einsum("ab,bij->aij", R, self.stacked)
        return QuatStructure(*mixed)

    def equals(self, other: "QuatStructure") -> bool:
        return self.n == other.n and bool(np.array_equal(self.stacked, other.stacked))


def standard_quaternionic_structure(m: int) -> QuatStructure:
    """Block-diagonal structure from ``m`` copies of left multiplication by i, j, k."""
    if int(m) != m or m <= 0:
        raise InvalidArgument(f"m must be a positive integer, got {m!r}")
    eye = np.eye(int(m))
    return QuatStructure(np.kron(eye, _LEFT_I), np.kron(eye, _LEFT_J), np.kron(eye, _LEFT_K))


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    max_residual: float
    worst_relation: str
    worst_alpha: int
    tol: float
    residuals: dict

    def __bool__(self) -> bool:
        return self.ok


def validate_quaternionic(J, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check the quaternion relations, orthogonality and skew-symmetry.

    ``J`` is a :class:`QuatStructure` or any sequence of three square arrays.
    Ties between relations are resolved in favour of the one checked first,
    so ``J^2 = -I`` is named whenever it is among the worst.
    """
    mats = [np.asarray(a, dtype=float) for a in J]
    if len(mats) != 3:
        raise InvalidArgument("expected exactly three matrices")
    shape = mats[0].shape
    if len(shape) != 2 or shape[0] != shape[1] or any(a.shape != shape for a in mats):
        raise InvalidArgument("J1, J2, J3 must be square matrices of equal size")
    eye = np.eye(shape[0])

    checks: list[tuple[str, int, np.ndarray]] = []
    for a in range(3):
        checks.append(("J²=−I", a + 1, mats[a] @ mats[a] + eye))
    for a in range(3):
        b, c = (a + 1) % 3, (a + 2) % 3
        checks.append(("JαJβ=Jγ", a + 1, mats[a] @ mats[b] - mats[c]))
        checks.append(("JβJα=−Jγ", a + 1, mats[b] @ mats[a] + mats[c]))
    for a in range(3):
        checks.append(("orthogonality", a + 1, mats[a].T @ mats[a] - eye))
    for a in range(3):
        checks.append(("skew-symmetry", a + 1, mats[a] + mats[a].T))

    worst, worst_name, worst_alpha = -1.0, "", 0
    residuals: dict[str, float] = {}
    for name, alpha, diff in checks:
        res = float(np.max(np.abs(diff))) if diff.size else 0.0
        key = f"{name}[{alpha}]"
        residuals[key] = res
        if res > worst:
            worst, worst_name, worst_alpha = res, name, alpha
    return ValidationReport(worst <= tol, worst, worst_name, worst_alpha, tol, residuals)


def orthonormalize(M: np.ndarray) -> np.ndarray:
    """QR orthonormalization with the first nonzero entry of each column made positive."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] < M.shape[1]:
        raise InvalidArgument(f"need a tall or square matrix, got shape {M.shape}")
    Q, R = np.linalg.qr(M)
    if np.any(np.abs(np.diag(R)) < 1e-12 * max(1.0, np.abs(R).max())):
        raise InvalidArgument("columns are numerically linearly dependent")
    for k in range(Q.shape[1]):
        nz = np.flatnonzero(np.abs(Q[:, k]) > 1e-15)
        if nz.size and Q[nz[0], k] < 0:
            Q[:, k] = -Q[:, k]
    return Q


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    return orthonormalize(rng.standard_normal((n, n)))


@dataclass(frozen=True)
class AdaptedFrame:
    """Orthonormal basis of the target tangent space.

    The first ``r`` columns span the range of the differential, the remaining
    ``n - r`` columns span its orthogonal complement.
    """

    r: int
    columns: np.ndarray

    def __post_init__(self):
        cols = _frozen(self.columns)
        if cols.ndim != 2 or cols.shape[0] != cols.shape[1]:
            raise InvalidArgument(f"frame must be square, got shape {cols.shape}")
        if not 0 < self.r < cols.shape[0]:
            raise InvalidArgument(f"need 0 < r < n, got r={self.r}, n={cols.shape[0]}")
        object.__setattr__(self, "columns", cols)

    @property
    def n(self) -> int:
        return self.columns.shape[0]

    @property
    def q(self) -> int:
        return self.n - self.r

    @property
    def range_part(self) -> np.ndarray:
        return self.columns[:, : self.r]

    @property
    def normal_part(self) -> np.ndarray:
        return self.columns[:, self.r :]

    def orthonormality_residual(self) -> float:
        return float(np.max(np.abs(self.columns.T @ self.columns - np.eye(self.n))))


def identity_frame(n: int, r: int) -> AdaptedFrame:
    return AdaptedFrame(r, np.eye(n))


def random_adapted_frame(n: int, r: int, seed: int) -> AdaptedFrame:
    if not 0 < r < n:
        raise InvalidArgument(f"need 0 < r < n, got r={r}, n={n}")
    rng = np.random.default_rng(seed)
    return AdaptedFrame(r, random_orthogonal(n, rng))


def quaternionic_basis(J: QuatStructure, rng: np.random.Generator) -> np.ndarray:
    """Orthonormal basis made of consecutive quaternionic 4-planes.

    Columns ``4k .. 4k+3`` are ``x, J1 x, J2 x, J3 x`` for a random unit ``x``
    orthogonal to all previous 4-planes, so any leading block of ``4k``
    columns spans a J-invariant subspace.
    """
    n = J.n
    basis = np.zeros((n, 0))
    while basis.shape[1] < n:
        x = rng.standard_normal(n)
        x -= basis @ (basis.T @ x)
        x -= basis @ (basis.T @ x)
        norm = np.linalg.norm(x)
        if norm < 1e-8:
            continue
        x /= norm
        block = np.column_stack([x, J.J1 @ x, J.J2 @ x, J.J3 @ x])
        basis = np.column_stack([basis, block])
    return basis


def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape != B.shape:
        raise InvalidArgument(f"need equal square matrices, got {A.shape} and {B.shape}")
    return A @ B - B @ A


def frobenius_norm_sq(A: np.ndarray) -> float:
    """``trace(A A^T)`` for a real matrix."""
    A = np.asarray(A, dtype=float)
    return float(np.sum(A * A))


def quaternionic_gram(J: QuatStructure, x: np.ndarray) -> np.ndarray:
    """Gram matrix of ``{x, J1 x, J2 x, J3 x}``."""
    x = np.asarray(x, dtype=float)
    vecs = np.column_stack([x, J.J1 @ x, J.J2 @ x, J.J3 @ x])
    return vecs.T @ vecs
