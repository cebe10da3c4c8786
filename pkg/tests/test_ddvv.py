import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from helpers import SIGMA_X, SIGMA_Z, j_invariant_frame, make_instance, random_frame, sigma_instance
from qsfddvv import (
    COMMUTATOR_ONLY,
    FULL,
    InvalidArgument,
    MapInstance,
    MatrixFamily,
    Sff,
    SubmanifoldData,
    UndefinedRatioError,
    ddvv_matrix_ratio,
    lemma2_check,
    submanifold_ddvv_check,
    theorem1_check,
    theorem2_check,
)
from qsfddvv.ddvv import householder_to_first, theorem1_conditions
from qsfddvv.quatlin import AdaptedFrame

seeds = st.integers(0, 2**32 - 1)


def random_zeta(rng, q, r, scale=2.0):
    z = rng.uniform(-scale, scale, (q, r, r))
    return 0.5 * (z + np.swapaxes(z, 1, 2))


def random_map(seed, r, q, c=None, frame="random"):
    rng = np.random.default_rng(seed)
    n = 4 * -(-(r + q) // 4)
    cols = random_frame(n, rng) if frame == "random" else j_invariant_frame(n, rng)
    if c is None:
        c = rng.uniform(-4, 4)
    return make_instance(c, random_zeta(rng, q, r), frame=cols)


# --- Ricci inequality -------------------------------------------------------------


def test_theorem1_totally_geodesic_flat():
    v = theorem1_check(make_instance(0.0, np.zeros((2, 2, 2))), [1.0, 0.0])
    assert v.lhs == v.rhs == 0.0 and v.equality and v.conditions_met


def test_theorem1_quaternionic_range():
    v = theorem1_check(make_instance(4.0, np.zeros((4, 4, 4))), np.eye(4)[0])
    assert v.lhs == pytest.approx(48.0, abs=1e-12)
    assert v.rhs == pytest.approx(48.0, abs=1e-12)
    assert v.diagnostics["j_sum_sq"] == pytest.approx(3.0, abs=1e-14)
    assert v.equality


def test_theorem1_umbilical_surface():
    a = 1.25
    v = theorem1_check(make_instance(0.0, [np.diag([a, a])]), [1.0, 0.0])
    assert v.lhs == pytest.approx(4 * a * a) and v.rhs == pytest.approx(4 * a * a)
    assert v.equality and v.conditions_met
    assert [cond.residual for cond in v.conditions] == [0.0, 0.0]


@given(seeds, st.integers(2, 5), st.integers(1, 5))
def test_theorem1_gap_closed_form(seed, r, q):
    # with X = e_1 the ambient terms cancel: gap = sum_b (z11 - sum_{i>1} z_ii)^2 + 4 sum_{i>1} z_1i^2
    inst = random_map(seed, r, q)
    z = inst.zeta.tolist()
    want = sum(
        (m[0][0] - sum(m[i][i] for i in range(1, r))) ** 2 + 4 * sum(m[0][i] ** 2 for i in range(1, r)) for m in z
    )
    v = theorem1_check(inst, np.eye(r)[0])
    assert v.gap == pytest.approx(want, rel=1e-9, abs=1e-9)
    assert v.holds


@given(seeds, st.integers(2, 5), st.integers(1, 4))
def test_theorem1_frame_covariance(seed, r, q):
    inst = random_map(seed, r, q)
    rng = np.random.default_rng(seed + 3)
    X = rng.standard_normal(r)
    X /= np.linalg.norm(X)
    base = theorem1_check(inst, X)
    # horizontal rotation, X carried along
    Q = random_frame(r, rng)
    cols = inst.frame.columns.copy()
    cols[:, :r] = inst.frame.range_part @ Q
    O = random_frame(inst.q, rng)
    cols[:, r:] = inst.frame.normal_part @ O
    zeta = np.einsum("ai,gab,bj->gij", Q, inst.zeta, Q)
    zeta = np.einsum("gb,gij->bij", O, zeta)
    moved = MapInstance(inst.amb, AdaptedFrame(r, cols), Sff(zeta))
    v = theorem1_check(moved, Q.T @ X)
    for attr in ("lhs", "rhs", "gap"):
        assert getattr(v, attr) == pytest.approx(getattr(base, attr), abs=1e-9)


def test_theorem1_conditions_frame_convention():
    # the conditions are evaluated after moving X to the first frame vector
    z = np.diag([1.0, 1.0, 2.0])[None]
    conds = theorem1_conditions(z, np.array([0.0, 0.0, 1.0]))
    assert all(c.satisfied for c in conds)
    conds = theorem1_conditions(z, np.array([1.0, 0.0, 0.0]))
    assert [c.satisfied for c in conds] == [True, False]
    H = householder_to_first(np.array([0.6, 0.8]))
    assert np.allclose(H @ [0.6, 0.8], [1.0, 0.0]) and np.allclose(H, H.T)


@given(seeds, st.integers(2, 5), st.integers(1, 4))
def test_theorem1_equality_iff_conditions(seed, r, q):
    rng = np.random.default_rng(seed)
    inst = random_map(seed, r, q)
    # random zeta is generically strict; also build an equality zeta for a random X
    X = rng.standard_normal(r)
    X /= np.linalg.norm(X)
    z = random_zeta(rng, inst.q, r)
    z[:, 0, :] = z[:, :, 0] = 0.0
    z[:, 0, 0] = np.trace(z, axis1=1, axis2=2)
    H = householder_to_first(X)
    eq_inst = inst.with_zeta(np.einsum("ai,gab,bj->gij", H, z, H))
    for candidate in (inst, eq_inst):
        v = theorem1_check(candidate, X)
        assert v.holds
        assert v.equality == v.conditions_met
    assert theorem1_check(eq_inst, X).equality


def test_theorem1_rejects_bad_input():
    inst = make_instance(1.0, np.zeros((2, 2, 2)))
    with pytest.raises(InvalidArgument):
        theorem1_check(inst, [2.0, 0.0])


# --- normal-curvature inequality ----------------------------------------------------


def test_theorem2_sigma_pair():
    v = theorem2_check(sigma_instance())
    assert (v.lhs, v.rhs, v.gap) == (-1.0, 0.0, 1.0)
    assert v.holds and not v.equality
    d = v.diagnostics
    assert d["rho_perp"] == 1.0 and d["rho_h"] == -2.0 and d["tau_perp"] == 2.0


@given(seeds, st.integers(2, 6), st.integers(1, 5), st.sampled_from(["random", "j-invariant"]))
def test_theorem2_totally_geodesic_equality(seed, r, q, frame):
    rng = np.random.default_rng(seed)
    n = 4 * -(-(r + q) // 4)
    cols = random_frame(n, rng) if frame == "random" else j_invariant_frame(n, rng)
    inst = make_instance(rng.uniform(-4, 4), np.zeros((q, r, r)), frame=cols)
    v = theorem2_check(inst)
    assert v.diagnostics["rho_perp"] == 0.0
    assert abs(v.gap) <= 1e-10 and v.equality


@given(seeds, st.integers(2, 5), st.integers(1, 5))
def test_theorem2_gap_closed_form(seed, r, q):
    # rhs - rho_h reduces to the diagonal/off-diagonal sum over r^2 (r-1)
    inst = random_map(seed, r, q)
    comm, quad = oracles.commutator_bound_sides(inst.zeta.tolist())
    tau_perp = comm / (2 * r)
    want = (quad - r * tau_perp) / (r * r * (r - 1))
    v = theorem2_check(inst)
    assert v.gap == pytest.approx(want, rel=1e-9, abs=1e-9)
    assert v.holds
    assert v.diagnostics["commutator_bound_lhs"] <= v.diagnostics["commutator_bound_rhs"] + 1e-9


@given(seeds, st.integers(2, 5), st.integers(1, 4))
def test_theorem2_normal_frame_invariance(seed, r, q):
    inst = random_map(seed, r, q)
    O = random_frame(inst.q, np.random.default_rng(seed + 9))
    cols = inst.frame.columns.copy()
    cols[:, r:] = inst.frame.normal_part @ O
    moved = MapInstance(inst.amb, AdaptedFrame(r, cols), Sff(np.einsum("gb,gij->bij", O, inst.zeta)))
    a, b = theorem2_check(inst), theorem2_check(moved)
    for attr in ("lhs", "rhs", "gap"):
        assert getattr(a, attr) == pytest.approx(getattr(b, attr), abs=1e-9)


def test_theorem2_full_mode_can_fail():
    # totally geodesic, c = 2, range span{1, i} of the first quaternionic line: the ambient
    # normal curvature survives on the second line only, giving tau_perp = sqrt(2)
    inst = make_instance(2.0, np.zeros((6, 2, 2)))
    full = theorem2_check(inst, mode=FULL)
    assert full.diagnostics["rho_perp_full"] == pytest.approx(math.sqrt(2) / 2, abs=1e-14)
    assert full.gap == pytest.approx(-math.sqrt(2) / 2, abs=1e-12)
    assert not full.holds
    assert theorem2_check(inst, mode=COMMUTATOR_ONLY).equality


def test_full_mode_ambient_value_against_oracle():
    J = oracles.block_structure(2)
    E = oracles.columns(np.eye(8), 2)
    V = oracles.columns(np.eye(8), 6, start=2)
    total = sum(oracles.dot(oracles.curvature(2.0, J, E[0], E[1], V[b]), V[g]) ** 2 for b in range(6) for g in range(b + 1, 6))
    assert math.sqrt(total) == pytest.approx(math.sqrt(2), abs=1e-14)


def test_theorem2_rejects_bad_input():
    with pytest.raises(InvalidArgument):
        theorem2_check(sigma_instance(), mode="both")


# --- matrix lemma and DDVV ratio ------------------------------------------------------


def test_lemma2_examples():
    v = lemma2_check(MatrixFamily.of(np.diag([1.0, -1.0])))
    assert v.lhs == 0.0 and v.holds
    v = lemma2_check(MatrixFamily.of(SIGMA_X, SIGMA_Z))
    assert v.lhs == 8.0 and v.rhs == 8.0 and v.gap == 0.0 and v.equality


@given(seeds, st.integers(2, 6), st.integers(2, 6))
def test_lemma2_against_oracle_and_bound(seed, r, q):
    rng = np.random.default_rng(seed)
    fam = MatrixFamily(random_zeta(rng, q, r)).traceless()
    v = lemma2_check(fam)
    comm, quad = oracles.commutator_bound_sides(fam.matrices.tolist())
    assert v.lhs == pytest.approx(comm, rel=1e-12, abs=1e-12)
    assert v.rhs == pytest.approx(quad, rel=1e-12, abs=1e-12)
    assert v.gap >= -1e-9


@given(seeds, st.integers(2, 5), st.integers(2, 4))
def test_lemma2_conjugation_invariance(seed, r, q):
    rng = np.random.default_rng(seed)
    fam = MatrixFamily(random_zeta(rng, q, r)).traceless()
    O = random_frame(r, rng)
    moved = MatrixFamily(np.einsum("ia,gij,jb->gab", O, fam.matrices, O))
    assert lemma2_check(moved).gap == pytest.approx(lemma2_check(fam).gap, abs=1e-9)


def test_matrix_family_validation():
    with pytest.raises(InvalidArgument):
        MatrixFamily(np.array([[[0.0, 1.0], [0.0, 0.0]]]))
    with pytest.raises(InvalidArgument):
        MatrixFamily.of(np.eye(2), np.eye(3))
    with pytest.raises(InvalidArgument):
        MatrixFamily(np.zeros((0, 2, 2)))


def test_ddvv_ratio_examples():
    assert ddvv_matrix_ratio(MatrixFamily.of(np.diag([1.0, 2.0]), np.diag([3.0, -1.0]))) == 0.0
    assert ddvv_matrix_ratio(MatrixFamily.of(SIGMA_X, SIGMA_Z)) == 1.0
    with pytest.raises(UndefinedRatioError):
        ddvv_matrix_ratio(MatrixFamily(np.zeros((2, 2, 2))))


@given(seeds, st.floats(-5, 5).filter(lambda t: abs(t) > 1e-2))
def test_ddvv_ratio_scale_invariant_and_bounded(seed, t):
    rng = np.random.default_rng(seed)
    fam = MatrixFamily(random_zeta(rng, 3, 4))
    base = ddvv_matrix_ratio(fam)
    assert ddvv_matrix_ratio(MatrixFamily(t * fam.matrices)) == pytest.approx(base, rel=1e-10)
    assert base <= 1.0 + 1e-12


# --- submanifolds of real space forms -----------------------------------------------


def test_submanifold_examples():
    v = submanifold_ddvv_check(SubmanifoldData(1.0, Sff(np.zeros((2, 3, 3)))))
    assert v.diagnostics["rho"] == pytest.approx(1.0) and v.rhs == 1.0 and v.equality
    v = submanifold_ddvv_check(SubmanifoldData(0.0, Sff(np.stack([SIGMA_X, SIGMA_Z]))))
    assert v.diagnostics["rho"] == -2.0 and v.diagnostics["rho_perp"] == 1.0
    assert v.lhs == -1.0 and v.rhs == 0.0 and v.holds
    a = 0.8
    v = submanifold_ddvv_check(SubmanifoldData(0.0, Sff([np.diag([a, a])])))
    assert v.lhs == pytest.approx(a * a) and v.rhs == pytest.approx(a * a) and v.equality


@given(seeds, st.integers(2, 5), st.integers(1, 4), st.floats(-3, 3))
def test_submanifold_ddvv_holds(seed, r, q, kappa):
    z = random_zeta(np.random.default_rng(seed), q, r)
    assert submanifold_ddvv_check(SubmanifoldData(kappa, Sff(z))).gap >= -1e-9
