import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from qsfddvv import DegeneratePlaneError, InvalidArgument, SpaceFormAmbient, standard_quaternionic_structure
from qsfddvv.ambient import (
    curvature_tensor,
    qsf_curvature,
    qsf_curvature_component,
    real_space_form_curvature,
    sectional_curvature,
)
from qsfddvv.quatlin import random_orthogonal

seeds = st.integers(0, 2**32 - 1)
curvatures = st.sampled_from([-4.0, -1.0, 0.0, 1.0, 2.5, 4.0])


def unit(v):
    return v / np.linalg.norm(v)


def test_flat_ambient_has_zero_curvature(rng):
    amb = SpaceFormAmbient.standard(0.0, 2)
    X, Y, Z = rng.standard_normal((3, 8))
    assert np.array_equal(qsf_curvature(amb, X, Y, Z), np.zeros(8))


def test_quaternionic_plane_example():
    amb = SpaceFormAmbient.standard(4.0, 1)
    X = np.eye(4)[0]
    Y = amb.J.J1 @ X
    assert np.allclose(qsf_curvature(amb, X, Y, Y), 4 * X, atol=1e-15)
    assert qsf_curvature_component(amb, X, Y, Y, X) == pytest.approx(4.0, abs=1e-15)


def test_totally_real_plane_example():
    amb = SpaceFormAmbient.standard(4.0, 2)
    X, Y = np.eye(8)[0], np.eye(8)[4]
    assert np.allclose(qsf_curvature(amb, X, Y, Y), X, atol=1e-15)
    assert sectional_curvature(amb, X, Y) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("alpha", [0, 1, 2])
@pytest.mark.parametrize("c", [-4.0, 4.0])
def test_sectional_on_quaternionic_planes(alpha, c, rng):
    amb = SpaceFormAmbient.standard(c, 2)
    X = unit(rng.standard_normal(8))
    Y = amb.J.stacked[alpha] @ X
    assert sectional_curvature(amb, X, Y) == pytest.approx(c, abs=1e-12)


def test_degenerate_plane_rejected():
    amb = SpaceFormAmbient.standard(1.0, 1)
    X = np.eye(4)[0]
    with pytest.raises(DegeneratePlaneError):
        sectional_curvature(amb, X, 3 * X)
    with pytest.raises(InvalidArgument):
        qsf_curvature(amb, np.ones(3), X, X)


def test_bad_structure_rejected():
    J = standard_quaternionic_structure(1)
    with pytest.raises(InvalidArgument):
        SpaceFormAmbient(1.0, type(J)(np.eye(4), J.J2, J.J3))


def test_real_space_form_examples(rng):
    X, Y = np.eye(3)[:2]
    assert np.array_equal(real_space_form_curvature(0.0, X, Y, Y), np.zeros(3))
    assert np.array_equal(real_space_form_curvature(1.0, X, Y, Y), X)
    V = rng.standard_normal(3)
    assert np.array_equal(real_space_form_curvature(2.0, V, V, Y), np.zeros(3))


@given(seeds, curvatures, st.integers(1, 3))
def test_matches_term_by_term_oracle(seed, c, m):
    rng = np.random.default_rng(seed)
    amb = SpaceFormAmbient.standard(c, m)
    J = oracles.block_structure(m)
    X, Y, Z, W = rng.standard_normal((4, 4 * m))
    want = oracles.curvature(c, J, X, Y, Z)
    assert np.allclose(qsf_curvature(amb, X, Y, Z), want, atol=1e-12)
    assert qsf_curvature_component(amb, X, Y, Z, W) == pytest.approx(oracles.dot(want, W), abs=1e-11)


@given(seeds, curvatures)
def test_algebraic_symmetries(seed, c):
    rng = np.random.default_rng(seed)
    amb = SpaceFormAmbient.standard(c, 2)
    X, Y, Z, W = rng.standard_normal((4, 8))
    R = lambda a, b, d, e: qsf_curvature_component(amb, a, b, d, e)  # noqa: E731
    base = R(X, Y, Z, W)
    tol = 1e-11 * (1 + abs(c)) * 100
    assert R(Y, X, Z, W) == pytest.approx(-base, abs=tol)
    assert R(X, Y, W, Z) == pytest.approx(-base, abs=tol)
    assert R(Z, W, X, Y) == pytest.approx(base, abs=tol)
    # first Bianchi identity
    assert abs(base + R(Y, Z, X, W) + R(Z, X, Y, W)) <= tol


@given(seeds, curvatures)
def test_depends_only_on_the_bundle(seed, c):
    # any SO(3) change of basis of span{J1, J2, J3} leaves R unchanged
    rng = np.random.default_rng(seed)
    Rot = random_orthogonal(3, rng)
    if np.linalg.det(Rot) < 0:
        Rot[:, 0] *= -1
    amb = SpaceFormAmbient.standard(c, 2)
    turned = SpaceFormAmbient(c, amb.J.rotated(Rot))
    X, Y, Z = rng.standard_normal((3, 8))
    assert np.allclose(qsf_curvature(turned, X, Y, Z), qsf_curvature(amb, X, Y, Z), atol=1e-10)


@given(seeds, curvatures)
def test_invariant_under_quaternionic_isometries(seed, c):
    # conjugating J by O and mapping vectors by O gives O R(X, Y) Z
    rng = np.random.default_rng(seed)
    O = random_orthogonal(8, rng)
    amb = SpaceFormAmbient.standard(c, 2)
    moved = SpaceFormAmbient(c, amb.J.conjugated(O))
    X, Y, Z = rng.standard_normal((3, 8))
    assert np.allclose(qsf_curvature(moved, O @ X, O @ Y, O @ Z), O @ qsf_curvature(amb, X, Y, Z), atol=1e-10)


@given(seeds)
def test_sectional_curvature_is_pinched(seed):
    # quaternionic space forms with c > 0 have K in [c/4, c]
    rng = np.random.default_rng(seed)
    amb = SpaceFormAmbient.standard(4.0, 2)
    X, Y = rng.standard_normal((2, 8))
    K = sectional_curvature(amb, X, Y)
    assert 1.0 - 1e-12 <= K <= 4.0 + 1e-12
    assert K == pytest.approx(oracles.sectional(4.0, oracles.block_structure(2), X, Y), abs=1e-12)


def test_curvature_tensor_matches_componentwise(rng):
    amb = SpaceFormAmbient.standard(-1.5, 2)
    A, B = rng.standard_normal((2, 8, 3))
    T = curvature_tensor(amb, A, B, A, B)
    for idx in [(0, 1, 2, 0), (2, 2, 1, 1), (1, 0, 0, 2)]:
        i, j, k, l = idx
        assert T[idx] == pytest.approx(qsf_curvature_component(amb, A[:, i], B[:, j], A[:, k], B[:, l]), abs=1e-12)
