import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.linalg import expm

from cracksub.errors import DegenerateInput, InvalidArgument
from cracksub.manifolds import (
    OrderParameterSpace, cross_matrix, generator_of, project, skew, so3_generator, star_product,
)

SPACES = [
    OrderParameterSpace.scalar(),
    OrderParameterSpace.vector(),
    OrderParameterSpace.unit_vector(),
    OrderParameterSpace.ball(2.0),
    OrderParameterSpace.tensor(),
]
finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def test_ambient_dims():
    assert [s.ambient_dim for s in SPACES] == [1, 3, 3, 3, 9]
    assert [s.constrained for s in SPACES] == [False, False, True, True, False]


def test_ball_needs_positive_radius():
    with pytest.raises(InvalidArgument):
        OrderParameterSpace.ball(0.0)
    with pytest.raises(InvalidArgument):
        OrderParameterSpace("vector3", 1.0)


def test_generator_ball_unit_x():
    A = so3_generator(OrderParameterSpace.ball(2.0), [1.0, 0.0, 0.0])
    np.testing.assert_array_equal(A, [[0, 0, 0], [0, 0, 1], [0, -1, 0]])


def test_generator_scalar_is_zero():
    A = so3_generator(OrderParameterSpace.scalar(), 0.7)
    assert A.shape == (1, 3)
    assert not A.any()


def test_generator_vector_zero():
    assert not so3_generator(OrderParameterSpace.vector(), np.zeros(3)).any()


def test_generator_rejects_off_manifold():
    with pytest.raises(InvalidArgument):
        so3_generator(OrderParameterSpace.unit_vector(), [2.0, 0.0, 0.0])
    with pytest.raises(InvalidArgument):
        so3_generator(OrderParameterSpace.ball(1.0), [2.0, 0.0, 0.0])


def test_generator_maps_rotation_rate_to_rate(rng):
    # (nu x) q = q x nu : the rate of R(q t) nu at t = 0
    nu, q = rng.standard_normal(3), rng.standard_normal(3)
    np.testing.assert_allclose(cross_matrix(nu) @ q, np.cross(q, nu), atol=1e-15)
    np.testing.assert_allclose(skew(q) @ nu, np.cross(q, nu), atol=1e-15)


def test_tensor_generator_against_finite_difference_of_rotation(rng):
    N = rng.standard_normal((3, 3))
    A = so3_generator(OrderParameterSpace.tensor(), N.ravel())
    h = 1e-6
    for j in range(3):
        R_p, R_m = expm(h * skew(np.eye(3)[j])), expm(-h * skew(np.eye(3)[j]))
        fd = (R_p @ N @ R_p.T - R_m @ N @ R_m.T) / (2 * h)
        np.testing.assert_allclose(A[:, j], fd.ravel(), atol=1e-8)


def test_transpose_of_cross_matrix(rng):
    # the transpose acts as w -> nu x w (the negative of w x nu)
    nu, w = rng.standard_normal(3), rng.standard_normal(3)
    A = so3_generator(OrderParameterSpace.vector(), nu)
    brute = np.array([[A[j, i] for j in range(3)] for i in range(3)])
    np.testing.assert_allclose(A.T @ w, brute @ w, atol=1e-15)
    np.testing.assert_allclose(A.T @ w, np.cross(nu, w), atol=1e-14)


@given(arrays(float, 3, elements=finite), arrays(float, 3, elements=finite), finite, finite)
def test_generator_linear(n1, n2, a, b):
    s = OrderParameterSpace.vector()
    np.testing.assert_allclose(
        generator_of(s, a * n1 + b * n2), a * generator_of(s, n1) + b * generator_of(s, n2), atol=1e-9
    )


def test_star_scalar_outer():
    M = star_product(np.array([[1.0, 2.0, 3.0]]), np.array([[4.0, 5.0, 6.0]]))
    np.testing.assert_array_equal(M, [[4, 5, 6], [8, 10, 12], [12, 15, 18]])


def test_star_vector_identity_gradient(rng):
    M = rng.standard_normal((3, 3))
    np.testing.assert_allclose(star_product(np.eye(3), M), M)


@pytest.mark.parametrize("space", SPACES, ids=lambda s: s.kind.value)
def test_star_pairing_identity(space, rng):
    d = space.ambient_dim
    G, S = rng.standard_normal((d, 3)), rng.standard_normal((d, 3))
    M = star_product(G, S, space)
    for _ in range(20):
        n, u = rng.standard_normal(3), rng.standard_normal(3)
        assert abs((M @ n) @ u - (S @ n) @ (G @ u)) <= 1e-12 * max(1.0, np.abs(M).max() * 9)


def test_star_shape_mismatch():
    with pytest.raises(InvalidArgument):
        star_product(np.zeros((3, 3)), np.zeros((1, 3)))
    with pytest.raises(InvalidArgument):
        star_product(np.zeros((3, 3)), np.zeros((3, 3)), OrderParameterSpace.scalar())


def test_project_examples():
    ball = OrderParameterSpace.ball(2.0)
    np.testing.assert_array_equal(project(ball, [1.0, 0, 0]), [1, 0, 0])
    np.testing.assert_array_equal(project(ball, [4.0, 0, 0]), [2, 0, 0])
    np.testing.assert_array_equal(project(OrderParameterSpace.unit_vector(), [0, 3.0, 0]), [0, 1, 0])


def test_project_zero_on_sphere():
    with pytest.raises(DegenerateInput):
        project(OrderParameterSpace.unit_vector(), np.zeros(3))


@settings(max_examples=200)
@given(st.sampled_from(SPACES[1:4]), arrays(float, 3, elements=finite))
def test_project_idempotent(space, v):
    if space.kind.value == "unit_vector3" and np.linalg.norm(v) < 1e-6:
        return
    p = project(space, v)
    np.testing.assert_allclose(project(space, p), p, atol=1e-14)
