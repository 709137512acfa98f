import warnings

import numpy as np
import pytest
import sympy as sp

from cracksub.errors import AmbiguousTrace, InvalidArgument, InvalidState, UnreliableTraceWarning
from cracksub.fields import (
    X1, X2, X3, AnalyticProvider, FieldSet, GridProvider, curl_residual, evaluate, grid_columns, jump, load_grid,
    make_state, normal_speed, one_sided, rates_following_boundary, rates_following_tip, sample_to_grid, save_grid,
)
from cracksub.geometry import CrackGeometry
from cracksub.manifolds import OrderParameterSpace

from conftest import mode3_fieldset

SCALAR = OrderParameterSpace.scalar()
ON_FACE = np.array([[-1.0, 0.0, 0.0], [-0.5, 0.0, 0.3], [-2.0, 0.0, -1.0]])


def branch(amount):
    # winds by `amount` once around the tip, so it jumps by `amount` across the crack faces
    return amount * sp.atan2(X2, X1) / (2 * sp.pi)


def cracked(x, nu=None, space=SCALAR):
    return FieldSet(AnalyticProvider(x, nu, ambient_dim=space.ambient_dim), space, crack=CrackGeometry.straight())


def test_identity():
    fs = FieldSet(AnalyticProvider([X1, X2, X3], [0.7]), SCALAR)
    st = evaluate(fs, np.array([0.3, -0.2, 0.5]))
    np.testing.assert_array_equal(st.F, np.eye(3))
    np.testing.assert_array_equal(st.grad_nu, np.zeros((1, 3)))
    assert st.nu[0] == 0.7


def test_simple_shear():
    g = 0.35
    fs = FieldSet(AnalyticProvider([X1 + g * X2, X2, X3]), SCALAR)
    st = evaluate(fs, np.array([[0.1, 0.2, 0.3], [1.0, -2.0, 0.5]]))
    expected = np.eye(3)
    expected[0, 1] = g
    np.testing.assert_allclose(st.F, np.broadcast_to(expected, (2, 3, 3)), atol=1e-15)


def test_inverted_deformation():
    fs = FieldSet(AnalyticProvider([-X1, X2, X3]), SCALAR)
    with pytest.raises(InvalidState):
        evaluate(fs, np.array([0.2, 0.2, 0.0]))


def test_space_mismatch():
    with pytest.raises(InvalidArgument):
        FieldSet(AnalyticProvider([X1, X2, X3], [0, 0, 1]), SCALAR)


def test_constraint_violation():
    fs = FieldSet(AnalyticProvider([X1, X2, X3], [2, 0, 0]), OrderParameterSpace.unit_vector())
    with pytest.raises(InvalidState):
        evaluate(fs, np.array([0.1, 0.1, 0.1]))


def test_on_crack_needs_side():
    fs = mode3_fieldset()
    with pytest.raises(AmbiguousTrace):
        evaluate(fs, np.array([-0.5, 0.0, 0.0]))
    evaluate(fs, np.array([-0.5, 0.0, 0.0]), side=+1)
    evaluate(fs, np.array([0.5, 0.0, 0.0]))  # ahead of the tip there is no crack


def test_continuous_field_has_no_jump():
    fs = cracked([X1 + 0.1 * X2**2, X2 + 0.2 * X1, X3 + sp.sin(X1)])
    j, _ = jump(fs, ON_FACE, "x")
    assert np.abs(j).max() <= 1e-10


def test_prescribed_jump():
    fs = cracked([X1, X2 + branch(2.5), X3])
    j, mean = jump(fs, ON_FACE, "x")
    np.testing.assert_allclose(j[:, 1], 2.5, atol=1e-8)
    np.testing.assert_allclose(mean[:, 1], 0.0, atol=1e-8)


def test_tangential_slip_does_not_penetrate():
    fs = cracked([X1 + branch(0.3), X2, X3 + branch(-0.2)])
    j, _ = jump(fs, ON_FACE, "x")
    assert np.abs(j @ np.array([0.0, 1.0, 0.0])).max() <= 1e-12
    np.testing.assert_allclose(j[:, 0], 0.3, atol=1e-8)


def test_mean_and_jump_recover_traces(rng):
    fs = cracked([X1 + branch(0.4) * X1, X2 + 0.1 * X1 * X2, X3 + branch(1.0)])
    for comp in ("x", "F"):
        j, mean = jump(fs, ON_FACE, comp)
        plus = one_sided(fs, ON_FACE, +1, lambda s: getattr(s, comp))
        minus = one_sided(fs, ON_FACE, -1, lambda s: getattr(s, comp))
        np.testing.assert_array_equal(mean + 0.5 * j, 0.5 * (plus + minus) + 0.5 * (plus - minus))
        np.testing.assert_allclose(mean + 0.5 * j, plus, rtol=0, atol=1e-14)
        np.testing.assert_allclose(mean - 0.5 * j, minus, rtol=0, atol=1e-14)


def test_jump_off_crack():
    fs = mode3_fieldset()
    with pytest.raises(InvalidArgument):
        jump(fs, np.array([[0.5, 0.0, 0.0]]), "x")


def test_jump_near_tip_warns():
    fs = mode3_fieldset()
    with pytest.warns(UnreliableTraceWarning):
        jump(fs, np.array([[-1e-5, 0.0, 0.0]]), "x")


def test_jump_mode3_opening():
    # antiplane slip [w] = 4K/mu sqrt(r / 2 pi)
    fs = mode3_fieldset()
    X = np.array([[-0.5, 0.0, 0.0]])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        j, _ = jump(fs, X, "x")
    assert j[0, 2] == pytest.approx(4 * np.sqrt(0.5 / (2 * np.pi)), rel=1e-6)


def test_rates_following_tip_examples(rng):
    st = make_state(np.eye(3), [0.0], np.zeros((1, 3)))
    xd, nd = rates_following_tip(st, np.zeros(3))
    np.testing.assert_array_equal(xd, st.xdot)
    np.testing.assert_array_equal(nd, st.nudot)
    xd, _ = rates_following_tip(st, 2.0 * np.array([1.0, 0, 0]))
    np.testing.assert_array_equal(xd, [2.0, 0, 0])


def test_rates_against_componentwise_formula(rng):
    for _ in range(20):
        F = np.eye(3) + 0.2 * rng.standard_normal((3, 3))
        G = rng.standard_normal((3, 3))
        st = make_state(F, rng.standard_normal(3), G, xdot=rng.standard_normal(3), nudot=rng.standard_normal(3))
        v = rng.standard_normal(3)
        xd, nd = rates_following_tip(st, v)
        brute_x = [st.xdot[i] + sum(F[i, A] * v[A] for A in range(3)) for i in range(3)]
        brute_n = [st.nudot[a] + sum(G[a, A] * v[A] for A in range(3)) for a in range(3)]
        np.testing.assert_allclose(xd, brute_x, atol=1e-14)
        np.testing.assert_allclose(nd, brute_n, atol=1e-14)
        xb, nb = rates_following_boundary(st, v)
        np.testing.assert_array_equal(xb, xd)
        np.testing.assert_array_equal(nb, nd)


def test_boundary_rates_use_full_velocity(rng):
    # tangential parts of u change the rates; the normal speed is a separate projection
    st = make_state(np.eye(3), [0.0], np.zeros((1, 3)))
    n = np.array([1.0, 0.0, 0.0])
    u = np.array([0.5, 2.0, 0.0])
    x0, _ = rates_following_boundary(st, u)
    np.testing.assert_array_equal(x0, u)
    assert normal_speed(u, n) == 0.5
    assert rates_following_boundary(st, np.zeros(3))[0].tolist() == [0, 0, 0]


def test_curl_compatibility():
    fs = FieldSet(AnalyticProvider([X1 + 0.1 * sp.sin(X2) * X3, X2 + 0.2 * X1**2, X3 + 0.05 * X1 * X2]), SCALAR)
    assert curl_residual(fs, np.array([[0.3, 0.4, 0.1], [-0.2, 0.7, 0.5]])) <= 1e-8
    assert curl_residual(mode3_fieldset(), np.array([[0.3, 0.4, 0.0], [0.5, -0.4, 0.0]])) <= 1e-8


def _smooth_provider():
    return AnalyticProvider(
        [X1 + 0.1 * sp.sin(X1) * sp.cos(X2), X2 + 0.05 * X1 * X2**2, X3 + 0.1 * sp.cos(X1 + X2)],
        [sp.sin(X1) * X2],
    )


def test_grid_gradient_converges_quadratically():
    prov = _smooth_provider()
    X = np.array([[0.13, 0.21, 0.0], [-0.31, 0.07, 0.0], [0.4, -0.35, 0.0]])
    exact = prov.raw(X)
    hs = np.array([0.1, 0.05, 0.025])
    errs = []
    for h in hs:
        n = int(round(2.0 / h)) + 1
        grid = sample_to_grid(prov, -1.0, -1.0, h, n, n)
        r = grid.raw(X)
        errs.append(max(np.abs(r["F"] - exact["F"]).max(), np.abs(r["grad_nu"] - exact["grad_nu"]).max()))
    slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert slope >= 1.9


@pytest.mark.parametrize("suffix", [".txt", ".npz"])
def test_grid_file_round_trip(tmp_path, suffix):
    grid = sample_to_grid(_smooth_provider(), -1.0, -0.95, 0.1, 21, 20, cracked=True)
    path = tmp_path / f"g{suffix}"
    save_grid(path, grid)
    back = load_grid(path)
    assert (back.nx, back.ny, back.cracked, back.dim) == (21, 20, True, 1)
    for name in ("u", "nu", "xdot", "nudot"):
        np.testing.assert_array_equal(getattr(back, name), getattr(grid, name))
    if suffix == ".txt":
        header = open(path).read().splitlines()[2].lstrip("# ").split()
        assert header == grid_columns(1)


def test_grid_file_bad_header(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("# something else\n1 2 3\n")
    with pytest.raises(InvalidArgument):
        load_grid(path)


def test_cracked_grid_rejects_row_on_crack():
    with pytest.raises(InvalidArgument):
        GridProvider(-1.0, -1.0, 0.1, np.zeros((21, 21, 3)), cracked=True)


def test_cracked_grid_jump():
    # displacement jump of 2.5 in x2 behind the tip, sampled on a grid that straddles the crack
    prov = AnalyticProvider([X1, X2 + branch(2.5), X3])
    grid = sample_to_grid(prov, -2.0, -0.95, 0.1, 31, 20, cracked=True)
    fs = FieldSet(grid, SCALAR, crack=CrackGeometry.straight())
    j, _ = jump(fs, np.array([[-1.0, 0.0, 0.0]]), "x")
    assert j[0, 1] == pytest.approx(2.5, abs=1e-3)
