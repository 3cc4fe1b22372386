import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from foeed import grid
from foeed.grid import SymMat2

import oracles

images = arrays(np.float64, st.tuples(st.integers(3, 9), st.integers(3, 9)),
                elements=st.floats(0, 255, allow_nan=False))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def ramp_x(ny, nx, power=1):
    return np.tile(np.arange(nx, dtype=float) ** power, (ny, 1))


def test_gaussian_sigma_zero_is_identity(rng):
    u = rng.uniform(0, 255, (5, 7))
    assert np.array_equal(grid.gaussian_smooth(u, 0.0), u)


def test_gaussian_keeps_constants():
    u = np.full((6, 8), 42.5)
    np.testing.assert_allclose(grid.gaussian_smooth(u, 1.0), u, rtol=0, atol=1e-12)


def test_gaussian_impulse_row_matches_dense_convolution():
    u = np.array([[0, 0, 255, 0, 0]] * 3, dtype=float)
    np.testing.assert_allclose(grid.gaussian_smooth(u, 1.0),
                               oracles.gaussian_dense(u, 1.0), rtol=0, atol=1e-10)


@pytest.mark.parametrize("sigma", [0.5, 1.0, 1.7])
def test_gaussian_matches_dense_on_random(rng, sigma):
    u = rng.uniform(0, 255, (7, 9))
    np.testing.assert_allclose(grid.gaussian_smooth(u, sigma),
                               oracles.gaussian_dense(u, sigma), rtol=0, atol=1e-10)


def test_gaussian_kernel_radius_and_normalisation():
    k = grid.gaussian_kernel(1.2)
    assert k.size == 2 * 4 + 1
    assert k.sum() == pytest.approx(1.0, abs=1e-15)


def test_gaussian_rejects_negative_sigma():
    with pytest.raises(ValueError):
        grid.gaussian_smooth(np.zeros((3, 3)), -1.0)


@settings(max_examples=60, deadline=None)
@given(images, st.floats(0.3, 3.0))
def test_gaussian_preserves_mean(u, sigma):
    assert abs(grid.gaussian_smooth(u, sigma).mean() - u.mean()) <= 1e-8


def test_gradient_constant_and_ramp():
    g = grid.gradient(np.full((5, 5), 3.0))
    assert not g.x.any() and not g.y.any()
    g = grid.gradient(ramp_x(5, 6))
    np.testing.assert_array_equal(g.x[:, 1:-1], 1.0)
    np.testing.assert_array_equal(g.y, 0.0)


def test_gradient_matches_stencil(rng):
    u = rng.uniform(0, 255, (5, 5))
    gx, gy = oracles.gradient(u, 1.0, 2.0)
    g = grid.gradient(u, 1.0, 2.0)
    np.testing.assert_allclose(g.x, gx, atol=1e-12)
    np.testing.assert_allclose(g.y, gy, atol=1e-12)


def test_hessian_exact_on_quadratic_and_bilinear():
    H = grid.hessian(ramp_x(6, 7, power=2))
    np.testing.assert_allclose(H.xx[:, 1:-1], 2.0)
    np.testing.assert_allclose(H.xy[1:-1, 1:-1], 0.0)
    np.testing.assert_allclose(H.yy, 0.0)
    jj, ii = np.mgrid[0:6, 0:7].astype(float)
    H = grid.hessian(ii * jj)
    np.testing.assert_allclose(H.xy[1:-1, 1:-1], 1.0)


def test_hessian_matches_stencil(rng):
    u = rng.uniform(0, 255, (5, 5))
    hxx, hxy, hyy = oracles.hessian(u, 1.5, 0.5)
    H = grid.hessian(u, 1.5, 0.5)
    np.testing.assert_allclose(H.xx, hxx, atol=1e-10)
    np.testing.assert_allclose(H.xy, hxy, atol=1e-10)
    np.testing.assert_allclose(H.yy, hyy, atol=1e-10)
    assert H[0, 1] is H[1, 0] is H.xy


@settings(max_examples=40, deadline=None)
@given(images, st.floats(-1e3, 1e3))
def test_derivatives_ignore_intensity_shift(u, c):
    g0, g1 = grid.gradient(u), grid.gradient(u + c)
    H0, H1 = grid.hessian(u), grid.hessian(u + c)
    for a, b in zip((*g0, *H0), (*g1, *H1)):
        np.testing.assert_allclose(a, b, atol=1e-9)


def test_structure_tensor():
    assert not np.any(grid.structure_tensor(np.full((5, 5), 9.0), 1.0).xx)
    J = grid.structure_tensor(ramp_x(5, 6), 0.0)
    np.testing.assert_allclose(J.xx[:, 1:-1], 1.0)
    np.testing.assert_allclose(J.xy, 0.0)
    np.testing.assert_allclose(J.yy, 0.0)


def test_structure_tensor_is_outer_product_of_smoothed_gradient(rng):
    u = rng.uniform(0, 255, (5, 5))
    gx, gy = oracles.gradient(oracles.gaussian_dense(u, 1.0))
    J = grid.structure_tensor(u, 1.0)
    np.testing.assert_allclose(J.xx, gx * gx, atol=1e-8)
    np.testing.assert_allclose(J.xy, gx * gy, atol=1e-8)
    np.testing.assert_allclose(J.yy, gy * gy, atol=1e-8)


def identity_field(shape):
    return SymMat2(np.ones(shape), np.zeros(shape), np.ones(shape))


def test_outer_div2_identity_tensor():
    assert not grid.outer_div2(identity_field((5, 5)), np.full((5, 5), 7.0)).any()
    out = grid.outer_div2(identity_field((5, 6)), ramp_x(5, 6, power=2))
    np.testing.assert_allclose(out[:, 1:-1], 2.0)


def test_outer_div2_identity_is_five_point_laplacian(rng):
    u = rng.uniform(0, 255, (7, 8))
    np.testing.assert_allclose(grid.outer_div2(identity_field(u.shape), u),
                               grid.laplacian(u), rtol=0, atol=1e-12)


def test_outer_div2_matches_stencil(rng):
    u = rng.uniform(0, 255, (6, 6))
    a, c = rng.uniform(0.1, 1, (2, 6, 6))
    b = rng.uniform(-0.5, 0.5, (6, 6))
    np.testing.assert_allclose(grid.outer_div2(SymMat2(a, b, c), u, 1.0, 1.3),
                               oracles.div_flux(a, b, c, u, 1.0, 1.3), atol=1e-10)


def test_outer_div2_is_symmetric_and_dissipative(rng):
    shape = (5, 6)
    a, c = rng.uniform(0.5, 1.0, (2, *shape))
    b = rng.uniform(-0.2, 0.2, shape)
    M = oracles.matrix_of(lambda v: grid.outer_div2(SymMat2(a, b, c), v), shape)
    np.testing.assert_allclose(M, M.T, atol=1e-12)
    np.testing.assert_allclose(M.sum(axis=0), 0.0, atol=1e-12)


def test_outer_second():
    z = np.zeros((5, 5))
    assert not grid.outer_second(SymMat2(z, z, z)).any()
    T = SymMat2(ramp_x(5, 6, power=2), np.zeros((5, 6)), np.zeros((5, 6)))
    np.testing.assert_allclose(grid.outer_second(T)[:, 1:-1], 2.0)


def test_outer_second_matches_stencil(rng):
    txx, txy, tyy = rng.normal(size=(3, 6, 6))
    np.testing.assert_allclose(grid.outer_second(SymMat2(txx, txy, tyy), 1.2, 0.8),
                               oracles.outer_second(txx, txy, tyy, 1.2, 0.8), atol=1e-10)


def test_outer_second_is_adjoint_of_hessian(rng):
    # <outer_second(T), u> == <T, H(u)>_F, so P = A^T D A is symmetric
    u = rng.normal(size=(6, 7))
    T = SymMat2(*rng.normal(size=(3, 6, 7)))
    H = grid.hessian(u)
    lhs = np.sum(grid.outer_second(T) * u)
    rhs = np.sum(T.xx * H.xx + 2 * T.xy * H.xy + T.yy * H.yy)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_outer_second_of_hessian_approximates_biharmonic():
    jj, ii = np.mgrid[0:40, 0:40].astype(float)
    u = np.sin(ii / 7.0) * np.cos(jj / 9.0)
    bih = grid.laplacian(grid.laplacian(u))
    out = grid.outer_second(grid.hessian(u))
    interior = (slice(4, -4), slice(4, -4))
    assert np.abs(out - bih)[interior].max() < 0.05 * np.abs(bih[interior]).max()
    q = 3 * ii ** 2 - 2 * ii * jj + jj ** 2
    assert np.abs(grid.outer_second(grid.hessian(q))[interior]).max() < 1e-9


def test_symmat_dense_round_trip(rng):
    a = rng.normal(size=(2, 2))
    a = a + a.T
    m = SymMat2.from_array(a)
    np.testing.assert_array_equal(m.as_array(), a)
