import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import erfcx, exp1

from smoluchowski import kernels as kn
from smoluchowski.errors import DomainError, SingularMatrixError

SQRT_PI = math.sqrt(math.pi)
K_SET = [0.1, 0.5, 1.0, 2.0, 5.0]


def adaptive_t(m, k):
    f = lambda mu: math.exp(-mu * mu) * mu**m / (1 + k * k * mu * mu)
    val, _ = quad(f, 0, np.inf, epsabs=1e-14, epsrel=1e-13, limit=200)
    return 2 / SQRT_PI * val


def adaptive_matrix(power, k, k1=0.0):
    out = np.empty((2, 2))
    for a in range(2):
        for b in range(2):
            f = lambda mu: (math.exp(-mu * mu) * kn.matrix_kernel(mu)[a, b] * mu**power
                            / ((1 + k * k * mu * mu) * (1 + k1 * k1 * mu * mu)))
            out[a, b] = 2 / SQRT_PI * quad(f, 0, np.inf, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    return out


def test_matrix_kernel_values():
    np.testing.assert_allclose(kn.matrix_kernel(0.0), [[1, -0.5], [-1 / 3, 5 / 6]], atol=1e-15)
    np.testing.assert_allclose(kn.matrix_kernel(1 / math.sqrt(2)), [[1, 0], [0, 2 / 3]], atol=1e-15)
    np.testing.assert_allclose(kn.matrix_kernel(1.0), [[1, 0.5], [1 / 3, 5 / 6]], atol=1e-15)


def test_matrix_kernel_vectorises():
    assert kn.matrix_kernel(np.linspace(0, 3, 7)).shape == (7, 2, 2)


@pytest.mark.parametrize(
    "m, expected",
    [(0, 1.0), (2, 0.5), (4, 0.75), (6, 15 / 8), (8, 105 / 16),
     (1, 1 / SQRT_PI), (3, 1 / SQRT_PI), (5, 2 / SQRT_PI), (7, 6 / SQRT_PI)],
)
def test_moments_at_zero(m, expected):
    assert kn.t_moment_zero(m) == pytest.approx(expected, rel=1e-15)
    assert kn.t_moment(m, 0.0) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("m", [-1, 9, 2.0, True])
def test_moment_index_out_of_range(m):
    with pytest.raises(DomainError):
        kn.t_moment(m, 1.0)
    with pytest.raises(DomainError):
        kn.t_moment_zero(m)


def test_negative_wavenumber_rejected():
    with pytest.raises(DomainError):
        kn.t_moment(2, -1.0)


def test_t1_against_adaptive_and_closed_form():
    k = 2.0
    got = kn.t_moment(1, k)
    assert got == pytest.approx(adaptive_t(1, k), abs=1e-8)
    # T_1(k) = exp(1/k^2) E_1(1/k^2) / (sqrt(pi) k^2)
    closed = math.exp(1 / k**2) * exp1(1 / k**2) / (SQRT_PI * k**2)
    assert got == pytest.approx(closed, abs=1e-8)


@pytest.mark.parametrize("m", range(0, 9))
@pytest.mark.parametrize("k", [0.3, 1.7, 6.0])
def test_moments_against_adaptive(m, k):
    assert kn.t_moment(m, k) == pytest.approx(adaptive_t(m, k), abs=1e-9)


@pytest.mark.parametrize("m", range(0, 7))
@pytest.mark.parametrize("k", K_SET)
def test_moment_recurrence(m, k):
    lhs = kn.t_moment(m, k)
    rhs = kn.t_moment_zero(m) - k * k * kn.t_moment(m + 2, k)
    assert abs(lhs - rhs) < 1e-9


@pytest.mark.parametrize("m", range(0, 9))
def test_moments_decrease_in_k(m):
    k = np.logspace(-3, 3, 60)
    t = kn.t_moment(m, k)
    assert np.all(np.diff(t) < 0)
    assert np.all(t <= kn.t_moment_zero(m))


@pytest.mark.parametrize("m", range(2, 9))
def test_large_k_tail(m):
    k = 100.0
    scaled = k * k * kn.t_moment(m, k)
    # exact rewrite of the recurrence
    assert scaled == pytest.approx(kn.t_moment_zero(m - 2) - kn.t_moment(m - 2, k), rel=1e-12)
    gap = 1 - scaled / kn.t_moment_zero(m - 2)
    if m == 2:
        # 1 - k^2 T_2 = T_0(k) = sqrt(pi)/k erfcx(1/k); the fixed 64-node rule
        # resolves the poles at +-i/k only to ~0.2% this far out
        assert gap == pytest.approx(SQRT_PI / k * erfcx(1 / k), rel=5e-3)
        assert 0.017 < gap < 0.018
    else:
        assert 0 < gap < 0.01


def test_t_hat_at_zero_matches_display():
    np.testing.assert_allclose(kn.t_hat(1, 0.0), np.array([[1, 0.5], [1 / 3, 1.5]]) / SQRT_PI, atol=1e-14)
    np.testing.assert_allclose(kn.t_hat(2, 0.0), 0.5 * np.array([[1, 1], [2 / 3, 7 / 3]]), atol=1e-14)
    np.testing.assert_allclose(kn.t_hat_zero(1), kn.t_hat(1, 0.0), atol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("k", [0.4, 1.0, 3.0])
def test_t_hat_against_elementwise_adaptive(n, k):
    np.testing.assert_allclose(kn.t_hat(n, k), adaptive_matrix(n, k), atol=1e-10)


def test_t2_hat_elementwise_assembly():
    k = 1.0
    T = {m: kn.t_moment(m, k) for m in (2, 4, 6)}
    expected = [[T[2], T[4] - T[2] / 2],
                [2 / 3 * (T[4] - T[2] / 2), 2 / 3 * (T[6] - T[4] + 1.25 * T[2])]]
    got = kn.t_hat(2, k)
    np.testing.assert_allclose(got, expected, atol=1e-10)
    assert abs(got[1, 0] - 2 / 3 * got[0, 1]) < 1e-10


@pytest.mark.parametrize("n", [0, 5, -1])
def test_t_hat_index_out_of_range(n):
    with pytest.raises(DomainError):
        kn.t_hat(n, 1.0)


def test_dispersion_matrix_zero_at_origin():
    np.testing.assert_array_equal(kn.dispersion_matrix(0.0), np.zeros((2, 2)))


@pytest.mark.parametrize("k", [1.0, 3.0])
def test_dispersion_matrix_against_direct_quadrature(k):
    direct = np.eye(2) - adaptive_matrix(0, k)
    np.testing.assert_allclose(kn.dispersion_matrix(k), direct, atol=1e-8)


def test_j_kernel_reduces_to_t1():
    k = np.array(K_SET)
    np.testing.assert_allclose(kn.j_kernel(k, 0.0), kn.t_hat(1, k), atol=1e-10)
    np.testing.assert_allclose(kn.j_kernel(0.0, k), kn.t_hat(1, k), atol=1e-10)


def test_j_kernel_symmetric():
    np.testing.assert_allclose(kn.j_kernel(1.3, 0.4), kn.j_kernel(0.4, 1.3), atol=1e-12)


def test_j_kernel_against_adaptive():
    np.testing.assert_allclose(kn.j_kernel(0.8, 2.5), adaptive_matrix(1, 0.8, 2.5), atol=1e-10)


def test_j3_identity():
    k, k1 = 0.7, 1.9
    lhs = kn.t_hat(1, k1) - k * k * kn.j3_kernel(k, k1)
    assert np.max(np.abs(lhs - kn.j_kernel(k, k1))) < 1e-9


def test_j3_symmetry_and_origin():
    np.testing.assert_allclose(kn.j3_kernel(0.0, 2.2), kn.j3_kernel(2.2, 0.0), atol=1e-12)
    np.testing.assert_allclose(kn.j3_kernel(0.0, 0.0), kn.t_hat(3, 0.0), atol=1e-12)
    np.testing.assert_allclose(kn.j3_kernel(0.0, 2.2), kn.t_hat(3, 2.2), atol=1e-12)


def test_kernel_family_structure_on_grid():
    k = np.array(K_SET)
    mats = [kn.t_hat(n, k) for n in (1, 2, 3, 4)]
    mats += [kn.dispersion_matrix(k), kn.j_kernel(k[:, None], k[None, :]), kn.j3_kernel(k[:, None], k[None, :])]
    for m in mats:
        assert np.max(np.abs(m[..., 1, 0] - 2 / 3 * m[..., 0, 1])) < 1e-9


def test_det_t2_positive_and_matches_formula():
    k = np.logspace(-3, 3, 121)
    T2 = kn.t_hat(2, k)
    T = {m: kn.t_moment(m, k) for m in (2, 4, 6)}
    formula = 2 / 3 * (T[2] * T[6] - T[4] ** 2 + T[2] ** 2)
    det = kn.det2(T2)
    assert np.all(det > 0)
    np.testing.assert_allclose(det, formula, rtol=1e-10)


def test_solve2_examples():
    np.testing.assert_allclose(kn.solve2(np.eye(2), [3, -4]), [3, -4])
    np.testing.assert_allclose(kn.solve2([[2, 0], [0, 4]], [2, 4]), [1, 1])
    b = kn.t_hat(2, 0.0) @ np.array([-1.0, 1.0])
    np.testing.assert_allclose(b, [0, 5 / 6], atol=1e-14)
    x = kn.solve2(kn.t_hat(1, 0.0), b)
    np.testing.assert_allclose(x, [-5 * SQRT_PI / 16, 5 * SQRT_PI / 8], atol=1e-13)


def test_solve2_singular():
    with pytest.raises(SingularMatrixError) as info:
        kn.solve2([[1.0, 2.0], [2.0, 4.0]], [1.0, 1.0])
    assert info.value.det == 0.0


# subnormal entries underflow in any 2x2 solve and say nothing about the algorithm
entries = st.floats(-10, 10, allow_nan=False, allow_subnormal=False)


@settings(max_examples=200, deadline=None)
@given(a=st.tuples(entries, entries, entries, entries), b=st.tuples(entries, entries))
def test_solve2_multiply_back(a, b):
    A = np.array(a).reshape(2, 2)
    assume(abs(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]) > 1e-6)
    x = kn.solve2(A, b)
    scale = np.max(np.abs(A)) * np.max(np.abs(x)) + np.max(np.abs(b))
    assert np.max(np.abs(A @ x - np.array(b))) <= 1e-12 * scale


@settings(max_examples=40, deadline=None)
@given(k=st.floats(0.0, 50.0), k1=st.floats(0.0, 50.0))
def test_kernel_properties(k, k1):
    J = kn.j_kernel(k, k1)
    np.testing.assert_allclose(J, kn.j_kernel(k1, k), atol=1e-13)
    assert abs(J[1, 0] - 2 / 3 * J[0, 1]) < 1e-9
    assert np.max(np.abs(kn.t_hat(1, k1) - k * k * kn.j3_kernel(k, k1) - J)) < 1e-9 * max(1.0, k * k)
