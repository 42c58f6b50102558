"""Moments, matrix kernels and 2x2 linear algebra for the vector BGK problem.

Matrices are numpy arrays of shape ``(..., 2, 2)`` and vectors ``(..., 2)``,
so every routine here broadcasts over arrays of wavenumbers.  All integrals
over the velocity component ``mu`` use one shared half-line Gauss rule for the
weight ``exp(-mu^2)``; by default that rule has :data:`DEFAULT_MU_NODES` nodes.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConfigError, DomainError, SingularMatrixError
from .quadrature import QuadratureRule, RuleKind, build_gaussian_halfline_rule

DEFAULT_MU_NODES = 64
MAX_MOMENT = 8

SQRT_PI = math.sqrt(math.pi)
# (-1, 1)^T: direction of the Chapman-Enskog gradient term in (h1, h2) space
GRADIENT_DIRECTION = np.array([-1.0, 1.0])
_DET_FLOOR = 1e-12


def _mu_rule(rule: QuadratureRule | None) -> QuadratureRule:
    if rule is None:
        return build_gaussian_halfline_rule(DEFAULT_MU_NODES)
    if rule.kind is not RuleKind.GAUSSIAN_HALFLINE:
        raise ConfigError("velocity integrals need a gaussian-weight-halfline rule")
    return rule


def _as_matrix(a11, a12, a21, a22) -> np.ndarray:
    a11, a12, a21, a22 = np.broadcast_arrays(a11, a12, a21, a22)
    return np.stack([np.stack([a11, a12], -1), np.stack([a21, a22], -1)], -2)


def matrix_kernel(mu) -> np.ndarray:
    """K(mu) = [[1, mu^2 - 1/2], [2/3 (mu^2 - 1/2), 2/3 ((mu^2 - 1/2)^2 + 1)]]."""
    s = np.asarray(mu, dtype=float) ** 2 - 0.5
    return _as_matrix(np.ones_like(s), s, 2.0 / 3.0 * s, 2.0 / 3.0 * (s * s + 1.0))


def t_moment_zero(m: int) -> float:
    """Closed form of T_m(0) = 2/sqrt(pi) int_0^inf exp(-mu^2) mu^m dmu."""
    _check_moment(m)
    half, odd = divmod(m, 2)
    if odd:
        return math.factorial(half) / SQRT_PI
    double_fact = math.prod(range(2 * half - 1, 0, -2))
    return double_fact / 2.0**half


def t_moment(m: int, k, rule: QuadratureRule | None = None):
    """T_m(k) = 2/sqrt(pi) int_0^inf exp(-mu^2) mu^m / (1 + k^2 mu^2) dmu."""
    _check_moment(m)
    k = _check_wavenumber(k)
    rule = _mu_rule(rule)
    mu, w = rule.nodes, rule.weights
    vals = (w * mu**m) / (1.0 + np.multiply.outer(k * k, mu * mu))
    return 2.0 / SQRT_PI * vals.sum(axis=-1)


def _assemble(tn, tn2, tn4) -> np.ndarray:
    a12 = tn2 - 0.5 * tn
    return _as_matrix(tn, a12, 2.0 / 3.0 * a12, 2.0 / 3.0 * (tn4 - tn2 + 1.25 * tn))


def t_hat(n: int, k, rule: QuadratureRule | None = None) -> np.ndarray:
    """Matrix T^_n(k) built elementwise from T_n, T_{n+2}, T_{n+4}.

    ``n`` ranges over 1..4; ``n = 4`` is the first to need T_8.
    """
    if isinstance(n, bool) or n not in (1, 2, 3, 4):
        raise DomainError(f"t_hat index must be one of 1..4, got {n!r}")
    return _assemble(*(t_moment(n + d, k, rule) for d in (0, 2, 4)))


def t_hat_zero(n: int) -> np.ndarray:
    """T^_n(0) from the closed-form moments (no quadrature)."""
    if isinstance(n, bool) or n not in (1, 2, 3, 4):
        raise DomainError(f"t_hat index must be one of 1..4, got {n!r}")
    return _assemble(*(t_moment_zero(n + d) for d in (0, 2, 4)))


def dispersion_matrix(k, rule: QuadratureRule | None = None) -> np.ndarray:
    """L(k) = E_2 - T^_0(k), evaluated through the exact rewrite k^2 T^_2(k)."""
    k = _check_wavenumber(k)
    return (k * k)[..., None, None] * t_hat(2, k, rule)


def _rational_kernel(power: int, k, k1, rule: QuadratureRule | None) -> np.ndarray:
    rule = _mu_rule(rule)
    k, k1 = np.broadcast_arrays(_check_wavenumber(k), _check_wavenumber(k1))
    mu, w = rule.nodes, rule.weights
    mu2 = mu * mu
    weight = (2.0 / SQRT_PI) * w * mu**power
    scal = weight / ((1.0 + np.multiply.outer(k * k, mu2)) * (1.0 + np.multiply.outer(k1 * k1, mu2)))
    return np.einsum("...m,mab->...ab", scal, matrix_kernel(mu))


def j_kernel(k, k1, rule: QuadratureRule | None = None) -> np.ndarray:
    """Fredholm kernel J^(k, k1); symmetric in its arguments, J^(k, 0) = T^_1(k)."""
    return _rational_kernel(1, k, k1, rule)


def j3_kernel(k, k1, rule: QuadratureRule | None = None) -> np.ndarray:
    """J^_3(k, k1), defined by J^(k, k1) = T^_1(k1) - k^2 J^_3(k, k1)."""
    return _rational_kernel(3, k, k1, rule)


def det2(a: np.ndarray) -> np.ndarray:
    return a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]


def solve2(a, b) -> np.ndarray:
    """Cramer's rule for (batches of) 2x2 systems ``a @ x = b``.

    Raises :class:`SingularMatrixError` when ``|det| <= 1e-12 * max|a|^2``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    det = det2(a)
    scale = np.max(np.abs(a), axis=(-2, -1))
    tiny = np.abs(det) <= _DET_FLOOR * scale**2
    if np.any(tiny):
        raise SingularMatrixError(float(np.ravel(det)[np.argmax(np.ravel(tiny))]))
    x1 = (a[..., 1, 1] * b[..., 0] - a[..., 0, 1] * b[..., 1]) / det
    x2 = (a[..., 0, 0] * b[..., 1] - a[..., 1, 0] * b[..., 0]) / det
    return np.stack([x1, x2], axis=-1)


def matvec(a: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.einsum("...ab,...b->...a", a, v)


def _check_moment(m) -> None:
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or not 0 <= m <= MAX_MOMENT:
        raise DomainError(f"moment index must be an integer in 0..{MAX_MOMENT}, got {m!r}")


def _check_wavenumber(k) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    if not np.all(np.isfinite(k)) or np.any(k < 0):
        raise DomainError("wavenumbers must be finite and non-negative")
    return k
