"""Expansion of the jump coefficients and spectral density in powers of q.

With ``E(k) = (2-q) g_T sum_m q^m E_m(k)`` and
``eps = (2-q)/q g_T sum_m q^m eps^m`` the Fredholm equation splits into a
hierarchy.  Every order carries a double pole at ``k = 0`` through
``L(k) = k^2 T^_2(k)``; demanding that the pole vanish fixes ``eps^m``, after
which ``E_m`` follows from a regular 2x2 solve at each wavenumber.

Densities live on the nodes of one mapped k-rule, so every integral over
``k1`` in the recursion is a weighted sum over stored values against a
precomputed ``J^_3(k_i, k_j)`` tableau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
from scipy.interpolate import CubicSpline

from . import kernels as kn
from .errors import DomainError, InconsistentEpsError
from .kernels import GRADIENT_DIRECTION, SQRT_PI, matvec, solve2
from .quadrature import (
    QuadratureRule,
    build_algebraic_halfline_rule,
    build_gaussian_halfline_rule,
)

DEFAULT_K_NODES = 200
DEFAULT_MAP_SCALE = 1.0
DEFAULT_ORDER = 1
MAX_ORDER = 5


class Discretization:
    """Quadrature rules plus everything precomputed on the k-grid.

    Instances are immutable once built; use :func:`discretization` to share
    them between calls with the same sizes.
    """

    def __init__(self, mu_nodes: int = kn.DEFAULT_MU_NODES, k_nodes: int = DEFAULT_K_NODES,
                 map_scale: float = DEFAULT_MAP_SCALE):
        self.mu_rule = build_gaussian_halfline_rule(mu_nodes)
        self.k_rule = build_algebraic_halfline_rule(k_nodes, map_scale)
        k = self.k_rule.nodes
        self.t_hat = {n: kn.t_hat(n, k, self.mu_rule) for n in (1, 2, 3, 4)}
        # k = 0 limits taken with the same mu-rule so discrete identities close exactly
        self.t_hat_zero = {n: kn.t_hat(n, 0.0, self.mu_rule) for n in (1, 2, 3, 4)}
        for arr in (*self.t_hat.values(), *self.t_hat_zero.values()):
            arr.setflags(write=False)

    @property
    def k(self) -> np.ndarray:
        return self.k_rule.nodes

    @property
    def k_weights(self) -> np.ndarray:
        return self.k_rule.weights

    @property
    def sizes(self) -> dict:
        return {
            "mu_nodes": len(self.mu_rule),
            "k_nodes": len(self.k_rule),
            "map_scale": self.k_rule.map_scale,
        }

    @cached_property
    def j3_tableau(self) -> np.ndarray:
        """J^_3(k_i, k_j) with the k_j quadrature weight and 1/pi folded in."""
        k = self.k
        tab = kn.j3_kernel(k[:, None], k[None, :], self.mu_rule)
        tab *= (self.k_weights / math.pi)[None, :, None, None]
        tab.setflags(write=False)
        return tab

    @cached_property
    def j_tableau(self) -> np.ndarray:
        """J^(k_i, k_j), weighted like :attr:`j3_tableau`."""
        k = self.k
        tab = kn.j_kernel(k[:, None], k[None, :], self.mu_rule)
        tab *= (self.k_weights / math.pi)[None, :, None, None]
        tab.setflags(write=False)
        return tab

    def j3_row(self, k) -> np.ndarray:
        """Weighted J^_3(k, k_j) for arbitrary k (shape ``k.shape + (N, 2, 2)``)."""
        k = np.asarray(k, dtype=float)
        row = kn.j3_kernel(k[..., None], self.k, self.mu_rule)
        return row * (self.k_weights / math.pi)[:, None, None]

    def moment_integral(self, values: np.ndarray) -> np.ndarray:
        """(1/pi) int_0^inf T^_1(k) E(k) dk over stored node values."""
        return np.einsum("k,kab,kb->a", self.k_weights, self.t_hat[1], values) / math.pi


@lru_cache(maxsize=8)
def discretization(mu_nodes: int = kn.DEFAULT_MU_NODES, k_nodes: int = DEFAULT_K_NODES,
                   map_scale: float = DEFAULT_MAP_SCALE) -> Discretization:
    return Discretization(int(mu_nodes), int(k_nodes), float(map_scale))


@dataclass(frozen=True, eq=False)
class SpectralDensity:
    """A two-component density sampled on the k-rule nodes.

    ``at_zero`` is the finite ``k -> 0`` limit, which the mapped grid never
    samples; it anchors the interpolant at the origin.
    """

    disc: Discretization
    values: np.ndarray
    at_zero: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (len(self.disc.k), 2):
            raise ValueError(f"density values must have shape ({len(self.disc.k)}, 2), got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("density values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "at_zero", np.asarray(self.at_zero, dtype=float))

    @property
    def k_grid(self) -> np.ndarray:
        return self.disc.k

    @classmethod
    def zeros(cls, disc: Discretization) -> SpectralDensity:
        return cls(disc, np.zeros((len(disc.k), 2)))

    def scaled(self, factor: float) -> SpectralDensity:
        return SpectralDensity(self.disc, factor * self.values, factor * self.at_zero)

    def __add__(self, other: SpectralDensity) -> SpectralDensity:
        if other.disc is not self.disc:
            raise ValueError("densities live on different grids")
        return SpectralDensity(self.disc, self.values + other.values, self.at_zero + other.at_zero)

    @cached_property
    def _spline(self) -> CubicSpline:
        # interpolate in the compactified variable t = k / (s + k), where E is smooth
        s = self.disc.k_rule.map_scale
        t = np.concatenate([[0.0], self.k_grid / (s + self.k_grid), [1.0]])
        y = np.vstack([self.at_zero, self.values, np.zeros(2)])
        return CubicSpline(t, y, axis=0)

    def __call__(self, k) -> np.ndarray:
        """Piecewise-cubic evaluation off the grid; tends to 0 as k -> inf."""
        k = np.asarray(k, dtype=float)
        s = self.disc.k_rule.map_scale
        return self._spline(k / (s + k))


@dataclass(frozen=True)
class SeriesOrder:
    m: int
    eps: np.ndarray
    density: SpectralDensity = field(repr=False)


@dataclass(frozen=True)
class JumpResult:
    q: float
    g_T: float
    order: int
    eps_n: float
    eps_T: float
    coefficients: list[SeriesOrder] = field(repr=False)
    diagnostics: dict = field(default_factory=dict, repr=False)

    @property
    def eps(self) -> np.ndarray:
        return np.array([self.eps_n, self.eps_T])

    def density(self) -> SpectralDensity:
        """Assembled E(k) = (2-q) g_T sum_m q^m E_m(k)."""
        total = SpectralDensity.zeros(self.coefficients[0].density.disc)
        for c in self.coefficients:
            total = total + c.density.scaled(self.q**c.m)
        return total.scaled((2.0 - self.q) * self.g_T)


def zero_order_jumps(disc: Discretization | None = None) -> np.ndarray:
    """Solve T^_1(0) eps0 = T^_2(0) (-1, 1); analytically (-5 sqrt(pi)/16, 5 sqrt(pi)/8)."""
    if disc is None:
        t1, t2 = kn.t_hat_zero(1), kn.t_hat_zero(2)
    else:
        t1, t2 = disc.t_hat_zero[1], disc.t_hat_zero[2]
    return solve2(t1, t2 @ GRADIENT_DIRECTION)


def c_vector(k, eps0, rule: QuadratureRule | None = None) -> np.ndarray:
    """C(k) = T^_3(k) eps0 - T^_4(k) (-1, 1), written out with eps_n = -eps_T/2."""
    eps_n, eps_T = (float(v) for v in np.asarray(eps0, dtype=float))
    if not math.isclose(eps_n, -0.5 * eps_T, rel_tol=1e-10, abs_tol=1e-14):
        raise InconsistentEpsError(f"expected eps_n = -eps_T/2, got ({eps_n!r}, {eps_T!r})")
    T = {m: kn.t_moment(m, k, rule) for m in range(3, 9)}
    c1 = eps_T * (T[5] - T[3]) + 1.5 * T[4] - T[6]
    c2 = 2.0 / 3.0 * (eps_T * (T[7] - 1.5 * T[5] + 1.5 * T[3]) + 2.0 * T[6] - T[8] - 1.75 * T[4])
    return np.stack([c1, c2], axis=-1)


def zero_order_density(k, eps0, rule: QuadratureRule | None = None) -> np.ndarray:
    """E_0(k) = T^_2(k)^-1 C(k); regular at k = 0 by construction."""
    return solve2(kn.t_hat(2, k, rule), c_vector(k, eps0, rule))


def d_integrals(E0: SpectralDensity) -> np.ndarray:
    """(D_1, D_2) = (1/pi) int_0^inf T^_1(k) E_0(k) dk."""
    return E0.disc.moment_integral(E0.values)


def first_order_jumps(D) -> np.ndarray:
    d1, d2 = np.asarray(D, dtype=float)
    return np.array([
        -3.0 * SQRT_PI / 8.0 * (3.0 * d1 - d2),
        SQRT_PI / 4.0 * (d1 - 3.0 * d2),
    ])


def next_order_jumps(E_prev: SpectralDensity) -> np.ndarray:
    """eps^m = -T^_1(0)^-1 (1/pi) int T^_1(k1) E_{m-1}(k1) dk1."""
    disc = E_prev.disc
    return -solve2(disc.t_hat_zero[1], disc.moment_integral(E_prev.values))


def next_order_density(eps_m, E_prev: SpectralDensity) -> SpectralDensity:
    """E_m(k) = T^_2(k)^-1 [T^_3(k) eps^m + (1/pi) int J^_3(k, k1) E_{m-1}(k1) dk1]."""
    disc = E_prev.disc
    eps_m = np.asarray(eps_m, dtype=float)
    coupling = np.einsum("ijab,jb->ia", disc.j3_tableau, E_prev.values)
    rhs = matvec(disc.t_hat[3], eps_m) + coupling
    values = solve2(disc.t_hat[2], rhs)
    # k = 0: J^_3(0, k1) row, T^_n(0) matrices
    row0 = disc.j3_row(0.0)
    rhs0 = disc.t_hat_zero[3] @ eps_m + np.einsum("jab,jb->a", row0, E_prev.values)
    at_zero = solve2(disc.t_hat_zero[2], rhs0)
    return SpectralDensity(disc, values, at_zero)


def zero_order_series(disc: Discretization) -> SeriesOrder:
    eps0 = zero_order_jumps(disc)
    values = solve2(disc.t_hat[2], matvec(disc.t_hat[3], eps0) - matvec(disc.t_hat[4], GRADIENT_DIRECTION))
    at_zero = solve2(disc.t_hat_zero[2],
                     disc.t_hat_zero[3] @ eps0 - disc.t_hat_zero[4] @ GRADIENT_DIRECTION)
    return SeriesOrder(0, eps0, SpectralDensity(disc, values, at_zero))


@lru_cache(maxsize=8)
def _series_cached(disc: Discretization, order: int) -> tuple[SeriesOrder, ...]:
    if order == 0:
        return (zero_order_series(disc),)
    previous = _series_cached(disc, order - 1)
    E_prev = previous[-1].density
    eps_m = next_order_jumps(E_prev)
    return previous + (SeriesOrder(order, eps_m, next_order_density(eps_m, E_prev)),)


def series_coefficients(order: int, disc: Discretization | None = None) -> list[SeriesOrder]:
    """Orders 0..order of the expansion (g_T-independent, unit gradient)."""
    _check_order(order)
    return list(_series_cached(disc or discretization(), order))


def pole_residual(disc: Discretization, coefficients: list[SeriesOrder], m: int) -> float:
    """Max-norm of the k = 0 solvability condition at order m."""
    eps = coefficients[m].eps
    if m == 0:
        r = disc.t_hat_zero[1] @ eps - disc.t_hat_zero[2] @ GRADIENT_DIRECTION
    else:
        r = disc.t_hat_zero[1] @ eps + disc.moment_integral(coefficients[m - 1].density.values)
    return float(np.max(np.abs(r)))


def assemble_series(q: float, g_T: float = 1.0, order: int = DEFAULT_ORDER,
                    disc: Discretization | None = None) -> JumpResult:
    """Jump coefficients eps(q) = (2-q)/q g_T sum_{m<=order} q^m eps^m."""
    check_accommodation(q)
    if not math.isfinite(g_T):
        raise DomainError(f"g_T must be finite, got {g_T!r}")
    disc = disc or discretization()
    coeffs = series_coefficients(order, disc)
    poly = sum(c.eps * q**c.m for c in coeffs)
    eps = (2.0 - q) / q * g_T * poly
    diagnostics = {
        **disc.sizes,
        "pole_residuals": [pole_residual(disc, coeffs, m) for m in range(order + 1)],
    }
    return JumpResult(float(q), float(g_T), order, float(eps[0]), float(eps[1]), coeffs, diagnostics)


def check_accommodation(q) -> None:
    if not (isinstance(q, (int, float, np.floating)) and 0.0 < q <= 1.0):
        raise DomainError(f"accommodation coefficient must lie in (0, 1], got {q!r}")


def _check_order(order) -> None:
    if isinstance(order, bool) or not isinstance(order, (int, np.integer)) or not 0 <= order <= MAX_ORDER:
        raise DomainError(f"series order must be an integer in 0..{MAX_ORDER}, got {order!r}")
