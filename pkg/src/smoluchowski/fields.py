"""Wall distribution and macroscopic moment profiles from a spectral density.

The density ``E(k)`` is treated as even in ``k``, so the continuum part of the
moment vector is the cosine transform

    U_c(x) = (1/pi) int_0^inf cos(k x) E(k) dk,   U_c = (dn_c/n0, dT_c/T0).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from .errors import DomainError
from .kernels import GRADIENT_DIRECTION, SQRT_PI, matrix_kernel
from .neumann import SpectralDensity

PANEL_NODES = 8
TAIL_START = 2000.0
MAX_PANELS = 400_000


class ResolutionWarning(UserWarning):
    """Oscillatory quadrature has fewer than 4 nodes per cosine period."""


@dataclass(frozen=True)
class MomentProfile:
    x_grid: np.ndarray
    values: np.ndarray  # (len(x_grid), 2): dn_c/n0, dT_c/T0

    @property
    def density(self) -> np.ndarray:
        return self.values[:, 0]

    @property
    def temperature(self) -> np.ndarray:
        return self.values[:, 1]


def boundary_distribution(mu, E: SpectralDensity) -> np.ndarray:
    """h_c(0, mu) = (1/pi) int_0^inf E(k1) / (1 + k1^2 mu^2) dk1 for the incoming half."""
    mu = np.asarray(mu, dtype=float)
    if not np.all(np.isfinite(mu)):
        raise DomainError("mu must be finite")
    k = E.k_grid
    w = E.disc.k_weights / math.pi
    factor = w / (1.0 + np.multiply.outer(mu * mu, k * k))
    return factor @ E.values


def wall_moments(E: SpectralDensity, eps, q: float, g_T: float = 1.0) -> np.ndarray:
    """Moments (dn_c/n0, dT_c/T0) at x = 0 built from the wall distribution.

    Molecules arriving at the wall (mu < 0) follow :func:`boundary_distribution`;
    the re-emitted half follows the Maxwell law
    ``h(+0, mu) = -q eps + (2-q) g_T mu (-1, 1) + (1-q) h(+0, -mu)``.
    For a solution of the Fredholm equation this reproduces ``U_c(0)``.
    """
    rule = E.disc.mu_rule
    mu = rule.nodes
    incoming = boundary_distribution(mu, E)
    outgoing = (-q * np.asarray(eps, dtype=float)[None, :]
                + (2.0 - q) * g_T * mu[:, None] * GRADIENT_DIRECTION[None, :]
                + (1.0 - q) * incoming)
    h = incoming + outgoing
    return np.einsum("m,mab,mb->a", rule.weights, matrix_kernel(mu), h) / SQRT_PI


def _panel_rule(x: float) -> tuple[np.ndarray, np.ndarray, float]:
    """Composite Gauss-Legendre on [0, K] with half-period panels, K a multiple of pi/x."""
    half_period = math.pi / x
    h = min(1.0, half_period)
    # at least 20 periods before the asymptotic tail takes over
    K = max(TAIL_START, 40.0 * half_period)
    K = math.ceil(K / half_period) * half_period
    n_panels = math.ceil(K / h)
    if n_panels > MAX_PANELS:
        raise DomainError(f"x = {x!r} is too small for the oscillatory rule; use x = 0 or x >= {math.pi / (MAX_PANELS / 40):.3g}")
    h = K / n_panels
    t, w = roots_legendre(PANEL_NODES)
    left = h * np.arange(n_panels)[:, None]
    nodes = (left + 0.5 * h * (t + 1.0)).ravel()
    weights = np.broadcast_to(0.5 * h * w, (n_panels, PANEL_NODES)).ravel()
    return nodes, weights, K


def _nodes_per_period(nodes: np.ndarray, x: float, E: SpectralDensity) -> float:
    """Worst node density over the part of the grid where E is not negligible."""
    if x == 0 or len(nodes) < 2:
        return math.inf
    vals = np.max(np.abs(E(nodes)), axis=1)
    significant = vals > 1e-6 * vals.max()
    gaps = np.diff(nodes)[significant[:-1]]
    if gaps.size == 0:
        return math.inf
    return (2.0 * math.pi / x) / gaps.max()


def _cosine_transform(x: float, E: SpectralDensity, method: str) -> np.ndarray:
    if x == 0.0:
        return E.disc.k_weights @ E.values / math.pi
    if method == "mapped":
        nodes, weights = E.k_grid, E.disc.k_weights
        if _nodes_per_period(nodes, x, E) < 4:
            warnings.warn(f"mapped k-rule under-resolves cos(kx) at x={x:g}", ResolutionWarning, stacklevel=3)
        return (weights * np.cos(nodes * x)) @ E.values / math.pi
    nodes, weights, K = _panel_rule(x)
    body = (weights * np.cos(nodes * x)) @ E(nodes)
    # int_K^inf cos(kx) E dk by parts; sin(Kx) = 0 by choice of K
    s = E.disc.k_rule.map_scale
    dE_dt = E._spline(K / (s + K), 1)
    dE_dk = dE_dt * s / (s + K) ** 2
    tail = -math.sin(K * x) * E(K) / x - math.cos(K * x) * dE_dk / x**2
    return (body + tail) / math.pi


def macroscopic_profile(x_grid, E: SpectralDensity, method: str = "auto") -> MomentProfile:
    """U_c on ``x_grid`` (distances in mean free paths).

    ``method="auto"`` uses the stored k-rule at x = 0 and an oscillation-aware
    panel rule elsewhere; ``"mapped"`` forces the stored rule everywhere and
    warns with :class:`ResolutionWarning` when it cannot resolve ``cos(kx)``.
    """
    if method not in ("auto", "mapped"):
        raise DomainError(f"unknown method {method!r}")
    x = np.atleast_1d(np.asarray(x_grid, dtype=float))
    if not np.all(np.isfinite(x)) or np.any(x < 0):
        raise DomainError("profile abscissae must be finite and non-negative")
    values = np.array([_cosine_transform(float(xi), E, method) for xi in x]).reshape(len(x), 2)
    return MomentProfile(x, values)
