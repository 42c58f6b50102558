"""Half-line quadrature rules.

Two families are needed:

* ``gaussian-weight-halfline``: Gauss rules for the weight ``exp(-mu**2)`` on
  ``[0, inf)``.  The weight factor lives in the weights, so integrands passed to
  :func:`integrate` must *not* include it.
* ``algebraic-halfline``: Gauss-Legendre on ``[0, 1)`` pushed through the map
  ``k = s * t / (1 - t)``; suited to smooth integrands decaying like ``1/k**2``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import mpmath as mp
import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import roots_legendre

from .errors import ConfigError, IntegrandError

MAX_GAUSSIAN_NODES = 256
MAX_ALGEBRAIC_NODES = 20000


class RuleKind(str, enum.Enum):
    GAUSSIAN_HALFLINE = "gaussian-weight-halfline"
    ALGEBRAIC_HALFLINE = "algebraic-halfline"


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    kind: RuleKind
    map_scale: float | None = None

    def __post_init__(self):
        for arr in (self.nodes, self.weights):
            arr.setflags(write=False)

    def __len__(self) -> int:
        return len(self.nodes)


def _halfrange_recurrence(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Monic recurrence coefficients for exp(-x^2) on [0, inf).

    Modified Chebyshev algorithm on the exact moments Gamma((j+1)/2)/2.  The
    moment map is exponentially ill-conditioned, hence the extended precision.
    """
    n_mom = 2 * n
    with mp.workdps(2 * n + 40):
        mom = [mp.gamma(mp.mpf(j + 1) / 2) / 2 for j in range(n_mom)]
        alpha = [mp.mpf(0)] * n
        beta = [mp.mpf(0)] * n
        alpha[0] = mom[1] / mom[0]
        beta[0] = mom[0]
        sig_prev = [mp.mpf(0)] * n_mom
        sig = list(mom)
        for k in range(1, n):
            sig_new = [mp.mpf(0)] * n_mom
            for ell in range(k, n_mom - k):
                sig_new[ell] = sig[ell + 1] - alpha[k - 1] * sig[ell] - beta[k - 1] * sig_prev[ell]
            alpha[k] = sig_new[k + 1] / sig_new[k] - sig[k] / sig[k - 1]
            beta[k] = sig_new[k] / sig[k - 1]
            sig_prev, sig = sig, sig_new
        return (np.array([float(a) for a in alpha]), np.array([float(b) for b in beta]))


def _orthonormal_values(x: np.ndarray, alpha: np.ndarray, beta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # p_0..p_{n-1} and d/dx p_n (up to the missing final normalisation) at x
    n = len(alpha)
    sb = np.sqrt(beta)
    p_prev = np.zeros_like(x)
    p = np.full_like(x, 1.0 / sb[0])
    d_prev = np.zeros_like(x)
    d = np.zeros_like(x)
    rows = [p]
    for k in range(n):
        norm = sb[k + 1] if k + 1 < n else 1.0
        back = sb[k] if k > 0 else 0.0
        p_next = ((x - alpha[k]) * p - back * p_prev) / norm
        d_next = (p + (x - alpha[k]) * d - back * d_prev) / norm
        p_prev, p = p, p_next
        d_prev, d = d, d_next
        if k + 1 < n:
            rows.append(p)
    return np.array(rows), (p, d)


@lru_cache(maxsize=None)
def _gaussian_halfline(n: int) -> tuple[np.ndarray, np.ndarray]:
    alpha, beta = _halfrange_recurrence(n)
    x = eigh_tridiagonal(alpha, np.sqrt(beta[1:]), eigvals_only=True)
    # one Newton polish on p_n; Golub-Welsch nodes are already close
    _, (pn, dpn) = _orthonormal_values(x, alpha, beta)
    x = x - pn / dpn
    rows, _ = _orthonormal_values(x, alpha, beta)
    w = 1.0 / np.sum(rows**2, axis=0)
    return x, w


def build_gaussian_halfline_rule(n: int) -> QuadratureRule:
    """Gauss rule with ``n`` nodes for ``int_0^inf exp(-mu^2) f(mu) dmu``.

    Exact (to rounding) for polynomial ``f`` of degree ``<= 2n - 1``.
    """
    n = _check_count(n, MAX_GAUSSIAN_NODES)
    x, w = _gaussian_halfline(n)
    return QuadratureRule(x.copy(), w.copy(), RuleKind.GAUSSIAN_HALFLINE)


def build_algebraic_halfline_rule(n: int, map_scale: float = 1.0) -> QuadratureRule:
    """Gauss-Legendre rule on [0, 1) mapped to [0, inf) by k = s t / (1 - t)."""
    n = _check_count(n, MAX_ALGEBRAIC_NODES)
    if not (np.isfinite(map_scale) and map_scale > 0):
        raise ConfigError(f"map_scale must be a positive finite number, got {map_scale!r}")
    t, w = roots_legendre(n)
    t = 0.5 * (t + 1.0)
    w = 0.5 * w
    s = float(map_scale)
    nodes = s * t / (1.0 - t)
    weights = w * s / (1.0 - t) ** 2
    return QuadratureRule(nodes, weights, RuleKind.ALGEBRAIC_HALFLINE, map_scale=s)


def integrate(rule: QuadratureRule, f: Callable[[np.ndarray], np.ndarray]) -> float:
    """Apply ``rule`` to a vectorised integrand.

    For Gaussian-weight rules ``f`` must exclude the ``exp(-mu^2)`` factor.
    """
    values = np.broadcast_to(np.asarray(f(rule.nodes), dtype=float), rule.nodes.shape)
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.argmax(bad))
        raise IntegrandError(float(rule.nodes[i]), float(values[i]))
    return float(rule.weights @ values)


def _check_count(n, cap: int) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise ConfigError(f"node count must be an integer, got {n!r}")
    n = int(n)
    if n < 2:
        raise ConfigError(f"node count must be >= 2, got {n}")
    if n > cap:
        raise ConfigError(f"node count {n} exceeds the cap of {cap}")
    return n
