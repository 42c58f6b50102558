"""Fixed-point solution of the full Fredholm equation, without expanding in q.

Serves as an oracle for the series in :mod:`smoluchowski.neumann`: it shares
the k-grid and kernel tableaux, so the two differ only by series truncation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError, DomainError
from .kernels import GRADIENT_DIRECTION, matvec, solve2
from .neumann import (
    Discretization,
    JumpResult,
    SpectralDensity,
    check_accommodation,
    discretization,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DirectSolution:
    eps: np.ndarray
    density: SpectralDensity = field(repr=False)
    iterations: int
    final_residual: float
    history: list[float] = field(default_factory=list, repr=False)

    @classmethod
    def from_series(cls, result: JumpResult) -> DirectSolution:
        """Wrap a truncated series so it can be fed to :func:`fredholm_residual`."""
        return cls(result.eps, result.density(), 0, float("nan"))


def _sweep(disc: Discretization, q: float, g_T: float, E: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    source = (2.0 - q) * g_T
    # eps chosen so the right-hand side vanishes at k = 0 (double-pole removal)
    rhs0 = source * disc.t_hat_zero[2] @ GRADIENT_DIRECTION - q * disc.moment_integral(E)
    eps = solve2(q * disc.t_hat_zero[1], rhs0)
    # remaining right-hand side divided by k^2, via T_m(k) = T_m(0) - k^2 T_{m+2}(k)
    regular = (q * matvec(disc.t_hat[3], eps)
               - source * matvec(disc.t_hat[4], GRADIENT_DIRECTION)
               + q * np.einsum("ijab,jb->ia", disc.j3_tableau, E))
    E_new = solve2(disc.t_hat[2], regular)
    regular0 = (q * disc.t_hat_zero[3] @ eps
                - source * disc.t_hat_zero[4] @ GRADIENT_DIRECTION
                + q * np.einsum("jab,jb->a", disc.j3_row(0.0), E))
    return eps, E_new, solve2(disc.t_hat_zero[2], regular0)


def solve_fixed_point(q: float, g_T: float = 1.0, tol: float = 1e-10, max_iter: int = 200,
                      relaxation: float = 1.0, disc: Discretization | None = None) -> DirectSolution:
    """Picard iteration on the Fredholm equation starting from E = 0.

    Each sweep first re-derives ``eps`` from the k = 0 solvability condition,
    then updates ``E`` on the grid.  Stops when the max-norm change in ``E``
    and ``eps`` falls below ``tol``; raises :class:`DivergenceError` otherwise.
    """
    check_accommodation(q)
    if not (tol > 0 and math.isfinite(tol)):
        raise DomainError(f"tol must be positive, got {tol!r}")
    if not 0.0 < relaxation <= 1.0:
        raise DomainError(f"relaxation must lie in (0, 1], got {relaxation!r}")
    disc = disc or discretization()
    E = np.zeros((len(disc.k), 2))
    eps = np.zeros(2)
    history = []
    for it in range(1, max_iter + 1):
        eps_new, E_new, E0 = _sweep(disc, q, g_T, E)
        if relaxation != 1.0 and it > 1:
            E_new = E + relaxation * (E_new - E)
        change = max(np.max(np.abs(E_new - E)), np.max(np.abs(eps_new - eps)))
        history.append(float(change))
        E, eps = E_new, eps_new
        if not math.isfinite(change):
            break
        if change < tol:
            density = SpectralDensity(disc, E, E0)
            sol = DirectSolution(eps, density, it, 0.0, history)
            res = fredholm_residual(sol, q, g_T)
            log.debug("fixed point q=%g converged in %d sweeps, residual %.3e", q, it, res)
            return DirectSolution(eps, density, it, res, history)
    raise DivergenceError(f"fixed-point iteration did not converge in {max_iter} sweeps "
                          f"(last change {history[-1]:.3e})", history)


def fredholm_residual(sol: DirectSolution, q: float, g_T: float = 1.0) -> float:
    """Max over grid nodes of the Fredholm equation residual in max-norm."""
    disc = sol.density.disc
    E = sol.density.values
    k2 = disc.k**2
    lhs = k2[:, None] * matvec(disc.t_hat[2], E)
    rhs = (-q * matvec(disc.t_hat[1], sol.eps)
           + (2.0 - q) * g_T * matvec(disc.t_hat[2], GRADIENT_DIRECTION)
           - q * np.einsum("ijab,jb->ia", disc.j_tableau, E))
    return float(np.max(np.abs(lhs - rhs)))
