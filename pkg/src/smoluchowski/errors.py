"""Exception types raised by the solver stack."""

from __future__ import annotations


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class ConfigError(ValueError):
    """Invalid user-facing parameter (node counts, q, tolerances, ...)."""


class IntegrandError(ValueError):
    """An integrand returned a non-finite value at a quadrature node."""

    def __init__(self, node: float, value: float):
        super().__init__(f"integrand is not finite at node {node!r} (value {value!r})")
        self.node = node
        self.value = value


class SingularMatrixError(ArithmeticError):
    def __init__(self, det: float):
        super().__init__(f"2x2 system is numerically singular (det={det!r})")
        self.det = det


class InconsistentEpsError(ValueError):
    """The zero-order jump pair violates eps_n = -eps_T / 2."""


class DivergenceError(RuntimeError):
    def __init__(self, message: str, history: list[float]):
        super().__init__(message)
        self.history = list(history)
