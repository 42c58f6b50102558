"""External benchmark values, shipped for comparison only (never recomputed).

Temperature-jump coefficients per unit gradient from a high-precision
discrete-ordinates solution of the same BGK problem.
"""

DISCRETE_ORDINATES_EPS_T = {
    1.0: 1.30272,
    0.9: 1.57026,
    0.7: 2.31753,
    0.6: 2.86762,
    0.5: 3.62922,
    0.3: 6.63051,
    0.1: 21.45012,
}

# exact solution for purely diffuse reflection (q = 1)
EXACT_DIFFUSE = {"eps_T": 1.30272, "eps_n": -0.74428}

DEFAULT_Q_LIST = (1.0, 0.9, 0.7, 0.6, 0.5, 0.3, 0.1)


def reference_eps_T(q: float) -> float | None:
    for key, value in DISCRETE_ORDINATES_EPS_T.items():
        if abs(q - key) < 1e-12:
            return value
    return None
