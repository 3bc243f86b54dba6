"""Independent reference values: classical closed forms and 1-D adaptive quadrature.

Nothing here calls into the package.
"""

import numpy as np
from scipy.integrate import quad


def arcsine_integral(F) -> float:
    """``int F(x) dx / (pi*sqrt(1 - x**2))`` over ``[-1, 1]``, via ``x = cos(theta)``."""
    val, _ = quad(lambda th: F(np.cos(th)), 0, np.pi, limit=400)
    return val / np.pi


def interval_green(z):
    """``log|z + sqrt(z**2 - 1)|`` for the interval ``[-1, 1]``."""
    return np.abs(np.real(np.arccosh(np.asarray(z, dtype=complex))))


def interval_density(x):
    return 1 / (np.pi * np.sqrt(1 - x * x))


def circular_arc_capacity(r: float, alpha: float) -> float:
    """Capacity of a circular arc of radius ``r`` subtending the angle ``alpha``."""
    return r * np.sin(alpha / 4)


def circular_arc_density(theta, alpha: float):
    """Equilibrium density in arc length on the unit-circle arc ``|arg z| <= alpha/2``."""
    b = alpha / 2
    return np.cos(theta / 2) / (2 * np.pi * np.sqrt(np.sin(b / 2) ** 2 - np.sin(theta / 2) ** 2))


def circular_arc_log_R(alpha: float) -> float:
    """``int log(omega) dmu`` for the unit-circle arc, with ``sin(theta/2) = sin(b/2) sin(p)``.

    Under this substitution ``dmu = dp/pi`` on ``(-pi/2, pi/2)``.
    """
    b = alpha / 2
    k = np.sin(b / 2)

    def integrand(p):
        th = 2 * np.arcsin(k * np.sin(p))
        return np.log(np.cos(th / 2) / (2 * np.pi * k * np.cos(p)))

    val, _ = quad(integrand, -np.pi / 2, np.pi / 2, limit=400)
    return val / np.pi


def circular_arc_nu(alpha: float) -> float:
    """``2*pi*R(inf)*Cap`` for the unit-circle arc; scale invariant."""
    return 2 * np.pi * circular_arc_capacity(1.0, alpha) * np.exp(circular_arc_log_R(alpha))


def monic_chebyshev_norm(n: int) -> float:
    """Sup norm of the monic Chebyshev polynomial on ``[-1, 1]``."""
    return 2.0 ** (1 - n)
