"""Capacity and equilibrium density from the first-kind logarithmic integral equation.

Independent of the conformal-map route: the equilibrium measure is sought
as ``dmu = psi(t) dt / (pi*sqrt(1 - t**2))`` with ``psi`` a Chebyshev series,
and ``int log|gamma(t) - gamma(tau)| dmu(tau) = log Cap`` is collocated at
Chebyshev points.  The kernel splits as ``log|t - tau|`` (integrated exactly
against ``T_k``) plus the smooth ``log|divided difference|``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as C

from .geometry import ArcSpec, NormalizedArc

__all__ = ["SymmResult", "IllConditioned", "symm_oracle"]


class IllConditioned(RuntimeError):
    def __init__(self, cond: float):
        super().__init__(f"collocation matrix is ill-conditioned (cond ~ {cond:.2e})")
        self.cond = cond


@dataclass(frozen=True)
class SymmResult:
    cap: float
    coefficients: np.ndarray  # Chebyshev coefficients of psi, psi(t) = sum c_k T_k(t)
    cond: float
    arc: ArcSpec

    def psi(self, t):
        return C.chebval(np.asarray(t, dtype=float), self.coefficients)

    def density(self, t):
        """Equilibrium density with respect to arc length at ``gamma(t)``."""
        t = np.asarray(t, dtype=float)
        return self.psi(t) / (np.pi * np.sqrt(1 - t * t) * np.abs(self.arc.dgamma(t)))

    def integrate(self, F, Q: int = 2048) -> float:
        """``int F(z) dmu(z)`` by Gauss-Chebyshev quadrature."""
        tau = np.cos(np.pi * (np.arange(Q) + 0.5) / Q)
        return float(np.mean(self.psi(tau) * F(self.arc.gamma(tau))))

    def nu(self, Q: int = 2048) -> float:
        """``2*pi*R(inf)*Cap`` from the density alone.

        Uses ``log R(inf) = int log(omega*sqrt|z-A||z-B|) dmu - log Cap``.
        """
        tau = np.cos(np.pi * (np.arange(Q) + 0.5) / Q)
        A, B = self.arc.endpoints
        z = self.arc.gamma(tau)
        vals = np.log(self.density(tau) * np.sqrt(np.abs(z - A) * np.abs(z - B)))
        return float(2 * np.pi * np.exp(np.mean(self.psi(tau) * vals)))


def symm_oracle(arc: ArcSpec | NormalizedArc, M: int = 128, Q: int | None = None, max_cond: float = 1e12) -> SymmResult:
    """Solve the logarithmic first-kind equation on ``arc`` with ``M`` collocation points."""
    if isinstance(arc, NormalizedArc):
        arc = arc.source
    if M < 64:
        raise ValueError("M must be at least 64")
    if Q is None:
        Q = max(8 * M, 1024)
    t = np.cos(np.pi * (np.arange(M) + 0.5) / M)  # collocation
    tau = np.cos(np.pi * (np.arange(Q) + 0.5) / Q)  # quadrature
    k = np.arange(M)
    T_tau = C.chebvander(tau, M - 1)  # (Q, M)
    T_t = C.chebvander(t, M - 1)  # (M, M)
    K = np.log(np.abs(arc.divided_difference(t[:, None], tau[None, :]))) @ T_tau / Q
    L = np.empty((M, M))
    L[:, 0] = -np.log(2)
    L[:, 1:] = -T_t[:, 1:] / k[1:]
    A = L + K
    sys = np.empty((M, M))
    sys[:, :-1] = A[:, 1:]
    sys[:, -1] = -1.0
    cond = float(np.linalg.cond(sys))
    if cond > max_cond:
        raise IllConditioned(cond)
    sol = np.linalg.solve(sys, -A[:, 0])
    coeffs = np.concatenate([[1.0], sol[:-1]])
    return SymmResult(cap=float(np.exp(sol[-1])), coefficients=coeffs, cond=cond, arc=arc)
