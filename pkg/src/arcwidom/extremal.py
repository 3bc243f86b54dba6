"""Orthogonal and Chebyshev polynomials on an arc, Widom factors and their bounds.

Polynomials are carried in an orthonormal basis generated by Arnoldi
(Stieltjes) orthogonalization on a discrete point set; the monomial basis is
only available for inspection since it is hopeless at degree 60.
"""

from __future__ import annotations

import json
import logging
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .conformal import ExteriorMap
from .potential import (
    EquilibriumData,
    SzegoData,
    WeightSpec,
    _log_f_mu,
    szego_data,
    szego_integral,
)

log = logging.getLogger(__name__)

__all__ = [
    "ArnoldiBasis",
    "MonicPolynomial",
    "OrthoResult",
    "ArcGrid",
    "MinimaxResult",
    "SupBounds",
    "WidomRecord",
    "WidomReport",
    "ContourError",
    "arc_grid",
    "orthonormal_polys",
    "sup_norm",
    "chebyshev_minimax",
    "widom_qn",
    "sup_bounds",
    "widom_report",
]


class ContourError(ValueError):
    """The contour for the Cauchy integral is too close to the arc."""


class RankLossWarning(UserWarning):
    pass


class ArnoldiBasis:
    """Orthonormal polynomials ``q_0..q_n`` for the discrete measure ``sum_j m_j delta(x_j)``.

    ``H`` is the ``(n+1) x n`` Hessenberg matrix of ``z*q_k = sum_j H[j,k] q_j``;
    the same recurrence evaluates the basis anywhere.
    """

    def __init__(self, points, masses, n: int, rank_tol: float = 1e-14):
        x = np.asarray(points, dtype=complex)
        m = np.asarray(masses, dtype=float)
        total = float(np.sum(m))
        self.q0 = 1.0 / np.sqrt(total)
        Q = np.zeros((n + 1, len(x)), dtype=complex)
        Q[0] = self.q0
        H = np.zeros((n + 1, n), dtype=complex)
        scale = float(np.max(np.abs(x)))
        self.degree = n
        for k in range(n):
            v = x * Q[k]
            for _ in range(2):  # reorthogonalize once
                c = (Q[: k + 1].conj() * m) @ v
                v = v - c @ Q[: k + 1]
                H[: k + 1, k] += c
            h = np.sqrt(np.sum(m * np.abs(v) ** 2))
            if h < rank_tol * scale:
                warnings.warn(f"numerical rank loss at degree {k + 1}; truncating", RankLossWarning)
                self.degree = k
                break
            H[k + 1, k] = h
            Q[k + 1] = v / h
        self.H = H[: self.degree + 1, : self.degree]
        self.values = Q[: self.degree + 1]
        self.points = x
        self.masses = m

    @property
    def subdiagonal(self) -> np.ndarray:
        return np.real(np.diagonal(self.H, -1))

    def evaluate(self, z, upto: int | None = None) -> np.ndarray:
        """All basis polynomials at ``z``, shape ``(upto+1,) + z.shape``."""
        n = self.degree if upto is None else upto
        z = np.asarray(z, dtype=complex)
        Q = np.zeros((n + 1,) + z.shape, dtype=complex)
        Q[0] = self.q0
        for k in range(n):
            v = z * Q[k] - np.tensordot(self.H[: k + 1, k], Q[: k + 1], axes=1)
            Q[k + 1] = v / self.H[k + 1, k]
        return Q

    def leading(self, k: int) -> float:
        """Leading coefficient of ``q_k``."""
        return float(self.q0 / np.prod(self.subdiagonal[:k]))

    def inner(self, values) -> np.ndarray:
        """Coefficients of discrete-least-squares projection of ``values`` onto the basis."""
        return (self.values.conj() * self.masses) @ np.asarray(values, dtype=complex)


@dataclass
class MonicPolynomial:
    """``P(z) = sum_k coef[k] * q_k(z)`` for an :class:`ArnoldiBasis`, leading coefficient 1."""

    basis: ArnoldiBasis
    coef: np.ndarray
    degree: int

    def __call__(self, z):
        Q = self.basis.evaluate(z, self.degree)
        return np.tensordot(self.coef[: self.degree + 1], Q, axes=1)

    @property
    def leading_coefficient(self) -> complex:
        return complex(self.coef[self.degree] * self.basis.leading(self.degree))

    def coefficients(self) -> np.ndarray:
        """Monomial coefficients, ascending.  Ill-conditioned for large degrees."""
        P = np.polynomial.polynomial
        n = self.degree
        qs = [np.array([self.basis.q0], dtype=complex)]
        for k in range(n):
            v = P.polymulx(qs[k])
            for j in range(k + 1):
                v = P.polysub(v, self.basis.H[j, k] * qs[j])
            qs.append(v / self.basis.H[k + 1, k])
        out = np.zeros(n + 1, dtype=complex)
        for k in range(n + 1):
            out[: len(qs[k])] += self.coef[k] * qs[k]
        return out

    @classmethod
    def orthogonal(cls, basis: ArnoldiBasis, n: int) -> "MonicPolynomial":
        coef = np.zeros(n + 1, dtype=complex)
        coef[n] = 1.0 / basis.leading(n)
        return cls(basis, coef, n)


@dataclass
class OrthoResult:
    basis: ArnoldiBasis
    norms: np.ndarray  # ||P_n|| in L2(mu), n = 0..nmax
    W2: np.ndarray  # ||P_n|| / Cap**n
    capacity: float

    @property
    def W2sq(self) -> np.ndarray:
        return self.W2**2

    def monic(self, n: int) -> MonicPolynomial:
        return MonicPolynomial.orthogonal(self.basis, n)


def orthonormal_polys(eq: EquilibriumData, w: WeightSpec | None, nmax: int) -> OrthoResult:
    """Monic orthogonal polynomials of ``f dmu_Gamma`` (discretized) up to degree ``nmax``."""
    if nmax > eq.N // 8:
        raise ValueError(f"nmax={nmax} exceeds the resolution guard N/8 = {eq.N // 8}")
    f = np.ones(eq.N) if w is None else w(eq.z)
    basis = ArnoldiBasis(eq.z, f * eq.weights, nmax)
    sub = basis.subdiagonal
    cap = eq.capacity
    ratios = np.concatenate([[1.0], np.cumprod(sub / cap)])
    W2 = ratios / basis.q0
    norms = np.concatenate([[1.0], np.cumprod(sub)]) / basis.q0
    return OrthoResult(basis, norms, W2, cap)


# -- sup norms on the arc ---------------------------------------------------------


@dataclass(frozen=True)
class ArcGrid:
    t: np.ndarray  # increasing
    z: np.ndarray


def arc_grid(arc, n_cheb: int = 4096, per_decade: int = 64, smallest: float = 1e-8) -> ArcGrid:
    """Chebyshev points in ``t`` plus log-spaced points approaching each endpoint."""
    if hasattr(arc, "source"):
        arc = arc.source
    t = np.cos(np.pi * np.arange(n_cheb) / (n_cheb - 1))
    decades = int(round(-np.log10(smallest)))
    delta = np.logspace(np.log10(smallest), 0, decades * per_decade, endpoint=False)
    t = np.unique(np.concatenate([t, -1 + delta, 1 - delta]))
    return ArcGrid(t, arc.gamma(t))


def sup_norm(P, rho: WeightSpec | None, grid: ArcGrid, arc=None) -> float:
    """``max rho*|P|`` over ``grid`` with a parabolic refinement around the maximizer."""
    vals = np.abs(P(grid.z))
    if rho is not None:
        vals = vals * rho(grid.z)
    j = int(np.argmax(vals))
    best = float(vals[j])
    if arc is None or j == 0 or j == len(grid.t) - 1:
        return best
    if hasattr(arc, "source"):
        arc = arc.source
    t0, t1, t2 = grid.t[j - 1 : j + 2]
    y0, y1, y2 = vals[j - 1 : j + 2]
    denom = (t0 - t1) * (t0 - t2) * (t1 - t2)
    a = (t2 * (y1 - y0) + t1 * (y0 - y2) + t0 * (y2 - y1)) / denom
    b = (t2 * t2 * (y0 - y1) + t1 * t1 * (y2 - y0) + t0 * t0 * (y1 - y2)) / denom
    if a < 0:
        ts = float(np.clip(-b / (2 * a), t0, t2))
        z = arc.gamma(np.array([ts]))
        v = np.abs(P(z))
        if rho is not None:
            v = v * rho(z)
        best = max(best, float(v[0]))
    return best


@dataclass
class MinimaxResult:
    poly: MonicPolynomial
    tn: float
    Winf: float
    spread: float
    lower: float
    iterations: int
    converged: bool


def chebyshev_minimax(
    grid: ArcGrid,
    rho: WeightSpec | None,
    n: int,
    capacity: float,
    tol: float = 1e-3,
    maxiter: int = 500,
    arc=None,
    exponent: float = 1.5,
) -> MinimaxResult:
    """Weighted monic Chebyshev polynomial on ``grid`` by Lawson's iteration.

    Each step solves ``min sum lam_j |rho_j P(z_j)|**2`` over monic ``P`` in a
    fixed orthonormal basis of the grid, then sets ``lam_j *= e_j**exponent``.
    The residuals give certified bounds for the grid minimax value: ``max e``
    from above and ``sum lam e**2 / sum lam e`` from below (the measure
    ``lam * conj(e)`` annihilates polynomials of degree < n).  ``spread`` is
    their relative gap.
    """
    z = grid.z
    if len(z) < 30 * n:
        raise ValueError("grid must have at least 30*n points")
    r = np.ones(len(z)) if rho is None else rho(z)
    basis = ArnoldiBasis(z, np.full(len(z), 1.0 / len(z)), n)
    target = r * basis.values[n] / basis.leading(n)
    A = (basis.values[:n] * r).T
    lam = np.where(r > 0, 1.0, 0.0)
    lam /= lam.sum()
    best_c = np.zeros(n, dtype=complex)
    best_upper = np.inf
    lower = 0.0
    spread = np.inf
    it = 0
    for it in range(1, maxiter + 1):
        sw = np.sqrt(lam)
        c, *_ = np.linalg.lstsq(A * sw[:, None], -target * sw, rcond=None)
        e = np.abs(target + A @ c)
        upper = float(np.max(e))
        denom = float(np.sum(lam * e))
        if denom > 0:
            lower = max(lower, float(np.sum(lam * e * e)) / denom)
        if upper < best_upper:
            best_upper, best_c = upper, c
        spread = (best_upper - lower) / best_upper
        if spread <= tol:
            break
        lam = lam * e**exponent
        lam /= lam.sum()
    coef = np.zeros(n + 1, dtype=complex)
    coef[:n] = best_c
    coef[n] = 1.0 / basis.leading(n)
    poly = MonicPolynomial(basis, coef, n)
    tn = sup_norm(poly, rho, grid, arc)
    converged = spread <= tol
    if not converged:
        log.warning("Lawson stagnation at degree %d: spread %.2e after %d iterations", n, spread, it)
    return MinimaxResult(poly, tn, tn / capacity**n, float(spread), lower, it, converged)


# -- Widom's polynomials Q_n --------------------------------------------------------


def _contour_data(sz: SzegoData, emap: ExteriorMap, n: int, r: float, K: int):
    theta = 2 * np.pi * np.arange(K) / K
    w = r * np.exp(1j * theta)
    ut = emap.psi_tilde(w)
    dut = emap.dpsi_tilde(w)
    a, b = emap.arc.a, emap.arc.b
    zeta = ((ut + 1 / ut) / 2 - b) / a
    dzeta = 0.5 * (1 - 1 / ut**2) * dut / a
    phi = w / emap.rotation
    h = np.exp(_log_f_mu(sz, w)) * phi**n
    return zeta, h * dzeta * w / K


def _cauchy(zeta, kern, z):
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape, dtype=complex)
    flat = z.ravel()
    res = out.ravel()
    step = max(1, 4_000_000 // len(zeta))
    for i in range(0, len(flat), step):
        res[i : i + step] = (1 / (zeta[None, :] - flat[i : i + step, None])) @ kern
    return out


@dataclass
class QnResult:
    poly: MonicPolynomial
    leading: complex  # leading coefficient before normalization, ~ Cap**-n
    r: float
    K: int
    residual: float


def widom_qn(
    sz: SzegoData,
    emap: ExteriorMap,
    n: int,
    r: float | None = None,
    grid: ArcGrid | None = None,
    tol: float = 1e-8,
) -> QnResult:
    """Widom's polynomial ``Q_n = (1/2 pi i) oint F_mu phi**n dw/(w - z)``, made monic.

    The contour is the image of ``|w| = r``; ``r`` defaults to ``1 + 2*pi/n``
    clipped to ``[1.05, 1.5]``.  The node count is doubled until values on
    the arc agree to ``tol`` relative to their size.
    """
    if r is None:
        r = float(np.clip(1 + 2 * np.pi / max(n, 1), 1.05, 1.5))
    if r - 1 < 0.01:
        raise ContourError("contour level too close to the arc (r - 1 < 0.01)")
    if grid is None:
        grid = arc_grid(emap.arc, n_cheb=max(8 * (n + 1), 256), per_decade=4)
    K = 256
    probe = grid.z[:: max(1, len(grid.z) // 64)]
    prev = _cauchy(*_contour_data(sz, emap, n, r, K), probe)
    residual = np.inf
    while K < 2**16:
        K *= 2
        cur = _cauchy(*_contour_data(sz, emap, n, r, K), probe)
        residual = float(np.max(np.abs(cur - prev)) / np.max(np.abs(cur)))
        prev = cur
        if residual < tol:
            break
    zeta, kern = _contour_data(sz, emap, n, r, K)
    # fit in an orthonormal basis for uniform weights on the grid; exact for degree n
    basis = ArnoldiBasis(grid.z, np.full(len(grid.z), 1.0 / len(grid.z)), n)
    vals = _cauchy(zeta, kern, grid.z)
    coef = basis.inner(vals)
    lead = complex(coef[n] * basis.leading(n))
    poly = MonicPolynomial(basis, coef / lead, n)
    return QnResult(poly, lead, r, K, residual)


# -- bounds and reports --------------------------------------------------------------


@dataclass(frozen=True)
class SupBounds:
    upp: float
    sahi: float
    two_S: float
    S: float
    R_inf_equilibrium: float


def sup_bounds(eq: EquilibriumData, rho: WeightSpec | None = None) -> SupBounds:
    """Limit bounds for sup-norm Widom factors with weight ``rho``."""
    rho = WeightSpec(sup_norm=True) if rho is None else rho.as_sup_norm()
    S = szego_integral(eq, rho)
    R_eq = szego_data(eq).R_inf_equilibrium
    cap = eq.capacity
    gp, gm = eq.g_side, eq.g_other
    ratio = float(np.max((np.sqrt(gp) + np.sqrt(gm)) / np.sqrt(gp + gm)))
    upp = 2 * np.sqrt(np.pi * R_eq * cap) * S
    sahi = np.sqrt(2 * np.pi * R_eq * cap) * S * ratio
    return SupBounds(float(upp), float(sahi), 2 * S, S, R_eq)


@dataclass
class WidomRecord:
    n: int
    W2sq: float
    Winf: float
    tn: float
    qn_ratio: float
    spread: float
    converged: bool


@dataclass
class WidomReport:
    capacity: float
    nu_equilibrium: float
    nu_limit: float
    S_f: float
    bounds: SupBounds
    records: list[WidomRecord] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "capacity": self.capacity,
            "nu_equilibrium": self.nu_equilibrium,
            "bounds": {
                "upp": self.bounds.upp,
                "sahi": self.bounds.sahi,
                "two_S": self.bounds.two_S,
                "nu_limit": self.nu_limit,
            },
            "S_rho": self.bounds.S,
            "S_f": self.S_f,
            "records": [asdict(r) for r in self.records],
        }

    def to_json(self) -> str:
        return json.dumps(_round17(self.to_dict()), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        lines = ["n,W2sq,Winf,qn_ratio"]
        for r in self.records:
            lines.append(f"{r.n},{r.W2sq:.17g},{r.Winf:.17g},{r.qn_ratio:.17g}")
        return "\n".join(lines) + "\n"


def _round17(obj):
    if isinstance(obj, float):
        return float(f"{obj:.17g}")
    if isinstance(obj, dict):
        return {k: _round17(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round17(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return _round17(obj.item())
    return obj


def widom_report(
    eq: EquilibriumData,
    degrees,
    rho: WeightSpec | None = None,
    f: WeightSpec | None = None,
    tol: float = 1e-3,
    with_qn: bool = True,
) -> WidomReport:
    """Sup-norm and L2 Widom factors for the given degrees, with the limit bounds."""
    degrees = sorted(int(d) for d in degrees)
    rho = WeightSpec(sup_norm=True) if rho is None else rho.as_sup_norm()
    emap = eq.emap
    bounds = sup_bounds(eq, rho)
    sz_f = szego_data(eq, f)
    ortho = orthonormal_polys(eq, f, max(degrees))
    sz_rho2 = szego_data(eq, rho.squared()) if with_qn else None
    grid = arc_grid(emap.arc)
    report = WidomReport(
        capacity=eq.capacity,
        nu_equilibrium=sz_f.nu_equilibrium,
        nu_limit=sz_f.nu_equilibrium * sz_f.S,
        S_f=sz_f.S,
        bounds=bounds,
    )
    cap = eq.capacity
    for n in degrees:
        mm = chebyshev_minimax(grid, rho, n, cap, tol=tol, arc=emap.arc)
        qn_ratio = float("nan")
        if with_qn and n >= 1:
            q = widom_qn(sz_rho2, emap, n)
            qn_ratio = sup_norm(q.poly, rho, grid, emap.arc) / cap**n
        report.records.append(
            WidomRecord(n, float(ortho.W2sq[n]), mm.Winf, mm.tn, qn_ratio, mm.spread, mm.converged)
        )
    return report
