"""Equilibrium measure, Green function, Szegő quantities and the extremal function.

All quantities are expressed in the frame of the original arc.  The
equilibrium measure is discretized by pulling back uniform midpoint angles
on the unit circle: each arc point appears twice, once per side, and the
weights are ``1/N``.

Boundary data such as ``log(f*omega)`` carries logarithmic singularities at
the endpoint angles (and at angles of weight anchors lying on the arc).
These are split off as ``c*log|e^{i theta} - e^{i theta_k}|`` terms, whose
circle means vanish and whose exterior extensions are known in closed form;
the remainder is smooth and handled spectrally.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .conformal import (
    ENDPOINT_EXCLUSION,
    ExteriorMap,
    ExteriorSchwarz,
    MapError,
    map_arc,
    phi_normalized,
)
from .symm import SymmResult, symm_oracle

__all__ = [
    "AdmissibilityError",
    "EquilibriumData",
    "WeightSpec",
    "SzegoData",
    "equilibrium_data",
    "green_eval",
    "green_potential",
    "szego_integral",
    "szego_integral_closed_form",
    "szego_data",
    "r_infinity",
    "nu",
    "nu_checked",
    "symmetry_defect",
    "r_mu_eval",
    "f_mu_eval",
    "f_mu_boundary",
    "extremal_norm",
    "trial_norm",
    "parse_weight",
    "symm_oracle",
    "SymmResult",
]


class AdmissibilityError(ValueError):
    """The weight is not in the Szegő class (or not admissible as a sup-norm weight)."""


def _log_dist_circle(theta, theta_k):
    return np.log(np.abs(2 * np.sin((np.asarray(theta) - theta_k) / 2)))


@dataclass(frozen=True)
class EquilibriumData:
    """Discretized equilibrium measure of an arc.

    Node ``j`` sits at circle angle ``theta[j] = 2*pi*(j + 1/2)/N`` and arc
    point ``z[j]``; ``side[j]`` is ``+1``/``-1`` for the side it is reached
    from.  ``g_side`` is ``|phi'|`` from that side, ``g_other`` from the
    opposite side at the same point.
    """

    emap: ExteriorMap
    theta: np.ndarray
    s: np.ndarray
    t: np.ndarray
    z: np.ndarray
    z_normalized: np.ndarray
    side: np.ndarray
    g_side: np.ndarray
    g_other: np.ndarray
    capacity: float
    weights: np.ndarray = field(repr=False)

    @property
    def N(self) -> int:
        return len(self.theta)

    @property
    def gplus(self) -> np.ndarray:
        return np.where(self.side > 0, self.g_side, self.g_other)

    @property
    def gminus(self) -> np.ndarray:
        return np.where(self.side > 0, self.g_other, self.g_side)

    @property
    def omega(self) -> np.ndarray:
        return (self.g_side + self.g_other) / (2 * np.pi)

    @property
    def endpoints(self) -> tuple[complex, complex]:
        return self.emap.arc.source.endpoints

    def singular_endpoint_terms(self, coef: float = 1.0):
        return [(self.emap.theta_A, coef), (self.emap.theta_B, coef)]

    def log_omega_smooth(self) -> np.ndarray:
        """``log(omega)`` with the endpoint singularities removed."""
        out = np.log(self.omega)
        for th, c in self.singular_endpoint_terms(-1.0):
            out = out - c * _log_dist_circle(self.theta, th)
        return out

    def integrate(self, values) -> float:
        return float(np.sum(self.weights * values))

    def to_csv_rows(self):
        yield ("z_re", "z_im", "omega", "gplus", "gminus")
        for z, om, gp, gm in zip(self.z, self.omega, self.gplus, self.gminus):
            yield (f"{z.real:.17g}", f"{z.imag:.17g}", f"{om:.17g}", f"{gp:.17g}", f"{gm:.17g}")


def equilibrium_data(emap: ExteriorMap, N: int = 1024) -> EquilibriumData:
    if N < 256 or N & (N - 1):
        raise ValueError("N must be a power of two >= 256")
    theta = 2 * np.pi * (np.arange(N) + 0.5) / N
    s = emap.correspondence(theta)
    t = np.cos(s)
    zn = emap.arc.gamma(t)
    scale = emap.arc.scale
    g_side = scale * emap.boundary_phi_prime(theta, s)
    theta_hat = emap.inverse_correspondence(2 * np.pi - s)
    g_other = scale * emap.boundary_phi_prime(theta_hat, 2 * np.pi - s)
    side = np.where(s < np.pi, 1, -1)
    return EquilibriumData(
        emap=emap,
        theta=theta,
        s=s,
        t=t,
        z=emap.arc.from_normalized(zn),
        z_normalized=zn,
        side=side,
        g_side=g_side,
        g_other=g_other,
        capacity=emap.cap_original,
        weights=np.full(N, 1.0 / N),
    )


# -- Green function ------------------------------------------------------------


def green_eval(emap: ExteriorMap, z) -> np.ndarray:
    """``g(z) = log|phi(z)|`` for points off the arc."""
    zn = emap.arc.to_normalized(np.asarray(z, dtype=complex))
    return np.log(np.abs(phi_normalized(emap, zn)))


def green_potential(eq: EquilibriumData, z) -> np.ndarray:
    """Potential form ``-log Cap + int log|z - zeta| dmu(zeta)`` by node quadrature."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.array([np.sum(eq.weights * np.log(np.abs(zz - eq.z))) for zz in z.ravel()])
    return out.reshape(z.shape) - np.log(eq.capacity)


# -- weights ---------------------------------------------------------------------


@dataclass(frozen=True)
class WeightSpec:
    """Product weight ``c * prod_k |z - a_k|**s_k``.

    ``sup_norm`` marks use as a sup-norm weight (rho) rather than as an L2
    density; it tightens the admissibility rule for anchors on the arc.
    """

    c: float = 1.0
    anchors: tuple[tuple[complex, float], ...] = ()
    sup_norm: bool = False

    def __post_init__(self):
        if not self.c > 0:
            raise AdmissibilityError("weight constant must be positive")

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.c, dtype=float)
        for a, s in self.anchors:
            out = out * np.abs(z - a) ** s
        return out

    def log(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, np.log(self.c))
        for a, s in self.anchors:
            out = out + s * np.log(np.abs(z - a))
        return out

    def scaled(self, factor: float) -> "WeightSpec":
        return WeightSpec(self.c * factor, self.anchors, self.sup_norm)

    def as_sup_norm(self) -> "WeightSpec":
        return WeightSpec(self.c, self.anchors, True)

    def squared(self) -> "WeightSpec":
        return WeightSpec(self.c**2, tuple((a, 2 * s) for a, s in self.anchors), False)

    def __str__(self) -> str:
        parts = [repr(float(self.c))]
        for a, s in self.anchors:
            parts.append(f"|z-({float(a.real)!r},{float(a.imag)!r})|^{float(s)!r}")
        return " * ".join(parts)


_TERM = re.compile(
    r"^\|\s*z\s*-\s*\(\s*([-+0-9.eE]+)\s*,\s*([-+0-9.eE]+)\s*\)\s*\|\s*\^\s*([-+0-9.eE]+)$"
)


def parse_weight(text: str | None, sup_norm: bool = False) -> WeightSpec:
    """Parse ``c * |z-(a_re,a_im)|^s * ...``; ``None`` or ``""`` means ``f = 1``."""
    if text is None or not text.strip():
        return WeightSpec(sup_norm=sup_norm)
    c = 1.0
    anchors = []
    for term in text.split("*"):
        term = term.strip()
        m = _TERM.match(term)
        if m:
            anchors.append((complex(float(m.group(1)), float(m.group(2))), float(m.group(3))))
            continue
        try:
            c *= float(term)
        except ValueError:
            raise AdmissibilityError(f"cannot parse weight term {term!r}") from None
    return WeightSpec(c, tuple(anchors), sup_norm)


def _anchor_singularities(eq: EquilibriumData, w: WeightSpec):
    """Classify anchors; return singular circle terms of ``log f`` and off-arc anchors."""
    emap = eq.emap
    arc = emap.arc
    A, B = eq.endpoints
    scale = abs(B - A)
    terms = []
    off = []
    tg = np.cos(np.linspace(np.pi, 0, 4097))
    pts = arc.source.gamma(tg)
    for a, s in w.anchors:
        if s == 0:
            continue
        d = np.min(np.abs(pts - a))
        on_arc = d < 1e-3 * scale
        if on_arc:
            t = emap.curve.arc_parameter(arc.to_normalized(a))[0]
            if abs(emap.arc.source.gamma(t) - a) > 1e-9 * scale:
                on_arc = False
        if not on_arc:
            off.append((a, s))
            continue
        if w.sup_norm and s < 0:
            raise AdmissibilityError("sup-norm weight is unbounded at an anchor on the arc")
        if not w.sup_norm and s <= -0.5:
            raise AdmissibilityError("anchor exponent must exceed -1/2 on the arc")
        if abs(a - B) < 1e-12 * scale or t >= 1:
            terms.append((emap.theta_B, 2 * s))
        elif abs(a - A) < 1e-12 * scale or t <= -1:
            terms.append((emap.theta_A, 2 * s))
        else:
            sp = np.arccos(t)
            terms.append((float(emap.inverse_correspondence(sp)), s))
            terms.append((float(emap.inverse_correspondence(2 * np.pi - sp)), s))
    return terms, off


def szego_integral(eq: EquilibriumData, w: WeightSpec) -> float:
    """``S(f) = exp(int log f dmu)`` by node quadrature with singularity subtraction."""
    terms, _ = _anchor_singularities(eq, w)
    vals = w.log(eq.z)
    for th, c in terms:
        vals = vals - c * _log_dist_circle(eq.theta, th)
    if not np.all(np.isfinite(vals)):
        raise AdmissibilityError("log f is not integrable against the equilibrium measure")
    return float(np.exp(eq.integrate(vals)))


def szego_integral_closed_form(emap: ExteriorMap, w: WeightSpec) -> float:
    """``S(f)`` from ``int log|z - a| dmu = log Cap + g(a)`` applied factor by factor."""
    logS = np.log(w.c)
    cap = emap.cap_original
    arc = emap.arc
    tg = np.cos(np.linspace(np.pi, 0, 4097))
    pts = arc.source.gamma(tg)
    A, B = arc.source.endpoints
    for a, s in w.anchors:
        if np.min(np.abs(pts - a)) < 1e-3 * abs(B - A):
            t = emap.curve.arc_parameter(arc.to_normalized(a))[0]
            if abs(arc.source.gamma(t) - a) < 1e-9 * abs(B - A):
                logS += s * np.log(cap)
                continue
        logS += s * (np.log(cap) + float(green_eval(emap, a)))
    return float(np.exp(logS))


# -- Szegő function R_mu -----------------------------------------------------------


@dataclass(frozen=True)
class SzegoData:
    """Szegő data for ``dmu = f dmu_Gamma``.

    ``log_r`` is the exterior extension (in the normalized circle variable)
    of ``log(f*omega)``; ``log_dpsi`` the one of ``log|Psi'|`` used by the
    extremal function.
    """

    eq: EquilibriumData
    weight: WeightSpec
    log_r: ExteriorSchwarz
    log_dpsi: ExteriorSchwarz
    S: float
    R_inf: float
    R_inf_equilibrium: float
    nu: float
    nu_equilibrium: float

    def to_dict(self) -> dict:
        return {
            "cap": self.eq.capacity,
            "nu": self.nu,
            "nu_equilibrium": self.nu_equilibrium,
            "S": self.S,
            "R_inf": self.R_inf,
            "symmetry_defect": symmetry_defect(self.eq),
        }


def szego_data(eq: EquilibriumData, w: WeightSpec | None = None) -> SzegoData:
    if w is None:
        w = WeightSpec()
    terms, _ = _anchor_singularities(eq, w)
    smooth_f = w.log(eq.z)
    for th, c in terms:
        smooth_f = smooth_f - c * _log_dist_circle(eq.theta, th)
    if not np.all(np.isfinite(smooth_f)):
        raise AdmissibilityError("log f is not integrable against the equilibrium measure")
    smooth_om = eq.log_omega_smooth()
    log_r = ExteriorSchwarz(smooth_f + smooth_om, terms + eq.singular_endpoint_terms(-1.0))

    # log|Psi'| in the normalized frame: zeros of Psi' at the endpoint angles
    g_n = eq.g_side / eq.emap.arc.scale
    smooth_dpsi = -np.log(g_n)
    for th, c in eq.singular_endpoint_terms(1.0):
        smooth_dpsi = smooth_dpsi - c * _log_dist_circle(eq.theta, th)
    log_dpsi = ExteriorSchwarz(smooth_dpsi, eq.singular_endpoint_terms(1.0))

    S = float(np.exp(eq.integrate(smooth_f)))
    R_eq = float(np.exp(eq.integrate(smooth_om)))
    R = float(np.exp(log_r.at_infinity))
    cap = eq.capacity
    return SzegoData(
        eq=eq,
        weight=w,
        log_r=log_r,
        log_dpsi=log_dpsi,
        S=S,
        R_inf=R,
        R_inf_equilibrium=R_eq,
        nu=2 * np.pi * R * cap,
        nu_equilibrium=2 * np.pi * R_eq * cap,
    )


def r_infinity(eq: EquilibriumData, w: WeightSpec | None = None) -> float:
    """``R_mu(infinity) = exp(int log(f*omega) dmu)``."""
    return szego_data(eq, w).R_inf


def nu(eq: EquilibriumData, w: WeightSpec | None = None) -> float:
    """``nu(mu) = 2*pi*R_mu(infinity)*Cap``."""
    return szego_data(eq, w).nu


@dataclass(frozen=True)
class NuReport:
    nu: float
    nu_fine: float
    discrepancy: float
    under_resolved: bool


def nu_checked(emap: ExteriorMap, w: WeightSpec | None = None, N: int = 1024, threshold: float = 1e-4) -> NuReport:
    """``nu`` at ``N`` and ``2N`` nodes; flags under-resolution beyond ``threshold``."""
    a = nu(equilibrium_data(emap, N), w)
    b = nu(equilibrium_data(emap, 2 * N), w)
    d = abs(a - b)
    return NuReport(a, b, d, d > threshold)


def symmetry_defect(eq: EquilibriumData) -> float:
    """``max |g'_+ - g'_-| / (g'_+ + g'_-)`` over nodes outside the endpoint zone."""
    keep = np.abs(eq.t) < 1 - ENDPOINT_EXCLUSION
    gp, gm = eq.g_side[keep], eq.g_other[keep]
    return float(np.max(np.abs(gp - gm) / (gp + gm)))


def _w_of(sz: SzegoData, emap: ExteriorMap, z):
    zn = emap.arc.to_normalized(np.asarray(z, dtype=complex))
    return phi_normalized(emap, zn)


def r_mu_eval(sz: SzegoData, emap: ExteriorMap, z):
    """The Szegő function ``R_mu(z)`` off the arc; ``z = inf`` gives ``R_mu(infinity)``."""
    z = np.asarray(z, dtype=complex)
    if np.all(np.isinf(z)):
        return np.full(z.shape, sz.R_inf, dtype=complex)
    return np.exp(sz.log_r(_w_of(sz, emap, z)))


def _log_f_mu(sz: SzegoData, w):
    emap = sz.eq.emap
    return 0.5 * (
        np.log(emap.arc.scale)
        - sz.log_dpsi(w)
        - sz.log_r(w)
        + sz.log_r.at_infinity
        + np.log(sz.eq.capacity)
    )


def f_mu_eval(sz: SzegoData, emap: ExteriorMap, z):
    """The extremal function ``F_mu(z) = sqrt(phi'/R_mu) * sqrt(R_mu(inf)/phi'(inf))``.

    The square root is the one continued from ``F_mu(infinity) = 1``, which is
    single-valued because both logarithms are built as exterior extensions.
    """
    z = np.asarray(z, dtype=complex)
    if np.all(np.isinf(z)):
        return np.exp(_log_f_mu(sz, np.full(z.shape, np.inf + 0j)))
    w = _w_of(sz, emap, z)
    return np.exp(_log_f_mu(sz, w))


def f_mu_boundary(sz: SzegoData) -> np.ndarray:
    """Boundary values of ``F_mu`` at the equilibrium nodes (each on its own side)."""
    return np.exp(_log_f_mu(sz, np.exp(1j * sz.eq.theta)))


def extremal_norm(sz: SzegoData) -> float:
    """``int (|F_+|^2 + |F_-|^2) dmu`` for ``F = F_mu``, by node quadrature."""
    eq = sz.eq
    F = f_mu_boundary(sz)
    f = sz.weight(eq.z)
    return eq.integrate(np.abs(F) ** 2 * f * (eq.g_side + eq.g_other) / eq.g_side)


def trial_norm(sz: SzegoData) -> float:
    """The same norm for the trial function ``F = 1``."""
    eq = sz.eq
    f = sz.weight(eq.z)
    return eq.integrate(f * (eq.g_side + eq.g_other) / eq.g_side)


def quick_equilibrium(arc, N: int = 1024, map_nodes: int = 1024) -> EquilibriumData:
    """Map an arc and discretize its equilibrium measure."""
    return equilibrium_data(map_arc(arc, map_nodes), N)
