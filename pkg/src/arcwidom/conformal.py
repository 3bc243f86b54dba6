"""Exterior conformal map of an arc complement onto the exterior of the unit disk.

The map is built on the lifted curve ``L(arc)``: Theodorsen's iteration gives
the boundary correspondence ``theta -> s`` of the exterior Riemann map of the
closed curve, and the map of the arc complement is ``phi = phi_curve o L``.

Angles ``theta`` on the unit circle are taken in the *normalized* frame
(endpoints at -1, +1).  ``phi_eval`` rotates back to the frame of the
original arc so that ``phi(z)/z`` tends to a positive number at infinity.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .geometry import (
    ArcError,
    ArcSpec,
    LiftedCurve,
    NormalizedArc,
    build_lifted_curve,
    normalize_endpoints,
)

log = logging.getLogger(__name__)

__all__ = [
    "MapError",
    "UnsupportedGeometry",
    "TrigSeries",
    "ExteriorSchwarz",
    "ExteriorMap",
    "BoundaryCorrespondence",
    "build_exterior_map",
    "map_arc",
    "map_arc_adaptive",
    "capacity",
    "phi_eval",
    "phi_prime_boundary",
    "boundary_involution",
    "boundary_correspondence",
]

ENDPOINT_EXCLUSION = 1e-6
MAX_ITER = 200


class MapError(RuntimeError):
    """The iteration did not converge or an evaluation request is invalid."""


class UnsupportedGeometry(ArcError):
    """The lifted curve is outside the region where the map construction applies."""


def _wrap(x):
    return (np.asarray(x) + np.pi) % (2 * np.pi) - np.pi


class TrigSeries:
    """Real trigonometric interpolant of periodic samples on ``theta_j = 2*pi*(j + shift)/M``."""

    def __init__(self, samples, shift: float = 0.0):
        samples = np.asarray(samples, dtype=float)
        M = len(samples)
        c = np.fft.rfft(samples) / M
        k = np.arange(len(c))
        c = c * np.exp(-2j * np.pi * k * shift / M)
        if M % 2 == 0:
            c[-1] = 0.0
        self.M = M
        self.coef = c  # samples ~ Re(c0) + 2 Re(sum_k c_k e^{ik theta})

    @property
    def mean(self) -> float:
        return float(self.coef[0].real)

    def __call__(self, theta, derivative: int = 0):
        theta = np.asarray(theta, dtype=float)
        k = np.arange(len(self.coef))
        c = self.coef * (1j * k) ** derivative
        out = np.empty(theta.shape)
        flat = theta.ravel()
        res = out.ravel()
        step = max(1, 4_000_000 // len(k))
        for i in range(0, len(flat), step):
            e = np.exp(1j * np.outer(flat[i : i + step], k[1:]))
            res[i : i + step] = 2 * (e @ c[1:]).real
        if derivative == 0:
            out += self.coef[0].real
        return out


def _conjugate_exterior(samples):
    # imaginary part of the exterior-analytic function with real part `samples`, zero mean
    M = len(samples)
    c = np.fft.fft(samples)
    k = np.fft.fftfreq(M, 1.0 / M)
    c = 1j * np.sign(k) * c
    if M % 2 == 0:
        c[M // 2] = 0
    return np.fft.ifft(c).real


class ExteriorSchwarz:
    """Analytic function on ``|w| > 1`` from its real boundary part.

    The boundary data is ``smooth(theta) + sum_k c_k log|e^{i theta} - e^{i theta_k}|``;
    the smooth part is given by samples on the midpoint grid and the singular
    terms extend as ``c_k log(1 - e^{i theta_k}/w)``.  The result is real at
    infinity.
    """

    def __init__(self, smooth_samples, singular=()):
        smooth_samples = np.asarray(smooth_samples, dtype=float)
        M = len(smooth_samples)
        c = np.fft.fft(smooth_samples) / M
        # midpoint grid theta_j = 2*pi*(j + 1/2)/M
        k = np.fft.fftfreq(M, 1.0 / M)
        c = c * np.exp(-1j * np.pi * k / M)
        neg = c[::-1][: M // 2]  # c_{-1}, c_{-2}, ..., c_{-M/2}
        self.const = float(c[0].real)
        self.laurent = 2 * neg[: M // 2 - 1]  # coefficients of w^{-1}, w^{-2}, ...
        self.singular = tuple((float(t), float(w)) for t, w in singular)

    @property
    def at_infinity(self) -> float:
        return self.const

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        x = 1 / w
        acc = np.zeros_like(x)
        for a in self.laurent[::-1]:
            acc = (acc + a) * x
        out = self.const + acc
        for th, cw in self.singular:
            out = out + cw * np.log(1 - np.exp(1j * th) * x)
        return out

    def derivative(self, w):
        w = np.asarray(w, dtype=complex)
        x = 1 / w
        k = np.arange(1, len(self.laurent) + 1)
        acc = np.zeros_like(x)
        for a in (-k * self.laurent)[::-1]:
            acc = (acc + a) * x
        out = acc / w
        for th, cw in self.singular:
            e = np.exp(1j * th)
            out = out + cw * (e * x * x) / (1 - e * x)
        return out


@dataclass(frozen=True)
class BoundaryCorrespondence:
    """Two-sided boundary data at arc parameters ``t``."""

    t: np.ndarray
    theta_plus: np.ndarray
    theta_minus: np.ndarray
    gplus: np.ndarray
    gminus: np.ndarray


class ExteriorMap:
    """Exterior Riemann map of a lifted curve and the induced map of the arc complement.

    Attributes of interest: ``cap_tilde`` (capacity of the lifted curve),
    ``cap`` (capacity of the normalized arc, ``cap_tilde/2``),
    ``cap_original`` (capacity of the arc as given), ``laurent`` (coefficients
    of ``w, 1, 1/w, ...`` of the inverse map of the lifted curve),
    ``residual`` and ``iterations``.
    """

    def __init__(self, curve: LiftedCurve, center: complex, eta: np.ndarray, iterations: int):
        self.curve = curve
        self.arc: NormalizedArc = curve.arc
        self.center = complex(center)
        self.N = len(eta)
        self.iterations = iterations
        self._eta = TrigSeries(eta)
        self._build_vartheta_table()
        theta = 2 * np.pi * np.arange(self.N) / self.N
        bvals = self.psi_tilde_boundary(theta)
        A = np.fft.fft(bvals) / self.N
        self.cap_tilde = float(A[1].real)
        # w^1, w^0, w^-1, ..., w^-(N/2 - 1)
        self.laurent = np.concatenate([[A[1]], A[0:1], A[::-1][: self.N // 2 - 1]])
        pos = np.abs(A[2 : self.N // 2])
        self.positive_tail = float(np.max(pos)) if len(pos) else 0.0
        # conformality residual at angles between the solve nodes
        mid = theta + np.pi / self.N
        self.residual = float(np.max(np.abs(self.psi_tilde(np.exp(1j * mid)) - self.psi_tilde_boundary(mid))))
        self.cap = self.cap_tilde / 2
        self.cap_original = self.cap / self.arc.scale
        self.rotation = self.arc.a / abs(self.arc.a)
        self.theta_B = float(self.inverse_correspondence(0.0))
        self.theta_A = float(self.inverse_correspondence(np.pi))

    # -- polar description of the lifted curve ---------------------------------
    def _build_vartheta_table(self):
        s = 2 * np.pi * np.arange(8192) / 8192
        v = np.unwrap(np.angle(self.curve.u(s) - self.center))
        self._s_tab = np.append(s, 2 * np.pi)
        self._v0 = v[0]
        self._v_tab = np.append(v, v[0] + 2 * np.pi)

    def vartheta(self, s):
        """Polar angle of ``u(s) - center``, continuous and increasing in ``s``."""
        s = np.asarray(s, dtype=float)
        v = np.angle(self.curve.u(s) - self.center)
        sm = s % (2 * np.pi)
        ref = np.interp(sm, self._s_tab, self._v_tab) + (s - sm)
        return v + 2 * np.pi * np.rint((ref - v) / (2 * np.pi))

    def dvartheta(self, s):
        s = np.asarray(s, dtype=float)
        return np.imag(self.curve.du(s) / (self.curve.u(s) - self.center))

    def s_of_vartheta(self, target):
        """Invert the polar angle: the ``s`` in ``[0, 2*pi)`` with ``vartheta(s) = target`` mod 2*pi."""
        target = np.asarray(target, dtype=float)
        tw = self._v0 + (target - self._v0) % (2 * np.pi)
        s = np.interp(tw, self._v_tab, self._s_tab)
        for _ in range(50):
            f = _wrap(self.vartheta(s) - tw)
            step = f / self.dvartheta(s)
            s = s - step
            if np.max(np.abs(step)) < 1e-15:
                break
        return s % (2 * np.pi)

    # -- boundary correspondence ---------------------------------------------
    def correspondence(self, theta):
        """Curve parameter ``s = S(theta)`` with ``Psi_curve(e^{i theta}) = u(s)``."""
        theta = np.asarray(theta, dtype=float)
        return self.s_of_vartheta(theta + self._eta(theta))

    def correspondence_derivative(self, theta, s=None):
        theta = np.asarray(theta, dtype=float)
        if s is None:
            s = self.correspondence(theta)
        return (1 + self._eta(theta, 1)) / self.dvartheta(s)

    def inverse_correspondence(self, s):
        """Angle ``theta`` with ``S(theta) = s``."""
        s = np.asarray(s, dtype=float)
        target = self.vartheta(s)
        theta = _wrap(target - self.center_phase_guess(target))
        for _ in range(50):
            f = _wrap(theta + self._eta(theta) - target)
            step = f / (1 + self._eta(theta, 1))
            theta = theta - step
            if np.max(np.abs(step)) < 1e-15:
                break
        return theta % (2 * np.pi)

    def center_phase_guess(self, target):
        # eta is small for near-circular curves; one fixed-point sweep is a good start
        return self._eta(np.asarray(target, dtype=float))

    def psi_tilde_boundary(self, theta):
        return self.curve.u(self.correspondence(theta))

    # -- Laurent evaluation of the inverse map of the lifted curve -------------
    def psi_tilde(self, w):
        w = np.asarray(w, dtype=complex)
        x = 1 / w
        acc = np.zeros_like(x)
        for a in self.laurent[:0:-1]:
            acc = acc * x + a
        return self.laurent[0] * w + acc

    def dpsi_tilde(self, w):
        w = np.asarray(w, dtype=complex)
        x = 1 / w
        k = np.arange(1, len(self.laurent) - 1)
        c = -k * self.laurent[2:]
        acc = np.zeros_like(x)
        for a in c[::-1]:
            acc = acc * x + a
        return self.laurent[0] + acc * x * x

    def phi_tilde(self, u):
        """Inverse of ``psi_tilde`` for points ``u`` outside the lifted curve."""
        u = np.atleast_1d(np.asarray(u, dtype=complex))
        theta = 2 * np.pi * (np.arange(2048) + 0.5) / 2048
        bw = np.exp(1j * theta)
        bu = self.psi_tilde(bw)
        w = np.empty_like(u)
        step = max(1, 2_000_000 // len(bw))
        for i in range(0, len(u), step):
            uu = u[i : i + step]
            j = np.argmin(np.abs(uu[:, None] - bu[None, :]), axis=1)
            dist = np.abs(uu - bu[j]) / np.abs(self.dpsi_tilde(bw[j]))
            w[i : i + step] = bw[j] * (1 + np.maximum(dist, 1e-3))
        far = np.abs(u - self.laurent[1]) > 4 * self.cap_tilde
        w = np.where(far, (u - self.laurent[1]) / self.cap_tilde, w)
        for _ in range(100):
            f = self.psi_tilde(w) - u
            step = f / self.dpsi_tilde(w)
            wn = w - step
            # stay outside the unit circle
            bad = np.abs(wn) <= 1
            wn = np.where(bad, w - 0.5 * step, wn)
            wn = np.where(np.abs(wn) <= 1, wn / np.abs(wn) * (1 + 1e-12), wn)
            w = wn
            if np.max(np.abs(step) / np.abs(w)) < 1e-15:
                break
        return w

    # -- arc-frame quantities --------------------------------------------------
    def nodes(self, theta):
        """Arc parameters ``t``, curve parameters ``s`` and normalized points for circle angles."""
        s = self.correspondence(theta)
        t = np.cos(s)
        return t, s, self.arc.gamma(t)

    def boundary_phi_prime(self, theta, s=None):
        """``|phi'|`` (normalized frame) on the side of the arc that ``e^{i theta}`` maps to."""
        theta = np.asarray(theta, dtype=float)
        if s is None:
            s = self.correspondence(theta)
        dS = self.correspondence_derivative(theta, s)
        return 1.0 / (np.abs(self.arc.dgamma(np.cos(s))) * np.abs(np.sin(s)) * dS)

    def involution(self, theta):
        s = self.correspondence(theta)
        return self.inverse_correspondence(2 * np.pi - s)

    def side_of(self, s):
        return np.where(np.asarray(s) % (2 * np.pi) < np.pi, "+", "-")


def build_exterior_map(curve: LiftedCurve, tol: float = 1e-12) -> ExteriorMap:
    """Theodorsen iteration for the exterior map of ``curve``.

    Raises :class:`UnsupportedGeometry` if the curve is not star-shaped with
    respect to its sample centroid, :class:`MapError` if the iteration stalls.
    """
    if not 1e-14 <= tol <= 1e-6:
        raise ValueError("tol must lie in [1e-14, 1e-6]")
    center = complex(np.mean(curve.u(2 * np.pi * np.arange(4096) / 4096)))
    s = 2 * np.pi * np.arange(8192) / 8192
    dv = np.imag(curve.du(s) / (curve.u(s) - center))
    if np.min(dv) <= 0:
        raise UnsupportedGeometry("lifted curve is not star-shaped with respect to its centroid")

    N = curve.N
    theta = 2 * np.pi * np.arange(N) / N
    eta = np.zeros(N)
    proto = ExteriorMap.__new__(ExteriorMap)
    proto.curve = curve
    proto.center = center
    ExteriorMap._build_vartheta_table(proto)
    delta = np.inf
    it = 0
    for it in range(1, MAX_ITER + 1):
        s = proto.s_of_vartheta(theta + eta)
        logr = np.log(np.abs(curve.u(s) - center))
        new = _conjugate_exterior(logr - logr.mean())
        delta = float(np.max(np.abs(new - eta)))
        eta = new
        if delta < max(tol / 10, 1e-15):
            break
    else:
        raise MapError(f"Theodorsen iteration did not converge (last update {delta:.2e})")
    emap = ExteriorMap(curve, center, eta, it)
    log.debug("map built: N=%d iterations=%d residual=%.2e", N, it, emap.residual)
    if emap.residual > tol:
        raise MapError(f"boundary residual {emap.residual:.2e} exceeds tol {tol:.0e}; increase N")
    return emap


def map_arc(arc: ArcSpec | NormalizedArc, N: int = 1024, tol: float = 1e-12) -> ExteriorMap:
    """Normalize, lift and map an arc in one call."""
    if isinstance(arc, ArcSpec):
        arc = normalize_endpoints(arc)
    return build_exterior_map(build_lifted_curve(arc, N), tol)


def map_arc_adaptive(arc: ArcSpec | NormalizedArc, N: int = 1024, tol: float = 1e-12, max_nodes: int = 16384):
    """:func:`map_arc`, doubling ``N`` while the residual exceeds ``tol``.

    Returns ``(map, N_used)``; unsupported geometry is not retried.
    """
    while True:
        try:
            return map_arc(arc, N, tol), N
        except MapError:
            if 2 * N > max_nodes:
                raise
            log.warning("map residual above %.0e at N=%d; retrying with N=%d", tol, N, 2 * N)
            N *= 2


def capacity(emap: ExteriorMap, scale: float | None = None) -> float:
    """Capacity of the original arc, ``cap_tilde / (2*|a|)``."""
    if scale is None:
        scale = emap.arc.scale
    return emap.cap_tilde / (2 * scale)


def _arc_distance(arc: NormalizedArc, zn) -> np.ndarray:
    """Distance from points to the arc, by Newton projection from the nearest sample."""
    zn = np.atleast_1d(np.asarray(zn, dtype=complex))
    tg = np.cos(np.linspace(np.pi, 0, 4097))
    pts = arc.gamma(tg)
    flat = zn.ravel()
    out = np.empty(flat.shape)
    step = max(1, 2_000_000 // len(pts))
    for i in range(0, len(flat), step):
        z = flat[i : i + step]
        t = tg[np.argmin(np.abs(z[:, None] - pts[None, :]), axis=1)]
        for _ in range(8):
            g = arc.gamma(t) - z
            dg = arc.dgamma(t)
            t = np.clip(t - np.real(np.conj(dg) * g) / np.abs(dg) ** 2, -1.0, 1.0)
        out[i : i + step] = np.abs(arc.gamma(t) - z)
    return out.reshape(zn.shape)


def _check_off_arc(emap: ExteriorMap, zn):
    if np.any(_arc_distance(emap.arc, zn) < ENDPOINT_EXCLUSION):
        raise MapError("point lies on or too close to the arc")


def phi_normalized(emap: ExteriorMap, zn):
    """``phi`` of the normalized arc at normalized points."""
    zn = np.asarray(zn, dtype=complex)
    _check_off_arc(emap, zn)
    return emap.phi_tilde(emap.curve.lift(zn)).reshape(zn.shape)


def phi_eval(emap: ExteriorMap, z):
    """``phi(z)`` for the original arc, normalized by ``phi(z)/z -> 1/Cap > 0``."""
    zn = emap.arc.to_normalized(np.asarray(z, dtype=complex))
    return phi_normalized(emap, zn) / emap.rotation


def phi_prime_boundary(emap: ExteriorMap, t) -> tuple[np.ndarray, np.ndarray]:
    """One-sided normal derivatives ``(g'_+, g'_-)`` of the Green function at ``gamma(t)``."""
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1 - ENDPOINT_EXCLUSION):
        raise MapError("arc parameter within the endpoint exclusion zone")
    sp = np.arccos(t)
    sm = 2 * np.pi - sp
    thp = emap.inverse_correspondence(sp)
    thm = emap.inverse_correspondence(sm)
    scale = emap.arc.scale
    return (
        scale * emap.boundary_phi_prime(thp, sp),
        scale * emap.boundary_phi_prime(thm, sm),
    )


def boundary_correspondence(emap: ExteriorMap, t) -> BoundaryCorrespondence:
    t = np.asarray(t, dtype=float)
    gp, gm = phi_prime_boundary(emap, t)
    sp = np.arccos(t)
    return BoundaryCorrespondence(
        t=t,
        theta_plus=emap.inverse_correspondence(sp),
        theta_minus=emap.inverse_correspondence(2 * np.pi - sp),
        gplus=gp,
        gminus=gm,
    )


def boundary_involution(emap: ExteriorMap, theta):
    """The other circle angle that maps to the same arc point (normalized frame)."""
    theta = np.asarray(theta, dtype=float)
    for th_end in (emap.theta_A, emap.theta_B):
        if np.any(np.abs(_wrap(theta - th_end)) < 1e-9):
            raise MapError("endpoint angles are fixed points of the involution")
    return emap.involution(theta)
