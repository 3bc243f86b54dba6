"""Jordan arcs, endpoint normalization and the Joukowski lift.

An arc is parametrized by ``gamma(t)`` for ``t`` in ``[-1, 1]``.  After the
affine normalization ``z -> a*z + b`` the endpoints sit at ``-1`` and ``+1``
and the map ``L(z) = z + sqrt(z**2 - 1)`` opens the slit into a closed curve.
The closed curve is parametrized by ``s`` in ``[0, 2*pi)`` through
``t = cos(s)``, which keeps it smooth through the two endpoint lifts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import shapely

__all__ = [
    "ArcError",
    "ArcSpec",
    "NormalizedArc",
    "LiftedCurve",
    "parse_arc_spec",
    "arc_from_dict",
    "normalize_endpoints",
    "joukowski_lift",
    "inverse_lift",
    "build_lifted_curve",
    "MAX_POLY_DEGREE",
]

MAX_POLY_DEGREE = 12
_CHECK_SAMPLES = 2048


class ArcError(ValueError):
    """Raised for malformed or geometrically invalid arc descriptions."""


def _as_complex(value: Any, name: str) -> complex:
    if isinstance(value, (int, float, complex)):
        return complex(value)
    try:
        re, im = value
        return complex(float(re), float(im))
    except (TypeError, ValueError):
        raise ArcError(f"{name} must be a [re, im] pair, got {value!r}") from None


def _poly_divided_difference(coeffs: np.ndarray, t, tau):
    # (p(t) - p(tau)) / (t - tau) via d_{k+1} = t*d_k + tau**k; exact at t == tau
    t = np.asarray(t, dtype=float)
    tau = np.asarray(tau, dtype=float)
    d = np.zeros(np.broadcast(t, tau).shape)
    tau_pow = np.ones_like(d)
    out = np.zeros_like(d, dtype=complex)
    for c in coeffs[1:]:
        d = t * d + tau_pow
        tau_pow = tau_pow * tau
        out = out + c * d
    return out


@dataclass(frozen=True)
class ArcSpec:
    """A smooth Jordan arc parametrized on ``[-1, 1]``.

    ``kind`` is ``"segment"`` (endpoints ``A``, ``B``), ``"circular-arc"``
    (``r``, ``alpha``, ``center``) or ``"parametric"`` (ascending coefficient
    lists ``x``, ``y`` of real polynomials).  The circular arc is
    ``center + r*exp(i*alpha*t/2)``: ``alpha`` is the angle the arc subtends
    at its center, so ``alpha = pi/2`` is a quarter circle.
    """

    kind: str
    A: complex = 0j
    B: complex = 0j
    r: float = 1.0
    alpha: float = 0.0
    center: complex = 0j
    x: tuple[float, ...] = ()
    y: tuple[float, ...] = ()
    _coeffs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind == "segment":
            coeffs = np.array([(self.A + self.B) / 2, (self.B - self.A) / 2], dtype=complex)
        elif self.kind == "circular-arc":
            if not self.r > 0:
                raise ArcError("circular arc needs r > 0")
            if not 0 < self.alpha < 2 * np.pi:
                raise ArcError("circular arc needs 0 < alpha < 2*pi")
            coeffs = np.zeros(0, dtype=complex)
        elif self.kind == "parametric":
            n = max(len(self.x), len(self.y))
            if n == 0:
                raise ArcError("parametric arc needs coefficient lists x and y")
            if n - 1 > MAX_POLY_DEGREE:
                raise ArcError(f"parametric degree {n - 1} exceeds {MAX_POLY_DEGREE}")
            coeffs = np.zeros(n, dtype=complex)
            coeffs[: len(self.x)] += np.asarray(self.x, dtype=float)
            coeffs[: len(self.y)] += 1j * np.asarray(self.y, dtype=float)
        else:
            raise ArcError(f"unknown arc kind {self.kind!r}")
        object.__setattr__(self, "_coeffs", coeffs)
        if self.kind != "circular-arc" and len(coeffs) < 2:
            raise ArcError("arc is a single point")

    # the half of the subtended angle, as used in the parametrization
    @property
    def _beta(self) -> float:
        return self.alpha / 2

    def gamma(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "circular-arc":
            return self.center + self.r * np.exp(1j * self._beta * t)
        return np.polynomial.polynomial.polyval(t, self._coeffs)

    def dgamma(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "circular-arc":
            return 1j * self._beta * self.r * np.exp(1j * self._beta * t)
        return np.polynomial.polynomial.polyval(t, np.polynomial.polynomial.polyder(self._coeffs))

    def d2gamma(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "circular-arc":
            return -(self._beta**2) * self.r * np.exp(1j * self._beta * t)
        return np.polynomial.polynomial.polyval(t, np.polynomial.polynomial.polyder(self._coeffs, 2))

    def divided_difference(self, t, tau):
        """``(gamma(t) - gamma(tau)) / (t - tau)``, continuous across ``t == tau``."""
        if self.kind == "circular-arc":
            t = np.asarray(t, dtype=float)
            tau = np.asarray(tau, dtype=float)
            b = self._beta
            return (
                self.r
                * np.exp(1j * b * (t + tau) / 2)
                * 1j
                * b
                * np.sinc(b * (t - tau) / (2 * np.pi))
            )
        return _poly_divided_difference(self._coeffs, t, tau)

    @property
    def endpoints(self) -> tuple[complex, complex]:
        return complex(self.gamma(-1.0)), complex(self.gamma(1.0))

    def arc_length(self) -> float:
        t = np.cos(np.linspace(0, np.pi, 513))
        pts = self.gamma(t)
        return float(np.sum(np.abs(np.diff(pts))))

    def to_dict(self) -> dict:
        def pair(z):
            return [float(np.real(z)), float(np.imag(z))]

        if self.kind == "segment":
            return {"kind": "segment", "A": pair(self.A), "B": pair(self.B)}
        if self.kind == "circular-arc":
            return {"kind": "circular-arc", "r": self.r, "alpha": self.alpha, "center": pair(self.center)}
        return {"kind": "parametric", "x": list(self.x), "y": list(self.y)}

    def validate(self) -> "ArcSpec":
        """Run the smoothness, injectivity and endpoint checks; return ``self``."""
        A, B = self.endpoints
        length = self.arc_length()
        if not length > 0 or abs(B - A) <= 1e-12 * max(1.0, length):
            raise ArcError("degenerate arc: endpoints coincide")
        t = np.cos(np.linspace(np.pi, 0, _CHECK_SAMPLES))
        speed = np.abs(self.dgamma(t))
        if self.kind == "parametric":
            # exact minimum of |gamma'|**2 over [-1, 1] from its critical points
            P = np.polynomial.polynomial
            dx = P.polyder(np.real(self._coeffs))
            dy = P.polyder(np.imag(self._coeffs))
            sq = P.polyadd(P.polymul(dx, dx), P.polymul(dy, dy))
            crit = P.polyroots(P.polyder(sq)) if len(sq) > 2 else np.array([])
            crit = np.real(crit[(np.abs(np.imag(crit)) < 1e-9) & (np.abs(np.real(crit)) <= 1)])
            if crit.size:
                speed = np.concatenate([speed, np.sqrt(np.abs(P.polyval(crit, sq)))])
        if np.min(speed) <= 1e-10 * length:
            raise ArcError("parametrization has a vanishing derivative")
        pts = self.gamma(t)
        line = shapely.LineString(np.column_stack([pts.real, pts.imag]))
        if not line.is_simple:
            raise ArcError("parametrization is self-intersecting")
        # near-collisions between non-neighbouring samples
        d = np.abs(pts[:, None] - pts[None, :])
        idx = np.arange(len(pts))
        d[np.abs(idx[:, None] - idx[None, :]) <= 1] = np.inf
        if np.min(d) < 1e-9 * length:
            raise ArcError("parametrization is not injective")
        return self


def arc_from_dict(doc: dict) -> ArcSpec:
    """Build and validate an :class:`ArcSpec` from a decoded JSON document."""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ArcError("arc description must be an object with a 'kind' field")
    kind = doc["kind"]
    try:
        if kind == "segment":
            arc = ArcSpec("segment", A=_as_complex(doc["A"], "A"), B=_as_complex(doc["B"], "B"))
        elif kind == "circular-arc":
            arc = ArcSpec(
                "circular-arc",
                r=float(doc["r"]),
                alpha=float(doc["alpha"]),
                center=_as_complex(doc.get("center", [0.0, 0.0]), "center"),
            )
        elif kind == "parametric":
            arc = ArcSpec(
                "parametric",
                x=tuple(float(v) for v in doc["x"]),
                y=tuple(float(v) for v in doc["y"]),
            )
        else:
            raise ArcError(f"unknown arc kind {kind!r}")
    except KeyError as exc:
        raise ArcError(f"missing field {exc.args[0]!r} for kind {kind!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ArcError):
            raise
        raise ArcError(f"malformed arc description: {exc}") from None
    return arc.validate()


def parse_arc_spec(text: str) -> ArcSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ArcError(f"arc description is not valid JSON: {exc}") from None
    return arc_from_dict(doc)


@dataclass(frozen=True)
class NormalizedArc:
    """The arc after ``z -> a*z + b``, which sends ``A, B`` to ``-1, +1``."""

    source: ArcSpec
    a: complex
    b: complex

    @property
    def scale(self) -> float:
        return abs(self.a)

    def to_normalized(self, z):
        return self.a * np.asarray(z) + self.b

    def from_normalized(self, w):
        return (np.asarray(w) - self.b) / self.a

    def gamma(self, t):
        return self.a * self.source.gamma(t) + self.b

    def dgamma(self, t):
        return self.a * self.source.dgamma(t)

    def d2gamma(self, t):
        return self.a * self.source.d2gamma(t)

    def divided_difference(self, t, tau):
        return self.a * self.source.divided_difference(t, tau)

    def sqrt_factor_sq(self, t):
        """``h(t) = (gamma(t)**2 - 1) / (t**2 - 1)``, nonvanishing on ``[-1, 1]``."""
        return self.divided_difference(t, 1.0) * self.divided_difference(t, -1.0)

    def is_interval(self, tol: float = 1e-14) -> bool:
        t = np.linspace(-1, 1, 33)
        return bool(np.max(np.abs(self.gamma(t) - t)) < tol)


def normalize_endpoints(arc: ArcSpec) -> NormalizedArc:
    A, B = arc.endpoints
    if abs(B - A) == 0:
        raise ArcError("degenerate arc: endpoints coincide")
    a = 2 / (B - A)
    b = -1 - a * A
    return NormalizedArc(arc, complex(a), complex(b))


def _interval_sqrt(z):
    # branch of sqrt(z**2 - 1) that behaves like z at infinity, cut on [-1, 1]
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        big = z * np.sqrt(1 - 1 / (z * z))
        small = np.sqrt(z - 1) * np.sqrt(z + 1)
    return np.where(np.abs(z) > 1, big, small)


def joukowski_lift(z, side: str = "off", curve: "LiftedCurve | None" = None):
    """Lift ``z`` by ``L(z) = z + sqrt(z**2 - 1)`` with ``L(z) ~ 2z`` at infinity.

    Without ``curve`` the slit is the interval ``[-1, 1]``; with a
    :class:`LiftedCurve` the slit is that curve's (normalized) arc.  For a
    point on the slit, ``side`` is ``"+"`` or ``"-"`` and selects the limit
    from the side of the normal ``i*gamma'(t)`` or the opposite one.
    """
    if curve is not None:
        if side == "off":
            return curve.lift(z)
        return curve.lift_on_arc(curve.arc_parameter(z), side)
    z = np.asarray(z, dtype=complex)
    if side == "off":
        return z + _interval_sqrt(z)
    if side not in ("+", "-"):
        raise ValueError(f"side must be '+', '-' or 'off', got {side!r}")
    if np.any(np.abs(z * z - 1) < 1e-300) or np.any(np.isclose(np.abs(z.real), 1.0, rtol=0, atol=1e-15)):
        raise ArcError("lift is branch-ambiguous at the endpoints -1 and +1")
    x = z.real
    root = np.sqrt(np.clip(1 - x * x, 0, None))
    return x + (1j * root if side == "+" else -1j * root)


def inverse_lift(u):
    u = np.asarray(u, dtype=complex)
    return (u + 1 / u) / 2


def _winding_number(poly: np.ndarray, points) -> np.ndarray:
    points = np.atleast_1d(np.asarray(points, dtype=complex))
    out = np.empty(points.shape, dtype=float)
    flat_p = points.ravel()
    flat_o = out.ravel()
    chunk = max(1, 2_000_000 // len(poly))
    nxt = np.roll(poly, -1)
    for i in range(0, len(flat_p), chunk):
        p = flat_p[i : i + chunk, None]
        ang = np.angle((nxt[None, :] - p) / (poly[None, :] - p))
        flat_o[i : i + chunk] = np.sum(ang, axis=1) / (2 * np.pi)
    return np.rint(out)


class LiftedCurve:
    """The closed curve ``L(arc)``, traversed counter-clockwise.

    ``u(s)`` for ``s`` in ``(0, pi)`` is the lift of ``gamma(cos s)`` from the
    ``+`` side, ``s`` in ``(pi, 2*pi)`` the ``-`` side.  ``u(0) = 1`` and
    ``u(pi) = -1`` are the lifts of the endpoints.
    """

    def __init__(self, arc: NormalizedArc, N: int):
        self.arc = arc
        self.N = int(N)
        self._build_sqrt_branch()
        self.orientation = 1
        s = 2 * np.pi * np.arange(self.N) / self.N
        pts = self.u(s)
        area = 0.5 * np.sum((pts.conj() * np.roll(pts, -1)).imag)
        if area < 0:
            self.orientation = -1
            pts = self.u(s)
        self.s = s
        self.samples = pts
        self._dense = self.u(2 * np.pi * np.arange(4096) / 4096)

    def _build_sqrt_branch(self):
        tg = np.cos(np.linspace(np.pi, 0, 8193))
        h = self.arc.sqrt_factor_sq(tg)
        if np.min(np.abs(h)) == 0:
            raise ArcError("arc passes through an endpoint")
        ph = np.unwrap(np.angle(h))
        if np.max(np.abs(np.diff(ph))) > np.pi / 8:
            raise ArcError("branch of sqrt(z**2 - 1) cannot be tracked along the arc")
        self._t_grid = tg
        self._phase_grid = ph

    def sqrt_h(self, t):
        t = np.asarray(t, dtype=float)
        h = self.arc.sqrt_factor_sq(t)
        ref = np.interp(t, self._t_grid, self._phase_grid)
        ph = np.angle(h)
        ph = ph + 2 * np.pi * np.rint((ref - ph) / (2 * np.pi))
        return np.sqrt(np.abs(h)) * np.exp(0.5j * ph)

    def u(self, s):
        s = np.asarray(s, dtype=float)
        t = np.cos(s)
        return self.arc.gamma(t) + 1j * self.orientation * np.sin(s) * self.sqrt_h(t)

    def du(self, s):
        """``du/ds`` evaluated analytically."""
        s = np.asarray(s, dtype=float)
        t = np.cos(s)
        sin = np.sin(s)
        q = self.sqrt_h(t)
        a = self.arc
        d1 = a.divided_difference(t, 1.0)
        dm1 = a.divided_difference(t, -1.0)
        # derivative of the divided differences: (gamma'(t) - D(t, t0)) / (t - t0)
        dd1 = _dd_derivative(a, t, 1.0, d1)
        ddm1 = _dd_derivative(a, t, -1.0, dm1)
        dh = dd1 * dm1 + d1 * ddm1
        dq = dh / (2 * q)
        return -sin * a.dgamma(t) + 1j * self.orientation * (np.cos(s) * q - sin * sin * dq)

    def contains(self, points) -> np.ndarray:
        """True for points enclosed by the curve (winding number one).

        Points close to the curve are decided by projecting onto the exact
        curve and checking the side of its outward normal.
        """
        points = np.asarray(points, dtype=complex)
        inside = _winding_number(self._dense, points) != 0
        flat = np.atleast_1d(points).ravel()
        d = np.abs(flat[:, None] - self._dense[None, :]) if flat.size * len(self._dense) < 5e7 else None
        if d is None:
            return inside
        h = 2 * np.pi / len(self._dense)
        near = np.min(d, axis=1) < 4 * h * np.max(np.abs(self.du(np.array([0.0, np.pi / 2, np.pi]))))
        if np.any(near):
            p = flat[near]
            s = h * np.argmin(d[near], axis=1)
            for _ in range(20):
                du = self.du(s)
                r = self.u(s) - p
                ds = np.real(np.conj(du) * r) / np.maximum(np.abs(du) ** 2, 1e-300)
                s = s - ds
                if np.max(np.abs(ds)) < 1e-14:
                    break
            outward = -1j * self.du(s)
            side = np.real(np.conj(outward) * (p - self.u(s)))
            fixed = np.atleast_1d(inside).ravel().copy()
            fixed[near] = side < 0
            inside = fixed.reshape(np.shape(inside))
        return inside

    def lift(self, z):
        """The lift of an off-arc point: the root of ``u + 1/u = 2z`` outside the curve."""
        z = np.asarray(z, dtype=complex)
        u1 = z + _interval_sqrt(z)
        u2 = 1 / u1
        inside1 = self.contains(u1)
        return np.where(inside1, u2, u1)

    def lift_on_arc(self, t, side: str):
        t = np.asarray(t, dtype=float)
        if side not in ("+", "-"):
            raise ValueError(f"side must be '+' or '-', got {side!r}")
        if np.any(np.abs(t) >= 1):
            raise ArcError("lift is branch-ambiguous at the endpoints")
        s = np.arccos(t)
        return self.u(s if side == "+" else 2 * np.pi - s)

    def arc_parameter(self, z) -> np.ndarray:
        """Parameter ``t`` of points lying on the normalized arc (Newton refinement)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        tg = np.cos(np.linspace(np.pi, 0, 4097))
        pg = self.arc.gamma(tg)
        t = tg[np.argmin(np.abs(z[..., None] - pg), axis=-1)]
        for _ in range(30):
            g = self.arc.gamma(t) - z
            dg = self.arc.dgamma(t)
            step = np.real(np.conj(dg) * g) / np.abs(dg) ** 2
            t = np.clip(t - step, -1.0, 1.0)
            if np.max(np.abs(step)) < 1e-15:
                break
        if np.max(np.abs(self.arc.gamma(t) - z)) > 1e-8:
            raise ArcError("point is not on the arc")
        return t

    def is_simple(self) -> bool:
        pts = self._dense
        ring = shapely.LinearRing(np.column_stack([pts.real, pts.imag]))
        return bool(ring.is_simple)


def _dd_derivative(arc: NormalizedArc, t, t0: float, dd):
    # d/dt of D(t) = (gamma(t) - gamma(t0))/(t - t0), with the limit gamma''(t0)/2 at t0
    t = np.asarray(t, dtype=float)
    diff = t - t0
    near = np.abs(diff) < 1e-4
    safe = np.where(near, 1.0, diff)
    out = (arc.dgamma(t) - dd) / safe
    if np.any(near):
        # Taylor: D'(t) = gamma''(t0)/2 + gamma'''(t0)*(t-t0)/3 + ...
        h = 1e-3
        g2 = arc.d2gamma(t0)
        g3 = (arc.d2gamma(t0 + h) - arc.d2gamma(t0 - h)) / (2 * h)
        out = np.where(near, g2 / 2 + g3 * diff / 3, out)
    return out


def build_lifted_curve(arc: NormalizedArc, N: int = 1024) -> LiftedCurve:
    if N < 64 or N & (N - 1):
        raise ValueError("N must be a power of two >= 64")
    curve = LiftedCurve(arc, N)
    if not curve.is_simple():
        raise ArcError("lifted curve is self-intersecting")
    return curve
