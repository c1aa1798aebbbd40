"""Isochrone potentials as parabola arcs in the Henon plane.

A radial potential psi(r) is encoded through the Henon variable x = 2 r**2
and the curve Y(x) = 2 r**2 psi(r).  Isochrone potentials are exactly those
whose Y-curve is a convex arc of a parabola

    (a x + b y)**2 + c x + d y + e = 0,

so the whole theory reduces to algebra on the five Latin coefficients
(a, b, c, d, e).  This module owns that algebra: classification, evaluation
of Y and its derivatives, the r-space view psi(r), gauge shifts, canonical
constructors for the named families, and the universal parabola ODE check.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import InvalidParams, OutOfDomain, SingularPoint

__all__ = [
    "ParabolaParams",
    "PotentialClass",
    "PotentialFamily",
    "GaugeTerm",
    "classify",
    "y_value",
    "y_derivatives",
    "psi_value",
    "psi_derivative",
    "domain",
    "radial_domain",
    "apply_gauge",
    "from_kepler",
    "from_harmonic",
    "from_henon",
    "from_bounded",
    "from_hollowed",
    "parabola_ode_residual",
    "ode_residual_from_derivatives",
]

# Tolerance below which x_v is treated as exactly zero (Kepler degeneracy).
_XV_ZERO = 1e-14


@dataclass(frozen=True)
class ParabolaParams:
    """Latin coefficients of the implicit parabola (ax + by)^2 + cx + dy + e = 0.

    The discriminant delta = a*d - b*c must be strictly positive.  For b = 0
    the arc is an upright parabola (harmonic class) and convexity requires
    d < 0 and a != 0.  All quantities are dimensionless; units are the
    caller's contract.
    """

    a: float
    b: float
    c: float
    d: float
    e: float

    def __post_init__(self) -> None:
        for name in ("a", "b", "c", "d", "e"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise InvalidParams(f"coefficient {name} is not finite: {v!r}")
        if self.delta <= 0.0:
            raise InvalidParams(
                f"discriminant delta = a*d - b*c = {self.delta:g} must be > 0"
            )
        if self.b == 0.0:
            if self.d >= 0.0:
                raise InvalidParams("harmonic class (b = 0) requires d < 0")
            if self.a == 0.0:
                raise InvalidParams("harmonic class requires a != 0 (degenerate line)")
        elif self.b < 0.0 and self.x_v <= 0.0:
            # Left-opening parabola whose real branch never reaches x > 0.
            raise InvalidParams(
                "bounded-type parabola (b < 0) needs x_v > 0 to intersect x > 0"
            )

    @property
    def delta(self) -> float:
        return self.a * self.d - self.b * self.c

    @property
    def x_v(self) -> float:
        """Abscissa of the vertical tangent, (4 b^2 e - d^2) / (4 b delta)."""
        if self.b == 0.0:
            raise InvalidParams("x_v is undefined for the harmonic class (b = 0)")
        return (4.0 * self.b**2 * self.e - self.d**2) / (4.0 * self.b * self.delta)

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.a, self.b, self.c, self.d, self.e)


class PotentialFamily(enum.Enum):
    HARMONIC = "Harmonic"
    HENON = "Henon"
    BOUNDED = "Bounded"
    HOLLOWED = "Hollowed"


@dataclass(frozen=True)
class PotentialClass:
    """Classification result: family plus the Kepler-degeneracy flag."""

    family: PotentialFamily
    kepler_degenerate: bool = False

    def __str__(self) -> str:
        s = self.family.value
        if self.kepler_degenerate:
            s += " (Kepler degenerate)"
        return s


@dataclass(frozen=True)
class GaugeTerm:
    """Additive term eps + lam / (2 r^2) that preserves isochrony."""

    eps_gauge: float = 0.0
    lam_gauge: float = 0.0


def classify(params: ParabolaParams) -> PotentialClass:
    """Sort a parabola into one of the four isochrone families.

    b = 0 is harmonic; otherwise the signs of b and of the vertical-tangent
    abscissa x_v decide: right-opening with x_v <= 0 is Henon (Kepler in the
    degenerate x_v = 0 case), right-opening with x_v > 0 is Hollowed, and
    left-opening (necessarily x_v > 0) is Bounded.
    """
    if params.b == 0.0:
        return PotentialClass(PotentialFamily.HARMONIC)
    x_v = params.x_v
    if params.b > 0.0:
        if abs(x_v) <= _XV_ZERO:
            return PotentialClass(PotentialFamily.HENON, kepler_degenerate=True)
        if x_v < 0.0:
            return PotentialClass(PotentialFamily.HENON)
        return PotentialClass(PotentialFamily.HOLLOWED)
    return PotentialClass(PotentialFamily.BOUNDED)


def domain(params: ParabolaParams) -> tuple[float, float]:
    """Physical x-interval of the convex branch (closed at finite ends)."""
    if params.b == 0.0:
        return (0.0, math.inf)
    x_v = params.x_v
    if params.b > 0.0:
        return (max(0.0, x_v), math.inf)
    return (0.0, x_v)


def radial_domain(params: ParabolaParams) -> tuple[float, float]:
    """Physical r-interval, from the x-interval through x = 2 r^2."""
    xlo, xhi = domain(params)
    rlo = math.sqrt(xlo / 2.0)
    rhi = math.inf if math.isinf(xhi) else math.sqrt(xhi / 2.0)
    return (rlo, rhi)


def _sqrt_arg(params: ParabolaParams, x: float) -> float:
    """Argument W = b * delta * (x - x_v) of the branch square root."""
    return params.b * params.delta * (x - params.x_v)


def y_value(params: ParabolaParams, x: float) -> float:
    """Convex branch Y(x); satisfies Y(2 r^2) = 2 r^2 psi(r)."""
    if params.b == 0.0:
        d = params.d
        return -(params.c / d) * x - params.e / d - (params.a**2 / d) * x * x
    xlo, xhi = domain(params)
    if x < xlo or x > xhi:
        raise OutOfDomain(f"x = {x:g} outside domain [{xlo:g}, {xhi:g}]")
    w = max(_sqrt_arg(params, x), 0.0)
    b = params.b
    return -(params.a / b) * x - params.d / (2.0 * b * b) - math.sqrt(w) / (b * b)


def y_derivatives(params: ParabolaParams, x: float, order: int = 4) -> list[float]:
    """Closed-form derivatives [Y', .., Y^(order)] of the convex branch.

    Derivatives of every order diverge at the vertical tangent x = x_v, so
    that point is rejected.  Y'' is positive everywhere on the interior.
    """
    if not 1 <= order <= 4:
        raise ValueError("order must be between 1 and 4")
    if params.b == 0.0:
        d = params.d
        out = [-(params.c / d) - 2.0 * (params.a**2 / d) * x,
               -2.0 * params.a**2 / d, 0.0, 0.0]
        return out[:order]
    xlo, xhi = domain(params)
    if x < xlo or x > xhi:
        raise OutOfDomain(f"x = {x:g} outside domain [{xlo:g}, {xhi:g}]")
    w = _sqrt_arg(params, x)
    if w <= 0.0:
        raise SingularPoint("derivatives diverge at the vertical tangent x = x_v")
    b, dl = params.b, params.delta
    sw = math.sqrt(w)
    out = [
        -(params.a / b) - dl / (2.0 * b * sw),
        dl**2 / (4.0 * w * sw),
        -3.0 * b * dl**3 / (8.0 * w**2 * sw),
        15.0 * b**2 * dl**4 / (16.0 * w**3 * sw),
    ]
    return out[:order]


def psi_value(params: ParabolaParams, r: float) -> float:
    """Potential in r-space, psi(r) = Y(2 r^2) / (2 r^2)."""
    if r <= 0.0:
        raise OutOfDomain("psi_value requires r > 0")
    x = 2.0 * r * r
    return y_value(params, x) / x


def psi_derivative(params: ParabolaParams, r: float) -> float:
    """d psi / d r, from Y and Y' (chain rule through x = 2 r^2)."""
    if r <= 0.0:
        raise OutOfDomain("psi_derivative requires r > 0")
    x = 2.0 * r * r
    y = y_value(params, x)
    yp = y_derivatives(params, x, 1)[0]
    return 4.0 * r * (yp * x - y) / (x * x)


def apply_gauge(params: ParabolaParams, g: GaugeTerm) -> ParabolaParams:
    """Latin coefficients of the gauged potential Y(x) + eps*x + lam.

    For b != 0 the square-root part of the branch is gauge invariant, so the
    pair (b*delta, x_v) is preserved and only the affine part moves:
    a' = a - eps*b and d' = d - 2*lam*b**2, with c and e adjusted to keep the
    discriminant and vertical tangent fixed.  For the harmonic class the
    linear coefficients shift directly.
    """
    eps, lam = g.eps_gauge, g.lam_gauge
    if not (math.isfinite(eps) and math.isfinite(lam)):
        raise InvalidParams("gauge terms must be finite")
    a, b, c, d, e = params.as_tuple()
    if b == 0.0:
        # Y = -(c/d) x - e/d - (a^2/d) x^2 : shift -c/d by eps, -e/d by lam.
        return ParabolaParams(a, b, c - eps * d, d, e - lam * d)
    delta = params.delta
    x_v = params.x_v
    a2 = a - eps * b
    d2 = d - 2.0 * lam * b * b
    c2 = (a2 * d2 - delta) / b
    e2 = (4.0 * b * delta * x_v + d2 * d2) / (4.0 * b * b)
    return ParabolaParams(a2, b, c2, d2, e2)


def from_kepler(mu: float) -> ParabolaParams:
    """Kepler potential psi = -mu/r, i.e. Y(x) = -mu*sqrt(2x)."""
    _require_positive(mu=mu)
    return ParabolaParams(0.0, 1.0, -2.0 * mu * mu, 0.0, 0.0)


def from_harmonic(omega: float) -> ParabolaParams:
    """Harmonic potential psi = omega^2 r^2 / 8, i.e. Y(x) = omega^2 x^2 / 16."""
    _require_positive(omega=omega)
    return ParabolaParams(-omega / 2.0, 0.0, 0.0, -4.0, 0.0)


def from_henon(mu: float, beta: float) -> ParabolaParams:
    """Henon potential psi = -mu / (beta + sqrt(beta^2 + r^2))."""
    _require_positive(mu=mu, beta=beta)
    return ParabolaParams(0.0, 1.0, -2.0 * mu * mu, -4.0 * mu * beta, 0.0)


def from_bounded(mu: float, beta: float) -> ParabolaParams:
    """Bounded potential psi = mu / (beta + sqrt(beta^2 - r^2)), r <= beta."""
    _require_positive(mu=mu, beta=beta)
    return ParabolaParams(0.0, -1.0, 2.0 * mu * mu, -4.0 * mu * beta, 0.0)


def from_hollowed(mu: float, beta: float) -> ParabolaParams:
    """Hollowed potential psi = -(mu/r^2) sqrt(r^2 - beta^2), r >= beta."""
    _require_positive(mu=mu, beta=beta)
    return ParabolaParams(0.0, 1.0, -2.0 * mu * mu, 0.0, 4.0 * mu * mu * beta * beta)


def _require_positive(**kwargs: float) -> None:
    for name, v in kwargs.items():
        if not (math.isfinite(v) and v > 0.0):
            raise InvalidParams(f"{name} must be positive and finite, got {v!r}")


def ode_residual_from_derivatives(y2: float, y3: float, y4: float) -> float:
    """Residual 3 Y'' Y'''' - 5 (Y''')^2 of the universal parabola ODE."""
    return 3.0 * y2 * y4 - 5.0 * y3 * y3


def parabola_ode_residual(params: ParabolaParams, x: float) -> float:
    """Universal-ODE residual at x; identically zero (to rounding) on parabolae."""
    if params.b == 0.0:
        return 0.0
    d2, d3, d4 = y_derivatives(params, x, 4)[1:]
    return ode_residual_from_derivatives(d2, d3, d4)
