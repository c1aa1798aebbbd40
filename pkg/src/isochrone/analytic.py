"""Closed-form orbit theory for isochrone potentials.

Everything a bound orbit does in an isochrone potential is expressible in
elementary functions of the particle constants (xi, Lambda) and the Latin
parabola coefficients: the radial period T(xi), apsidal angle Theta(Lambda),
radial action J, the Hamiltonian in action-angle form, and a parametric
solution (r(E), theta(E)) driven by a generalized Kepler equation
Omega t = E - eps sin(E).

Conventions used throughout (all validated against the ODE oracle):

* ``Omega**2 = -16 (a + b xi)**3 / delta`` so that ``Omega T = 2 pi`` exactly.
* ``alpha2`` is the *signed* squared semi-major axis, ``delta / (8 b (a+b xi)**2)``,
  carrying the sign of b; with it the radius map is universally
  ``x(E) = x_v + 2 alpha2 (1 - eps_eff cos E)**2``.
* For left-opening parabolae (b < 0, the bounded family) the eccentric
  anomaly anchored at periastron obeys ``Omega t = E + eps sin(E)``; this is
  folded into a signed eccentricity ``eps_eff = sign(b) * eps`` so a single
  Kepler equation serves every class.  Public ``solve_kepler`` keeps the
  nonnegative-eccentricity contract.
* ``zeta**2 = -x_v / (2 alpha2)``; the angle formula is evaluated in complex
  arithmetic (principal branches) and returned as the real part, which covers
  the hollowed family where zeta is imaginary and the two partial-fraction
  terms are complex conjugates.

The harmonic class (b = 0) keeps its own elementary solution with E := Omega t
and ``x(E) = x_a + (x_p - x_a) cos(E/2)**2``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from . import potential as pot
from .errors import (
    InvalidParams,
    NoBoundOrbit,
    NoCircularOrbit,
    UnboundOrbit,
)
from .potential import ParabolaParams

__all__ = [
    "OrbitConstants",
    "OrbitElements",
    "TrajectorySample",
    "turning_points",
    "radial_period",
    "apsidal_angle",
    "radial_action",
    "hamiltonian",
    "frequencies",
    "orbit_elements",
    "solve_kepler",
    "radius_of_E",
    "angle_of_E",
    "angle_of_E_with_residual",
    "trajectory",
    "circular_abscissa",
    "circular_energy",
    "feasible_energy",
]

TWO_PI = 2.0 * math.pi

# Eccentricities at or below this are treated as exactly circular; the angle
# formula is 0/0-free but ill-conditioned there.
CIRCULAR_ECC = 1e-12


@dataclass(frozen=True)
class OrbitConstants:
    """Energy and angular momentum of a test particle."""

    xi: float
    lam: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.xi) and math.isfinite(self.lam)):
            raise InvalidParams("orbit constants must be finite")
        if self.lam < 0.0:
            raise InvalidParams("angular momentum must be >= 0")


@dataclass(frozen=True)
class OrbitElements:
    """Derived per-orbit quantities.

    ``alpha2`` is signed with b; ``x_v``, ``alpha2`` and ``zeta2`` are None for
    the harmonic class, which has no vertical tangent.
    """

    xi: float
    lam: float
    omega_r: float
    ecc: float
    T: float
    Theta: float
    J: float
    x_p: float
    x_a: float
    alpha2: Optional[float]
    x_v: Optional[float]
    zeta2: Optional[float]
    harmonic: bool
    b_sign: float

    @property
    def eps_eff(self) -> float:
        """Signed eccentricity used by the universal Kepler equation."""
        return self.b_sign * self.ecc

    @property
    def r_p(self) -> float:
        return math.sqrt(self.x_p / 2.0)

    @property
    def r_a(self) -> float:
        return math.sqrt(self.x_a / 2.0)


@dataclass(frozen=True)
class TrajectorySample:
    """One point along an orbit, in time, anomaly, and polar coordinates."""

    t: float
    E: float
    x: float
    r: float
    theta: float
    z_j: float
    z_lam: float


# ---------------------------------------------------------------------------
# small closed-form helpers


def _harmonic_coeffs(p: ParabolaParams) -> tuple[float, float, float]:
    """(A2, A1, A0) of the harmonic branch Y = A2 x^2 + A1 x + A0."""
    d = p.d
    return (-p.a**2 / d, -p.c / d, -p.e / d)


def _s_value(p: ParabolaParams, lam: float) -> float:
    s2 = p.b**2 * lam**4 - p.d * lam**2 + p.e
    if s2 <= 0.0:
        raise InvalidParams(
            f"b^2 L^4 - d L^2 + e = {s2:g} must be positive (Lambda = {lam:g})"
        )
    return math.sqrt(s2)


def _r_value(p: ParabolaParams, lam: float) -> float:
    """R(Lambda) = sqrt(2 b^2 L^2 - d + 2 b S(L)); xi-independent action part."""
    s = _s_value(p, lam)
    arg = 2.0 * p.b**2 * lam**2 - p.d + 2.0 * p.b * s
    if arg <= 0.0:
        raise InvalidParams("R(Lambda)^2 non-positive; parabola not admissible here")
    return math.sqrt(arg)


def _r_prime(p: ParabolaParams, lam: float) -> float:
    """dR/dLambda in closed form (equals b * Lambda * R / S)."""
    s = _s_value(p, lam)
    r = _r_value(p, lam)
    return lam * (2.0 * p.b**2 + p.b * (2.0 * p.b**2 * lam**2 - p.d) / s) / r


def _beta_hat(p: ParabolaParams, xi: float) -> float:
    """a + b xi; strictly negative for bound motion when b != 0."""
    return p.a + p.b * xi


def _require_bound_slope(p: ParabolaParams, xi: float) -> float:
    bh = _beta_hat(p, xi)
    if bh >= 0.0:
        raise UnboundOrbit(f"a + b*xi = {bh:g} must be negative for bound motion")
    return bh


def _ecc_squared(p: ParabolaParams, xi: float, lam: float) -> float:
    """Isochrone eccentricity squared for b != 0 (may fall outside [0,1))."""
    bh = _beta_hat(p, xi)
    dl = p.delta
    pcoef = (2.0 * p.b**2 * lam**2 - p.d) / dl
    qcoef = (p.d**2 - 4.0 * p.b**2 * p.e) / dl**2
    return 1.0 + 2.0 * pcoef * bh + qcoef * bh * bh


def _clip_ecc2(e2: float) -> float:
    """Clip tiny negative round-off; reject genuinely unbound values."""
    if e2 < 0.0:
        if e2 > -1e-12:
            return 0.0
        raise NoBoundOrbit(f"eccentricity^2 = {e2:g} < 0: no bound orbit")
    if e2 >= 1.0:
        raise NoBoundOrbit(f"eccentricity^2 = {e2:g} >= 1: no bound orbit")
    return e2


# ---------------------------------------------------------------------------
# turning points


def turning_points(params: ParabolaParams, oc: OrbitConstants) -> tuple[float, float]:
    """Periastron and apoastron abscissae (x_p, x_a) of a bound orbit.

    Solves the intersection of the line y = xi x - Lambda^2 with the convex
    branch.  For b != 0 the substitution u = sqrt(a2 x + a3) reduces the
    problem to a quadratic in u; the harmonic class is already quadratic in x.
    Circular orbits return x_p == x_a.
    """
    xi, lam = oc.xi, oc.lam
    if params.b == 0.0:
        a2c, a1c, a0c = _harmonic_coeffs(params)
        bb = xi - a1c
        cc = lam**2 + a0c
        disc = bb * bb - 4.0 * a2c * cc
        if disc < 0.0:
            if disc > -1e-12 * max(1.0, bb * bb):
                disc = 0.0
            else:
                raise NoBoundOrbit("energy below the circular minimum")
        if bb <= 0.0:
            raise NoBoundOrbit("no positive turning points for this energy")
        root = math.sqrt(disc)
        x_p = (bb - root) / (2.0 * a2c)
        x_a = (bb + root) / (2.0 * a2c)
        if x_p < 0.0:
            raise NoBoundOrbit("inner turning point below x = 0")
        return (x_p, x_a)

    _require_bound_slope(params, xi)
    a, b, d, e, dl = params.a, params.b, params.d, params.e, params.delta
    a0 = d / (2.0 * b * b) - lam**2
    a1 = xi + a / b
    a2 = dl / b**3
    a3 = (d * d - 4.0 * b * b * e) / (4.0 * b**4)
    u0 = -a2 / (2.0 * a1)
    v0 = u0 * u0 + 2.0 * a0 * u0 + a3
    ecc = math.sqrt(_clip_ecc2(v0 / (u0 * u0)))
    xs = []
    for u in (u0 * (1.0 - ecc), u0 * (1.0 + ecc)):
        xs.append((u * u - a3) / a2)
    x_p, x_a = min(xs), max(xs)
    return (x_p, x_a)


# ---------------------------------------------------------------------------
# periods, angles, actions, Hamiltonian


def radial_period(params: ParabolaParams, xi: float) -> float:
    """Radial period T(xi); independent of Lambda by isochrony.

    For b != 0, T^2 = -(pi^2/4) delta / (a + b xi)^3; the harmonic class has
    the constant period pi sqrt(-d) / (2|a|).
    """
    if params.b == 0.0:
        return math.pi * math.sqrt(-params.d) / (2.0 * abs(params.a))
    bh = _require_bound_slope(params, xi)
    return 0.5 * math.pi * math.sqrt(params.delta / abs(bh) ** 3)


def apsidal_angle(params: ParabolaParams, lam: float) -> float:
    """Apsidal angle Theta(Lambda); independent of xi by isochrony."""
    if lam <= 0.0:
        raise InvalidParams("apsidal angle requires Lambda > 0")
    if params.b == 0.0:
        _, _, a0c = _harmonic_coeffs(params)
        arg = lam**2 + a0c
        if arg <= 0.0:
            raise InvalidParams("Lambda^2 - e/d must be positive for harmonic Theta")
        return math.pi * lam / math.sqrt(arg)
    return math.pi * lam * _r_value(params, lam) / _s_value(params, lam)


def radial_action(params: ParabolaParams, oc: OrbitConstants) -> float:
    """Radial action J = (1/2pi) closed-integral of p_r dr, in closed form."""
    xi, lam = oc.xi, oc.lam
    if params.b == 0.0:
        # Feasibility check mirrors turning_points.
        turning_points(params, oc)
        a2c, a1c, a0c = _harmonic_coeffs(params)
        sd = math.sqrt(-params.d)
        aa = abs(params.a)
        j = sd * xi / (4.0 * aa) - 0.5 * math.sqrt(lam**2 + a0c) \
            - params.c / (4.0 * aa * sd)
    else:
        bh = _require_bound_slope(params, xi)
        _clip_ecc2(_ecc_squared(params, xi, lam))
        b = params.b
        j = (math.sqrt(-params.delta / bh) - _r_value(params, lam)) / (2.0 * b)
    if j < 0.0:
        if j < -1e-10 * max(1.0, abs(xi), lam):
            raise NoBoundOrbit(f"negative radial action J = {j:g}")
        j = 0.0
    return j


def hamiltonian(params: ParabolaParams, J: float, lam: float) -> float:
    """Energy xi = H(J, Lambda) in action-angle variables."""
    if J < 0.0 or not math.isfinite(J):
        raise InvalidParams(f"radial action must be >= 0, got {J!r}")
    if lam <= 0.0:
        raise InvalidParams("hamiltonian requires Lambda > 0")
    if params.b == 0.0:
        _, _, a0c = _harmonic_coeffs(params)
        sd = math.sqrt(-params.d)
        aa = abs(params.a)
        return (-params.c / params.d + 4.0 * aa * J / sd
                + 2.0 * aa * math.sqrt(lam**2 + a0c) / sd)
    b = params.b
    den = 2.0 * b * J + _r_value(params, lam)
    return -params.a / b - params.delta / (b * den * den)


def frequencies(params: ParabolaParams, J: float, lam: float) -> tuple[float, float]:
    """Hamiltonian frequencies (omega_J, omega_Lambda) = grad H."""
    if lam <= 0.0:
        raise InvalidParams("frequencies require Lambda > 0")
    if params.b == 0.0:
        _, _, a0c = _harmonic_coeffs(params)
        sd = math.sqrt(-params.d)
        aa = abs(params.a)
        return (4.0 * aa / sd, 2.0 * aa * lam / (sd * math.sqrt(lam**2 + a0c)))
    b = params.b
    den = 2.0 * b * J + _r_value(params, lam)
    om_j = 4.0 * params.delta / den**3
    om_lam = 2.0 * params.delta * _r_prime(params, lam) / (b * den**3)
    return (om_j, om_lam)


# ---------------------------------------------------------------------------
# orbit elements


def orbit_elements(params: ParabolaParams, oc: OrbitConstants) -> OrbitElements:
    """Assemble all per-orbit derived quantities for (params, xi, Lambda)."""
    xi, lam = oc.xi, oc.lam
    x_p, x_a = turning_points(params, oc)
    T = radial_period(params, xi)
    theta_tot = apsidal_angle(params, lam)
    J = radial_action(params, oc)
    if params.b == 0.0:
        omega = TWO_PI / T
        ecc = math.sqrt(max(1.0 - x_p / x_a, 0.0)) if x_a > 0.0 else 0.0
        if ecc <= CIRCULAR_ECC:
            ecc = 0.0
        return OrbitElements(
            xi=xi, lam=lam, omega_r=omega, ecc=ecc, T=T, Theta=theta_tot, J=J,
            x_p=x_p, x_a=x_a, alpha2=None, x_v=None, zeta2=None,
            harmonic=True, b_sign=0.0,
        )
    bh = _beta_hat(params, xi)
    omega = math.sqrt(-16.0 * bh**3 / params.delta)
    e2 = _clip_ecc2(_ecc_squared(params, xi, lam))
    ecc = math.sqrt(e2)
    if ecc <= CIRCULAR_ECC:
        ecc = 0.0
    alpha2 = params.delta / (8.0 * params.b * bh * bh)
    x_v = params.x_v
    zeta2 = -x_v / (2.0 * alpha2)
    return OrbitElements(
        xi=xi, lam=lam, omega_r=omega, ecc=ecc, T=T, Theta=theta_tot, J=J,
        x_p=x_p, x_a=x_a, alpha2=alpha2, x_v=x_v, zeta2=zeta2,
        harmonic=False, b_sign=math.copysign(1.0, params.b),
    )


# ---------------------------------------------------------------------------
# generalized Kepler equation


def _kepler_core(ecc: float, M: float, tol: float) -> float:
    """Solve E - ecc sin E = M for |ecc| < 1 (sign-agnostic in ecc).

    Newton from E0 = M + ecc sin M, falling back to bisection whenever a step
    leaves the bracket [M - |ecc|, M + |ecc|]; unconditionally convergent.
    """
    cycles = math.floor(M / TWO_PI)
    m = M - cycles * TWO_PI
    ae = abs(ecc)
    lo, hi = m - ae, m + ae
    e_cur = min(max(m + ecc * math.sin(m), lo), hi)
    for _ in range(200):
        f = e_cur - ecc * math.sin(e_cur) - m
        if abs(f) <= tol:
            break
        if f > 0.0:
            hi = e_cur
        else:
            lo = e_cur
        step = f / (1.0 - ecc * math.cos(e_cur))
        cand = e_cur - step
        if not lo < cand < hi:
            cand = 0.5 * (lo + hi)
        if cand == e_cur:
            break
        e_cur = cand
    return e_cur + cycles * TWO_PI


def solve_kepler(ecc: float, M: float, tol: float = 1e-13) -> float:
    """Invert the generalized Kepler equation Omega t = E - ecc sin E.

    Parameters
    ----------
    ecc : eccentricity in [0, 1).
    M : mean anomaly Omega t, any real value (cycles are preserved).
    tol : absolute residual target, default 1e-13.
    """
    if not 0.0 <= ecc < 1.0:
        raise InvalidParams(f"eccentricity must lie in [0, 1), got {ecc!r}")
    return _kepler_core(ecc, M, tol)


# ---------------------------------------------------------------------------
# parametric solution


def radius_of_E(params: ParabolaParams, elements: OrbitElements,
                E: float) -> tuple[float, float]:
    """Henon abscissa and radius (x, r) at eccentric anomaly E.

    E = 0 is periastron and E = pi apoastron for every class; the harmonic
    class uses x(E) = x_a + (x_p - x_a) cos(E/2)^2 with E = Omega t.
    """
    if elements.harmonic:
        x = elements.x_a + (elements.x_p - elements.x_a) * math.cos(0.5 * E) ** 2
    else:
        h = 1.0 - elements.eps_eff * math.cos(E)
        x = elements.x_v + 2.0 * elements.alpha2 * h * h
    x = min(max(x, elements.x_p), elements.x_a)
    return (x, math.sqrt(x / 2.0))


def _theta_base_nonharmonic(lam: float, el: OrbitElements,
                            E: float) -> tuple[float, float]:
    """theta(E) on E in [0, pi] for b != 0, plus the imaginary residual.

    Partial fractions split 1/x(E) into two terms with shifted eccentricities
    eps_pm = eps_eff / (1 +- zeta); both are evaluated with principal-branch
    complex square roots and arctangents and summed.  The sum is real: for
    the hollowed family the terms are complex conjugates, elsewhere each term
    is already real.
    """
    zeta = cmath.sqrt(complex(el.zeta2, 0.0))
    half_tan = math.tan(0.5 * E) if E < math.pi else math.inf
    total = complex(0.0, 0.0)
    for sgn in (1.0, -1.0):
        w = 1.0 + sgn * zeta
        k = el.eps_eff / w
        inv_norm = 1.0 / (w * cmath.sqrt(1.0 - k * k))
        if math.isinf(half_tan):
            at = complex(0.5 * math.pi, 0.0)
        else:
            at = cmath.atan(cmath.sqrt((1.0 + k) / (1.0 - k)) * half_tan)
        total += inv_norm * at
    total *= lam / (el.omega_r * el.alpha2)
    return (total.real, abs(total.imag))


def _theta_base_harmonic(lam: float, el: OrbitElements, E: float) -> float:
    """theta(E) on E in [0, 2 pi) for the harmonic class."""
    ecc = el.ecc
    quarter_tan = math.tan(0.25 * E)
    g = math.sqrt((1.0 + ecc) / (1.0 - ecc))
    pair = math.atan(g * quarter_tan) + math.atan(quarter_tan / g)
    return 4.0 * lam * pair / (el.omega_r * math.sqrt(el.x_p * el.x_a))


def angle_of_E_with_residual(params: ParabolaParams, oc: OrbitConstants,
                             elements: OrbitElements,
                             E: float) -> tuple[float, float]:
    """Polar angle theta(E) with cycle unwrapping, plus imaginary residual.

    The closed form is derived on the half period E in [0, pi]; beyond it the
    reflection theta(2 pi - E) = Theta - theta(E) and the periodicity
    theta(E + 2 pi k) = k Theta + theta(E) extend it to all E >= 0.
    """
    el = elements
    if el.ecc <= CIRCULAR_ECC:
        return (el.Theta * E / TWO_PI, 0.0)
    cycles = math.floor(E / TWO_PI)
    e_frac = E - cycles * TWO_PI
    base = cycles * el.Theta
    if el.harmonic:
        return (base + _theta_base_harmonic(oc.lam, el, e_frac), 0.0)
    if e_frac <= math.pi:
        th, resid = _theta_base_nonharmonic(oc.lam, el, e_frac)
        return (base + th, resid)
    th, resid = _theta_base_nonharmonic(oc.lam, el, TWO_PI - e_frac)
    return (base + el.Theta - th, resid)


def angle_of_E(params: ParabolaParams, oc: OrbitConstants,
               elements: OrbitElements, E: float) -> float:
    return angle_of_E_with_residual(params, oc, elements, E)[0]


def trajectory(params: ParabolaParams, oc: OrbitConstants,
               times: Sequence[float]) -> list[TrajectorySample]:
    """Sample the analytic orbit at the given times.

    Periastron with theta = 0 at t = 0.  Also reports the angle variables
    z_J = Omega t and z_Lambda = (Theta / 2 pi) Omega t.
    """
    el = orbit_elements(params, oc)
    ratio = el.Theta / TWO_PI
    out = []
    for t in times:
        if not math.isfinite(t):
            raise InvalidParams(f"non-finite sample time {t!r}")
        m = el.omega_r * t
        if el.harmonic or el.ecc <= CIRCULAR_ECC:
            e_anom = m
        else:
            e_anom = _kepler_core(el.eps_eff, m, 1e-13)
        x, r = radius_of_E(params, el, e_anom)
        theta = angle_of_E(params, oc, el, e_anom)
        out.append(TrajectorySample(t=t, E=e_anom, x=x, r=r, theta=theta,
                                    z_j=m, z_lam=ratio * m))
    return out


# ---------------------------------------------------------------------------
# circular orbits and feasibility helpers


def circular_abscissa(params: ParabolaParams, lam: float) -> float:
    """Abscissa x_c of the circular orbit: x Y'(x) - Y(x) = Lambda^2.

    The map x -> x Y' - Y is monotone increasing (its derivative is x Y''),
    so a bracketed Newton iteration is safe.  Raises NoCircularOrbit when
    Lambda^2 lies outside the attainable range.
    """
    if lam <= 0.0:
        raise InvalidParams("circular orbit requires Lambda > 0")
    lam2 = lam * lam
    if params.b == 0.0:
        a2c, _, a0c = _harmonic_coeffs(params)
        arg = (lam2 + a0c) / a2c
        if arg <= 0.0:
            raise NoCircularOrbit("Lambda^2 below the harmonic minimum")
        return math.sqrt(arg)

    def g(x: float) -> float:
        y = pot.y_value(params, x)
        yp = pot.y_derivatives(params, x, 1)[0]
        return x * yp - y - lam2

    xlo, xhi = pot.domain(params)
    # Probe points strictly inside the domain, geometrically spaced.
    span = (xhi - xlo) if math.isfinite(xhi) else max(1.0, xlo)
    lo = xlo + 1e-12 * span
    if math.isfinite(xhi):
        hi = xhi - 1e-12 * span
    else:
        hi = max(8.0 * span, 8.0)
        for _ in range(400):
            if g(hi) > 0.0:
                break
            hi *= 4.0
        else:  # pragma: no cover - g grows without bound on parabolae
            raise NoCircularOrbit("failed to bracket the circular abscissa")
    glo, ghi = g(lo), g(hi)
    if glo > 0.0 or ghi < 0.0:
        raise NoCircularOrbit(
            f"Lambda^2 = {lam2:g} outside the range of x Y' - Y on the domain")
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 4e-16 * max(abs(hi), 1e-300):
            break
    # Newton polish drives the residual to the evaluation noise floor.
    x_c = 0.5 * (lo + hi)
    for _ in range(3):
        y2 = pot.y_derivatives(params, x_c, 2)[1]
        slope = x_c * y2
        if slope <= 0.0:
            break
        cand = x_c - g(x_c) / slope
        if not xlo < cand < xhi:
            break
        x_c = cand
    return x_c


def circular_energy(params: ParabolaParams, lam: float) -> float:
    """Energy xi_c(Lambda) of the circular orbit (slope of the tangent line)."""
    x_c = circular_abscissa(params, lam)
    return pot.y_derivatives(params, x_c, 1)[0]


def feasible_energy(params: ParabolaParams, lam: float, frac: float = 0.5) -> float:
    """An energy giving a bound, non-circular orbit at this Lambda.

    ``frac`` in (0, 1) interpolates between the circular energy and the
    upper feasibility edge (escape for right-opening parabolae, the domain
    wall for the bounded family).  Useful for building test grids.
    """
    if not 0.0 < frac < 1.0:
        raise InvalidParams("frac must be in (0, 1)")
    xi_c = circular_energy(params, lam)
    if params.b == 0.0:
        return xi_c + 2.0 * frac * max(1.0, abs(xi_c))
    if params.b > 0.0:
        xi_hi = -params.a / params.b
    else:
        dl = params.delta
        pcoef = 2.0 * (2.0 * params.b**2 * lam**2 - params.d) / dl
        qcoef = (params.d**2 - 4.0 * params.b**2 * params.e) / dl**2
        bh_wall = -pcoef / qcoef
        xi_hi = (bh_wall - params.a) / params.b
    return xi_c + frac * (xi_hi - xi_c)
