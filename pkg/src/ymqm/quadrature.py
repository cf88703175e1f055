"""Brute-force numerical evaluation of every integral the closed forms claim.

Momentum integrals are exact Gaussians, so only coordinate integrals are
numeric: nested adaptive quadrature over the (semi-)infinite domain, with a
hyperbolic-coordinate alternate route for the channel-dominated small-v
regime, and the radial reductions of the three-coordinate model.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import AccuracyError, DivergentIntegralError, DomainError
from .reduction import integrate_momenta

_TAIL_SAFETY = 10.0  # tail-truncation bound kept below rel_tol / safety


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-300
    max_subdivisions: int = 200
    domain_cutoff: float = math.inf

    def quad_opts(self):
        return dict(
            epsabs=self.abs_tol, epsrel=self.rel_tol, limit=self.max_subdivisions
        )


@dataclass(frozen=True)
class OracleValue:
    value: float
    error: float

    def __float__(self):
        return self.value


def _quad(f, a, b, spec, inner=False):
    opts = spec.quad_opts()
    if inner:
        # nested integrals: keep the inner error subdominant
        opts["epsrel"] = max(opts["epsrel"] * 0.02, 3e-13)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(f, a, b, **opts)
    return val, err


def _weight_params(params, effective):
    """(g2, v2_weight, extra): couplings of the coordinate weight
    exp(-t [v2_w r^2/2 + quartic]).  With ``effective`` the resummed
    regulator v^2 -> v^2 + hbar^2 g^2 t/2 is applied (times a constant
    factor exp(-hbar^2 t^2 v^2 / 2) from the harmonic part, returned as
    ``extra``)."""
    g2 = params.g**2
    if effective:
        v2 = params.v**2 + params.veff2
        extra = math.exp(-0.5 * params.hbar**2 * params.t**2 * params.v**2)
    else:
        v2 = params.v**2
        extra = 1.0
    return g2, v2, extra


def imn_quadrature(m, n, params, spec=QuadratureSpec(), effective=False):
    """I_mn = 4 int_0^inf int_0^inf x^2m y^2n exp[-(t/2)(v^2(x^2+y^2)+g^2x^2y^2)]
    by nested adaptive quadrature. ``effective`` switches on the resummed
    regulator (the tilde variant). Returns an :class:`OracleValue`."""
    if m < 0 or n < 0:
        raise DomainError("m, n must be non-negative")
    g2, v2, _ = _weight_params(params, effective)
    if v2 <= 0:
        raise DivergentIntegralError(
            "moment integrals diverge along the channels at v = 0"
        )
    t = params.t
    cut = _gauss_cutoff(0.5 * t * v2, max(m, n), spec)
    cut = min(cut, spec.domain_cutoff)
    inner_err = 0.0

    def inner(x):
        nonlocal inner_err
        ax = 0.5 * t * (v2 + g2 * x * x)
        val, err = _quad(
            lambda y: y ** (2 * n) * math.exp(-ax * y * y), 0.0, cut, spec, inner=True
        )
        inner_err = max(inner_err, err / max(abs(val), 1e-300))
        return x ** (2 * m) * math.exp(-0.5 * t * v2 * x * x) * val

    val, err = _quad(inner, 0.0, cut, spec)
    total = 4.0 * val
    rel_err = err / max(abs(val), 1e-300) + inner_err + spec.rel_tol / _TAIL_SAFETY
    return OracleValue(total, abs(total) * rel_err)


def imn_quadrature_channel(m, n, params, spec=QuadratureSpec(), effective=False):
    """Alternate route in hyperbolic coordinates u = x y, w = ln(x/y), which
    aligns the mesh with the channels:

        I_mn = 2 int_0^inf du int_-inf^inf dw u^(m+n) e^((m-n) w)
               exp[-(t/2)(g^2 u^2 + 2 u v^2 cosh w)].
    """
    if m < 0 or n < 0:
        raise DomainError("m, n must be non-negative")
    g2, v2, _ = _weight_params(params, effective)
    if v2 <= 0:
        raise DivergentIntegralError(
            "moment integrals diverge along the channels at v = 0"
        )
    t = params.t

    def inner(u):
        a = t * v2 * u  # cosh-confined in w

        def fw(w):
            return math.exp((m - n) * w - a * (math.cosh(w) - 1.0))

        wmax = math.acosh(1.0 + _gauss_cutoff_exponent(spec) / max(a, 1e-300))
        val, _ = _quad(fw, -wmax, wmax, spec, inner=True)
        return u ** (m + n) * math.exp(-0.5 * t * g2 * u * u - a) * val

    ucut = min(
        _gauss_cutoff(0.5 * t * g2, m + n, spec) if g2 > 0 else spec.domain_cutoff,
        spec.domain_cutoff,
    )
    if not math.isfinite(ucut):
        raise DomainError("needs g > 0 or a finite domain_cutoff")
    val, err = _quad(inner, 0.0, ucut, spec)
    total = 2.0 * val
    return OracleValue(total, abs(total) * (err / max(abs(val), 1e-300) + spec.rel_tol))


def _gauss_cutoff_exponent(spec):
    # e^-X below rel_tol / (10 * safety margin)
    return -math.log(spec.rel_tol / (10.0 * _TAIL_SAFETY)) + 5.0


def _gauss_cutoff(a, mpow, spec):
    """R with x^(2 mpow) e^(-a x^2) tail beyond R negligible at spec.rel_tol."""
    if a <= 0:
        raise DivergentIntegralError("non-decaying Gaussian weight")
    X = _gauss_cutoff_exponent(spec) + 2.0 * mpow
    return math.sqrt(X / a) + math.sqrt(max(mpow, 1) / a)


def phase_space_quadrature(poly, params, spec=QuadratureSpec(), effective=False):
    """(2 pi hbar)^(-d) int dGamma poly e^(-tH): Gaussian momentum moments
    applied exactly, then one numeric coordinate integral of the reduced
    polynomial against the coordinate weight (no moment-by-moment
    decomposition, so the route is independent of the closed forms)."""
    red = integrate_momenta(poly)
    d = poly.dims
    g2, v2, extra = _weight_params(params, effective)
    t = params.t
    gg2 = params.g**2
    vv2 = params.v**2

    def poly_at(coords):
        total = 0.0
        for e in red.entries:
            base = float(e.coeff) * t**e.e_t * gg2**e.e_g2 * vv2**e.e_v2
            acc = 0.0
            # symmetrized moments: average over distinct permutations
            for perm in _distinct_permutations(e.moments):
                term = 1.0
                for c, p in zip(coords, perm):
                    term *= c ** (2 * p)
                acc += term
            acc /= _n_permutations(e.moments)
            total += base * acc
        return total

    if v2 <= 0:
        raise DivergentIntegralError("phase-space integral diverges at v = 0")
    if d == 2:

        def weight(x, y):
            return math.exp(-0.5 * t * (v2 * (x * x + y * y) + g2 * x * x * y * y))

        cut = _gauss_cutoff(0.5 * t * v2, poly.max_exponent("x") // 2 + 1, spec)

        def inner(x):
            val, _ = _quad(lambda y: poly_at((x, y)) * weight(x, y), 0.0, cut, spec, inner=True)
            return val

        val, err = _quad(inner, 0.0, cut, spec)
        val *= 4.0
    elif d == 3:

        def weight3(x, y, z):
            quart = x * x * y * y + y * y * z * z + z * z * x * x
            return math.exp(-0.5 * t * (v2 * (x * x + y * y + z * z) + g2 * quart))

        cut = _gauss_cutoff(0.5 * t * v2, poly.max_exponent("x") // 2 + 1, spec)

        def inner2(x, y):
            val, _ = _quad(
                lambda z: poly_at((x, y, z)) * weight3(x, y, z), 0.0, cut, spec, inner=True
            )
            return val

        def inner1(x):
            val, _ = _quad(lambda y: inner2(x, y), 0.0, cut, spec, inner=True)
            return val

        val, err = _quad(inner1, 0.0, cut, spec)
        val *= 8.0
    else:
        raise DomainError("phase-space quadrature supports 2 or 3 coordinates")
    norm = (
        params.hbar ** (poly.i_power - d)
        * (2.0 * math.pi) ** (-d)
        * (2.0 * math.pi / t) ** (d / 2.0)
        * extra
    )
    return OracleValue(norm * val, abs(norm * val) * (err / max(abs(val), 1e-300) + spec.rel_tol))


def _distinct_permutations(moments):
    from itertools import permutations

    return set(permutations(moments))


def _n_permutations(moments):
    return len(_distinct_permutations(moments))


# -- three-coordinate radial integrals ----------------------------------------


def radial_integrand_n3(which, r, params, effective):
    """Integrand of the radial reduction (full-space normalization):

        I_b = (2 pi/t)^(3/2) int_0^inf r^(1|3) e^(-t g^2 r^4/16) I_0(t g^2 r^4/16)
              e^(-t v^2 r^2/2) (v^2 + g^2 r^2)^(-3/2) dr

    for the x^2 (``which=1``) and x^2 (y^2+z^2) (``which=2``) moments.
    """
    from .special import bessel_i0_scaled

    g2, v2, _ = _weight_params(params, effective)
    t = params.t
    w = t * g2 * r**4 / 16.0
    power = 1 if which == 1 else 3
    return (
        r**power
        * bessel_i0_scaled(w)
        * math.exp(-0.5 * t * v2 * r * r)
        * (v2 + g2 * r * r) ** -1.5
    )


def radial_quadrature_n3(which, params, spec=QuadratureSpec(), effective=False):
    """The two radial coordinate integrals of the three-coordinate model
    (``which`` is 1 for the x^2 structure, 2 for x^2 (y^2+z^2)).  At v = 0
    without the effective regulator the first diverges at r = 0 and is
    rejected; the second stays finite."""
    if which not in (1, 2):
        raise DomainError("which must be 1 or 2")
    g2, v2, _ = _weight_params(params, effective)
    if which == 1 and v2 <= 0:
        # integrand ~ r (g^2 r^2)^(-3/2) = r^-2/g^3 near r = 0
        raise DivergentIntegralError(
            "the x^2 radial integral diverges at r = 0 for v = 0"
        )
    if v2 <= 0 and g2 <= 0:
        raise DivergentIntegralError("no decay in the radial weight")
    t = params.t
    tail = 0.0
    if v2 > 0:
        # the Bessel factor eats the quartic exponential (algebraic decay
        # only), so the harmonic factor sets the cutoff
        rcut = _gauss_cutoff(0.5 * t * v2, 2, spec)
    else:
        # which = 2 at v = 0: algebraic r^-2 tail (channel escape), add the
        # asymptotic tail int_R^inf r^3 (2 pi w)^(-1/2) (g^2 r^2)^(-3/2) dr
        # analytically, with w = t g^2 r^4/16
        rcut = max((8.0 * _gauss_cutoff_exponent(spec) / (t * g2)) ** 0.25, 10.0)
        A = math.sqrt(16.0 / (2.0 * math.pi * t * g2)) / g2**1.5
        tail = A * (1.0 / rcut + (2.0 / (t * g2)) / (5.0 * rcut**5))
    rcut = min(rcut, spec.domain_cutoff)
    val, err = _quad(lambda r: radial_integrand_n3(which, r, params, effective), 0.0, rcut, spec)
    total = (2.0 * math.pi / t) ** 1.5 * (val + tail)
    return OracleValue(total, abs(total) * (err / max(abs(val), 1e-300) + spec.rel_tol))


def raw_coordinate_n3(which, params, spec=QuadratureSpec(), effective=False):
    """The same structures as a raw 3-D coordinate integral (full space,
    octant times 8) for cross-checking the radial reduction."""
    if which not in (1, 2):
        raise DomainError("which must be 1 or 2")
    g2, v2, _ = _weight_params(params, effective)
    if which == 1 and v2 <= 0:
        raise DivergentIntegralError(
            "the x^2 coordinate integral diverges along the channels at v = 0"
        )
    t = params.t

    def weight(x, y, z):
        quart = x * x * y * y + y * y * z * z + z * z * x * x
        return math.exp(-0.5 * t * (v2 * (x * x + y * y + z * z) + g2 * quart))

    def f(x, y, z):
        if which == 1:
            return x * x * weight(x, y, z)
        return x * x * (y * y + z * z) * weight(x, y, z)

    if v2 > 0:
        cut = _gauss_cutoff(0.5 * t * v2, 3, spec)
    else:
        cut = (8.0 * _gauss_cutoff_exponent(spec) / (t * g2)) ** 0.25 + 6.0
    cut = min(cut, spec.domain_cutoff)

    def inner2(x, y):
        val, _ = _quad(lambda z: f(x, y, z), 0.0, cut, spec, inner=True)
        return val

    def inner1(x):
        val, _ = _quad(lambda y: inner2(x, y), 0.0, cut, spec, inner=True)
        return val

    val, err = _quad(inner1, 0.0, cut, spec)
    total = 8.0 * val
    return OracleValue(total, abs(total) * (err / max(abs(val), 1e-300) + spec.rel_tol))


def imn_factorized_g0(m, n, params):
    """g = 0 closed form Gamma(m+1/2) Gamma(n+1/2) (2/(t v^2))^(m+n+1)."""
    if params.v <= 0:
        raise DomainError("v must be positive")
    return (
        math.gamma(m + 0.5)
        * math.gamma(n + 0.5)
        * (2.0 / (params.t * params.v**2)) ** (m + n + 1)
    )
