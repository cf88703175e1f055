"""Closed-form partition sums of the quartic-oscillator models.

Routes implemented here:

* leading (phase-space) term with its harmonic-strength Bessel form and the
  v -> 0 logarithmic limit;
* the order-hbar^2 correction as a bracket of four Whittaker terms;
* the general moment integrals I_mn in Whittaker form;
* the families of power-divergent terms at order hbar^k as v -> 0, their
  milder variants and the purely logarithmic diagonal family;
* the resummed (effective-Higgs) terms, regular as v -> 0, their singular
  p-sums, and the assembled asymptotic series in lam2 = g^2 hbar^4 t^3;
* the three-coordinate model: leading term, radial J integrals and the
  order-hbar^2 correction.

Dimensionless outputs depend only on lam2 and z = t v^4/(2 g^2).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

from scipy.integrate import quad

from .errors import DomainError, DivergentIntegralError, RegimeWarning
from .params import ModelParams
from .special import (
    EULER_GAMMA,
    WhittakerArgs,
    bessel_k0_scaled,
    digamma,
    double_factorial,
    gamma_fn,
    whittaker_w,
)

_C = EULER_GAMMA
_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class HeatKernelTerm:
    """One contribution to the partition sum, tagged by order and route."""

    order_k: int
    value: float
    route: str
    provenance: str
    m: int | None = None
    n: int | None = None
    ell: int | None = None
    diagonal: bool = False

    def __post_init__(self):
        if self.order_k < 0 or self.order_k % 2:
            raise DomainError("order_k must be a non-negative even integer")
        if self.route == "singular_family" and not self.diagonal:
            k, m, n, ell = self.order_k, self.m, self.n, self.ell
            if m is None or n is None:
                raise DomainError("singular-family terms carry (m, n) indices")
            ell = 0 if ell is None else ell
            if ell and not 0 < ell < k / 4:
                raise DomainError("ell must satisfy 0 <= ell < k/4")
            if m - n != k // 2 - 2 * ell:
                raise DomainError("indices violate m - n = k/2 - 2 ell")


def prefactor_K(params):
    """(2 pi g^2 hbar^4 t^3)^(-1/2)."""
    return params.prefactor_K()


def tf_partition_n2(params):
    """Leading term of the planar model: K e^(z/2) K_0(z/2) with z/2 = t v^4/(4 g^2)."""
    if params.v <= 0:
        raise DomainError("v must be positive (use tf_limit_v0 for the limit)")
    if params.g <= 0:
        raise DomainError("g must be positive")
    w = params.t * params.v**4 / (4.0 * params.g**2)
    return prefactor_K(params) * bessel_k0_scaled(w)


def tf_limit_v0(params):
    """Small-v form of the leading term, K (ln(8 g^2/(t v^4)) - C)."""
    if params.v <= 0 or params.g <= 0:
        raise DomainError("g and v must be positive")
    if not params.z_in_regime():
        warnings.warn(
            f"z = {params.z:.3g} outside the small-z regime", RegimeWarning
        )
    return prefactor_K(params) * (
        math.log(8.0 * params.g**2 / (params.t * params.v**4)) - _C
    )


def integral_Imn_closed(m, n, params):
    """Coordinate moment I_mn in closed Whittaker form (m >= n >= 0):

        I_mn = sqrt(2 pi) (2n-1)!! (v^2)^(m-n) t^(-n-1/2) g^(-2m-1)
               e^(z/2) z^(-(m-n+1)/2) Gamma(m+1/2) W_{-(m+n)/2,(m-n)/2}(z).
    """
    if m < n or n < 0:
        raise DomainError("requires m >= n >= 0 (symmetrize the indices first)")
    if params.v <= 0 or params.g <= 0:
        raise DomainError("g and v must be positive")
    z = params.z
    w = whittaker_w(WhittakerArgs(-(m + n) / 2.0, (m - n) / 2.0, z))
    return (
        _SQRT_2PI
        * double_factorial(2 * n - 1)
        * params.v ** (2 * (m - n))
        * params.t ** -(n + 0.5)
        * params.g ** -(2 * m + 1)
        * math.exp(0.5 * z)
        * z ** (-(m - n + 1) / 2.0)
        * gamma_fn(m + 0.5)
        * w
    )


def z2_closed_n2(params):
    """Order-hbar^2 term of the planar model as the four-moment bracket

        Z_2 = (t / 12 pi) [ (-g^2 + t v^4/2) I_10 + (t g^4/2) I_21
                            - v^2 I_00 + t g^2 v^2 I_11 ].
    """
    if params.v <= 0 or params.g <= 0:
        raise DomainError("g and v must be positive")
    g2 = params.g**2
    v2 = params.v**2
    t = params.t
    i00 = integral_Imn_closed(0, 0, params)
    i10 = integral_Imn_closed(1, 0, params)
    i11 = integral_Imn_closed(1, 1, params)
    i21 = integral_Imn_closed(2, 1, params)
    bracket = (
        (-g2 + 0.5 * t * v2**2) * i10
        + 0.5 * t * g2**2 * i21
        - v2 * i00
        + t * g2 * v2 * i11
    )
    return t / (12.0 * math.pi) * bracket


def z2_limit_v0(params):
    """v -> 0 asymptote of the hbar^2 term: -K hbar^2 g^2 t^(3/2) / (6 sqrt(t v^4))."""
    if params.v <= 0:
        raise DomainError("v must be positive")
    return (
        -prefactor_K(params)
        * params.hbar**2
        * params.g**2
        * params.t**1.5
        / (6.0 * math.sqrt(params.t * params.v**4))
    )


# -- v -> 0 singular families ------------------------------------------------


def _check_singular_indices(k, m, ell=0):
    if k < 2 or k % 2:
        raise DomainError("k must be an even integer >= 2")
    if not float(ell).is_integer() or ell < 0:
        raise DomainError("ell must be a non-negative integer")
    if ell and ell >= k / 4:
        raise DomainError("ell must satisfy ell < k/4")
    if not k // 2 <= m <= k:
        raise DomainError("m must satisfy k/2 <= m <= k")
    n = m - k // 2 + 2 * ell
    if n < 0:
        raise DomainError("implied second index is negative")
    return n


def zk_most_singular(k, m, params):
    """Generic magnitude of a maximally divergent structure at order hbar^k:

        Z = K (4 g^4 hbar^4 t^3 / (v^4 t))^(k/4) Gamma(k/2) (2m-k-1)!!,

    diverging as v^-k (the indices satisfy m - n = k/2).
    """
    n = _check_singular_indices(k, m)
    if params.v <= 0:
        raise DomainError("v must be positive")
    ratio = 4.0 * params.g**4 * params.hbar**4 * params.t**3 / (params.v**4 * params.t)
    value = (
        prefactor_K(params)
        * ratio ** (k / 4.0)
        * gamma_fn(k / 2.0)
        * double_factorial(2 * m - k - 1)
    )
    return HeatKernelTerm(
        order_k=k, value=value, route="singular_family",
        provenance="power-divergent-structure", m=m, n=n, ell=0,
    )


def zk_less_singular(k, m, ell, params):
    """Milder structures (m - n = k/2 - 2 ell, 0 <= ell < k/4):

        Z = K (4 g^4 hbar^4 t^3/(v^4 t))^(k/4) (v^4 t / 4 g^4)^ell
            Gamma(k/2 - ell) (2m-k-1)!!.
    """
    n = _check_singular_indices(k, m, ell)
    if params.v <= 0:
        raise DomainError("v must be positive")
    ratio = 4.0 * params.g**4 * params.hbar**4 * params.t**3 / (params.v**4 * params.t)
    value = (
        prefactor_K(params)
        * ratio ** (k / 4.0)
        * (params.v**4 * params.t / (4.0 * params.g**4)) ** ell
        * gamma_fn(k / 2.0 - ell)
        * double_factorial(2 * m - k - 1)
    )
    return HeatKernelTerm(
        order_k=k, value=value, route="singular_family",
        provenance="power-divergent-structure", m=m, n=n, ell=int(ell),
    )


def zk_diagonal_log(k, m, params):
    """Equal-index structures, logarithmic only:

        Z = K (g^2 hbar^4 t^3)^(k/4) [ln(2 g^2/(v^4 t)) - 2C - psi(m+1/2)].
    """
    if k < 2 or k % 2:
        raise DomainError("k must be an even integer >= 2")
    if m < 0:
        raise DomainError("m must be non-negative")
    if params.v <= 0:
        raise DomainError("v must be positive")
    value = (
        prefactor_K(params)
        * params.lam2 ** (k / 4.0)
        * (
            math.log(2.0 * params.g**2 / (params.v**4 * params.t))
            - 2.0 * _C
            - digamma(m + 0.5)
        )
    )
    return HeatKernelTerm(
        order_k=k, value=value, route="singular_family",
        provenance="diagonal-log-structure", m=m, n=m, diagonal=True,
    )


# -- resummed (effective-Higgs) terms ----------------------------------------


def _warn_lam2(params):
    if not params.lam2_in_regime():
        warnings.warn(
            f"lam2 = {params.lam2:.3g} outside the small-lam2 regime",
            RegimeWarning,
        )


def resummed_term(k, params):
    """Resummed terms, finite and v-independent as v -> 0:

    k = 0: K e^(lam2/16) K_0(lam2/16)  (exactly);
    k = 2: (5/3) K;  k = 4: (127/180) K  (leading small-lam2 constants).
    """
    K = prefactor_K(params)
    if k == 0:
        w = params.lam2 / 16.0
        return K * bessel_k0_scaled(w)
    _warn_lam2(params)
    if k == 2:
        return 5.0 / 3.0 * K
    if k == 4:
        return 127.0 / 180.0 * K
    raise DomainError("closed resummed constants exist for k in {0, 2, 4}")


def resummed_tf_log_form(params):
    """Small-lam2 form of the resummed leading term, K (ln(1/lam2) + 5 ln 2 - C)."""
    return prefactor_K(params) * (-math.log(params.lam2) + 5.0 * math.log(2.0) - _C)


def _singular_p_sum(k_eff, n, lam2, pmax=None):
    """sum_p Gamma(k_eff - p) Gamma(n + 1/2 + p) (-lam2/8)^p / p! over
    p = 0 .. k_eff - 1 (or fewer)."""
    last = k_eff - 1 if pmax is None else min(pmax, k_eff - 1)
    total = 0.0
    fact = 1.0
    for p in range(last + 1):
        if p:
            fact *= p
        total += (
            gamma_fn(k_eff - p)
            * gamma_fn(n + 0.5 + p)
            * (-lam2 / 8.0) ** p
            / fact
        )
    return total


def tilde_zk_singular_sum(k, n, params, pmax=None):
    """Full singular-series value of a leading resummed structure:

        K 2^k (2n-1)!!/Gamma(n+1/2)
          sum_{p=0}^{k/2-1} Gamma(k/2-p) Gamma(n+1/2+p) (-lam2/8)^p / p!.

    ``pmax=0`` keeps only the leading term of each series.
    """
    if k < 2 or k % 2:
        raise DomainError("k must be an even integer >= 2")
    if not 0 <= n <= k // 2:
        raise DomainError("n must lie in [0, k/2]")
    return (
        prefactor_K(params)
        * 2.0**k
        * double_factorial(2 * n - 1)
        / gamma_fn(n + 0.5)
        * _singular_p_sum(k // 2, n, params.lam2, pmax)
    )


def tilde_zk_less(k, n, ell, params, pmax=None):
    """Resummed milder structures (0 <= ell < k/4):

        K lam2^ell 2^(k-4 ell) (2n-1)!!/Gamma(n+1/2)
          sum_{p=0}^{k/2-2 ell-1} Gamma(k/2-2 ell-p) Gamma(n+1/2+p) (-lam2/8)^p / p!.
    """
    if k < 2 or k % 2:
        raise DomainError("k must be an even integer >= 2")
    if not float(ell).is_integer() or ell < 0 or (ell and ell >= k / 4):
        raise DomainError("ell must be an integer in [0, k/4)")
    if n < 0:
        raise DomainError("n must be non-negative")
    return (
        prefactor_K(params)
        * params.lam2**ell
        * 2.0 ** (k - 4 * ell)
        * double_factorial(2 * n - 1)
        / gamma_fn(n + 0.5)
        * _singular_p_sum(k // 2 - 2 * ell, n, params.lam2, pmax)
    )


def tilde_zk_diagonal(k, m, params):
    """Resummed equal-index structures:

        K lam2^(k/4) [-ln lam2 + 3 ln 2 - 2C - psi(m + 1/2)].
    """
    if k < 2 or k % 2:
        raise DomainError("k must be an even integer >= 2")
    if m < 0:
        raise DomainError("m must be non-negative")
    return (
        prefactor_K(params)
        * params.lam2 ** (k / 4.0)
        * (-math.log(params.lam2) + 3.0 * math.log(2.0) - 2.0 * _C - digamma(m + 0.5))
    )


def series_assemble(params, k_max, a_coefficients, full_sums=False):
    """Assemble the asymptotic series

        Z(t) = K [ -ln lam2 + 5 ln 2 - C
                   + sum_{k=2,4,..} sum_n a_n^(k/2) * (singular sums) ]

    from the symbolically extracted coefficient table
    ``a_coefficients[k][n]``.  With ``full_sums`` the complete alternating
    p-sums are used instead of their leading terms.

    Returns ``(terms, total)`` with one :class:`HeatKernelTerm` per order.
    """
    if k_max < 0 or k_max % 2:
        raise DomainError("k_max must be a non-negative even integer")
    _warn_lam2(params)
    terms = [
        HeatKernelTerm(
            order_k=0,
            value=resummed_tf_log_form(params),
            route="resummed",
            provenance="leading-log",
        )
    ]
    pmax = None if full_sums else 0
    for k in range(2, k_max + 1, 2):
        coeffs = a_coefficients[k]
        value = sum(
            float(a) * tilde_zk_singular_sum(k, n, params, pmax=pmax)
            for n, a in sorted(coeffs.items())
        )
        terms.append(
            HeatKernelTerm(
                order_k=k, value=value, route="resummed",
                provenance="singular-sum-assembly",
            )
        )
    return terms, sum(t.value for t in terms)


# -- three-coordinate model ---------------------------------------------------


def tf_term_n3(params):
    """Leading term of the three-coordinate model,
    L = Gamma(1/4)^3/2 * (2 pi^2 g^2 hbar^4 t^3)^(-3/4)."""
    return params.prefactor_L()


def radial_Jb(b, lam, rel_tol=1e-11):
    """J_b(lam) = int_0^inf u^b e^(-u^2 - lam u) (lam + 8u)^(-3/2) du."""
    if lam <= 0:
        raise DomainError("lam must be positive")
    if b not in (0, 2):
        raise DomainError("only the b = 0, 2 members are used")

    def f(u):
        return u**b * math.exp(-u * u - lam * u) * (lam + 8.0 * u) ** -1.5

    # resolve the lam-scale boundary layer explicitly
    val1, err1 = quad(f, 0.0, min(1.0, 100.0 * lam), epsabs=0.0, epsrel=rel_tol, limit=300)
    val2, err2 = quad(f, min(1.0, 100.0 * lam), 30.0, epsabs=0.0, epsrel=rel_tol, limit=300)
    return val1 + val2


def z2_n3(params):
    """Order-hbar^2 term of the three-coordinate model with the effective
    harmonic regulator applied:

        Z_2 = sqrt(2) t^(-3/4) / (hbar g^(1/2)) * [-J_0(lam) + 4 J_2(lam)].

    As lam -> 0 this reproduces -L * Gamma(3/4)^3 / (2^(5/4) pi^(3/2)) * lam^(1/2),
    the correction to the leading term L.
    """
    if params.n_model != 3:
        raise DomainError("z2_n3 requires n_model = 3")
    if params.g <= 0:
        raise DomainError("g must be positive")
    lam = params.lam
    if lam >= 1.0:
        warnings.warn(f"lam = {lam:.3g} outside the small-lam regime", RegimeWarning)
    j0 = radial_Jb(0, lam)
    j2 = radial_Jb(2, lam)
    return (
        math.sqrt(2.0)
        * params.t**-0.75
        / (params.hbar * math.sqrt(params.g))
        * (-j0 + 4.0 * j2)
    )


def z2_n3_structure(params):
    """The small-lam structural form of the order-hbar^2 term,
    -(L) * Gamma(3/4)^3 / (2^(5/4) pi^(3/2)) * lam2^(1/4)."""
    return (
        -tf_term_n3(params)
        * gamma_fn(0.75) ** 3
        / (2.0**1.25 * math.pi**1.5)
        * params.lam2**0.25
    )
