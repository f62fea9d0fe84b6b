"""Numerical checks of the Bessel integral identities and the Lommel orthogonality.

Integrals of x^{-mu} J_a(x) J_b(x) over (0, inf) are split in three parts:

* [0, 2]: term-by-term integration of the ascending series of J_a J_b;
* [2, X]: 16-point Gauss-Legendre on segments of length pi/2 (a quarter of
  the product's oscillation period);
* [X, inf): closed-form integration of Hankel's expansions, where
  J_a J_b = (1/pi x) Re[e^{i(b-a)pi/2} U_a conj(U_b) + e^{i(2x-(a+b+1)pi/2)} U_a U_b].

The cut X is at least 100 and twice the square of the larger order, so the
expansions converge quickly there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .specfun import bessel_j_array, bessel_table, bessel_zeros, rgamma

__all__ = [
    "IntegralResult",
    "weber_schafheitlin",
    "weber_schafheitlin_closed",
    "a2_form_gamma",
    "a2_form_duplication",
    "bessel_product_integral",
    "ortho_check",
    "ortho_closed_form",
    "kj_sign",
    "lommel_ortho_check",
]

_X0 = 2.0
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class IntegralResult:
    numeric: float
    closed_form: float
    abs_error: float
    segments_used: int
    tail_bound: float

    @property
    def passed(self):
        return self.abs_error <= max(1e-8, self.tail_bound)


def _series_part(a, b, mu, x0):
    """Integral of x^{-mu} J_a J_b over [0, x0] from the product's power series."""
    total = 0.0
    half_log = math.log(0.5 * x0)
    for k in range(200):
        p = a + b + 2 * k
        log_c = (math.lgamma(p + 1.0) - math.lgamma(k + 1.0) - math.lgamma(a + k + 1.0)
                 - math.lgamma(b + k + 1.0) - math.lgamma(a + b + k + 1.0))
        term = (-1) ** k * math.exp(log_c + p * half_log) * x0 ** (1.0 - mu) / (p - mu + 1.0)
        total += term
        if k > x0 and abs(term) < 1e-18 * max(abs(total), 1e-300):
            break
    return total


def _hankel_coeffs(order, terms):
    """Coefficients u_k of U(x) = sum_k u_k x^{-k} (P + iQ of Hankel's expansion)."""
    mu4 = 4.0 * order * order
    u = np.zeros(terms, dtype=complex)
    a = 1.0
    u[0] = 1.0
    for k in range(1, terms):
        a *= (mu4 - (2 * k - 1) ** 2) / (8.0 * k)
        u[k] = a * 1j ** k
    return u


def _osc_tail(q, X, max_terms=200):
    """Integral of x^{-q} e^{2ix} over [X, inf) by repeated integration by parts."""
    total = 0j
    term = X ** -q
    for s in range(max_terms):
        if s > 0:
            term *= (q + s - 1) / (2j * X)
        total += term
        if abs(term) < 1e-18 * abs(total):
            break
    return -np.exp(2j * X) / 2j * total


def _tail_part(a, b, mu, X, terms=40):
    ua = _hankel_coeffs(a, terms)
    ub = _hankel_coeffs(b, terms)
    smooth = np.convolve(ua, np.conj(ub))[:terms]
    osc = np.convolve(ua, ub)[:terms]
    total_s = 0j
    total_o = 0j
    last = 0.0
    for j in range(terms):
        if smooth[j] != 0.0:
            if mu + j <= 0.0:
                lead = (np.exp(0.5j * math.pi * (b - a)) * smooth[j]).real
                if abs(lead) > 1e-12:
                    raise DomainError("integral diverges: non-oscillating 1/x tail")
            else:
                total_s += smooth[j] * X ** (-mu - j) / (mu + j)
        total_o += osc[j] * _osc_tail(mu + 1.0 + j, X)
        last = abs(smooth[j]) * X ** (-mu - j) + abs(osc[j]) * X ** (-mu - 1.0 - j)
    value = (np.exp(0.5j * math.pi * (b - a)) * total_s
             + np.exp(-0.5j * math.pi * (a + b + 1.0)) * total_o).real / math.pi
    return value, last / math.pi


def _orders_product(a, b, x):
    return bessel_j_array(a, x) * bessel_j_array(b, x)


def bessel_product_integral(a, b, mu, refine=1):
    """Integral of x^{-mu} J_a(x) J_b(x) over (0, inf).

    Returns ``(value, segments_used, tail_bound)``; ``refine`` subdivides each
    quadrature segment.
    """
    if not a + b - mu + 1.0 > 0.0:
        raise DomainError("integral diverges at the origin: need a + b + 1 > mu")
    if not mu >= 0.0:
        raise DomainError(f"mu must be >= 0, got {mu}")
    top = max(a, b)
    X = max(100.0, 2.0 * top * top)
    seg_len = 0.5 * math.pi / refine
    n_seg = int(math.ceil((X - _X0) / seg_len))
    X = _X0 + n_seg * seg_len
    left = _X0 + seg_len * np.arange(n_seg)
    nodes = (left[:, None] + 0.5 * seg_len * (_GL_X[None, :] + 1.0)).ravel()
    weights = np.tile(0.5 * seg_len * _GL_W, n_seg)
    f = nodes ** -mu * _orders_product(a, b, nodes)
    middle = float(weights @ f)
    head = _series_part(a, b, mu, _X0)
    tail, tail_err = _tail_part(a, b, mu, X)
    return head + middle + tail, n_seg, tail_err


def weber_schafheitlin_closed(nu, n, m, mu):
    """Closed form of the integral of x^{-mu} J_{n+nu} J_{m+nu} over (0, inf)."""
    s = 0.5 * (n + m)
    d = 0.5 * (n - m)
    h = 0.5 * (1.0 + mu)
    num = math.lgamma(mu) + math.lgamma(0.5 * (1.0 - mu) + nu + s) - mu * math.log(2.0)
    den = rgamma(h + nu + s).real * rgamma(h + d).real * rgamma(h - d).real
    return math.exp(num) * den


def weber_schafheitlin(nu, n, m, mu, refine=1):
    """Numeric check of the Weber-Schafheitlin integral for orders n+nu, m+nu."""
    if not (n + m + 2.0 * nu + 1.0 > mu > 0.0):
        raise DomainError(f"need n + m + 2 nu + 1 > mu > 0, got n={n}, m={m}, nu={nu}, mu={mu}")
    closed = weber_schafheitlin_closed(nu, n, m, mu)
    value, segs, tail = bessel_product_integral(n + nu, m + nu, mu, refine)
    return IntegralResult(value, closed, abs(value - closed), segs, tail)


def a2_form_gamma(nu, n, mu):
    """Diagonal integral, form with Gamma(mu)/2^mu / Gamma((1+mu)/2)^2."""
    ratio = math.exp(math.lgamma(0.5 * (1.0 - mu) + nu + n) - math.lgamma(0.5 * (1.0 + mu) + nu + n))
    return math.gamma(mu) / 2.0 ** mu / math.gamma(0.5 * (1.0 + mu)) ** 2 * ratio


def a2_form_duplication(nu, n, mu):
    """Diagonal integral, form with 2^mu Gamma(mu/2)^2 / (4 pi Gamma(mu))."""
    ratio = math.exp(math.lgamma(0.5 * (1.0 - mu) + nu + n) - math.lgamma(0.5 * (1.0 + mu) + nu + n))
    return 2.0 ** mu * math.gamma(0.5 * mu) ** 2 / (4.0 * math.pi * math.gamma(mu)) * ratio


def kj_sign(n, m):
    """sign(n, m) = (-1)^{n+m} for n <= m and -(-1)^{n+m} for n > m."""
    s = -1 if (n + m) % 2 else 1
    return s if n <= m else -s


def ortho_closed_form(pair, nu, n, m, weight="inverse"):
    """Closed form of the even/odd discrete Bessel integrals."""
    if pair == "KK" and weight == "inverse":
        return 0.5 / (2 * n + nu) if n == m else 0.0
    if pair == "JJ" and weight == "inverse":
        return 0.5 / (2 * n + nu + 1.0) if n == m else 0.0
    if pair == "KJ" and weight == "inverse":
        sign = -1.0 if (n + m) % 2 else 1.0
        return sign / (2.0 * math.pi * (m - n + 0.5) * (n + m + nu + 0.5))
    if pair == "KJ" and weight == "unit":
        return 0.5 * kj_sign(n, m)
    raise DomainError(f"unsupported combination pair={pair!r}, weight={weight!r}")


def ortho_check(pair, nu, n, m, weight="inverse", refine=1):
    """Integral of x^{-1} (or 1) times a product of even/odd discrete Bessel functions.

    ``pair`` is KK (J_{2n+nu} J_{2m+nu}), JJ (J_{2n+1+nu} J_{2m+1+nu}) or
    KJ (J_{2n+nu} J_{2m+1+nu}); ``weight`` is "inverse" (x^{-1}) or "unit"
    (KJ only).
    """
    if not nu > 0.0:
        raise DomainError(f"nu must be > 0, got {nu}")
    if int(n) != n or int(m) != m or n < 0 or m < 0:
        raise DomainError("n and m must be non-negative integers")
    closed = ortho_closed_form(pair, nu, n, m, weight)
    if pair == "KK":
        a, b = 2 * n + nu, 2 * m + nu
    elif pair == "JJ":
        a, b = 2 * n + 1 + nu, 2 * m + 1 + nu
    else:
        a, b = 2 * n + nu, 2 * m + 1 + nu
    mu = 1.0 if weight == "inverse" else 0.0
    value, segs, tail = bessel_product_integral(a, b, mu, refine)
    return IntegralResult(value, closed, abs(value - closed), segs, tail)


def lommel_ortho_check(nu, n, m, K=1000):
    """Discrete orthogonality over the first K zeros j_k of J_nu:

        [1 + (-1)^{n+m}] sum_k J_{n+nu+1}(j_k) J_{m+nu+1}(j_k) / (j_k^2 J_{nu+1}(j_k)^2)
            = delta_{nm} / (2 (n + nu + 1)).

    The omitted tail is bounded by 2.1 / (pi^2 (K + nu/2 + 1/4)), which uses
    j_k ~ (k + nu/2 - 1/4) pi and |J_{n+nu+1}/J_{nu+1}| -> |h_n(0)| <= 1.
    """
    if not nu > 0.0:
        raise DomainError(f"nu must be > 0, got {nu}")
    if int(K) != K or K < 10:
        raise DomainError(f"K must be an integer >= 10, got {K}")
    closed = 1.0 / (2.0 * (n + nu + 1.0)) if n == m else 0.0
    tail = 2.1 / (math.pi ** 2 * (K + 0.5 * nu + 0.25))
    if (n + m) % 2:
        return IntegralResult(0.0, closed, abs(closed), int(K), 0.0)
    j = bessel_zeros(nu, int(K))
    tab = bessel_table(nu + 1.0, j, max(n, m))
    ratio_n = tab[:, n] / tab[:, 0]
    ratio_m = tab[:, m] / tab[:, 0]
    value = 2.0 * float(np.sum(ratio_n * ratio_m / j ** 2))
    return IntegralResult(value, closed, abs(value - closed), int(K), tail)
