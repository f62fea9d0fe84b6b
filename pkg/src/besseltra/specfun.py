"""Special-function kernel.

Bessel functions of the first kind of real order (single values, batches of
consecutive orders, zeros), gamma magnitudes for complex arguments, Kummer's
confluent hypergeometric function and Lommel polynomials.

Algorithms
----------
``bessel_j`` picks one of three routes:

* ascending power series, when ``x <= 12`` or ``x**2 <= 4*(nu+1)``
  (the series terms are then either few or monotonically decreasing);
* Hankel's large-argument expansion, when ``x >= max(25, nu**2/2)`` and the
  expansion reaches full precision before its terms start growing;
* Miller's backward recurrence otherwise, normalised with the Neumann sum
  ``(x/2)**nu0 / Gamma(nu0+1) = sum_k c_k J_{nu0+2k}(x)``.

Batches of consecutive orders always come from the backward recurrence, which
is stable in the direction of decreasing order for every ``x``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, DomainError

__all__ = [
    "AccuracyPolicy",
    "DEFAULT_POLICY",
    "BesselBatch",
    "bessel_j",
    "bessel_batch",
    "bessel_table",
    "bessel_j_array",
    "bessel_zeros",
    "gamma_abs",
    "log_gamma",
    "loggamma_complex",
    "gamma_complex",
    "rgamma",
    "hyp1f1",
    "lommel_h",
    "discrete_bessel",
]

_EPS = np.finfo(float).eps
_LD_EPS = float(np.finfo(np.longdouble).eps)

_SERIES_X_MAX = 12.0
_HANKEL_X_MIN = 25.0
_ASYMPTOTIC_Z_MIN = 16.0
_CANCELLATION_LIMIT = 1e12

_RESCALE_AT = 1e250
_RESCALE_BY = 1e-250


@dataclass(frozen=True)
class AccuracyPolicy:
    """Relative tolerance and series-length cap for the iterative routines."""

    rel_tol: float = 1e-12
    max_terms: int = 500

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-3):
            raise DomainError(f"rel_tol must lie in (0, 1e-3], got {self.rel_tol}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 16:
            raise DomainError(f"max_terms must be an integer >= 16, got {self.max_terms}")


DEFAULT_POLICY = AccuracyPolicy()


@dataclass(frozen=True)
class BesselBatch:
    """Values J_{nu}(x), J_{nu+1}(x), ..., J_{nu+N}(x)."""

    nu: float
    x: float
    values: tuple

    def residuals(self):
        """Relative residuals of the three-term recurrence at interior orders."""
        v = np.asarray(self.values)
        if self.x == 0.0 or v.size < 3:
            return np.zeros(0)
        n = np.arange(1, v.size - 1)
        res = v[n - 1] + v[n + 1] - 2.0 * (n + self.nu) / self.x * v[n]
        return np.abs(res) / np.maximum(1.0, np.abs(v[n]))


def _check_finite(**kwargs):
    for name, value in kwargs.items():
        if not math.isfinite(value):
            raise DomainError(f"{name} must be finite, got {value}")


# ---------------------------------------------------------------------------
# Bessel J
# ---------------------------------------------------------------------------

def _bessel_series(nu, x, policy):
    # Extended precision absorbs the cancellation between terms near x = 12.
    ld = np.longdouble
    half = ld(0.5) * ld(x)
    first = np.exp(ld(nu) * np.log(half) - ld(math.lgamma(nu + 1.0)))
    if first == 0.0:
        return 0.0
    tol = max(policy.rel_tol * 1e-4, _LD_EPS)
    q = -half * half
    nu_ld = ld(nu)
    term = total = first
    biggest = abs(first)
    for k in range(1, policy.max_terms):
        term = term * q / (k * (k + nu_ld))
        total = total + term
        biggest = max(biggest, abs(term))
        if k > half and (abs(term) <= tol * abs(total) or abs(term) <= 1e-24 * biggest):
            return float(total)
    raise AccuracyError(
        f"power series for J_{nu}({x}) did not converge in {policy.max_terms} terms",
        partial=float(total),
    )


def _hankel_terms(nu, x, max_terms, tol):
    """Return (P, Q) of Hankel's expansion, or None when it cannot reach ``tol``."""
    mu = 4.0 * nu * nu
    P, Q = 1.0, 0.0
    t = 1.0
    prev = math.inf
    for k in range(1, max_terms):
        t *= (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        r = k % 4
        if r == 1:
            Q += t
        elif r == 2:
            P -= t
        elif r == 3:
            Q -= t
        else:
            P += t
        a = abs(t)
        if a <= tol:
            return P, Q
        if a > prev and a > tol:
            return None
        prev = a
    return None


def _phase_cos_sin(x, nu):
    # cos/sin of x - (nu/2 + 1/4) pi with the order-dependent shift reduced first
    shift = math.fmod(0.5 * nu + 0.25, 2.0) * math.pi
    cx, sx = math.cos(x), math.sin(x)
    cs, ss = math.cos(shift), math.sin(shift)
    return cx * cs + sx * ss, sx * cs - cx * ss


def _bessel_hankel(nu, x, policy):
    pq = _hankel_terms(nu, x, policy.max_terms, _EPS / 8)
    if pq is None:
        return None
    P, Q = pq
    c, s = _phase_cos_sin(x, nu)
    return math.sqrt(2.0 / (math.pi * x)) * (P * c - Q * s)


def _miller_start(top, xmax):
    big = max(float(top), float(xmax))
    return int(big + 10.0 * big ** (1.0 / 3.0) + 20.0)


def _miller_ladder(nu0, x, top):
    """J_{nu0+j}(x) for j = 0..top as an array of shape (top+1, len(x)); x > 0."""
    x = np.asarray(x, dtype=float)
    start = _miller_start(top, x.max())
    f = np.zeros((start + 2, x.size))
    f[start] = 1e-300
    inv_x = 1.0 / x
    for j in range(start, 0, -1):
        f[j - 1] = (2.0 * (nu0 + j)) * inv_x * f[j] - f[j + 1]
        over = np.abs(f[j - 1]) > _RESCALE_AT
        if over.any():
            f[j - 1:, over] *= _RESCALE_BY
    # Neumann sum: (x/2)^nu0 / Gamma(nu0+1) = J_nu0 + sum_k (nu0+2k) h_k J_{nu0+2k}
    coeff = np.zeros(start + 2)
    coeff[0] = 1.0
    h = 1.0
    for k in range(1, (start + 1) // 2 + 1):
        if k > 1:
            h *= (nu0 + k - 1) / k
        coeff[2 * k] = (nu0 + 2 * k) * h
    norm = coeff @ f
    target = np.exp(nu0 * np.log(0.5 * x) - math.lgamma(nu0 + 1.0))
    return f[: top + 1] * (target / norm)


def bessel_j(nu, x, policy=DEFAULT_POLICY):
    """Bessel function of the first kind J_nu(x) for real nu >= -1 and x >= 0.

    Orders in [-1, 0) are reached through the downward three-term recurrence
    from nu+1 and nu+2 and require x > 0 (except the integer order -1).

    Raises
    ------
    DomainError
        For x < 0, nu < -1, non-finite input, or a singular negative order at 0.
    AccuracyError
        When the power series does not converge within ``policy.max_terms``.
    """
    nu = float(nu)
    x = float(x)
    _check_finite(nu=nu, x=x)
    if x < 0.0:
        raise DomainError(f"x must be >= 0, got {x}")
    if nu < -1.0:
        raise DomainError(f"order must be >= -1, got {nu}")
    if nu < 0.0:
        if x == 0.0:
            if nu == -1.0:
                return 0.0
            raise DomainError(f"J_{nu}(0) is singular")
        return 2.0 * (nu + 1.0) / x * bessel_j(nu + 1.0, x, policy) - bessel_j(nu + 2.0, x, policy)
    if x == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    if x <= _SERIES_X_MAX or x * x <= 4.0 * (nu + 1.0):
        return _bessel_series(nu, x, policy)
    if x >= max(_HANKEL_X_MIN, 0.5 * nu * nu):
        value = _bessel_hankel(nu, x, policy)
        if value is not None:
            return value
    n = int(math.floor(nu))
    return float(_miller_ladder(nu - n, [x], n)[n, 0])


def bessel_table(nu, x, n_max):
    """Table of J_{nu+j}(x_i), shape (len(x), n_max+1), from backward recurrence.

    ``nu >= 0``; entries with x == 0 are filled exactly.
    """
    nu = float(nu)
    if nu < 0.0:
        raise DomainError(f"base order must be >= 0, got {nu}")
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0.0) or not np.all(np.isfinite(x)):
        raise DomainError("arguments must be finite and >= 0")
    out = np.zeros((x.size, n_max + 1))
    if nu == 0.0:
        out[x == 0.0, 0] = 1.0
    pos = x > 0.0
    if pos.any():
        n0 = int(math.floor(nu))
        ladder = _miller_ladder(nu - n0, x[pos], n0 + n_max)
        out[pos] = ladder[n0:].T
    return out


def bessel_batch(nu, x, n_max):
    """J_{nu}(x) .. J_{nu+n_max}(x) for a single argument, as a :class:`BesselBatch`."""
    nu = float(nu)
    x = float(x)
    _check_finite(nu=nu, x=x)
    if nu <= 0.0:
        raise DomainError(f"base order must be > 0, got {nu}")
    if x < 0.0:
        raise DomainError(f"x must be >= 0, got {x}")
    values = bessel_table(nu, [x], int(n_max))[0]
    return BesselBatch(nu=nu, x=x, values=tuple(float(v) for v in values))


def _hankel_array(nu, x):
    """Vectorised Hankel expansion; returns (values, converged mask)."""
    mu = 4.0 * nu * nu
    P = np.ones_like(x)
    Q = np.zeros_like(x)
    t = np.ones_like(x)
    done = np.zeros(x.shape, dtype=bool)
    prev = np.full(x.shape, np.inf)
    bad = np.zeros(x.shape, dtype=bool)
    for k in range(1, 200):
        t = np.where(done | bad, 0.0, t * (mu - (2 * k - 1) ** 2) / (8.0 * k * x))
        r = k % 4
        if r == 1:
            Q += t
        elif r == 2:
            P -= t
        elif r == 3:
            Q -= t
        else:
            P += t
        a = np.abs(t)
        live = ~(done | bad)
        bad |= live & (a > prev) & (a > _EPS / 8)
        done |= live & (a <= _EPS / 8)
        prev = np.where(live, a, prev)
        if np.all(done | bad):
            break
    shift = math.fmod(0.5 * nu + 0.25, 2.0) * math.pi
    c = np.cos(x) * math.cos(shift) + np.sin(x) * math.sin(shift)
    s = np.sin(x) * math.cos(shift) - np.cos(x) * math.sin(shift)
    return np.sqrt(2.0 / (np.pi * x)) * (P * c - Q * s), done & ~bad


def bessel_j_array(nu, x, policy=DEFAULT_POLICY):
    """J_nu evaluated on an array of non-negative arguments (nu >= 0)."""
    nu = float(nu)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    series = (x <= _SERIES_X_MAX) | (x * x <= 4.0 * (nu + 1.0))
    for i in np.flatnonzero(series):
        out[i] = bessel_j(nu, x[i], policy)
    rest = ~series
    hank = rest & (x >= max(_HANKEL_X_MIN, 0.5 * nu * nu))
    if hank.any():
        vals, ok = _hankel_array(nu, x[hank])
        idx = np.flatnonzero(hank)
        out[idx[ok]] = vals[ok]
        rest[idx[ok]] = False
    if rest.any():
        out[rest] = bessel_table(nu, x[rest], 0)[:, 0]
    return out


def bessel_zeros(nu, count, policy=DEFAULT_POLICY):
    """The first ``count`` positive zeros of J_nu, in ascending order.

    McMahon's expansion supplies brackets, refined by bisection to a width of
    1e-13 (or a few ulps for large zeros) and polished by one Newton step.
    Brackets that fail to straddle a sign change fall back to a forward scan
    from the previous zero.
    """
    nu = float(nu)
    count = int(count)
    if nu < 0.0:
        raise DomainError(f"order must be >= 0, got {nu}")
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    mu = 4.0 * nu * nu
    k = np.arange(1, count + 1, dtype=float)
    beta = (k + 0.5 * nu - 0.25) * np.pi
    b8 = 8.0 * beta
    est = beta - (mu - 1.0) / b8 - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8 ** 3)
    lo = est - 1.0
    hi = est + 1.0
    flo = bessel_j_array(nu, np.maximum(lo, 1e-300), policy)
    fhi = bessel_j_array(nu, hi, policy)
    ok = (np.sign(flo) * np.sign(fhi) < 0) & (lo > 0.0)
    ok[1:] &= lo[1:] > hi[:-1]
    # McMahon is poor for small k when nu is large; scan those sequentially.
    bad = np.flatnonzero(~ok)
    if bad.size:
        prev_zero = 0.0
        for i in range(count):
            if ok[i]:
                # still need prev_zero for later scans; refine later with the rest
                prev_zero = est[i]
                continue
            a = max(prev_zero + 0.5, nu if i == 0 else prev_zero + 0.5, 1e-3)
            fa = bessel_j(nu, a, policy)
            step = 0.25
            for _ in range(100000):
                b = a + step
                fb = bessel_j(nu, b, policy)
                if fa == 0.0 or fa * fb < 0.0:
                    break
                a, fa = b, fb
            else:
                raise AccuracyError(f"could not bracket zero k={i + 1} of J_{nu}")
            lo[i], hi[i], flo[i], fhi[i] = a, b, fa, fb
            prev_zero = b
            ok[i] = True
    for _ in range(200):
        width = hi - lo
        if np.all(width <= np.maximum(1e-13, 4.0 * np.spacing(hi))):
            break
        mid = 0.5 * (lo + hi)
        fmid = bessel_j_array(nu, mid, policy)
        left = np.sign(fmid) == np.sign(flo)
        lo = np.where(left, mid, lo)
        flo = np.where(left, fmid, flo)
        hi = np.where(left, hi, mid)
    root = 0.5 * (lo + hi)
    j_nu = bessel_j_array(nu, root, policy)
    j_up = bessel_j_array(nu + 1.0, root, policy)
    polished = root + j_nu / j_up
    use = np.abs(polished - root) <= (hi - lo) + 1e-12
    root = np.where(use, polished, root)
    resid = np.abs(bessel_j_array(nu, root, policy))
    worst = int(np.argmax(resid))
    if resid[worst] > 1e-10:
        raise AccuracyError(f"zero k={worst + 1} of J_{nu} not refined (|J|={resid[worst]:.2e})",
                            partial=root)
    if np.any(np.diff(root) <= 0.0):
        raise AccuracyError(f"zeros of J_{nu} not strictly increasing", partial=root)
    return root


def discrete_bessel(parity, n, nu, x, policy=DEFAULT_POLICY):
    """Even/odd discrete Bessel functions: J_{2n+nu}(x) (even), J_{2n+1+nu}(x) (odd)."""
    if parity == "even":
        return bessel_j(2 * n + nu, x, policy)
    if parity == "odd":
        return bessel_j(2 * n + 1 + nu, x, policy)
    raise DomainError(f"parity must be 'even' or 'odd', got {parity!r}")


# ---------------------------------------------------------------------------
# Gamma
# ---------------------------------------------------------------------------

_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _is_pole(z):
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def _log_sin_pi(z):
    if abs(z.imag) < 20.0:
        return cmath.log(cmath.sin(math.pi * z))
    if z.imag > 0:
        return -1j * math.pi * z - cmath.log(2j) + cmath.log(1.0 - cmath.exp(2j * math.pi * z))
    return 1j * math.pi * z - cmath.log(-2j) + cmath.log(1.0 - cmath.exp(-2j * math.pi * z))


def loggamma_complex(z):
    """A branch of log Gamma(z) for complex z (exp() of it is Gamma(z))."""
    z = complex(z)
    if _is_pole(z):
        raise DomainError(f"Gamma has a pole at {z}")
    if z.real < 0.5:
        return math.log(math.pi) - _log_sin_pi(z) - loggamma_complex(1.0 - z)
    acc = 0j
    while z.real < 15.0:
        acc += cmath.log(z)
        z += 1.0
    w = 1.0 / z
    w2 = w * w
    series = 0j
    p = w
    for c in _STIRLING:
        series += c * p
        p *= w2
    return (z - 0.5) * cmath.log(z) - z + _HALF_LOG_2PI + series - acc


def gamma_complex(z):
    """Gamma(z) for complex z."""
    return cmath.exp(loggamma_complex(z))


def rgamma(z):
    """1/Gamma(z), zero at the poles."""
    z = complex(z)
    if _is_pole(z):
        return 0j
    return cmath.exp(-loggamma_complex(z))


def gamma_abs(x, y=0.0):
    """|Gamma(x + iy)|."""
    z = complex(float(x), float(y))
    if _is_pole(z):
        raise DomainError(f"Gamma has a pole at {z.real}")
    try:
        return math.exp(loggamma_complex(z).real)
    except OverflowError:
        return math.inf


def log_gamma(x):
    """log Gamma(x) for real x > 0."""
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise DomainError(f"log_gamma needs a finite x > 0, got {x}")
    return math.lgamma(x)


# ---------------------------------------------------------------------------
# Confluent hypergeometric 1F1
# ---------------------------------------------------------------------------

def _nonpos_int(a):
    return a.imag == 0.0 and a.real <= 0.0 and a.real == math.floor(a.real)


def _hyp1f1_series_raw(a, b, z, policy):
    """Kummer series in extended precision with Kahan compensation.

    Returns the value and the cancellation ratio (largest term / result).
    """
    A = np.clongdouble(a)
    B = np.clongdouble(b)
    Z = np.clongdouble(z)
    term = np.clongdouble(1)
    total = np.clongdouble(1)
    comp = np.clongdouble(0)
    biggest = 1.0
    tol = max(_LD_EPS, policy.rel_tol * 1e-8)
    n_free = abs(z) + abs(a)
    for n in range(policy.max_terms):
        term = term * (A + n) / (B + n) * Z / (n + 1)
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        mag = float(abs(term))
        biggest = max(biggest, mag)
        if mag == 0.0:
            break
        if n > n_free and mag <= tol * float(abs(total)):
            break
    else:
        raise AccuracyError(
            f"1F1 series did not converge in {policy.max_terms} terms",
            partial=complex(total),
        )
    result = complex(total)
    size = abs(result)
    return result, (biggest / size if size else math.inf)


def _hyp1f1_series(a, b, z, policy):
    result, ratio = _hyp1f1_series_raw(a, b, z, policy)
    if ratio > _CANCELLATION_LIMIT:
        raise AccuracyError(
            f"1F1 series lost too many digits (largest term / result = {ratio:.2e})",
            partial=result,
        )
    return result


def _asymptotic_sum(p, q, w, max_terms):
    """sum_s (p)_s (q)_s / (s! w^s), optimally truncated; returns (sum, error)."""
    total = 1.0 + 0j
    term = 1.0 + 0j
    best = math.inf
    for s in range(max_terms):
        term = term * (p + s) * (q + s) / ((s + 1) * w)
        mag = abs(term)
        if mag == 0.0:
            return total, 0.0
        if mag >= best:
            return total, best
        best = mag
        total += term
    return total, best


def _hyp1f1_asymptotic(a, b, z, policy):
    """Large-|z| expansion of 1F1 (both exponential sectors kept)."""
    sign = 1.0 if cmath.phase(z) > -0.5 * math.pi else -1.0
    log_z = cmath.log(z)
    s1, e1 = _asymptotic_sum(a, a - b + 1.0, -z, policy.max_terms)
    s2, e2 = _asymptotic_sum(b - a, 1.0 - a, z, policy.max_terms)
    f1 = cmath.exp(sign * 1j * math.pi * a - a * log_z) * rgamma(b - a)
    f2 = cmath.exp(z + (a - b) * log_z) * rgamma(a)
    gb = gamma_complex(b)
    value = gb * (f1 * s1 + f2 * s2)
    error = abs(gb) * (abs(f1) * e1 + abs(f2) * e2)
    return value, error


def _hyp1f1_direct(a, b, z, policy):
    if abs(z) < _ASYMPTOTIC_Z_MIN or _nonpos_int(a):
        return _hyp1f1_series(a, b, z, policy)
    value, error = _hyp1f1_asymptotic(a, b, z, policy)
    size = abs(value)
    if error <= policy.rel_tol * size:
        return value
    # Both routes are inexact here; keep the one with the smaller error estimate.
    series, ratio = _hyp1f1_series_raw(a, b, z, policy)
    if ratio * _LD_EPS * abs(series) <= error or size == 0.0:
        if ratio > _CANCELLATION_LIMIT:
            raise AccuracyError(
                f"1F1 series lost too many digits (largest term / result = {ratio:.2e})",
                partial=series,
            )
        return series
    return value


def hyp1f1(a, b, z, policy=DEFAULT_POLICY):
    """Kummer's confluent hypergeometric function 1F1(a; b; z).

    For Re z < 0 the Kummer transformation 1F1(a;b;z) = e^z 1F1(b-a;b;-z) is
    applied first.  Large |z| uses the two-sector asymptotic expansion when
    its smallest term is below ``policy.rel_tol``; otherwise the power series
    is summed in extended precision.

    Raises
    ------
    DomainError
        If b is a non-positive integer.
    AccuracyError
        If the series cancels by more than 1e12 (largest term over result).
    """
    a, b, z = complex(a), complex(b), complex(z)
    if _nonpos_int(b):
        raise DomainError(f"1F1 undefined for b = {b.real:g}")
    if z == 0:
        return 1.0 + 0j
    if z.real < 0.0 and not _nonpos_int(a):
        return cmath.exp(z) * _hyp1f1_direct(b - a, b, -z, policy)
    return _hyp1f1_direct(a, b, z, policy)


# ---------------------------------------------------------------------------
# Lommel polynomials
# ---------------------------------------------------------------------------

def lommel_h(n, nu, z):
    """Lommel polynomial h_{n,nu}(z) from h_0 = 1, h_1 = 2 nu z and

    h_{n+1} = 2 z (n + nu) h_n - h_{n-1}.
    """
    n = int(n)
    if n < 0:
        return 0.0
    prev, cur = 1.0, 2.0 * nu * z
    if n == 0:
        return prev
    for k in range(1, n):
        prev, cur = cur, 2.0 * z * (k + nu) * cur - prev
    return cur
