"""Three-term recursion engine for the expansion coefficients and polynomials.

Every family is written as

    lead(n) * P_{n+1} = diag(n) * P_n - back(n) * P_{n-1}

together with the two seeds (P_{-1}, P_0).  Forward substitution produces a
:class:`CoefficientSequence`, which stores mantissas and power-of-two
exponents so that factorially growing families survive beyond the native
floating-point range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DegenerateError, DomainError
from .tridiag import TridiagonalSymmetric

__all__ = [
    "TAGS",
    "Rule",
    "RecursionFamily",
    "CoefficientSequence",
    "forward_solve",
    "kratzer_rule",
    "kratzer_v_rule",
    "invcube_rule",
    "invcube_w_rule",
    "dipquad_rule",
    "invquartic_rule",
    "general_b1_rule",
    "monic_b2_rule",
    "general_b1",
    "positivity_check",
    "monic_b2_weights",
    "monic_w_weights",
    "w_jacobi_matrix",
    "asymptotic_exponent",
    "darboux_exponent",
    "frobenius_exponent",
    "support_bound",
    "kratzer_parameters",
]

TAGS = (
    "KratzerQ",
    "KratzerV",
    "InvCubeQ",
    "InvCubeW",
    "DipQuadQ",
    "InvQuarticQ",
    "GeneralB1",
    "MonicB2",
)

_SCALE_EXP = 500
_BIG = 2.0 ** _SCALE_EXP
_SMALL = 2.0 ** -_SCALE_EXP


@dataclass(frozen=True)
class Rule:
    """Coefficient functions ``coeffs(n) -> (lead, diag, back)`` and seeds (P_{-1}, P_0)."""

    name: str
    coeffs: Callable[[int], tuple]
    seeds: tuple = (0.0, 1.0)

    def __call__(self, n):
        return self.coeffs(n)


def _require_nu(nu):
    if not (math.isfinite(nu) and nu > 0.0):
        raise DomainError(f"basis order nu must be > 0, got {nu}")


def kratzer_rule(nu, z):
    """z Q_n = A_{n+1} Q_{n+1} + A_{n-1} Q_{n-1} with A_m = m (m + 2 nu) / (m + nu)."""
    _require_nu(nu)

    def A(m):
        return m * (m + 2.0 * nu) / (m + nu)

    return Rule("KratzerQ", lambda n: (A(n + 1), z, A(n - 1) if n > 0 else 0.0))


def kratzer_v_rule(nu, z):
    """z (n+nu+1) V_n = (n+1)(n+2nu+2) V_{n+1} + (n+1)(n+2nu) V_{n-1}.

    Seeded with V_0 = 1/(2 nu + 1), the value consistent with Q_0 = 1 under
    Q_n = z (n + nu) / n * V_{n-1}.
    """
    _require_nu(nu)
    return Rule(
        "KratzerV",
        lambda n: ((n + 1) * (n + 2.0 * nu + 2.0), z * (n + nu + 1.0), (n + 1) * (n + 2.0 * nu)),
        (0.0, 1.0 / (2.0 * nu + 1.0)),
    )


def invcube_rule(nu, z):
    """z [(n+nu)^2 - nu^2] Q_n = Q_{n+1}/(n+nu+1) + Q_{n-1}/(n+nu-1)."""
    _require_nu(nu)
    return Rule(
        "InvCubeQ",
        lambda n: (1.0 / (n + nu + 1.0), z * n * (n + 2.0 * nu), 1.0 / (n + nu - 1.0) if n > 0 else 0.0),
    )


def invcube_w_rule(nu, z):
    """(n+2)(n+2+nu)(n+2+2nu) z W_n = W_{n+1} + W_{n-1}, W_{-1} = 0, W_0 = 1."""
    _require_nu(nu)
    return Rule(
        "InvCubeW",
        lambda n: (1.0, z * (n + 2) * (n + 2.0 + nu) * (n + 2.0 + 2.0 * nu), 1.0),
    )


def dipquad_rule(nu, z):
    """n(n+nu)(n+2nu) z Qt_n = Qt_{n+1} + Qt_{n-1}, Qt_{-1} = 0, Qt_0 = 1."""
    _require_nu(nu)
    return Rule("DipQuadQ", lambda n: (1.0, z * n * (n + nu) * (n + 2.0 * nu), 1.0))


def invquartic_rule(nu, Lambda, zeta_k2):
    """Coefficient recursion of the inverse-quartic model in the odd basis J_{2n+1+nu}.

    With N = 2n + nu + 1 and g = zeta k^2:

        Q_{n+1} = 2(2n+nu+2)(2n+nu+3)/g * { [N^2 - g/(N^2-1) - (2 Lambda + 1/4)] Q_n
                                             - (g/2) Q_{n-1} / ((2n+nu)(2n+nu-1)) }
    """
    _require_nu(nu)
    if not (zeta_k2 > 0.0):
        raise DomainError(f"zeta*k^2 must be > 0, got {zeta_k2}")
    c = 2.0 * Lambda + 0.25

    def coeffs(n):
        N = 2 * n + nu + 1.0
        lead = zeta_k2 / (2.0 * (2 * n + nu + 2.0) * (2 * n + nu + 3.0))
        diag = N * N - zeta_k2 / (N * N - 1.0) - c
        back = 0.5 * zeta_k2 / ((2 * n + nu) * (2 * n + nu - 1.0)) if n > 0 else 0.0
        return lead, diag, back

    return Rule("InvQuarticQ", coeffs)


def general_b1_rule(a, b, alpha, beta, x):
    """x (n+a) P_n = (n+1)(n+b) P_{n+1} + (n+alpha)(n+beta) P_{n-1}."""
    if b <= 0 and b == math.floor(b):
        raise DomainError(f"b must not be a non-positive integer, got {b}")
    return Rule(
        "GeneralB1",
        lambda n: ((n + 1) * (n + b), x * (n + a), (n + alpha) * (n + beta)),
    )


def _monic_weight(n, a, b, alpha, beta):
    return n * (n + b - 1.0) * (n + alpha) * (n + beta) / ((n + a) * (n + a - 1.0))


def monic_b2_rule(a, b, alpha, beta, x):
    """Monic form p_{n+1} = x p_n - w_n p_{n-1} of the general recursion."""
    if b <= 0 and b == math.floor(b):
        raise DomainError(f"b must not be a non-positive integer, got {b}")
    return Rule(
        "MonicB2",
        lambda n: (1.0, x, _monic_weight(n, a, b, alpha, beta) if n > 0 else 0.0),
    )


@dataclass(frozen=True)
class RecursionFamily:
    """A named three-term recurrence and its parameters.

    ``nu`` and ``z`` are used by the Bessel-basis families; ``Lambda`` and
    ``zeta_k2`` by InvQuarticQ (where ``z`` is ignored); ``a, b, alpha, beta``
    and the evaluation point ``x`` by GeneralB1 and MonicB2.
    """

    tag: str
    nu: float | None = None
    z: float = 0.0
    Lambda: float | None = None
    zeta_k2: float | None = None
    a: float | None = None
    b: float | None = None
    alpha: float | None = None
    beta: float | None = None
    x: float | None = None

    def __post_init__(self):
        if self.tag not in TAGS:
            raise DomainError(f"unknown recursion family {self.tag!r}; expected one of {TAGS}")
        if self.tag in ("GeneralB1", "MonicB2"):
            if None in (self.a, self.b, self.alpha, self.beta, self.x):
                raise DomainError(f"{self.tag} needs a, b, alpha, beta and x")
        else:
            if self.nu is None:
                raise DomainError(f"{self.tag} needs nu")
            _require_nu(self.nu)
            if self.tag == "InvQuarticQ":
                if self.Lambda is None or self.zeta_k2 is None:
                    raise DomainError("InvQuarticQ needs Lambda and zeta_k2")
        self.rule()

    def rule(self):
        t = self.tag
        if t == "KratzerQ":
            return kratzer_rule(self.nu, self.z)
        if t == "KratzerV":
            return kratzer_v_rule(self.nu, self.z)
        if t == "InvCubeQ":
            return invcube_rule(self.nu, self.z)
        if t == "InvCubeW":
            return invcube_w_rule(self.nu, self.z)
        if t == "DipQuadQ":
            return dipquad_rule(self.nu, self.z)
        if t == "InvQuarticQ":
            return invquartic_rule(self.nu, self.Lambda, self.zeta_k2)
        if t == "GeneralB1":
            return general_b1_rule(self.a, self.b, self.alpha, self.beta, self.x)
        return monic_b2_rule(self.a, self.b, self.alpha, self.beta, self.x)


@dataclass(frozen=True)
class CoefficientSequence:
    """P_0..P_N of a family, stored as ``mantissa * 2**exponent``."""

    family: RecursionFamily
    mantissa: np.ndarray = field(repr=False)
    exponent: np.ndarray = field(repr=False)
    overflow_scaled: bool = False

    def __post_init__(self):
        self.mantissa.setflags(write=False)
        self.exponent.setflags(write=False)

    def __len__(self):
        return self.mantissa.size

    @property
    def values(self):
        """Plain floats; entries beyond the native range become +-inf or 0."""
        with np.errstate(over="ignore", under="ignore"):
            return np.ldexp(self.mantissa, self.exponent)

    def log_abs(self):
        """ln |P_n| (``-inf`` for exact zeros)."""
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.mantissa)) + self.exponent * math.log(2.0)

    @property
    def first_growth_index(self):
        """Start of the trailing run over which |P_n| strictly increases.

        ``None`` unless that run spans at least ten steps.
        """
        la = self.log_abs()
        m = la.size - 1
        while m > 0 and la[m - 1] < la[m]:
            m -= 1
        if la.size - 1 - m >= 10:
            return m
        return None

    def residuals(self):
        """Relative residuals of the recursion at every interior index."""
        rule = self.family.rule()
        n_max = len(self) - 1
        out = np.zeros(max(n_max - 1, 0))
        for n in range(1, n_max):
            lead, diag, back = rule(n)
            e0 = self.exponent[n]
            p_m = math.ldexp(self.mantissa[n - 1], int(self.exponent[n - 1] - e0))
            p_0 = self.mantissa[n]
            p_p = math.ldexp(self.mantissa[n + 1], int(self.exponent[n + 1] - e0))
            terms = (lead * p_p, diag * p_0, back * p_m)
            scale = max(abs(t) for t in terms)
            out[n - 1] = 0.0 if scale == 0.0 else abs(terms[0] - terms[1] + terms[2]) / scale
        return out


def forward_solve(family, n_max):
    """Run the recursion of ``family`` forward from its seeds up to index ``n_max``.

    Raises
    ------
    DegenerateError
        When a leading coefficient vanishes.
    """
    n_max = int(n_max)
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    rule = family.rule()
    prev, cur = rule.seeds
    mant = np.empty(n_max + 1)
    expo = np.zeros(n_max + 1, dtype=np.int64)
    mant[0] = cur
    e = 0
    scaled = False
    for n in range(n_max):
        lead, diag, back = rule(n)
        if lead == 0.0:
            raise DegenerateError(f"{rule.name}: leading coefficient vanishes at n={n}")
        prev, cur = cur, (diag * cur - back * prev) / lead
        if not math.isfinite(cur):
            raise DegenerateError(f"{rule.name}: non-finite value at n={n + 1}")
        big = max(abs(cur), abs(prev))
        if big > _BIG:
            prev *= _SMALL
            cur *= _SMALL
            e += _SCALE_EXP
            scaled = True
        elif 0.0 < big < _SMALL:
            prev *= _BIG
            cur *= _BIG
            e -= _SCALE_EXP
            scaled = True
        mant[n + 1] = cur
        expo[n + 1] = e
    return CoefficientSequence(family, mant, expo, scaled)


def general_b1(a, b, alpha, beta, x, n_max):
    """P_0..P_{n_max} of the general recursion with P_0 = 1, P_1 = a x / b."""
    fam = RecursionFamily("GeneralB1", a=a, b=b, alpha=alpha, beta=beta, x=x)
    return forward_solve(fam, n_max)


def kratzer_parameters(nu):
    """(a, b, alpha, beta) of the general recursion matching the Kratzer V-polynomials."""
    return nu + 1.0, 2.0 * nu + 2.0, 1.0, 2.0 * nu


def monic_b2_weights(a, b, alpha, beta, n_max):
    """Monic recursion weights w_1..w_{n_max}."""
    return np.array([_monic_weight(n, a, b, alpha, beta) for n in range(1, n_max + 1)])


def positivity_check(a, b, alpha, beta, n_max):
    """Check w_n > 0 for 1 <= n <= n_max; returns (ok, first violating n or None)."""
    for n in range(1, int(n_max) + 1):
        den = (n + a) * (n + a - 1.0)
        if den == 0.0:
            return False, n
        if not _monic_weight(n, a, b, alpha, beta) > 0.0:
            return False, n
    return True, None


def monic_w_weights(nu, n_max):
    """Monic weights of the W-polynomials: 1 / ((n+1)_2 (n+nu+1)_2 (n+2nu+1)_2)."""
    _require_nu(nu)
    n = np.arange(1, n_max + 1, dtype=float)

    def c(m):
        return (m + 2.0) * (m + 2.0 + nu) * (m + 2.0 + 2.0 * nu)

    return 1.0 / (c(n - 1) * c(n))


def w_jacobi_matrix(nu, order):
    """Jacobi matrix of order ``order`` for the monic W-polynomials (zero diagonal)."""
    if order < 1:
        raise DomainError(f"order must be >= 1, got {order}")
    w = monic_w_weights(nu, order - 1)
    return TridiagonalSymmetric(tuple(np.zeros(order)), tuple(np.sqrt(w)))


def support_bound(nu):
    """Chain-sequence bound 1 / (3 (nu+1)_3 (2nu+1)_3) on the W-measure support."""
    _require_nu(nu)

    def poch3(c):
        return c * (c + 1.0) * (c + 2.0)

    return 1.0 / (3.0 * poch3(nu + 1.0) * poch3(2.0 * nu + 1.0))


def darboux_exponent(b, alpha, beta):
    """Large-n exponent (alpha + beta - b - 3)/2 of the general polynomials from the closed-form estimate."""
    return 0.5 * (alpha + beta - b - 3.0)


def frobenius_exponent(b, alpha, beta):
    """Large-n exponent from the local exponents of the generating-function ODE.

    The singularities at t = +-i carry Frobenius exponent (b - alpha - beta - 1 - i x)/2,
    which by Darboux's method makes |P_n| decay like n^((alpha + beta - b - 1)/2).
    """
    return 0.5 * (alpha + beta - b - 1.0)


def asymptotic_exponent(seq, n_lo, n_hi, window=8):
    """Least-squares slope of ln(envelope |P_n|) against ln n on [n_lo, n_hi].

    The envelope is the running maximum of |P_n| over ``window`` consecutive
    indices, which removes the i^n-type oscillation of the sequence.
    """
    n_lo, n_hi = int(n_lo), int(n_hi)
    if n_lo < 100 or n_hi < 2 * n_lo:
        raise DomainError(f"fit window needs n_hi >= 2*n_lo >= 200, got [{n_lo}, {n_hi}]")
    if n_hi >= len(seq):
        raise DomainError(f"sequence has {len(seq)} terms, window ends at {n_hi}")
    la = seq.log_abs()
    start = n_lo - window + 1
    seg = la[start: n_hi + 1]
    env = np.array([seg[i: i + window].max() for i in range(seg.size - window + 1)])
    if not np.all(np.isfinite(env)):
        raise DegenerateError("sequence vanishes inside the fit window")
    n = np.arange(n_lo, n_hi + 1, dtype=float)
    slope = np.polyfit(np.log(n), env, 1)[0]
    return float(slope)
