"""Angular eigenproblem of an electron in a point-dipole field.

The dipole-modified angular quantum number chi follows from the eigenvalues
(chi + 1/2)^2 of an infinite symmetric tridiagonal matrix, truncated here to
a finite size and diagonalised by Sturm bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, NotFoundError, SupercriticalError
from .tridiag import TridiagonalSymmetric, eigen_tridiag, sturm_count

__all__ = [
    "TridiagonalSymmetric",
    "eigen_tridiag",
    "sturm_count",
    "DipoleSpectrum",
    "CriticalDipole",
    "build_T",
    "chi_values",
    "spectrum_from_eigenvalues",
    "converged_chi",
    "critical_dipole",
]

DEFAULT_SIZE = 120


def _validate(d, m, size):
    if not (math.isfinite(d) and d >= 0.0):
        raise DomainError(f"dipole moment d must be finite and >= 0, got {d}")
    if int(m) != m or m < 0:
        raise DomainError(f"m must be a non-negative integer, got {m}")
    if int(size) != size or size < 2:
        raise DomainError(f"size must be an integer >= 2, got {size}")


def _coupling(d, m, i):
    # coupling between rows i and i+1
    return -d * math.sqrt((i + 1) * (i + 2 * m + 1) / ((i + m + 1) ** 2 - 0.25))


def _coupling_from_below(d, m, i):
    # the same element written as the sub-diagonal entry of row i
    return -d * math.sqrt(i * (i + 2 * m) / ((i + m) ** 2 - 0.25))


def build_T(d, m, size):
    """Truncated angular matrix: diagonal (i+m+1/2)^2, couplings -d sqrt(...)."""
    _validate(d, m, size)
    m = int(m)
    size = int(size)
    diag = tuple((i + m + 0.5) ** 2 for i in range(size))
    off = tuple(_coupling(d, m, i) for i in range(size - 1))
    for i in range(size - 1):
        below = _coupling_from_below(d, m, i + 1)
        assert abs(below - off[i]) <= 1e-14 * max(1.0, abs(off[i])), (i, below, off[i])
    return TridiagonalSymmetric(diag, off)


@dataclass(frozen=True)
class DipoleSpectrum:
    """Eigenvalues (chi + 1/2)^2 and the derived chi of one truncation.

    ``chi[i]`` is NaN where ``supercritical[i]`` is set (eigenvalue < 0);
    ``critical[i]`` marks an eigenvalue that is exactly zero (chi = -1/2).
    """

    d: float
    m: int
    size: int
    eigenvalues: tuple
    chi: tuple
    supercritical: tuple
    critical: tuple

    @property
    def lowest_chi(self):
        for c, bad in zip(self.chi, self.supercritical):
            if not bad:
                return c
        raise SupercriticalError("no real chi")


def spectrum_from_eigenvalues(d, m, size, eigenvalues):
    """Convert ascending eigenvalues (chi + 1/2)^2 into a :class:`DipoleSpectrum`.

    Raises
    ------
    SupercriticalError
        When every eigenvalue is negative; a larger |m| is then required.
    """
    chi = []
    sup = []
    crit = []
    for lam in (float(v) for v in eigenvalues):
        if lam < 0.0:
            chi.append(math.nan)
            sup.append(True)
            crit.append(False)
        else:
            chi.append(math.sqrt(lam) - 0.5)
            sup.append(False)
            crit.append(lam == 0.0)
    if all(sup):
        raise SupercriticalError(
            f"all eigenvalues negative for d={d}, m={m}: choose a larger |m|"
        )
    return DipoleSpectrum(float(d), int(m), int(size), tuple(float(v) for v in eigenvalues),
                          tuple(chi), tuple(sup), tuple(crit))


def chi_values(d, m, size=DEFAULT_SIZE):
    """Diagonalise ``build_T(d, m, size)`` and convert eigenvalues to chi."""
    return spectrum_from_eigenvalues(d, m, size, eigen_tridiag(build_T(d, m, size)))


def converged_chi(d, m, branch=0, size=DEFAULT_SIZE, tol=1e-10, max_size=16 * DEFAULT_SIZE):
    """chi of eigenbranch ``branch``, doubling the truncation until it moves < ``tol``.

    Returns ``(chi, size_used)``.
    """
    prev = chi_values(d, m, size)
    while size < max_size:
        size *= 2
        cur = chi_values(d, m, size)
        a, b = prev.eigenvalues[branch], cur.eigenvalues[branch]
        if abs(a - b) < tol:
            if cur.supercritical[branch]:
                raise SupercriticalError(
                    f"branch {branch} is supercritical for d={d}, m={m}: choose a larger |m|"
                )
            return cur.chi[branch], size
        prev = cur
    raise NotFoundError(f"chi branch {branch} not converged by size {max_size}")


@dataclass(frozen=True)
class CriticalDipole:
    """Critical dipole moment for azimuthal number ``m`` at truncation ``size``."""

    d_max: float
    m: int
    size: int
    tol: float


def _has_negative(d, m, size):
    return int(sturm_count(build_T(d, m, size), 0.0)) > 0


def critical_dipole(m, size=200, tol=1e-8, d_limit=100.0):
    """Smallest d at which the lowest eigenvalue turns negative, by bisection.

    Raises
    ------
    NotFoundError
        If the lowest eigenvalue stays positive for all d <= ``d_limit``.
    """
    if not tol > 0.0:
        raise DomainError(f"tol must be > 0, got {tol}")
    _validate(0.0, m, size)
    lo, hi = 0.0, 0.5
    while not _has_negative(hi, m, size):
        lo = hi
        if hi >= d_limit:
            raise NotFoundError(f"lowest eigenvalue positive for all d <= {d_limit} (m={m})")
        hi = min(2.0 * hi, d_limit)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _has_negative(mid, m, size):
            hi = mid
        else:
            lo = mid
    return CriticalDipole(0.5 * (lo + hi), int(m), int(size), float(tol))
