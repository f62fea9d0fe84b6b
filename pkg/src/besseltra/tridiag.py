"""Symmetric tridiagonal matrices and a Sturm-sequence bisection eigensolver."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = ["TridiagonalSymmetric", "sturm_count", "eigen_tridiag"]


@dataclass(frozen=True)
class TridiagonalSymmetric:
    """Symmetric tridiagonal matrix stored as its diagonal and one off-diagonal."""

    diag: tuple
    offdiag: tuple

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float)
        e = np.asarray(self.offdiag, dtype=float)
        if d.ndim != 1 or d.size < 1:
            raise DomainError("diagonal must be a non-empty 1-D sequence")
        if e.size != d.size - 1:
            raise DomainError(f"off-diagonal needs {d.size - 1} entries, got {e.size}")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise DomainError("matrix entries must be finite")
        object.__setattr__(self, "diag", tuple(float(v) for v in d))
        object.__setattr__(self, "offdiag", tuple(float(v) for v in e))

    @property
    def size(self):
        return len(self.diag)

    def dense(self):
        """The full matrix as a numpy array."""
        d = np.asarray(self.diag)
        e = np.asarray(self.offdiag)
        return np.diag(d) + np.diag(e, 1) + np.diag(e, -1)

    def leading(self, size):
        """Upper-left ``size`` x ``size`` block."""
        return TridiagonalSymmetric(self.diag[:size], self.offdiag[: size - 1])

    def norm(self):
        """Infinity norm (also a Gershgorin radius bound)."""
        d = np.abs(np.asarray(self.diag))
        e = np.abs(np.asarray(self.offdiag))
        row = d.copy()
        row[:-1] += e
        row[1:] += e
        return float(row.max())


def _pivmin(e2):
    return np.finfo(float).tiny * max(1.0, float(e2.max()) if e2.size else 1.0)


def sturm_count(T, x):
    """Number of eigenvalues of ``T`` strictly less than each value in ``x``."""
    d = np.asarray(T.diag)
    e2 = np.asarray(T.offdiag) ** 2
    pivmin = _pivmin(e2)
    x = np.asarray(x, dtype=float)
    q = d[0] - x
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    count = (q < 0).astype(int)
    for i in range(1, d.size):
        q = d[i] - x - e2[i - 1] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        count += q < 0
    return count


def eigen_tridiag(T):
    """All eigenvalues of ``T`` in ascending order, by vectorised bisection.

    Each eigenvalue is bracketed by the Gershgorin interval and bisected
    until the bracket is a few ulps wide, which gives absolute accuracy of
    order ``eps * ||T||``.
    """
    n = T.size
    d = np.asarray(T.diag)
    e = np.asarray(T.offdiag)
    if n == 1 or not np.any(e):
        return np.sort(d)
    radius = np.zeros(n)
    radius[:-1] += np.abs(e)
    radius[1:] += np.abs(e)
    norm = T.norm()
    lo = np.full(n, float((d - radius).min()) - 1e-12 * norm)
    hi = np.full(n, float((d + radius).max()) + 1e-12 * norm)
    idx = np.arange(n)
    eps = np.finfo(float).eps
    for _ in range(2000):
        width = hi - lo
        if np.all(width <= 4.0 * eps * np.maximum(np.abs(lo), np.abs(hi)) + 1e-300 + eps * 1e-3 * norm):
            break
        mid = 0.5 * (lo + hi)
        below = sturm_count(T, mid) > idx
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
    return 0.5 * (lo + hi)
