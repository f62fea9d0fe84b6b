"""Potential models, the map to spectral variables, and a direct ODE residual check.

Atomic units (hbar = M = 1) throughout; the radial equation is

    -1/2 psi'' + V(r) psi = E psi.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .dipole import converged_chi
from .errors import DegenerateError, DomainError, ResolutionError

__all__ = [
    "Kratzer",
    "InverseCube",
    "InverseQuartic",
    "Exponential1D",
    "DipoleQuadrupole",
    "SCATTERING_MODELS",
    "SpectralMap",
    "effective_potential",
    "spectral_map",
    "invert_spectral_map",
    "schrodinger_residual",
]

_LAMBDA_MIN = -0.125


def _finite(**kwargs):
    for name, value in kwargs.items():
        if not isinstance(value, numbers.Real) or not math.isfinite(value):
            raise DomainError(f"{name} must be a finite real number, got {value!r}")


def _check_lambda(Lambda):
    if not Lambda > _LAMBDA_MIN:
        raise DomainError(f"Lambda must exceed -1/8, got {Lambda}")


@dataclass(frozen=True)
class Kratzer:
    """V = xi/r + Lambda/r^2."""

    xi: float
    Lambda: float

    def __post_init__(self):
        _finite(xi=self.xi, Lambda=self.Lambda)
        _check_lambda(self.Lambda)

    @property
    def nu(self):
        return math.sqrt(2.0 * self.Lambda + 0.25)


@dataclass(frozen=True)
class InverseCube:
    """V = Lambda/r^2 + zeta/r^3."""

    Lambda: float
    zeta: float

    def __post_init__(self):
        _finite(Lambda=self.Lambda, zeta=self.zeta)
        _check_lambda(self.Lambda)

    @property
    def nu(self):
        return math.sqrt(2.0 * self.Lambda + 0.25)


@dataclass(frozen=True)
class InverseQuartic:
    """V = Lambda/r^2 + zeta/r^4 with zeta > 0, expanded in the odd basis J_{2n+1+nu}.

    ``nu`` is a free basis parameter; it defaults to sqrt(2 Lambda + 1/4).
    """

    Lambda: float
    zeta: float
    nu: float | None = None

    def __post_init__(self):
        _finite(Lambda=self.Lambda, zeta=self.zeta)
        if not self.zeta > 0.0:
            raise DomainError(f"inverse-quartic strength zeta must be > 0, got {self.zeta}")
        if self.nu is None:
            if not 2.0 * self.Lambda + 0.25 > 0.0:
                raise DomainError("default nu = sqrt(2 Lambda + 1/4) needs Lambda > -1/8")
            object.__setattr__(self, "nu", math.sqrt(2.0 * self.Lambda + 0.25))
        _finite(nu=self.nu)
        if not self.nu > 0.0:
            raise DomainError(f"basis order nu must be > 0, got {self.nu}")


@dataclass(frozen=True)
class Exponential1D:
    """V = -(lam^2/2) exp(2 lam r) on the whole real line; bound states only."""

    lam: float
    nu: float
    parity: str = "odd"

    def __post_init__(self):
        _finite(lam=self.lam, nu=self.nu)
        if not self.lam > 0.0:
            raise DomainError(f"lambda must be > 0, got {self.lam}")
        if not self.nu > 0.0:
            raise DomainError(f"nu must be > 0, got {self.nu}")
        if self.parity not in ("odd", "even"):
            raise DomainError(f"parity must be 'odd' or 'even', got {self.parity!r}")


@dataclass(frozen=True)
class DipoleQuadrupole:
    """V = chi(chi+1)/(2 r^2) + p/r^3 with p = eta*q and chi from the dipole matrix.

    ``branch`` selects the eigenvalue of the angular matrix (0 = lowest).
    """

    d: float
    q: float
    eta: float
    m: int
    branch: int = 0

    def __post_init__(self):
        _finite(d=self.d, q=self.q, eta=self.eta)
        if not -0.5 <= self.eta <= 1.0:
            raise DomainError(f"eta must lie in [-1/2, 1], got {self.eta}")
        if not self.d >= 0.0:
            raise DomainError(f"dipole moment d must be >= 0, got {self.d}")
        if int(self.m) != self.m or self.m < 0:
            raise DomainError(f"m must be a non-negative integer, got {self.m}")
        if int(self.branch) != self.branch or self.branch < 0:
            raise DomainError(f"branch must be a non-negative integer, got {self.branch}")

    @property
    def p(self):
        return self.eta * self.q

    @cached_property
    def chi(self):
        value, _ = converged_chi(self.d, self.m, self.branch)
        return value

    @property
    def nu(self):
        return self.chi + 0.5


SCATTERING_MODELS = (Kratzer, InverseCube, InverseQuartic, DipoleQuadrupole)


@dataclass(frozen=True)
class SpectralMap:
    """Wavenumber, basis order and spectral variable for one energy."""

    E: float
    k: float
    nu: float
    z: float


def effective_potential(model, r):
    """V(r) of ``model``; accepts scalars or arrays."""
    r_arr = np.asarray(r, dtype=float)
    if not isinstance(model, Exponential1D) and np.any(r_arr <= 0.0):
        raise DomainError("radial models need r > 0")
    if isinstance(model, Kratzer):
        v = model.xi / r_arr + model.Lambda / r_arr ** 2
    elif isinstance(model, InverseCube):
        v = model.Lambda / r_arr ** 2 + model.zeta / r_arr ** 3
    elif isinstance(model, InverseQuartic):
        v = model.Lambda / r_arr ** 2 + model.zeta / r_arr ** 4
    elif isinstance(model, Exponential1D):
        v = -0.5 * model.lam ** 2 * np.exp(2.0 * model.lam * r_arr)
    elif isinstance(model, DipoleQuadrupole):
        chi = model.chi
        v = chi * (chi + 1.0) / (2.0 * r_arr ** 2) + model.p / r_arr ** 3
    else:
        raise DomainError(f"unknown model {model!r}")
    return float(v) if np.ndim(v) == 0 else v


def spectral_map(model, E):
    """Map (model, E) to (k, nu, z); E must be positive."""
    _finite(E=E)
    if not E > 0.0:
        raise DomainError(f"scattering energy must be > 0, got {E}")
    k = math.sqrt(2.0 * E)
    if isinstance(model, Kratzer):
        return SpectralMap(E, k, model.nu, 4.0 * model.xi / k)
    if isinstance(model, InverseCube):
        if model.zeta == 0.0:
            raise DegenerateError("zeta = 0: use Kratzer with xi = 0 instead")
        return SpectralMap(E, k, model.nu, 1.0 / (k * model.zeta))
    if isinstance(model, InverseQuartic):
        return SpectralMap(E, k, model.nu, model.zeta * k * k)
    if isinstance(model, DipoleQuadrupole):
        if model.p == 0.0:
            raise DegenerateError("p = eta*q = 0: use Kratzer with xi = 0 instead")
        return SpectralMap(E, k, model.nu, 1.0 / (k * model.p))
    raise DomainError(f"{type(model).__name__} has no scattering states")


def invert_spectral_map(model_type, smap):
    """Recover the physical parameters fixed by (k, nu, z) for ``model_type``."""
    k, nu, z = smap.k, smap.nu, smap.z
    if model_type is Kratzer:
        return {"xi": z * k / 4.0, "Lambda": 0.5 * (nu * nu - 0.25)}
    if model_type is InverseCube:
        return {"zeta": 1.0 / (k * z), "Lambda": 0.5 * (nu * nu - 0.25)}
    if model_type is InverseQuartic:
        return {"zeta": z / (k * k)}
    if model_type is DipoleQuadrupole:
        return {"p": 1.0 / (k * z), "chi": nu - 0.5}
    raise DomainError(f"no spectral map for {model_type!r}")


def schrodinger_residual(samples, E, model):
    """Scaled residual max|-psi''/2 + V psi - E psi| / (|E| max|psi|).

    ``samples`` needs ``r`` (uniform grid, at least 5 points) and ``psi``.
    The second derivative uses the 5-point central stencil, so the two
    outermost points at each end are excluded.

    Raises
    ------
    ResolutionError
        If h^2 * max|V| > 1 on the interior points.
    """
    r = np.asarray(samples.r, dtype=float)
    psi = np.asarray(samples.psi, dtype=float)
    if r.size < 5 or psi.shape != r.shape:
        raise DomainError("need at least 5 matching r/psi samples")
    h = r[1] - r[0]
    steps = np.diff(r)
    if not h > 0.0 or np.max(np.abs(steps - h)) > 1e-9 * max(1.0, np.max(np.abs(r))):
        raise DomainError("grid must be uniform and ascending")
    inner = slice(2, r.size - 2)
    v = np.asarray(effective_potential(model, r[inner]), dtype=float)
    if h * h * np.max(np.abs(v)) > 1.0:
        raise ResolutionError(f"grid too coarse: h^2 max|V| = {h * h * np.max(np.abs(v)):.3g} > 1")
    d2 = (-psi[:-4] + 16.0 * psi[1:-3] - 30.0 * psi[2:-2] + 16.0 * psi[3:-1] - psi[4:]) / (12.0 * h * h)
    res = -0.5 * d2 + (v - E) * psi[inner]
    scale = abs(E) * np.max(np.abs(psi))
    if scale == 0.0:
        raise DomainError("residual undefined for E = 0 or psi = 0")
    return float(np.max(np.abs(res)) / scale)
