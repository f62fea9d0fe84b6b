import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from besseltra.dipole import (
    TridiagonalSymmetric,
    build_T,
    chi_values,
    converged_chi,
    critical_dipole,
    eigen_tridiag,
    spectrum_from_eigenvalues,
    sturm_count,
)
from besseltra.errors import DomainError, NotFoundError, SupercriticalError

CHI_D2_M1 = 0.7328234698730973
D_MAX_M0 = 0.639314878731966
D_MAX_M1 = 3.791967924684286


# --- tridiagonal eigensolver ----------------------------------------------

def test_diagonal_input_sorted():
    T = TridiagonalSymmetric((3.0, -1.0, 2.0), (0.0, 0.0))
    assert list(eigen_tridiag(T)) == [-1.0, 2.0, 3.0]


@pytest.mark.parametrize("a,b,c", [(1.0, 2.0, 0.5), (-3.0, 4.0, 2.0), (1.0, 1.0, 1e-3)])
def test_two_by_two_closed_form(a, b, c):
    ev = eigen_tridiag(TridiagonalSymmetric((a, b), (c,)))
    r = math.sqrt(((a - b) / 2) ** 2 + c * c)
    assert ev[0] == pytest.approx((a + b) / 2 - r, abs=1e-14)
    assert ev[1] == pytest.approx((a + b) / 2 + r, abs=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 40).flatmap(lambda n: st.tuples(
    st.lists(st.floats(-50, 50), min_size=n, max_size=n),
    st.lists(st.floats(-50, 50), min_size=n - 1, max_size=n - 1))))
def test_eigen_tridiag_matches_lapack(data):
    d, e = data
    T = TridiagonalSymmetric(tuple(d), tuple(e))
    ev = eigen_tridiag(T)
    assert np.all(np.diff(ev) >= 0)
    assert np.allclose(ev, np.linalg.eigvalsh(T.dense()), rtol=0, atol=1e-12 * max(T.norm(), 1e-300) + 1e-300)


def test_sturm_count():
    T = TridiagonalSymmetric((1.0, 2.0, 3.0), (0.0, 0.0))
    assert list(sturm_count(T, [0.5, 1.5, 2.5, 3.5])) == [0, 1, 2, 3]


def test_tridiagonal_validation():
    with pytest.raises(DomainError):
        TridiagonalSymmetric((1.0, 2.0), (1.0, 2.0))
    with pytest.raises(DomainError):
        TridiagonalSymmetric((1.0, math.inf), (1.0,))


# --- angular matrix -------------------------------------------------------

def test_build_T_zero_dipole_is_diagonal():
    T = build_T(0.0, 2, 6)
    assert T.diag == tuple((i + 2.5) ** 2 for i in range(6))
    assert all(v == 0.0 for v in T.offdiag)


def test_build_T_first_coupling():
    d = 1.7
    assert build_T(d, 1, 3).offdiag[0] == pytest.approx(-d * math.sqrt(0.8), rel=1e-15)
    assert build_T(d, 0, 3).offdiag[0] == pytest.approx(-d * 2 / math.sqrt(3), rel=1e-15)


def test_build_T_nesting():
    big = build_T(2.0, 1, 12)
    small = build_T(2.0, 1, 11)
    assert big.leading(11) == small


@pytest.mark.parametrize("args", [(-1.0, 0, 5), (1.0, -1, 5), (1.0, 0.5, 5), (1.0, 0, 1)])
def test_build_T_validation(args):
    with pytest.raises(DomainError):
        build_T(*args)


def test_truncation_convergence():
    a = eigen_tridiag(build_T(2.0, 1, 60))[0]
    b = eigen_tridiag(build_T(2.0, 1, 120))[0]
    assert abs(a - b) <= 1e-10


def test_zero_dipole_spectrum_exact():
    for m in (0, 1, 3):
        s = chi_values(0.0, m, 40)
        assert s.eigenvalues == tuple((i + m + 0.5) ** 2 for i in range(40))
        assert s.chi == tuple(float(i + m) for i in range(40))


def test_interlacing():
    for m in (0, 1, 2):
        for d in (0.3, 1.0, 2.5):
            for n in range(3, 31):
                big = eigen_tridiag(build_T(d, m, n))
                small = eigen_tridiag(build_T(d, m, n - 1))
                tol = 1e-12 * build_T(d, m, n).norm()
                assert np.all(big[:-1] <= small + tol)
                assert np.all(small <= big[1:] + tol)


def test_trace_identity():
    for n in (10, 57, 120, 200):
        for m, d in ((0, 0.5), (1, 2.0), (2, 4.0)):
            ev = eigen_tridiag(build_T(d, m, n))
            trace = sum((i + m + 0.5) ** 2 for i in range(n))
            assert abs(ev.sum() - trace) <= 1e-9 * trace


def test_critical_flag_at_zero_eigenvalue():
    s = spectrum_from_eigenvalues(1.0, 0, 3, [0.0, 1.0, 4.0])
    assert s.chi[0] == -0.5 and s.critical[0] and not s.supercritical[0]
    s = spectrum_from_eigenvalues(1.0, 0, 3, [-0.2, 1.0, 4.0])
    assert math.isnan(s.chi[0]) and s.supercritical[0]
    assert s.lowest_chi == pytest.approx(0.5)
    with pytest.raises(SupercriticalError):
        spectrum_from_eigenvalues(1.0, 0, 2, [-2.0, -1.0])


def test_dipquad_chi_regression():
    s = chi_values(2.0, 1, 120)
    assert s.chi[0] == pytest.approx(CHI_D2_M1, abs=1e-10)
    chi, size = converged_chi(2.0, 1)
    assert chi == pytest.approx(CHI_D2_M1, abs=1e-10)
    assert size >= 240


def test_supercritical_branch():
    with pytest.raises(SupercriticalError):
        converged_chi(5.0, 0)
    s = chi_values(5.0, 0, 60)
    assert s.supercritical[0] and not s.supercritical[-1]


def test_lowest_eigenvalue_decreases_with_d():
    for m in (0, 1):
        lows = [eigen_tridiag(build_T(d, m, 80))[0] for d in np.linspace(0.0, 5.0, 26)]
        assert np.all(np.diff(lows) < 0)


def test_critical_dipole_values():
    c0 = critical_dipole(0, size=200, tol=1e-8)
    c1 = critical_dipole(1, size=200, tol=1e-8)
    assert c0.d_max == pytest.approx(D_MAX_M0, abs=1e-7)
    assert c1.d_max == pytest.approx(D_MAX_M1, abs=1e-7)
    assert c1.d_max > c0.d_max > 0
    # the known critical dipole for electron binding is 0.6393 atomic units
    assert c0.d_max == pytest.approx(0.6393, abs=1e-4)
    assert c0.size == 200


def test_critical_dipole_errors():
    with pytest.raises(NotFoundError):
        critical_dipole(1, size=100, d_limit=1.0)
    with pytest.raises(DomainError):
        critical_dipole(0, tol=0.0)
