"""Acceptance criteria 1-10.

Each test records its measured quantity; ``conftest.py`` prints one
PASS/FAIL line per criterion at the end of the run.
"""

import json
import math
import subprocess
import sys
import time
import warnings

import numpy as np
import pytest

from besseltra.dipole import build_T, chi_values, critical_dipole, eigen_tridiag
from besseltra.errors import AsymptoticTruncationWarning
from besseltra.potentials import DipoleQuadrupole, Exponential1D, Kratzer, schrodinger_residual
from besseltra.recursion import (
    RecursionFamily,
    asymptotic_exponent,
    forward_solve,
    kratzer_parameters,
    positivity_check,
    support_bound,
    w_jacobi_matrix,
)
from besseltra.scattering import (
    amplitude_match,
    coulomb_exact,
    exponential_spectrum,
    ode_oracle,
    phase_shift,
    solve,
)
from besseltra.validation import (
    lommel_ortho_check,
    ortho_check,
    ortho_closed_form,
    weber_schafheitlin,
)

COULOMB_MODEL = Kratzer(2.0, 1.0)
COULOMB_E = 3.0
COULOMB_R = np.linspace(0.05, 10.0, 400)
DIPQUAD_MODEL = DipoleQuadrupole(2.0, 3.0, 0.5, 1)
DIPQUAD_E = 5.0
DIPQUAD_R = np.linspace(0.5, 5.0, 200)
EPS = np.finfo(float).eps


def _measure(record_property, text):
    record_property("measured", text)


def _quiet_solve(*args, **kwargs):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AsymptoticTruncationWarning)
        return solve(*args, **kwargs)


# --- 1. Coulomb reproduction ----------------------------------------------

def test_criterion_1_coulomb_deviation(record_property):
    t0 = time.perf_counter()
    sol, s = solve(COULOMB_MODEL, COULOMB_E, COULOMB_R)
    exact = coulomb_exact(2.0, 1, COULOMB_E, COULOMB_R)
    elapsed = time.perf_counter() - t0
    err = float(np.max(np.abs(s.psi - exact)))
    _measure(record_property, f"max|TRA - exact| = {err:.2e} (tol 1e-4), N_used = {sol.N_used}, "
                              f"runtime {elapsed:.3f} s (limit 5 s)")
    assert err <= 1e-4
    assert elapsed < 5.0


def test_criterion_1_n_convergence(record_property):
    exact = coulomb_exact(2.0, 1, COULOMB_E, COULOMB_R)
    errors = []
    for n in range(10, 85, 5):
        _, s = _quiet_solve(COULOMB_MODEL, COULOMB_E, COULOMB_R, n_max=n)
        errors.append(float(np.max(np.abs(s.psi - exact))))
    floor = 1e-10
    _measure(record_property, "errors at N=10,15,..,80: " + ", ".join(f"{e:.1e}" for e in errors)
             + f"; N=80 error {errors[-1]:.1e} (expected <= 1e-6)")
    for a, b in zip(errors, errors[1:]):
        assert b < a or a <= floor
    assert errors[-1] <= 1e-6


# --- 2. Oracle triangle ---------------------------------------------------

def test_criterion_2_oracle_triangle(record_property):
    _, tra = solve(COULOMB_MODEL, COULOMB_E, COULOMB_R)
    exact = coulomb_exact(2.0, 1, COULOMB_E, COULOMB_R)
    ode = ode_oracle(COULOMB_MODEL, COULOMB_E, COULOMB_R).psi
    pairs = {
        "exact/ode": amplitude_match(exact, ode)[1],
        "exact/tra": amplitude_match(exact, tra.psi)[1],
        "tra/ode": amplitude_match(tra.psi, ode)[1],
    }
    _measure(record_property, ", ".join(f"{k} {v:.1e}" for k, v in pairs.items()) + " (tol 1e-6)")
    assert max(pairs.values()) <= 1e-6


# --- 3. Free-particle exactness -------------------------------------------

def test_criterion_3_free_particle(record_property):
    worst_d = worst_c = 0.0
    for E in (0.1, 1.0, 3.0, 12.5):
        sol, _ = solve(Kratzer(0.0, 0.0), E, COULOMB_R)
        worst_d = max(worst_d, abs(sol.delta + math.pi / 2))
        worst_c = max(worst_c, abs(sol.C0 - math.sqrt(math.pi / 2)))
    _measure(record_property, f"|delta + pi/2| = {worst_d:.1e}, |C0 - sqrt(pi/2)| = {worst_c:.1e} "
                              f"(tol 4 eps = {4 * EPS:.1e})")
    assert worst_d <= 4 * EPS
    assert worst_c <= 4 * EPS


def test_criterion_3_pure_centrifugal(record_property):
    worst = 0.0
    for Lambda in (0.1, 0.5, 1.0, 3.0, 6.0, 20.0):
        model = Kratzer(0.0, Lambda)
        sol, _ = solve(model, 2.0, COULOMB_R)
        worst = max(worst, abs(math.remainder(sol.delta + (model.nu + 0.5) * math.pi / 2, math.pi)))
    for nu in (0.2, 0.9, 2.6):
        d = phase_shift([1.0], nu).delta
        worst = max(worst, abs(math.remainder(d + (nu + 0.5) * math.pi / 2, math.pi)))
    _measure(record_property, f"max |delta + (nu+1/2) pi/2 mod pi| = {worst:.1e} (tol 1e-12)")
    assert worst <= 1e-12


# --- 4. Recursion seeds ---------------------------------------------------

def test_criterion_4_recursion_seeds(record_property):
    worst = 0.0
    for nu in (0.6, 1.5, 3.2):
        for z in (0.1, 1.0, 5.0):
            q = forward_solve(RecursionFamily("InvCubeQ", nu=nu, z=z), 4).values
            qt = forward_solve(RecursionFamily("DipQuadQ", nu=nu, z=z), 4).values
            expected_q3 = -4 * (nu + 1) * (nu + 2) * (nu + 3) * z
            expected_qt3 = -4 * (nu + 1) * (nu + 2) * z
            errs = [
                abs(q[1]),
                abs(nu * q[2] + (nu + 2)) / (nu + 2),
                abs(nu * q[3] - expected_q3) / abs(expected_q3),
                abs(qt[0] - 1.0),
                abs(qt[1]),
                abs(qt[2] + 1.0),
                abs(qt[3] - expected_qt3) / abs(expected_qt3),
            ]
            worst = max(worst, *errs)
    _measure(record_property, f"worst seed deviation {worst:.1e} (tol 1e-14)")
    assert worst <= 1e-14


# --- 5. Dipole-quadrupole regime -----------------------------------------

def test_criterion_5_shape_against_ode(record_property):
    sol, tra = _quiet_solve(DIPQUAD_MODEL, DIPQUAD_E, DIPQUAD_R)
    ode = ode_oracle(DIPQUAD_MODEL, DIPQUAD_E, DIPQUAD_R).psi
    _, err = amplitude_match(ode, tra.psi)
    _measure(record_property, f"relative Linf after amplitude match {err:.3g} (tol 1e-3), "
                              f"N_used = {sol.N_used}")
    assert err <= 1e-3


def test_criterion_5_chi_convergence(record_property):
    a = chi_values(2.0, 1, 120).chi[0]
    b = chi_values(2.0, 1, 240).chi[0]
    _measure(record_property, f"|chi(120) - chi(240)| = {abs(a - b):.1e} (tol 1e-10), chi = {b!r}")
    assert abs(a - b) <= 1e-10


def test_criterion_5_runtime(record_property):
    t0 = time.perf_counter()
    model = DipoleQuadrupole(2.0, 3.0, 0.5, 1)
    _quiet_solve(model, DIPQUAD_E, DIPQUAD_R)
    ode_oracle(model, DIPQUAD_E, DIPQUAD_R)
    elapsed = time.perf_counter() - t0
    _measure(record_property, f"chi + series + ODE oracle {elapsed:.2f} s (limit 10 s)")
    assert elapsed < 10.0


# --- 6. Integral identities -----------------------------------------------

def test_criterion_6_integral_identities(record_property):
    worst_ratio = 0.0
    failures = []
    count = 0
    for nu in (0.5, 1.3, 2.7):
        for n in range(5):
            for m in range(5):
                # the same integrals in raw Weber-Schafheitlin orders
                for pair, (p, q) in (("KK", (2 * n, 2 * m)), ("JJ", (2 * n + 1, 2 * m + 1)),
                                     ("KJ", (2 * n, 2 * m + 1))):
                    res = weber_schafheitlin(nu, p, q, 1.0)
                    closed = ortho_closed_form(pair, nu, n, m)
                    err = abs(res.numeric - closed)
                    count += 1
                    bound = max(1e-8, res.tail_bound)
                    worst_ratio = max(worst_ratio, err / bound)
                    if err > bound:
                        failures.append((pair, nu, n, m, err))
                for pair, weight in (("KK", "inverse"), ("JJ", "inverse"), ("KJ", "inverse"), ("KJ", "unit")):
                    res = ortho_check(pair, nu, n, m, weight=weight)
                    count += 1
                    bound = max(1e-8, res.tail_bound)
                    worst_ratio = max(worst_ratio, res.abs_error / bound)
                    if res.abs_error > bound:
                        failures.append((pair, weight, nu, n, m, res.abs_error))
    _measure(record_property, f"{count} checks, worst abs_error / max(1e-8, tail_bound) = {worst_ratio:.1e}, "
                              f"failures {failures[:3]}")
    assert not failures


def test_criterion_6_lommel(record_property):
    worst_ratio = 0.0
    failures = []
    for nu in (0.5, 1.3, 2.7):
        for n in range(5):
            for m in range(5):
                res = lommel_ortho_check(nu, n, m, K=1000)
                if res.tail_bound > 0:
                    worst_ratio = max(worst_ratio, res.abs_error / res.tail_bound)
                if res.abs_error > res.tail_bound:
                    failures.append((nu, n, m, res.abs_error, res.tail_bound))
    _measure(record_property, f"75 sums with K=1000, worst abs_error / tail_bound = {worst_ratio:.2f}, "
                              f"failures {failures[:3]}")
    assert not failures


# --- 7. Large-n asymptotics -----------------------------------------------

def test_criterion_7_envelope_exponent(record_property):
    fits = {}
    for nu in (0.8, 1.5):
        for z in (1.0, 4.0):
            seq = forward_solve(RecursionFamily("KratzerV", nu=nu, z=z), 2000)
            fits[(nu, z)] = asymptotic_exponent(seq, 200, 2000)
    _measure(record_property, ", ".join(f"nu={k[0]} z={k[1]}: {v:.3f}" for k, v in fits.items())
             + " (target -2 +- 0.05)")
    assert all(abs(s + 2.0) <= 0.05 for s in fits.values())


def test_criterion_7_positivity(record_property):
    results = {nu: positivity_check(*kratzer_parameters(nu), 2000) for nu in (0.8, 1.5)}
    _measure(record_property, ", ".join(f"nu={k}: {v}" for k, v in results.items()))
    assert all(ok for ok, _ in results.values())


def test_criterion_7_support_bound(record_property):
    rows = []
    ok = True
    for nu in (0.5, 0.8, 1.0, 1.5):
        ev = eigen_tridiag(w_jacobi_matrix(nu, 12))
        bound = support_bound(nu)
        top = float(np.max(np.abs(ev)))
        rows.append(f"nu={nu}: max|eig| {top:.3e} vs bound {bound:.3e}")
        ok = ok and top <= bound
    _measure(record_property, "; ".join(rows))
    assert ok


# --- 8. Exponential bound states ------------------------------------------

def test_criterion_8_spectrum(record_property):
    energies = [exponential_spectrum(1.0, 1.0, "odd", n).E for n in range(3)]
    _measure(record_property, f"E = {energies}")
    assert energies == [-2.0, -8.0, -18.0]


def test_criterion_8_residual(record_property):
    state = exponential_spectrum(1.0, 1.0, "odd", 0)
    r = -4.0 + 1e-3 * np.arange(6001)
    res = schrodinger_residual(state.samples(r), state.E, Exponential1D(1.0, 1.0))
    _measure(record_property, f"scaled residual {res:.2e} (tol 1e-5)")
    assert res <= 1e-5


def test_criterion_8_normalisation(record_property):
    worst = 0.0
    for n in range(3):
        state = exponential_spectrum(1.0, 1.0, "odd", n)
        norm = 2.0 * state.order * ortho_check("JJ", 1.0, n, n).numeric
        worst = max(worst, abs(norm - 1.0))
    _measure(record_property, f"max |lambda int psi_n^2 dr - 1| = {worst:.1e} (tol 1e-6)")
    assert worst <= 1e-6


# --- 9. Dipole eigenproblem -----------------------------------------------

def test_criterion_9_zero_dipole(record_property):
    worst = 0.0
    for m in (0, 1, 4):
        for size in (2, 17, 120):
            ev = eigen_tridiag(build_T(0.0, m, size))
            worst = max(worst, float(np.max(np.abs(ev - (np.arange(size) + m + 0.5) ** 2))))
    _measure(record_property, f"max deviation {worst:.1e}")
    assert worst == 0.0


def test_criterion_9_trace(record_property):
    worst = 0.0
    for size in (5, 50, 120, 200):
        for m, d in ((0, 0.5), (1, 2.0), (2, 3.0), (3, 8.0)):
            ev = eigen_tridiag(build_T(d, m, size))
            trace = sum((i + m + 0.5) ** 2 for i in range(size))
            worst = max(worst, abs(float(ev.sum()) - trace) / trace)
    _measure(record_property, f"max relative trace error {worst:.1e} (tol 1e-9)")
    assert worst <= 1e-9


def test_criterion_9_interlacing(record_property):
    violations = 0
    for m in (0, 1, 2):
        for d in (0.4, 2.0, 5.0):
            for size in range(3, 31):
                big = eigen_tridiag(build_T(d, m, size))
                small = eigen_tridiag(build_T(d, m, size - 1))
                tol = 1e-12 * build_T(d, m, size).norm()
                violations += int(np.sum(big[:-1] > small + tol) + np.sum(small > big[1:] + tol))
    _measure(record_property, f"{violations} interlacing violations for N <= 30")
    assert violations == 0


def test_criterion_9_critical_dipole(record_property):
    a = critical_dipole(0, size=200, tol=1e-8).d_max
    b = critical_dipole(0, size=400, tol=1e-8).d_max
    _measure(record_property, f"d_max(N=200) = {a:.10f}, d_max(N=400) = {b:.10f}, diff {abs(a - b):.1e} (tol 1e-6)")
    assert abs(a - b) <= 1e-6


# --- 10. Determinism ------------------------------------------------------

def _cli_commands(config_path):
    return [
        ["solve", "--model", "kratzer", "--xi", "2", "--lambda", "1", "--energy", "3", "--r", "0.05:10:400"],
        ["solve", "--model", "dipquad", "--d", "2", "--q", "3", "--eta", "0.5", "--m", "1",
         "--energy", "5", "--format", "json"],
        ["solve", "--model", "invcube", "--lambda", "1", "--zeta", "0.5", "--energy", "2"],
        ["solve", "--model", "invquartic", "--lambda", "1", "--zeta", "0.5", "--energy", "2"],
        ["solve", "--model", "kratzer", "--xi", "1", "--lambda", "0.5", "--energy-sweep", "1:4:4",
         "--jobs", "2"],
        ["--config", config_path, "solve"],
        ["validate", "coulomb"],
        ["validate", "ortho"],
        ["validate", "lommel"],
        ["validate", "recursion"],
        ["validate", "ode"],
        ["dipole", "--d", "2", "--m", "1", "--size", "120"],
        ["dipole", "--critical", "--m", "0"],
        ["spectrum", "--lambda", "1", "--nu", "1", "--parity", "odd", "--count", "3"],
        ["ortho", "--pair", "KJ", "--nu", "1.3", "--n", "1", "--m", "2"],
        ["poly", "--family", "DipQuadQ", "--nu", "1.5", "--z", "0.3", "--n-max", "40"],
    ]


def test_criterion_10_determinism(record_property, tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"model": "kratzer", "xi": 2, "lambda": 1, "energy": 3,
                                  "format": "json"}))
    differing = []
    commands = _cli_commands(str(config))
    for argv in commands:
        runs = [subprocess.run([sys.executable, "-m", "besseltra", *argv], capture_output=True, timeout=600)
                for _ in range(2)]
        if (runs[0].stdout != runs[1].stdout or runs[0].returncode != runs[1].returncode
                or not runs[0].stdout):
            differing.append(" ".join(argv))
    _measure(record_property, f"{len(commands) - len(differing)}/{len(commands)} commands byte-identical"
                              + (f"; differing: {differing}" if differing else ""))
    assert not differing
