"""Command-line interface.

Exit codes: 0 success, 1 malformed input, 2 domain error, 3 asymptotic
truncation warning, 4 supercritical dipole.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import dipole, recursion, scattering, validation
from .errors import (
    AccuracyError,
    AsymptoticTruncationWarning,
    DegenerateError,
    DomainError,
    NotFoundError,
    SupercriticalError,
)
from .potentials import DipoleQuadrupole, InverseCube, InverseQuartic, Kratzer

EXIT_OK = 0
EXIT_MALFORMED = 1
EXIT_DOMAIN = 2
EXIT_TRUNCATED = 3
EXIT_SUPERCRITICAL = 4

DEFAULT_GRIDS = {
    "kratzer": "0.05:10:400",
    "invcube": "0.5:5:200",
    "invquartic": "0.5:5:200",
    "dipquad": "0.5:5:200",
}

MODEL_PARAMS = {
    "kratzer": ("xi", "Lambda"),
    "invcube": ("Lambda", "zeta"),
    "invquartic": ("Lambda", "zeta"),
    "dipquad": ("d", "q", "eta", "m"),
}


class UsageError(Exception):
    """Malformed command line or configuration."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_grid(text, field="grid", log=False):
    """Parse ``start:stop:count`` into an array (log spacing if ``log``)."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise UsageError(f"{field}: expected start:stop:count, got {text!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"{field}: expected start:stop:count, got {text!r}") from None
    if count < 2 or not start < stop or not (math.isfinite(start) and math.isfinite(stop)):
        raise UsageError(f"{field}: need count >= 2 and start < stop, got {text!r}")
    if log:
        if start <= 0.0:
            raise UsageError(f"{field}: log spacing needs start > 0")
        return np.geomspace(start, stop, count)
    return np.linspace(start, stop, count)


def _fmt(x):
    return repr(float(x))


def _json_float(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def build_model(ns):
    name = ns.model
    if name not in MODEL_PARAMS:
        raise UsageError(f"model: unknown model {name!r}; choose from {sorted(MODEL_PARAMS)}")
    values = {}
    for key in MODEL_PARAMS[name]:
        v = getattr(ns, key, None)
        if v is None:
            raise UsageError(f"{key}: required for model {name!r}")
        values[key] = v
    if name == "kratzer":
        return Kratzer(float(values["xi"]), float(values["Lambda"]))
    if name == "invcube":
        return InverseCube(float(values["Lambda"]), float(values["zeta"]))
    if name == "invquartic":
        return InverseQuartic(float(values["Lambda"]), float(values["zeta"]),
                              None if ns.nu is None else float(ns.nu))
    if int(values["m"]) != float(values["m"]):
        raise UsageError(f"m: must be an integer, got {values['m']}")
    return DipoleQuadrupole(float(values["d"]), float(values["q"]), float(values["eta"]),
                            int(values["m"]), int(ns.branch or 0))


def _solve_one(args):
    model, E, r, n_max = args
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AsymptoticTruncationWarning)
        sol, samples = scattering.solve(model, E, r, n_max)
    return sol.to_dict(), samples.r, samples.psi


def cmd_solve(ns):
    model = build_model(ns)
    grid = ns.r if ns.r is not None else DEFAULT_GRIDS[ns.model]
    r = parse_grid(grid, "r", bool(ns.log_grid))
    if ns.energy is not None and ns.energy_sweep is not None:
        raise UsageError("energy: give either energy or energy_sweep, not both")
    if ns.energy is not None:
        energies = [float(ns.energy)]
        sweep = False
    elif ns.energy_sweep is not None:
        energies = [float(e) for e in parse_grid(ns.energy_sweep, "energy_sweep")]
        sweep = True
    else:
        raise UsageError("energy: required (or energy_sweep)")
    for E in energies:
        scattering.spectral_map(model, E)
    n_max = None if ns.n_max is None else int(ns.n_max)
    jobs = max(1, int(ns.jobs))
    tasks = [(model, E, r, n_max) for E in energies]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_solve_one, tasks))
    else:
        results = [_solve_one(t) for t in tasks]

    fmt = ns.format or "csv"
    if fmt == "json":
        items = []
        for info, rr, psi in results:
            item = {k: (_json_float(v) if isinstance(v, float) else v) for k, v in info.items()}
            item["samples"] = {"r": [float(x) for x in rr], "psi": [float(x) for x in psi]}
            items.append(item)
        text = _dump_json(items if sweep else items[0])
    elif fmt == "csv":
        lines = ["E,r,psi" if sweep else "r,psi"]
        for info, rr, psi in results:
            for x, y in zip(rr, psi):
                lines.append((f"{_fmt(info['E'])}," if sweep else "") + f"{_fmt(x)},{_fmt(y)}")
        text = "\n".join(lines) + "\n"
    else:
        raise UsageError(f"format: expected csv or json, got {fmt!r}")
    _emit(text, ns.output)
    flagged = [info for info, _, _ in results if info["warning"]]
    for info in flagged:
        print(f"warning: E={info['E']}: {info['warning']}", file=sys.stderr)
    return EXIT_TRUNCATED if flagged else EXIT_OK


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

def _check(name, measured, tol):
    return name, float(measured), float(tol), bool(measured <= tol)


def suite_coulomb():
    r = np.linspace(0.05, 10.0, 400)
    _, samples = scattering.solve(Kratzer(2.0, 1.0), 3.0, r)
    exact = scattering.coulomb_exact(2.0, 1, 3.0, r)
    return [_check("coulomb max|TRA - exact| (Z=2, l=1, E=3)", np.max(np.abs(samples.psi - exact)), 1e-4)]


def suite_ortho():
    out = []
    for nu in (0.5, 1.3, 2.7):
        for pair, weight in (("KK", "inverse"), ("JJ", "inverse"), ("KJ", "inverse"), ("KJ", "unit")):
            worst = 0.0
            for n in range(5):
                for m in range(5):
                    res = validation.ortho_check(pair, nu, n, m, weight)
                    worst = max(worst, res.abs_error - max(1e-8, res.tail_bound) + 1e-8)
            out.append(_check(f"{pair} weight={weight} nu={nu} n,m<=4 abs error", worst, 1e-8))
    return out


def suite_lommel():
    out = []
    for nu, n, m in ((0.5, 0, 0), (1.3, 0, 2), (1.3, 1, 1), (2.7, 2, 2), (1.3, 1, 2)):
        res = validation.lommel_ortho_check(nu, n, m, 1000)
        out.append(_check(f"lommel nu={nu} n={n} m={m} K=1000 (tail bound {res.tail_bound:.3g})",
                          res.abs_error, max(1e-8, res.tail_bound)))
    return out


def suite_recursion():
    out = []
    for nu in (0.6, 1.5, 3.2):
        for z in (0.1, 1.0, 5.0):
            q = recursion.forward_solve(recursion.RecursionFamily("InvCubeQ", nu=nu, z=z), 3).values
            err_q = max(abs(q[1]), abs(nu * q[2] + (nu + 2.0)),
                        abs(nu * q[3] + 4.0 * (nu + 1) * (nu + 2) * (nu + 3) * z) / max(1.0, abs(nu * q[3])))
            t = recursion.forward_solve(recursion.RecursionFamily("DipQuadQ", nu=nu, z=z), 3).values
            err_t = max(abs(t[0] - 1.0), abs(t[1]), abs(t[2] + 1.0),
                        abs(t[3] + 4.0 * (nu + 1) * (nu + 2) * z) / max(1.0, abs(t[3])))
            w = recursion.forward_solve(recursion.RecursionFamily("InvCubeW", nu=nu, z=z), 1).values
            err_w = max(abs(w[0] - 1.0), abs(w[1] - 4.0 * (nu + 1) * (nu + 2) * z) / max(1.0, abs(w[1])))
            out.append(_check(f"seeds nu={nu} z={z}", max(err_q, err_t, err_w), 1e-14))
    return out


def suite_ode():
    r = np.linspace(0.05, 10.0, 400)
    model = Kratzer(2.0, 1.0)
    _, tra = scattering.solve(model, 3.0, r)
    ode = scattering.ode_oracle(model, 3.0, r)
    exact = scattering.coulomb_exact(2.0, 1, 3.0, r)
    out = [
        _check("ode vs exact Coulomb (shape)", scattering.amplitude_match(exact, ode.psi)[1], 1e-6),
        _check("ode vs TRA Kratzer (shape)", scattering.amplitude_match(tra.psi, ode.psi)[1], 1e-6),
    ]
    rr = np.linspace(0.5, 5.0, 200)
    dq = DipoleQuadrupole(2.0, 3.0, 0.5, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AsymptoticTruncationWarning)
        _, tra_dq = scattering.solve(dq, 5.0, rr)
    ode_dq = scattering.ode_oracle(dq, 5.0, rr)
    out.append(_check("ode vs TRA dipole-quadrupole d=2 q=3 m=1 E=5 (shape)",
                      scattering.amplitude_match(ode_dq.psi, tra_dq.psi)[1], 1e-3))
    return out


SUITES = {
    "coulomb": suite_coulomb,
    "ortho": suite_ortho,
    "lommel": suite_lommel,
    "recursion": suite_recursion,
    "ode": suite_ode,
}


def cmd_validate(ns):
    rows = SUITES[ns.suite]()
    lines = []
    for name, measured, tol, ok in rows:
        lines.append(f"{'PASS' if ok else 'FAIL'}  {name}: measured={measured:.3e} tol={tol:.1e}")
    _emit("\n".join(lines) + "\n", ns.output)
    return EXIT_OK if all(r[3] for r in rows) else EXIT_MALFORMED


# ---------------------------------------------------------------------------
# dipole / spectrum / ortho / poly
# ---------------------------------------------------------------------------

def cmd_dipole(ns):
    m = int(ns.m)
    size = int(ns.size)
    if ns.critical:
        crit = dipole.critical_dipole(m, size, float(ns.tol))
        _emit(_dump_json({"m": crit.m, "size": crit.size, "tol": crit.tol, "d_max": crit.d_max}), ns.output)
        return EXIT_OK
    if ns.d is None:
        raise UsageError("d: required unless --critical is given")
    spec = dipole.chi_values(float(ns.d), m, size)
    payload = {
        "d": spec.d,
        "m": spec.m,
        "size": spec.size,
        "eigenvalues": [float(v) for v in spec.eigenvalues],
        "chi": [_json_float(c) for c in spec.chi],
        "supercritical": list(spec.supercritical),
        "critical": list(spec.critical),
    }
    _emit(_dump_json(payload), ns.output)
    if spec.supercritical[0]:
        print("warning: lowest branch is supercritical; choose a larger |m|", file=sys.stderr)
        return EXIT_SUPERCRITICAL
    return EXIT_OK


def cmd_spectrum(ns):
    count = int(ns.count)
    if count < 1:
        raise UsageError(f"count: must be >= 1, got {count}")
    states = [scattering.exponential_spectrum(float(ns.lam), float(ns.nu), ns.parity, n) for n in range(count)]
    payload = {
        "lambda": float(ns.lam),
        "nu": float(ns.nu),
        "parity": ns.parity,
        "E": [s.E for s in states],
        "order": [s.order for s in states],
    }
    _emit(_dump_json(payload), ns.output)
    return EXIT_OK


def cmd_ortho(ns):
    res = validation.ortho_check(ns.pair, float(ns.nu), int(ns.n), int(ns.m), ns.weight)
    payload = {
        "pair": ns.pair,
        "weight": ns.weight,
        "nu": float(ns.nu),
        "n": int(ns.n),
        "m": int(ns.m),
        "numeric": float(res.numeric),
        "closed_form": float(res.closed_form),
        "abs_error": float(res.abs_error),
        "segments_used": res.segments_used,
        "tail_bound": float(res.tail_bound),
    }
    _emit(_dump_json(payload), ns.output)
    return EXIT_OK


def cmd_poly(ns):
    kwargs = {}
    for key in ("nu", "z", "Lambda", "zeta_k2", "a", "b", "alpha", "beta", "x"):
        v = getattr(ns, key, None)
        if v is not None:
            kwargs[key] = float(v)
    fam = recursion.RecursionFamily(ns.family, **kwargs)
    seq = recursion.forward_solve(fam, int(ns.n_max))
    fmt = ns.format or "csv"
    if fmt == "json":
        text = _dump_json({
            "family": ns.family,
            "params": kwargs,
            "values": [_json_float(v) for v in seq.values],
            "log_abs": [_json_float(v) for v in seq.log_abs()],
            "first_growth_index": seq.first_growth_index,
            "overflow_scaled": seq.overflow_scaled,
        })
    elif fmt == "csv":
        text = "n,value\n" + "".join(f"{n},{_fmt(v)}\n" for n, v in enumerate(seq.values))
    else:
        raise UsageError(f"format: expected csv or json, got {fmt!r}")
    _emit(text, ns.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _default_jobs():
    raw = os.environ.get("TRA_JOBS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"TRA_JOBS: expected an integer, got {raw!r}") from None


def build_parser():
    p = _Parser(prog="tra", description="Bessel-basis scattering solutions and checks.")
    p.add_argument("--config", help="JSON file with option values; flags override it")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="wavefunction, phase shift and normalisation")
    s.add_argument("--model", choices=sorted(MODEL_PARAMS))
    s.add_argument("--xi", type=float)
    s.add_argument("--lambda", dest="Lambda", type=float)
    s.add_argument("--zeta", type=float)
    s.add_argument("--nu", type=float, help="basis order (inverse quartic only)")
    s.add_argument("--d", type=float)
    s.add_argument("--q", type=float)
    s.add_argument("--eta", type=float)
    s.add_argument("--m", type=int)
    s.add_argument("--branch", type=int, default=0)
    s.add_argument("--energy", type=float)
    s.add_argument("--energy-sweep", dest="energy_sweep")
    s.add_argument("--r", help="start:stop:count")
    s.add_argument("--log-grid", dest="log_grid", action="store_true", default=None)
    s.add_argument("--n-max", dest="n_max", type=int)
    s.add_argument("--format", choices=("csv", "json"))
    s.add_argument("--output")
    s.add_argument("--jobs", type=int)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("validate", help="run a named check suite")
    v.add_argument("suite", choices=sorted(SUITES))
    v.add_argument("--output")
    v.set_defaults(func=cmd_validate)

    d = sub.add_parser("dipole", help="angular eigenvalues and chi, or the critical dipole")
    d.add_argument("--d", type=float)
    d.add_argument("--m", type=int, default=0)
    d.add_argument("--size", type=int, default=dipole.DEFAULT_SIZE)
    d.add_argument("--critical", action="store_true", default=None)
    d.add_argument("--tol", type=float, default=1e-8)
    d.add_argument("--output")
    d.set_defaults(func=cmd_dipole)

    e = sub.add_parser("spectrum", help="bound states of the exponential potential")
    e.add_argument("--lambda", dest="lam", type=float, required=False)
    e.add_argument("--nu", type=float)
    e.add_argument("--parity", choices=("odd", "even"), default="odd")
    e.add_argument("--count", type=int, default=3)
    e.add_argument("--output")
    e.set_defaults(func=cmd_spectrum)

    o = sub.add_parser("ortho", help="one discrete-Bessel orthogonality integral")
    o.add_argument("--pair", choices=("KK", "JJ", "KJ"), default="KK")
    o.add_argument("--weight", choices=("inverse", "unit"), default="inverse")
    o.add_argument("--nu", type=float)
    o.add_argument("--n", type=int, default=0)
    o.add_argument("--m", type=int, default=0)
    o.add_argument("--output")
    o.set_defaults(func=cmd_ortho)

    y = sub.add_parser("poly", help="dump a coefficient sequence")
    y.add_argument("--family", choices=recursion.TAGS)
    y.add_argument("--nu", type=float)
    y.add_argument("--z", type=float)
    y.add_argument("--Lambda", type=float)
    y.add_argument("--zeta-k2", dest="zeta_k2", type=float)
    y.add_argument("--a", type=float)
    y.add_argument("--b", type=float)
    y.add_argument("--alpha", type=float)
    y.add_argument("--beta", type=float)
    y.add_argument("--x", type=float)
    y.add_argument("--n-max", dest="n_max", type=int, default=20)
    y.add_argument("--format", choices=("csv", "json"))
    y.add_argument("--output")
    y.set_defaults(func=cmd_poly)
    p.subcommands = {"solve": s, "validate": v, "dipole": d, "spectrum": e, "ortho": o, "poly": y}
    return p


_REQUIRED = {
    "spectrum": ("lam", "nu"),
    "ortho": ("nu",),
    "poly": ("family",),
    "solve": ("model",),
}


_EXCLUSIVE = {"energy": "energy_sweep", "energy_sweep": "energy"}


def _flag_given(sub_parser, dest, argv):
    if dest is None:
        return False
    for action in sub_parser._actions:
        if action.dest == dest:
            return any(arg == opt or arg.startswith(opt + "=")
                       for opt in action.option_strings for arg in argv)
    return False


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"config: cannot read {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config: invalid JSON in {path!r}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise UsageError("config: top level must be a JSON object")
    return data


def parse_args(argv):
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.config:
        config = _load_config(ns.config)
        sub_parser = parser.subcommands[ns.command]
        known = {a.dest for a in sub_parser._actions}
        aliases = {dest: dest for dest in known}
        for a in sub_parser._actions:
            for opt in a.option_strings:
                aliases[opt.lstrip("-").replace("-", "_")] = a.dest
        for key, value in config.items():
            dest = aliases.get(key)
            if dest is None or dest not in known or dest in ("help", "func"):
                raise UsageError(f"config: unknown field {key!r} for command {ns.command!r}")
            action = next(a for a in sub_parser._actions if a.dest == dest)
            if _flag_given(sub_parser, dest, argv) or _flag_given(sub_parser, _EXCLUSIVE.get(dest), argv):
                continue
            if action.choices is not None and value not in action.choices:
                raise UsageError(f"config: {key}: {value!r} not in {list(action.choices)}")
            if action.type is not None and value is not None:
                try:
                    value = action.type(value)
                except (TypeError, ValueError):
                    raise UsageError(f"config: {key}: cannot convert {value!r}") from None
            setattr(ns, dest, value)
    for key in _REQUIRED.get(ns.command, ()):
        if getattr(ns, key, None) is None:
            raise UsageError(f"{key}: required")
    if ns.command == "solve" and ns.jobs is None:
        ns.jobs = _default_jobs()
    return ns


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        ns = parse_args(argv)
        return ns.func(ns)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except SupercriticalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SUPERCRITICAL
    except (DomainError, DegenerateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (AccuracyError, NotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
