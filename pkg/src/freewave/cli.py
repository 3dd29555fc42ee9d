"""Command-line front end.

Usage::

    freewave solve --k 1 --amplitude 0.05 --n 64 --out run1
    freewave --config run.toml --steps 200

Exit codes: 0 success, 2 solver did not converge, 3 invalid configuration,
1 unexpected failure (for instance an unwritable output directory).
Every outcome, including errors, is serialized to ``<out>/report.json``.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import __version__
from .errors import (BlowUp, FlatCollapse, InvalidArgument, MaxIterExceeded,
                     ResolutionInsufficient, SolverDivergence)
from .report import SCHEMA_VERSION, emit_report, read_profile, write_profile

log = logging.getLogger("freewave.cli")

COMMANDS = ("solve", "sweep", "rayleigh", "evolve", "validate", "hodge")
SUITES = ("trivial", "profile")
EXIT_OK, EXIT_FAILED, EXIT_NONCONVERGED, EXIT_CONFIG = 0, 1, 2, 3
NONCONVERGENCE = (MaxIterExceeded, SolverDivergence, ResolutionInsufficient, BlowUp, FlatCollapse)


class ConfigError(InvalidArgument):
    pass


@dataclass
class RunConfig:
    command: str = "solve"
    k: float = 1.0
    amplitude: float | None = None
    amplitudes: list | None = None
    lam: float = 1.0
    sigma: float = 0.0
    mass: float = 0.05
    n: int = 64
    m: int = 24
    tol: float | None = None
    max_iter: int | None = None
    dt: float | None = None
    steps: int = 100
    out: str = "out"
    threads: int = 1
    suite: str = "trivial"
    input: str | None = None

    # config-file / flag name -> attribute
    ALIASES = {"lambda": "lam", "mass_m": "mass"}

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; expected one of {COMMANDS}")
        _positive("k", self.k)
        _positive("lambda", self.lam)
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ConfigError("sigma must be nonnegative")
        if not math.isfinite(self.mass):
            raise ConfigError("mass must be finite")
        if self.amplitude is not None and not (math.isfinite(self.amplitude)
                                               and self.amplitude >= 0):
            raise ConfigError("amplitude must be nonnegative")
        if self.amplitudes is not None:
            if any(not (math.isfinite(a) and a >= 0) for a in self.amplitudes):
                raise ConfigError("amplitude must be nonnegative")
        _integer("n", self.n, 4)
        if self.n % 2:
            raise ConfigError("n must be even")
        _integer("m", self.m, 8)
        _integer("steps", self.steps, 0)
        _integer("threads", self.threads, 1)
        if self.max_iter is not None:
            _integer("max_iter", self.max_iter, 1)
        if self.tol is not None:
            _positive("tol", self.tol)
        if self.dt is not None:
            _positive("dt", self.dt)
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}; expected one of {SUITES}")
        if self.suite == "profile" and self.command == "validate" and not self.input:
            raise ConfigError("suite 'profile' needs an input profile CSV")
        return self

    def as_dict(self):
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["lambda"] = d.pop("lam")
        return d


def _positive(name, v):
    if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
        raise ConfigError(f"{name} must be positive")


def _integer(name, v, lo):
    if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < lo:
        raise ConfigError(f"{name} must be an integer >= {lo}")


_FIELD_TYPES = {"k": float, "amplitude": float, "lam": float, "sigma": float, "mass": float,
                "tol": float, "dt": float, "n": int, "m": int, "steps": int, "threads": int,
                "max_iter": int, "command": str, "out": str, "suite": str, "input": str}


def _coerce(name, value):
    if name == "amplitudes":
        if not isinstance(value, (list, tuple)):
            raise ConfigError("amplitudes must be a list of numbers")
        return [float(_coerce("amplitude", v)) for v in value]
    kind = _FIELD_TYPES[name]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{name} must be a number")
        return float(value)
    if kind is int:
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{name} must be an integer")
        return value
    if not isinstance(value, str):
        raise ConfigError(f"{name} must be a string")
    return value


def load_config(path) -> dict:
    """Read a flat TOML file; unknown keys are rejected."""
    import tomli

    try:
        with open(path, "rb") as fh:
            raw = tomli.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    out = {}
    known = {f.name for f in fields(RunConfig)}
    for key, value in raw.items():
        name = RunConfig.ALIASES.get(key, key)
        if name not in known:
            raise ConfigError(f"unknown config key {key!r}")
        out[name] = _coerce(name, value)
    return out


def build_parser():
    p = argparse.ArgumentParser(prog="freewave", description=__doc__.split("\n")[0])
    p.add_argument("positional_command", nargs="?", choices=COMMANDS, metavar="COMMAND")
    p.add_argument("--config")
    p.add_argument("--command", choices=COMMANDS)
    p.add_argument("--k", type=float)
    p.add_argument("--amplitude", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--mass", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", dest="max_iter", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--out")
    p.add_argument("--threads", type=int)
    p.add_argument("--suite", choices=SUITES)
    p.add_argument("--input")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def resolve_config(args) -> RunConfig:
    values = load_config(args.config) if args.config else {}
    cmd = args.positional_command or args.command
    if cmd:
        values["command"] = cmd
    for name in ("k", "amplitude", "lam", "sigma", "mass", "n", "m", "tol", "max_iter", "dt",
                 "steps", "out", "threads", "suite", "input"):
        v = getattr(args, name)
        if v is not None:
            values[name] = v
    return RunConfig(**values).validate()


# ---------------------------------------------------------------- commands

def _meta(cfg, **extra):
    return {"schema_version": SCHEMA_VERSION, "package_version": __version__,
            "numpy_version": np.__version__, "command": cfg.command,
            "config": cfg.as_dict(), **extra}


def _wave_profile_rows(wave):
    r = wave.residuals
    return (wave.zeta.x, wave.zeta.values, wave.phi_p_s.values, r.kinematic.values,
            r.bernoulli.values)


def _solve_opts(cfg, tol_default=1e-11, iter_default=12):
    from .solvers import SolveOptions
    return SolveOptions(tol=cfg.tol or tol_default, max_iter=cfg.max_iter or iter_default,
                        m=cfg.m)


def _params(cfg):
    from .geometry import ProblemParams
    return ProblemParams(lam=cfg.lam, sigma=cfg.sigma, period=2 * math.pi / cfg.k,
                         mass=cfg.mass)


def cmd_solve(cfg, out):
    from .solvers import newton_traveling
    if cfg.amplitude is None:
        raise ConfigError("solve needs an amplitude")
    opts = _solve_opts(cfg)
    wave = newton_traveling(cfg.k, cfg.amplitude, _params(cfg), opts, n=cfg.n)
    write_profile(out / "profile.csv", *_wave_profile_rows(wave))
    res = wave.summary()
    res["residual_history"] = list(wave.history)
    return {"status": "ok", "tolerances": {"newton": opts.tol, "harmonic": opts.harmonic_tol},
            "resolution": {"n": cfg.n, "m": cfg.m}, "result": res,
            "files": ["profile.csv"]}, EXIT_OK


def _sweep_amplitudes(cfg):
    if cfg.amplitudes:
        return cfg.amplitudes
    top = cfg.amplitude if cfg.amplitude is not None else 0.05
    if top < 0.01:
        raise ConfigError("sweep needs a final amplitude >= 0.01")
    return [float(a) for a in np.linspace(0.01, top, 5)]


def cmd_sweep(cfg, out):
    from .solvers import continuation_sweep
    amps = _sweep_amplitudes(cfg)
    opts = _solve_opts(cfg)
    sweep = continuation_sweep(cfg.k, amps, _params(cfg), opts, n=cfg.n)
    files = []
    for i, w in enumerate(sweep.waves):
        name = f"profile_{i:03d}.csv"
        write_profile(out / name, *_wave_profile_rows(w))
        files.append(name)
    branch = [(w.amplitude, w.lam, w.residuals.max_norm) for w in sweep.waves]
    report = {"status": "ok" if sweep.complete else "partial",
              "tolerances": {"newton": opts.tol}, "resolution": {"n": cfg.n, "m": cfg.m},
              "requested_amplitudes": list(amps),
              "branch": [w.summary() for w in sweep.waves], "files": files + ["branch.csv"]}
    code = EXIT_OK
    if sweep.failure is not None:
        report["error"] = _error_record(sweep.failure)
        code = EXIT_NONCONVERGED
    return report, code, {"branch.csv": (("a", "lambda", "residual"), branch)}


def _rayleigh_rows(sol):
    z = sol.zeta
    zero = np.zeros(z.n)
    # the stream formulation has psi = 1 on the surface: no kinematic defect
    return z.x, z.values, zero, zero, sol.residual.values


def _rayleigh_summary(sol, mass):
    q = np.asarray(sol.quotients)
    return {"quotient": sol.lam, "best_iteration": sol.iterations,
            "accepted_steps": len(q) - 1, "converged": sol.converged,
            "stream_bernoulli_max": sol.residual_norm, "mass_target": mass,
            "max_mass_error": float(np.max(np.abs(np.asarray(sol.masses) - mass))),
            "quotient_first": float(q[0]), "quotient_last": float(q[-1]),
            "monotone": bool(np.all(np.diff(q) <= 0))}


def cmd_rayleigh(cfg, out):
    from .solvers import rayleigh_minimize
    opts = _solve_opts(cfg, tol_default=1e-6, iter_default=200)
    try:
        sol = rayleigh_minimize(cfg.mass, cfg.k, _params(cfg), opts, n=cfg.n)
    except MaxIterExceeded as exc:
        sol = exc.best
        write_profile(out / "profile.csv", *_rayleigh_rows(sol))
        return {"status": "not_converged", "error": _error_record(exc),
                "result": _rayleigh_summary(sol, cfg.mass), "files": ["profile.csv"]}, \
            EXIT_NONCONVERGED
    write_profile(out / "profile.csv", *_rayleigh_rows(sol))
    return {"status": "ok", "result": _rayleigh_summary(sol, cfg.mass),
            "files": ["profile.csv"]}, EXIT_OK


def cmd_evolve(cfg, out):
    from .dynamics import canonical_rhs, evolve, linear_frequency, standing_wave_state
    from .harmonic import HarmonicSolver
    params = _params(cfg)
    a = cfg.amplitude if cfg.amplitude is not None else 0.01
    state = standing_wave_state(cfg.n, a, 1, params.period)
    period_t = 2 * math.pi / linear_frequency(cfg.k, cfg.lam)
    dt = cfg.dt or period_t / 200
    tol = cfg.tol or 1e-8
    solver = HarmonicSolver()
    traj = evolve(state, params, dt, cfg.steps, m=cfg.m, tol=tol, solver=solver)
    final = traj.final
    kin = np.zeros(cfg.n)
    bern = np.zeros(cfg.n)
    if cfg.steps >= 2:
        # second-order backward differences of the last three states against the RHS
        s = traj.states
        r = canonical_rhs(final, params, cfg.m, tol, solver)
        zt = (3 * s[-1].zeta.values - 4 * s[-2].zeta.values + s[-3].zeta.values) / (2 * dt)
        pt = (3 * s[-1].phi_s.values - 4 * s[-2].phi_s.values + s[-3].phi_s.values) / (2 * dt)
        kin = zt - r.zeta_dot.values
        bern = pt - r.phi_dot.values
    write_profile(out / "profile.csv", final.zeta.x, final.zeta.values, final.phi_s.values,
                  kin, bern)
    rows = list(zip(traj.times, traj.energy, traj.mass))
    report = {"status": "ok", "resolution": {"n": cfg.n, "m": cfg.m},
              "time_step": dt, "steps": cfg.steps, "linear_period": period_t,
              "result": {"energy_initial": float(traj.energy[0]),
                         "energy_final": float(traj.energy[-1]),
                         "relative_energy_drift": traj.relative_energy_drift(),
                         "mass_drift": traj.mass_drift(),
                         "pde_audit_kinematic_max": float(np.max(np.abs(kin))),
                         "pde_audit_bernoulli_max": float(np.max(np.abs(bern)))},
              "files": ["profile.csv", "conservation.csv"]}
    return report, EXIT_OK, {"conservation.csv": (("t", "H", "mass"), rows)}


def trivial_suite(n=32, m=16):
    """Identity checks that must hold to round-off."""
    from .dynamics import CanonicalState, canonical_rhs
    from .geometry import ProblemParams, SurfaceProfile, SurfaceTrace
    from .harmonic import HarmonicSolver, dno_apply, harmonic_extend
    from .residuals import boost_identity_check, traveling_residuals

    solver = HarmonicSolver()
    flat = SurfaceProfile.flat(n)
    zero = SurfaceTrace(np.zeros(n))
    checks = {}
    r = canonical_rhs(CanonicalState(flat, zero), ProblemParams(), m, solver=solver)
    checks["rest_state_rhs"] = max(r.zeta_dot.max_norm(), r.phi_dot.max_norm())
    worst = 0.0
    for lam in (0.5, 1.0, 2.0):
        for sigma in (0.0, 0.3):
            rep = traveling_residuals(flat, zero, ProblemParams(lam=lam, sigma=sigma), m,
                                      solver=solver)
            worst = max(worst, rep.max_norm)
    checks["uniform_stream_residuals"] = worst
    wavy = SurfaceProfile.from_function(lambda x: 0.1 * np.cos(x), n)
    checks["dno_of_constant"] = dno_apply(wavy, SurfaceTrace(np.full(n, 2.5)), m,
                                          solver=solver).max_norm()
    const = harmonic_extend(wavy, SurfaceTrace(np.full(n, 1.0)), m, solver=solver)
    checks["constant_extension"] = float(np.max(np.abs(const.values - 1.0)))
    field_ = harmonic_extend(flat, SurfaceTrace.from_function(lambda x: 0.1 * np.cos(x), n),
                             m, stream=1.0, solver=solver)
    phi_t = np.zeros(field_.values.shape)
    checks["boost_identity"] = boost_identity_check(field_, phi_t, 0.5, 0.25)
    checks["boost_identity_trivial"] = boost_identity_check(field_, phi_t, 0.0, 0.0)
    return checks


def profile_suite(path, cfg):
    """Recompute the traveling-wave residuals from an emitted profile CSV."""
    from .geometry import ProblemParams, SurfaceProfile, SurfaceTrace
    from .residuals import traveling_residuals
    cols = read_profile(path)
    n = cols["x"].size
    period = 2 * math.pi / cfg.k
    zeta = SurfaceProfile(cols["zeta"], period)
    phi = SurfaceTrace(cols["phi_s"], period)
    rep = traveling_residuals(zeta, phi, ProblemParams(lam=cfg.lam, sigma=cfg.sigma,
                                                       period=period), cfg.m)
    return {"kinematic_max": rep.kinematic_norm, "bernoulli_max": rep.bernoulli_norm,
            "stored_kinematic_max": float(np.max(np.abs(cols["kinematic_residual"]))),
            "stored_bernoulli_max": float(np.max(np.abs(cols["bernoulli_residual"]))),
            "n": n}


def cmd_validate(cfg, out):
    tol = cfg.tol or 1e-10
    if cfg.suite == "trivial":
        checks = trivial_suite()
        ok = all(v < tol for v in checks.values())
    else:
        checks = profile_suite(cfg.input, cfg)
        ok = max(checks["kinematic_max"], checks["bernoulli_max"]) < tol
    return {"status": "ok" if ok else "failed", "suite": cfg.suite, "threshold": tol,
            "checks": checks}, EXIT_OK if ok else EXIT_NONCONVERGED


def cmd_hodge(cfg, out):
    from .fields import VectorField2D, normalized_inner, weyl_hodge
    from .geometry import SurfaceProfile
    from .harmonic import SigmaGrid
    a = cfg.amplitude if cfg.amplitude is not None else 0.0
    zeta = SurfaceProfile.from_function(lambda x: a * np.cos(cfg.k * x), cfg.n,
                                        2 * math.pi / cfg.k)
    g = SigmaGrid(zeta, cfg.m)
    x, y = g.x[None, :], g.y
    harmonic = VectorField2D.gradient_of(g, np.sin(cfg.k * x) * np.cosh(cfg.k * y))
    sx, sy = g.grad(np.sin(cfg.k * x) * y**2)
    rotational = VectorField2D(g, sy, -sx)
    v = harmonic + rotational
    parts = weyl_hodge(v)
    again = weyl_hodge(parts.w)
    pure = weyl_hodge(harmonic)
    checks = {"orthogonality": normalized_inner(parts.w, parts.gradient_part, v),
              "uniqueness": again.gradient_part.max_norm(),
              "harmonic_case_w": pure.w.max_norm(),
              "potential_residual": parts.phi.residual}
    return {"status": "ok", "resolution": {"n": cfg.n, "m": cfg.m}, "checks": checks}, EXIT_OK


HANDLERS = {"solve": cmd_solve, "sweep": cmd_sweep, "rayleigh": cmd_rayleigh,
            "evolve": cmd_evolve, "validate": cmd_validate, "hodge": cmd_hodge}


def _error_record(exc):
    rec = {"type": type(exc).__name__, "message": str(exc)}
    for attr in ("residual", "tail_ratio", "flux"):
        v = getattr(exc, attr, None)
        if v is not None:
            rec[attr] = float(v)
    return rec


def run(cfg: RunConfig) -> int:
    """Execute a validated configuration, write artifacts, return the exit code."""
    from pathlib import Path
    from threadpoolctl import threadpool_limits

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    tables = {}
    with threadpool_limits(limits=cfg.threads):
        try:
            result = HANDLERS[cfg.command](cfg, out)
            if len(result) == 3:
                body, code, tables = result
            else:
                body, code = result
        except InvalidArgument as exc:
            body, code = {"status": "error", "error": _error_record(exc)}, EXIT_CONFIG
        except NONCONVERGENCE as exc:
            body, code = {"status": "not_converged", "error": _error_record(exc)}, \
                EXIT_NONCONVERGED
    body = {**_meta(cfg), **body, "exit_code": code}
    emit_report(body, out, tables)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
    except (InvalidArgument, TypeError) as exc:
        out = args.out or "out"
        body = {"schema_version": SCHEMA_VERSION, "package_version": __version__,
                "status": "error", "error": {"type": "ConfigError", "message": str(exc)},
                "exit_code": EXIT_CONFIG}
        try:
            emit_report(body, out)
        except OSError:
            pass
        print(f"freewave: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return run(cfg)
    except OSError as exc:
        print(f"freewave: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
