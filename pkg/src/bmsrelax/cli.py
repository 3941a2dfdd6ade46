"""Command-line front end: figure sweeps, single trajectories and self-validation.

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 validation failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from contextlib import contextmanager

import numpy as np

from . import config as C
from .bath import BathSpectrum, SpectralDensity
from .errors import ConfigError, NumericalError, ScaleExceededError, UndefinedAtZeroError
from .models import LadderModel, OracleModel
from .oracle import (
    EnergyEigenbasisModel,
    build_quantum_generator,
    build_rate_generator,
    evolve,
    project_reduced,
    superposition_density,
    top_shell_density,
    uniform_density,
)
from .reduced import (
    build_ladder,
    build_two_state,
    ladder_initial_state,
    solve_ladder,
    solve_two_state,
)
from .sweeps import (
    DickeTask,
    LadderTask,
    NonlocalTask,
    dicke_run,
    fit_points,
    ladder_point,
    nonlocal_point,
    parallel_map,
)
from .validation import report, run_validation

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VALIDATION = 0, 1, 2, 3
UNREACHABLE = "UNREACHABLE"

log = logging.getLogger("bmsrelax")


@contextmanager
def _open_output(path: str):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _methods(cfg) -> list[str]:
    return ["rate", "quantum"] if cfg["method"] == "both" else [cfg["method"]]


def _beta_or_none(cfg):
    return None if cfg["bath.beta"] == "auto" else cfg["bath.beta"]


def _emit_sweep(cfg, command: str, size_label: str, points_by_method: dict, out):
    for line in C.format_header(command, cfg):
        print(line, file=out)
    print(f"{size_label},beta,method,t_relax,t_relax_scaled,stationary_ground", file=out)
    for method, points in points_by_method.items():
        for p in points:
            t = UNREACHABLE if p.t_relax is None else C.fmt(p.t_relax)
            ts = UNREACHABLE if p.t_relax is None else C.fmt(p.t_relax * p.time_unit)
            print(f"{p.size},{C.fmt(p.beta)},{method},{t},{ts},{C.fmt(p.stationary)}", file=out)
    for method, points in points_by_method.items():
        fit = fit_points(points)
        if fit is None:
            print(f"# exponent {method} = n/a", file=out)
        else:
            lo, hi = fit.window
            print(
                f"# exponent {method} = {C.fmt(fit.exponent)} "
                f"(window {int(fit.sizes[lo])}..{int(fit.sizes[hi - 1])})",
                file=out,
            )


def cmd_sweep_nonlocal(cfg) -> int:
    points = {}
    for method in _methods(cfg):
        tasks = []
        for N in cfg["sizes"]:
            n = max(1, (N - 1).bit_length())
            w = C.solution_index(cfg["model.solution"], n)
            if w >= N:
                raise ConfigError(f"solution index {w} outside N={N}")
            tasks.append(
                NonlocalTask(
                    cfg["coupling.kind"], method, N, cfg["coupling.lambda"], cfg["bath.amplitude"],
                    cfg["model.delta_e"], _beta_or_none(cfg), cfg["calibration.target"],
                    cfg["calibration.threshold"], cfg["init"], w,
                )
            )
        points[method] = parallel_map(nonlocal_point, tasks, cfg["jobs"])
    with _open_output(cfg["output"]) as out:
        _emit_sweep(cfg, "sweep-nonlocal", "N", points, out)
    return EXIT_OK


def cmd_sweep_ladder(cfg) -> int:
    points = {}
    init = None if cfg["init"] == "auto" else cfg["init"]
    for method in _methods(cfg):
        tasks = [
            LadderTask(
                method, n, cfg["coupling.lambda"], cfg["bath.amplitude"], cfg["model.delta_e"],
                cfg["model.energies"], _beta_or_none(cfg), cfg["calibration.target"],
                cfg["calibration.threshold"], init, cfg["bath.family"], cfg["bath.gamma_zero"],
            )
            for n in cfg["sizes"]
        ]
        points[method] = parallel_map(ladder_point, tasks, cfg["jobs"])
    with _open_output(cfg["output"]) as out:
        _emit_sweep(cfg, "sweep-ladder", "n", points, out)
    return EXIT_OK


def cmd_dicke(cfg) -> int:
    tasks = [
        DickeTask(n, cfg["coupling.lambda"], cfg["bath.amplitude"], cfg["model.omega0"],
                  cfg["bath.beta"], cfg["dicke.points"])
        for n in cfg["sizes"]
    ]
    results = parallel_map(dicke_run, tasks, cfg["jobs"])
    with _open_output(cfg["output"]) as out:
        for line in C.format_header("dicke", cfg):
            print(line, file=out)
        print("n,t,I_rate,I_quantum", file=out)
        for r in results:
            for t, a, b in zip(r.times, r.intensity["rate"], r.intensity["quantum"]):
                print(f"{r.n},{C.fmt(t)},{C.fmt(a)},{C.fmt(b)}", file=out)
        print("# peaks: n,method,t_peak,I_peak,fwhm,energy", file=out)
        for r in results:
            for method in ("rate", "quantum"):
                m = r.metrics[method]
                print(f"# peak {r.n},{method},{C.fmt(m.t_peak)},{C.fmt(m.I_peak)},"
                      f"{C.fmt(m.width)},{C.fmt(m.energy)}", file=out)
            a = r.approx
            print(f"# peak {r.n},approx,{C.fmt(a.t_peak)},{C.fmt(a.I_peak)},"
                  f"{C.fmt(a.width)},{C.fmt(a.energy)}", file=out)
    return EXIT_OK


def _sim_bath(cfg) -> BathSpectrum:
    density = SpectralDensity(cfg["bath.family"], cfg["bath.amplitude"], cfg["bath.gamma_zero"])
    return BathSpectrum(cfg["bath.beta"], density, cfg["bath.lamb_shift"])


def cmd_simulate(cfg) -> int:
    n = cfg["model.n"]
    N = 1 << n
    w = C.solution_index(cfg["model.solution"], n)
    method = cfg["method"]
    if method == "both":
        raise ConfigError("simulate runs a single method")
    init = cfg["init"]
    if init == "auto":
        init = "superposition"
    bath = _sim_bath(cfg)
    lam = cfg["coupling.lambda"]
    times = np.linspace(0.0, cfg["sim.t_end"], cfg["sim.points"])
    kind = cfg["model.kind"]
    if kind == "dicke":
        raise ConfigError("use the dicke command for superradiance curves")
    if kind == "ladder":
        if cfg["model.energies"] is not None:
            ladder = LadderModel(n, cfg["model.energies"], w)
        else:
            ladder = LadderModel.equidistant(n, cfg["model.delta_e"], w)
    engine = cfg["sim.engine"]
    if cfg["sim.dump"] == "density" and engine != "oracle":
        raise ConfigError("density dumps need sim.engine = oracle")
    if engine == "reduced":
        if kind == "oracle":
            if init == "top_shell":
                raise ConfigError("top_shell applies to ladders")
            system = build_two_state(cfg["coupling.kind"], method, N, bath.beta, lam,
                                     cfg["bath.amplitude"], cfg["model.delta_e"], init, w, bath=bath)
            traj = solve_two_state(system, times)
        else:
            system = build_ladder(method, ladder, bath, lam)
            traj = solve_ladder(system, ladder_initial_state(n, init, method), times)
        labels, values = traj.labels, traj.values
    else:
        if kind == "oracle":
            model = EnergyEigenbasisModel.from_oracle(OracleModel(n, cfg["model.delta_e"], w),
                                                      cfg["coupling.kind"])
            variables = "rate" if method == "rate" else (
                "hadamard" if cfg["coupling.kind"] == "hadamard" else "quantum")
        else:
            model = EnergyEigenbasisModel.from_ladder(ladder)
            variables = "shell_populations" if method == "rate" else "shell_coherent"
        rho0 = {"uniform": uniform_density, "superposition": superposition_density}.get(init)
        rho0 = rho0(N) if rho0 else top_shell_density(n, w)
        if method == "rate":
            gen = build_rate_generator(model, bath, lam)
        else:
            include = bool(cfg["bath.lamb_shift"])
            gen = build_quantum_generator(model, bath, lam, include_lamb_shift=include)
        traj = evolve(gen, rho0, times)
        if cfg["sim.dump"] == "density":
            rho = traj.values if traj.values.ndim == 3 else np.array([np.diag(v) for v in traj.values])
            labels = tuple(f"{p}(rho_{a}_{b})" for a in range(N) for b in range(N) for p in ("re", "im"))
            flat = rho.reshape(len(times), -1)
            values = np.empty((len(times), 2 * N * N))
            values[:, 0::2] = flat.real
            values[:, 1::2] = flat.imag
        else:
            values = project_reduced(traj.values, variables, w, n)
            # same column names as the reduced engine
            labels = ("z1", "z2") if kind == "oracle" else tuple(f"z{a}" for a in range(n + 1))
    with _open_output(cfg["output"]) as out:
        for line in C.format_header("simulate", cfg):
            print(line, file=out)
        print(",".join(("t",) + tuple(labels)), file=out)
        for t, row in zip(times, values):
            print(",".join([C.fmt(t)] + [C.fmt(v) for v in np.real(row)]), file=out)
    return EXIT_OK


def cmd_validate(cfg) -> int:
    results = run_validation()
    rep = report(results)
    with _open_output(cfg["output"]) as out:
        json.dump(rep, out, indent=2)
        out.write("\n")
    return EXIT_OK if rep["passed"] else EXIT_VALIDATION


COMMANDS = {
    "sweep-nonlocal": (cmd_sweep_nonlocal, "relaxation-time scaling for nonlocal couplings"),
    "sweep-ladder": (cmd_sweep_ladder, "relaxation-time scaling on the Hamming ladder"),
    "dicke": (cmd_dicke, "superradiant intensity curves and peak metrics"),
    "simulate": (cmd_simulate, "dump a single trajectory"),
    "validate": (cmd_validate, "run the oracle/closed-form self-checks"),
}


class _Parser(argparse.ArgumentParser):
    """Argument errors are configuration errors (exit code 1)."""

    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bmsrelax", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="key = value file providing defaults")
        for key in C.DEFAULTS[name]:
            p.add_argument(f"--{key}", dest=key, default=None, metavar="VALUE",
                           help=f"{C.KEYS[key].help} (default {C.DEFAULTS[name][key] or 'empty'})")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    command = args.command
    flags = {k: v for k, v in vars(args).items() if k in C.KEYS and v is not None}
    try:
        file_values = C.read_config_file(args.config) if args.config else {}
        cfg = C.resolve(command, file_values, flags)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    func = COMMANDS[command][0]
    try:
        return func(cfg)
    except (ConfigError, ScaleExceededError, UndefinedAtZeroError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
