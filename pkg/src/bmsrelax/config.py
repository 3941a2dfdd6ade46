"""Dotted-key configuration shared by the command-line front end.

Values come from per-command defaults, then an optional ``key=value`` file,
then command-line flags.  Every key is parsed and range-checked before any
computation starts; unknown keys are errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

from .errors import ConfigError
from .models import CouplingKind, NONLOCAL_KINDS


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"not a number: {text!r}") from None


def _positive(text: str) -> float:
    x = _float(text)
    if not (x > 0 and math.isfinite(x)):
        raise ConfigError(f"expected a positive finite number, got {text!r}")
    return x


def _beta(text: str):
    if text.strip().lower() == "auto":
        return "auto"
    x = _float(text)
    if not x > 0:
        raise ConfigError(f"beta must be > 0 (or inf, or auto), got {text!r}")
    return x


def _optional_nonneg(text: str):
    if text.strip().lower() in ("", "none"):
        return None
    x = _float(text)
    if not (x >= 0 and math.isfinite(x)):
        raise ConfigError(f"expected a non-negative number, got {text!r}")
    return x


def _probability(text: str) -> float:
    x = _float(text)
    if not 0 < x <= 1:
        raise ConfigError(f"expected a probability in (0, 1], got {text!r}")
    return x


def _int_at_least(lo: int) -> Callable[[str], int]:
    def parse(text: str) -> int:
        try:
            x = int(text)
        except ValueError:
            raise ConfigError(f"not an integer: {text!r}") from None
        if x < lo:
            raise ConfigError(f"expected an integer >= {lo}, got {x}")
        return x

    return parse


def _choice(*options: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        text = text.strip()
        if text not in options:
            raise ConfigError(f"expected one of {', '.join(options)}; got {text!r}")
        return text

    return parse


def _sizes(text: str) -> tuple[int, ...]:
    """Comma list of integers; ``a:b:step`` ranges and ``2^a..2^b`` allowed."""
    out: list[int] = []
    for part in text.replace(" ", "").split(","):
        if not part:
            continue
        try:
            if part.startswith("2^") and ".." in part:
                a, b = part[2:].split("..2^")
                out.extend(2**k for k in range(int(a), int(b) + 1))
            elif ":" in part:
                a, b, *step = (int(x) for x in part.split(":"))
                out.extend(range(a, b + 1, step[0] if step else 1))
            else:
                out.append(int(part))
        except ValueError:
            raise ConfigError(f"bad size entry {part!r}") from None
    if not out:
        raise ConfigError("empty size list")
    if any(b <= a for a, b in zip(out, out[1:])):
        raise ConfigError("sizes must be strictly increasing")
    if out[0] < 1:
        raise ConfigError("sizes must be >= 1")
    return tuple(out)


def _energies(text: str):
    if text.strip().lower() in ("", "none"):
        return None
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(f"bad energy list {text!r}") from None


def _lamb_shift(text: str) -> dict[float, complex]:
    """``omega:value`` pairs; a real value v means sigma = i v."""
    table: dict[float, complex] = {}
    for part in text.replace(" ", "").split(","):
        if not part:
            continue
        try:
            w, v = part.split(":")
            val = complex(v)
        except ValueError:
            raise ConfigError(f"bad lamb-shift entry {part!r}") from None
        if val.imag == 0:
            val = complex(0, val.real)
        if val.real != 0:
            raise ConfigError(f"lamb-shift values must be imaginary, got {v!r}")
        table[float(w)] = val
    return table


def _solution(text: str) -> str:
    text = text.strip()
    if text in ("zeros", "ones") or (text and set(text) <= {"0", "1"}):
        return text
    raise ConfigError(f"solution must be zeros, ones or a bitstring; got {text!r}")


@dataclass(frozen=True)
class Key:
    parse: Callable[[str], Any]
    help: str


KEYS: dict[str, Key] = {
    "bath.family": Key(_choice("flat", "ohmic"), "spectral density family"),
    "bath.amplitude": Key(_positive, "g for flat, slope for ohmic"),
    "bath.beta": Key(_beta, "inverse temperature; inf = zero temperature; auto = calibrate"),
    "bath.gamma_zero": Key(_optional_nonneg, "explicit gamma(0) (needed for flat + coherences)"),
    "bath.lamb_shift": Key(_lamb_shift, "omega:sigma pairs, e.g. 1:0.3,0:-0.1"),
    "model.kind": Key(_choice("oracle", "ladder", "dicke"), "system family"),
    "model.n": Key(_int_at_least(1), "qubit count"),
    "model.delta_e": Key(_positive, "energy gap / ladder spacing"),
    "model.omega0": Key(_positive, "Dicke level splitting"),
    "model.solution": Key(_solution, "ground-state bitstring (zeros, ones, or explicit)"),
    "model.energies": Key(_energies, "explicit shell energies E_0..E_n"),
    "coupling.kind": Key(_choice(*(k.value for k in CouplingKind)), "coupling operator"),
    "coupling.lambda": Key(_positive, "system-bath coupling strength"),
    "method": Key(_choice("rate", "quantum", "both"), "dynamics"),
    "sizes": Key(_sizes, "sweep sizes: N for nonlocal, n otherwise"),
    "init": Key(_choice("auto", "uniform", "superposition", "top_shell"), "initial state"),
    "calibration.target": Key(_probability, "Gibbs ground probability used to fix beta"),
    "calibration.threshold": Key(_probability, "ground population defining relaxation"),
    "output": Key(str, "output path, - for stdout"),
    "jobs": Key(_int_at_least(1), "worker processes"),
    "sim.engine": Key(_choice("reduced", "oracle"), "reduced equations or brute-force oracle"),
    "sim.t_end": Key(_positive, "final time"),
    "sim.points": Key(_int_at_least(2), "number of output times"),
    "sim.dump": Key(_choice("reduced", "density"), "reduced variables or full density matrix"),
    "dicke.points": Key(_int_at_least(100), "geometric grid points per curve"),
}

COMMON = {"output": "-", "jobs": "1"}

DEFAULTS: dict[str, dict[str, str]] = {
    "sweep-nonlocal": {
        "coupling.kind": "projector",
        "method": "both",
        "sizes": "2^4..2^12",
        "bath.family": "flat",
        "bath.amplitude": "2",
        "bath.beta": "auto",
        "model.delta_e": "1",
        "model.solution": "zeros",
        "coupling.lambda": "0.01",
        "init": "superposition",
        "calibration.target": "0.95",
        "calibration.threshold": "0.9",
    },
    "sweep-ladder": {
        "method": "both",
        "sizes": "25:400:25",
        "bath.family": "flat",
        "bath.amplitude": "2",
        "bath.beta": "auto",
        "bath.gamma_zero": "none",
        "model.delta_e": "1",
        "model.energies": "none",
        "coupling.lambda": "0.01",
        "init": "auto",
        "calibration.target": "0.95",
        "calibration.threshold": "0.9",
    },
    "dicke": {
        "sizes": "20,40,80",
        "bath.amplitude": "1",
        "bath.beta": "inf",
        "model.omega0": "1",
        "coupling.lambda": "0.1",
        "dicke.points": "5000",
    },
    "simulate": {
        "model.kind": "oracle",
        "model.n": "2",
        "model.delta_e": "1",
        "model.solution": "zeros",
        "model.energies": "none",
        "coupling.kind": "projector",
        "coupling.lambda": "0.1",
        "method": "quantum",
        "bath.family": "flat",
        "bath.amplitude": "2",
        "bath.beta": "1",
        "bath.gamma_zero": "none",
        "bath.lamb_shift": "",
        "init": "superposition",
        "sim.engine": "reduced",
        "sim.t_end": "1000",
        "sim.points": "101",
        "sim.dump": "reduced",
    },
    "validate": {},
}
for _d in DEFAULTS.values():
    for _k, _v in COMMON.items():
        _d.setdefault(_k, _v)


def read_config_file(path: str | Path) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment."""
    out: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def resolve(command: str, file_values: dict[str, str], flag_values: dict[str, str]) -> dict[str, Any]:
    """Merge defaults, file and flags; parse and cross-check every value."""
    defaults = DEFAULTS[command]
    raw = dict(defaults)
    for source in (file_values, flag_values):
        for key, value in source.items():
            if key not in KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            if key not in defaults:
                raise ConfigError(f"key {key!r} does not apply to {command}")
            raw[key] = value
    cfg = {key: KEYS[key].parse(value) for key, value in raw.items()}
    _cross_check(command, cfg)
    return cfg


def _cross_check(command: str, cfg: dict[str, Any]):
    if "calibration.target" in cfg and cfg["calibration.threshold"] >= cfg["calibration.target"]:
        raise ConfigError("calibration.threshold must be below calibration.target")
    if command == "sweep-nonlocal":
        if CouplingKind(cfg["coupling.kind"]) not in NONLOCAL_KINDS:
            raise ConfigError("sweep-nonlocal needs a nonlocal coupling kind")
        if cfg["sizes"][0] < 2:
            raise ConfigError("state counts must be >= 2")
        if cfg["coupling.kind"] == "hadamard" and any(N & (N - 1) for N in cfg["sizes"]):
            raise ConfigError("hadamard coupling needs power-of-two state counts")
        if cfg["init"] in ("top_shell", "auto"):
            raise ConfigError("nonlocal sweeps start from uniform or superposition")
    if command == "sweep-ladder":
        if cfg["sizes"][-1] > 1000:
            raise ConfigError("ladder sizes must lie in [1, 1000]")
        if cfg["model.energies"] is not None:
            if len(cfg["sizes"]) != 1 or len(cfg["model.energies"]) != cfg["sizes"][0] + 1:
                raise ConfigError("model.energies needs a single size n and n+1 energies")
    if command == "dicke":
        if cfg["bath.beta"] == "auto":
            raise ConfigError("dicke needs an explicit beta")
        if cfg["sizes"][-1] > 1000:
            raise ConfigError("dicke sizes must lie in [1, 1000]")
    if command == "simulate":
        if cfg["bath.beta"] == "auto":
            raise ConfigError("simulate needs an explicit beta")
        if cfg["model.kind"] == "oracle" and cfg["coupling.kind"] == "collective_bitflip":
            raise ConfigError("oracle model takes a nonlocal coupling")


def solution_index(text: str, n: int) -> int:
    if text == "zeros":
        return 0
    if text == "ones":
        return (1 << n) - 1
    if len(text) > n:
        raise ConfigError(f"solution {text!r} longer than {n} qubits")
    return int(text, 2)


def format_header(command: str, cfg: dict[str, Any]) -> list[str]:
    lines = [f"# command = {command}"]
    for key in sorted(cfg):
        if key == "jobs":
            continue  # parallelism must not change the output
        lines.append(f"# {key} = {format_value(cfg[key])}")
    return lines


def format_value(value) -> str:
    if isinstance(value, float):
        return fmt(value)
    if isinstance(value, tuple):
        return ",".join(format_value(v) for v in value)
    if isinstance(value, dict):
        return ",".join(f"{fmt(k)}:{fmt(v.imag)}" for k, v in sorted(value.items()))
    if value is None:
        return "none"
    return str(value)


def fmt(x: float) -> str:
    """17 significant digits, stable across runs."""
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")
