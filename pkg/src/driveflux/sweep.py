"""Config-driven parameter sweeps over the three current-calculation methods.

A sweep configuration is a JSON document:

    {
      "schema": 1,
      "model": {"type": "nesb", "epsilon": 1.0},
      "drive": {"eta": 0.1, "omega_d": 0.7},
      "reservoirs": {
        "left":  {"temperature": 1.2, "alpha": 0.001, "omega_c": 10.0},
        "right": {"temperature": 0.4, "alpha": 0.001, "omega_c": 10.0}
      },
      "sweep": {"variable": "omega_d", "start": 0.05, "stop": 0.95,
                "points": 50},
      "methods": ["dqme", "dme", "fme"],
      "floquet": {"n_steps": 4096, "n_t": 512, "m_max": 8},
      "output": "fig2a.csv"
    }

Every key is validated and unknown keys are rejected by name.  All keys
except ``model``, ``sweep`` and ``methods`` have defaults (the common
operating point: alpha=0.001, omega_c=10, left/right temperatures 1.2/0.4,
epsilon=1, no drive).  The optional ``floquet`` section pins the Floquet
discretization exactly; without it the Floquet method refines itself until
currents converge.

Sweep points are independent and may be evaluated across worker threads;
rows come back sorted by sweep value then method name, so identical
configs always produce byte-identical CSV.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .dressed import CurrentReport, dressed_current_report
from .floquet import (FloquetControls, fme_current_report,
                      fme_current_report_converged)
from .models import (CoupledSpinsModel, DriveSpec, KerrModel, ModelSpec,
                     NesbModel, build_rotated)
from .reservoir import Reservoir

__all__ = [
    "ConfigError",
    "SweepConfig",
    "SweepError",
    "SweepRow",
    "bundled_config_path",
    "emit_csv",
    "evaluate_point",
    "list_bundled_configs",
    "load_config",
    "parse_config",
    "rows_to_csv_text",
    "run_sweep",
    "sweep_values",
]

SCHEMA_VERSION = 1
CSV_HEADER = "sweep_var,value,method,j_left,j_right,j_pump"

KNOWN_METHODS = ("dme", "dqme", "fme")
SWEEP_VARIABLES = ("omega_d", "eta", "chi")

_RESERVOIR_DEFAULTS = {
    "left": {"temperature": 1.2, "alpha": 0.001, "omega_c": 10.0},
    "right": {"temperature": 0.4, "alpha": 0.001, "omega_c": 10.0},
}


class ConfigError(ValueError):
    """Invalid sweep configuration; the message names the offending key."""


class SweepError(RuntimeError):
    """A pipeline failure during a sweep, tagged with its parameter value."""


@dataclass(frozen=True)
class SweepConfig:
    model: ModelSpec
    drive: DriveSpec
    reservoirs: tuple[Reservoir, Reservoir]
    sweep_variable: str
    start: float
    stop: float
    points: int
    methods: tuple[str, ...]
    floquet: FloquetControls | None = None
    output: str | None = None


@dataclass(frozen=True)
class SweepRow:
    sweep_var: str
    value: float
    method: str
    report: CurrentReport


def _require_mapping(obj, path: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(f"{path} must be an object")
    return dict(obj)


def _reject_unknown(obj: dict, path: str) -> None:
    if obj:
        key = sorted(obj)[0]
        raise ConfigError(f"unknown key {path}.{key}" if path else
                          f"unknown key {key}")


def _number(obj: dict, key: str, path: str, default=None) -> float:
    if key not in obj:
        if default is None:
            raise ConfigError(f"missing key {path}.{key}")
        return float(default)
    value = obj.pop(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key} must be a number")
    return float(value)


def _integer(obj: dict, key: str, path: str, default=None) -> int:
    if key not in obj:
        if default is None:
            raise ConfigError(f"missing key {path}.{key}")
        return int(default)
    value = obj.pop(key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}.{key} must be an integer")
    return value


def _parse_model(obj, path: str) -> ModelSpec:
    obj = _require_mapping(obj, path)
    kind = obj.pop("type", None)
    if kind is None:
        raise ConfigError(f"missing key {path}.type")
    try:
        if kind == "nesb":
            model = NesbModel(epsilon=_number(obj, "epsilon", path, 1.0))
        elif kind == "coupled_spins":
            model = CoupledSpinsModel(
                epsilon_left=_number(obj, "epsilon_left", path, 1.0),
                epsilon_right=_number(obj, "epsilon_right", path, 1.0),
                hopping=_number(obj, "hopping", path, 0.2))
        elif kind == "kerr":
            model = KerrModel(epsilon=_number(obj, "epsilon", path, 1.0),
                              chi=_number(obj, "chi", path, 0.4),
                              n_max=_integer(obj, "n_max", path, 20))
        else:
            raise ConfigError(f"{path}.type must be one of nesb, "
                              f"coupled_spins, kerr; got {kind!r}")
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    _reject_unknown(obj, path)
    return model


def _parse_drive(obj, path: str) -> DriveSpec:
    obj = _require_mapping(obj, path)
    eta = _number(obj, "eta", path, 0.0)
    omega_d = _number(obj, "omega_d", path, 0.0)
    _reject_unknown(obj, path)
    try:
        return DriveSpec(eta=eta, omega_d=omega_d)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_reservoirs(obj, path: str) -> tuple[Reservoir, Reservoir]:
    obj = _require_mapping(obj, path)
    built = []
    for label in ("left", "right"):
        sub_path = f"{path}.{label}"
        sub = _require_mapping(obj.pop(label, {}), sub_path)
        defaults = _RESERVOIR_DEFAULTS[label]
        kwargs = {key: _number(sub, key, sub_path, defaults[key])
                  for key in ("temperature", "alpha", "omega_c")}
        _reject_unknown(sub, sub_path)
        try:
            built.append(Reservoir(label=label, **kwargs))
        except ValueError as exc:
            raise ConfigError(f"{sub_path}: {exc}") from exc
    _reject_unknown(obj, path)
    return built[0], built[1]


def _parse_methods(value, path: str) -> tuple[str, ...]:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{path} must be a nonempty list of method names")
    out = []
    for method in value:
        if method not in KNOWN_METHODS:
            raise ConfigError(f"{path}: unknown method {method!r}; choose "
                              f"from {', '.join(KNOWN_METHODS)}")
        if method in out:
            raise ConfigError(f"{path}: duplicate method {method!r}")
        out.append(method)
    return tuple(out)


def _parse_floquet(obj, path: str) -> FloquetControls:
    obj = _require_mapping(obj, path)
    n_steps = _integer(obj, "n_steps", path, 4096)
    n_t = _integer(obj, "n_t", path, 512)
    m_max = _integer(obj, "m_max", path, 8)
    _reject_unknown(obj, path)
    try:
        return FloquetControls(n_steps=n_steps, n_t=n_t, m_max=m_max)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_sweep_section(cfg_model: ModelSpec, obj, path: str):
    obj = _require_mapping(obj, path)
    variable = obj.pop("variable", None)
    if variable not in SWEEP_VARIABLES:
        raise ConfigError(f"{path}.variable must be one of "
                          f"{', '.join(SWEEP_VARIABLES)}; got {variable!r}")
    start = _number(obj, "start", path)
    stop = _number(obj, "stop", path)
    points = _integer(obj, "points", path)
    _reject_unknown(obj, path)
    if points < 2:
        raise ConfigError(f"{path}.points must be >= 2, got {points}")
    if not start < stop:
        raise ConfigError(f"{path}.start must be below {path}.stop")
    if start < 0.0:
        raise ConfigError(f"{path}.start must be >= 0 for {variable}")
    if variable == "chi" and not isinstance(cfg_model, KerrModel):
        raise ConfigError(f"{path}.variable chi needs the kerr model")
    return variable, start, stop, points


def _check_fme_usable(cfg: SweepConfig, methods: tuple[str, ...]) -> None:
    if "fme" not in methods:
        return
    if cfg.sweep_variable == "omega_d":
        if cfg.start <= 0.0:
            raise ConfigError("sweep.start: the fme method needs a positive "
                              "drive frequency")
    elif cfg.drive.omega_d <= 0.0:
        raise ConfigError("drive.omega_d: the fme method needs a positive "
                          "drive frequency")


def parse_config(text: str) -> SweepConfig:
    """Validate a JSON sweep document and apply defaults."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    obj = _require_mapping(raw, "")

    schema = _integer(obj, "schema", "", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise ConfigError(f"schema: unsupported version {schema}, "
                          f"expected {SCHEMA_VERSION}")
    if "model" not in obj:
        raise ConfigError("missing key model")
    model = _parse_model(obj.pop("model"), "model")
    drive = _parse_drive(obj.pop("drive", {}), "drive")
    reservoirs = _parse_reservoirs(obj.pop("reservoirs", {}), "reservoirs")
    if "sweep" not in obj:
        raise ConfigError("missing key sweep")
    variable, start, stop, points = _parse_sweep_section(
        model, obj.pop("sweep"), "sweep")
    if "methods" not in obj:
        raise ConfigError("missing key methods")
    methods = _parse_methods(obj.pop("methods"), "methods")
    floquet = None
    if "floquet" in obj:
        floquet = _parse_floquet(obj.pop("floquet"), "floquet")
    output = obj.pop("output", None)
    if output is not None and not isinstance(output, str):
        raise ConfigError("output must be a string path")
    _reject_unknown(obj, "")

    cfg = SweepConfig(model=model, drive=drive, reservoirs=reservoirs,
                      sweep_variable=variable, start=start, stop=stop,
                      points=points, methods=methods, floquet=floquet,
                      output=output)
    _check_fme_usable(cfg, methods)
    return cfg


def load_config(path) -> SweepConfig:
    """Read and validate a sweep configuration file."""
    return parse_config(Path(path).read_text(encoding="utf-8"))


def sweep_values(cfg: SweepConfig) -> np.ndarray:
    return np.linspace(cfg.start, cfg.stop, cfg.points)


def _point_inputs(cfg: SweepConfig, value: float):
    model, drive = cfg.model, cfg.drive
    if cfg.sweep_variable == "omega_d":
        drive = replace(drive, omega_d=value)
    elif cfg.sweep_variable == "eta":
        drive = replace(drive, eta=value)
    else:
        model = replace(model, chi=value)
    return model, drive


def evaluate_point(cfg: SweepConfig, value: float,
                   method: str) -> CurrentReport:
    """Steady-state currents for one sweep value and one method."""
    model, drive = _point_inputs(cfg, float(value))
    reservoirs = list(cfg.reservoirs)
    if method in ("dqme", "dme"):
        system = build_rotated(model, drive)
        return dressed_current_report(system, reservoirs, drive,
                                      traditional=(method == "dme"))
    if method == "fme":
        if cfg.floquet is not None:
            return fme_current_report(model, drive, reservoirs,
                                      controls=cfg.floquet)
        return fme_current_report_converged(model, drive, reservoirs)
    raise ConfigError(f"unknown method {method!r}")


def run_sweep(cfg: SweepConfig, methods=None, threads: int = 1):
    """Evaluate the full grid; rows ordered by sweep value then method.

    Points are independent, so ``threads`` > 1 fans evaluations out to a
    thread pool; ordering and values do not depend on the thread count.
    The first failing point (in output order) aborts the sweep with a
    ``SweepError`` naming the parameter value.
    """
    if methods is None:
        methods = cfg.methods
    else:
        methods = _parse_methods(list(methods), "methods")
        _check_fme_usable(cfg, methods)
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads}")

    tasks = [(float(value), method)
             for value in sweep_values(cfg)
             for method in sorted(methods)]

    def evaluate(task):
        value, method = task
        try:
            return evaluate_point(cfg, value, method), None
        except Exception as exc:
            return None, exc

    if threads == 1:
        outcomes = [evaluate(task) for task in tasks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(evaluate, tasks))
    rows = []
    for (value, method), (report, error) in zip(tasks, outcomes):
        if error is not None:
            raise SweepError(f"method {method} failed at {cfg.sweep_variable}"
                             f"={value:.6g}: {error}") from error
        rows.append(SweepRow(cfg.sweep_variable, value, method, report))
    return rows


def rows_to_csv_text(rows) -> str:
    """Render sweep rows in the fixed CSV schema at full float precision."""
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to emit")
    lines = [CSV_HEADER]
    for row in rows:
        r = row.report
        lines.append(f"{row.sweep_var},{row.value:.16e},{row.method},"
                     f"{r.j_left:.16e},{r.j_right:.16e},{r.j_pump:.16e}")
    return "\n".join(lines) + "\n"


def emit_csv(rows, path) -> None:
    """Write the CSV table; identical rows produce byte-identical files."""
    text = rows_to_csv_text(rows)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


def _config_root():
    return resources.files(__package__).joinpath("configs")


def list_bundled_configs() -> list[str]:
    """Names of the packaged example configurations."""
    root = _config_root()
    return sorted(entry.name[:-len(".json")] for entry in root.iterdir()
                  if entry.name.endswith(".json"))


def bundled_config_path(name: str) -> Path:
    """Filesystem path of a packaged example configuration."""
    path = _config_root().joinpath(f"{name}.json")
    if not path.is_file():
        known = ", ".join(list_bundled_configs())
        raise ConfigError(f"no bundled config {name!r}; available: {known}")
    return Path(str(path))
