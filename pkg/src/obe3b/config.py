"""JSON run configuration, validated before anything is computed.

Example::

    {
      "system": {"name": "gauss3b"},
      "sector": {"L": 0, "parity": 1, "exchange": "three_identical", "sigma": 1},
      "basis": {"qmax": 24},
      "variational": {"mode": "fixed_a", "a": 1.6365},
      "output": {"n_states": 3}
    }

An explicit system replaces ``name`` with masses and kernels::

    "system": {
      "masses": [1, 1, 1],
      "kinematics": "nonrelativistic",
      "potentials": {"12": [{"type": "power", "alpha": -1, "beta": -1}]},
      "three_body": [{"type": "gaussian", "alpha": 0.5, "beta": 0.1}]
    }
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .basis import SectorSpec
from .matel import ConfigError, SystemConfig
from .solver import VariationalProtocol
from .systems import BUILTIN_SYSTEMS, builtin_system
from .talmi import Gaussian, Power, SqrtShifted

__all__ = ["RunConfig", "load_config", "parse_config", "parse_kernel", "config_hash"]

_SECTIONS = {"system", "sector", "basis", "variational", "output", "tables"}
_SYSTEM_KEYS = {"name", "masses", "kinematics", "potentials", "three_body"}
_SECTOR_KEYS = {"L", "parity", "exchange", "sigma"}
_BASIS_KEYS = {"qmax"}
_VAR_KEYS = {"mode", "a", "a_range", "optimize_at_Q", "target", "tolerance", "scan_points"}
_OUTPUT_KEYS = {"format", "path", "n_states"}
_TABLES_KEYS = {"path"}


def _check_keys(obj, allowed: set, where: str, required: set = frozenset()):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    missing = set(required) - set(obj)
    if missing:
        raise ConfigError(f"{where}: missing keys {sorted(missing)}")


def _number(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {x!r}")
    return float(x)


def _int(x, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ConfigError(f"{where}: expected an integer, got {x!r}")
    return x


def parse_kernel(obj, where: str = "kernel"):
    _check_keys(obj, {"type", "alpha", "beta"}, where, {"type"})
    kind = obj["type"]
    try:
        if kind == "power":
            return Power(_number(obj["alpha"], where), _number(obj["beta"], where))
        if kind == "gaussian":
            return Gaussian(_number(obj["alpha"], where), _number(obj["beta"], where))
        if kind == "sqrt_shifted":
            return SqrtShifted(_number(obj["alpha"], where))
    except KeyError as e:
        raise ConfigError(f"{where}: kernel {kind!r} needs {e.args[0]!r}") from None
    except ValueError as e:
        raise ConfigError(f"{where}: {e}") from None
    raise ConfigError(f"{where}: unknown kernel type {kind!r} (power, gaussian, sqrt_shifted)")


def _kernel_list(obj, where: str) -> tuple:
    if isinstance(obj, dict):
        obj = [obj]
    if not isinstance(obj, list):
        raise ConfigError(f"{where}: expected a kernel or a list of kernels")
    return tuple(parse_kernel(k, f"{where}[{i}]") for i, k in enumerate(obj))


def _parse_system(obj) -> SystemConfig:
    _check_keys(obj, _SYSTEM_KEYS, "system")
    if "name" in obj:
        if set(obj) != {"name"}:
            raise ConfigError("system: 'name' cannot be combined with explicit fields")
        if obj["name"] not in BUILTIN_SYSTEMS:
            raise ConfigError(f"system: unknown name {obj['name']!r}; choose from {sorted(BUILTIN_SYSTEMS)}")
        return builtin_system(obj["name"])
    if "masses" not in obj:
        raise ConfigError("system: give either 'name' or 'masses'")
    masses = obj["masses"]
    if not isinstance(masses, list) or len(masses) != 3:
        raise ConfigError("system.masses: expected three numbers")
    m = [_number(x, "system.masses") for x in masses]
    pots = obj.get("potentials", {})
    _check_keys(pots, {"12", "13", "23"}, "system.potentials")
    kw = {f"v{p}": _kernel_list(pots[p], f"system.potentials.{p}") for p in pots}
    three = obj.get("three_body")
    if three is not None:
        kw["three_body"] = _kernel_list(three, "system.three_body")
    return SystemConfig(*m, kinematics=obj.get("kinematics", "nonrelativistic"), **kw)


@dataclass(frozen=True)
class RunConfig:
    system: SystemConfig
    sector: SectorSpec
    protocol: VariationalProtocol
    n_states: int = 5
    output_format: str = "json"
    output_path: str | None = None
    tables_path: str | None = None
    raw: dict = field(default_factory=dict, compare=False)


def parse_config(obj: dict) -> RunConfig:
    _check_keys(obj, _SECTIONS, "config", {"system", "sector", "basis"})
    system = _parse_system(obj["system"])

    sec = obj["sector"]
    _check_keys(sec, _SECTOR_KEYS, "sector", {"L", "parity"})
    basis = obj["basis"]
    _check_keys(basis, _BASIS_KEYS, "basis", {"qmax"})
    qmax = _int(basis["qmax"], "basis.qmax")
    try:
        sector = SectorSpec(_int(sec["L"], "sector.L"), _int(sec["parity"], "sector.parity"),
                            sec.get("exchange", "three_identical"), _int(sec.get("sigma", 1), "sector.sigma"), qmax)
    except ValueError as e:
        raise ConfigError(f"sector: {e}") from None

    var = obj.get("variational", {})
    _check_keys(var, _VAR_KEYS, "variational")
    kw = {}
    if "a_range" in var:
        r = var["a_range"]
        if not isinstance(r, list) or len(r) != 2:
            raise ConfigError("variational.a_range: expected [low, high]")
        kw["a_range"] = (_number(r[0], "a_range"), _number(r[1], "a_range"))
    for k in ("a", "tolerance"):
        if k in var:
            kw[k] = _number(var[k], f"variational.{k}")
    for k in ("optimize_at_Q", "target", "scan_points"):
        if k in var:
            kw[k] = _int(var[k], f"variational.{k}")
    protocol = VariationalProtocol(mode=var.get("mode", "golden_section"), **kw)
    if protocol.optimize_at_Q is not None and protocol.optimize_at_Q > qmax:
        raise ConfigError("variational.optimize_at_Q exceeds basis.qmax")

    out = obj.get("output", {})
    _check_keys(out, _OUTPUT_KEYS, "output")
    fmt = out.get("format", "json")
    if fmt != "json":
        raise ConfigError(f"output.format: only 'json' is supported, got {fmt!r}")
    tables = obj.get("tables", {})
    _check_keys(tables, _TABLES_KEYS, "tables")
    return RunConfig(system, sector, protocol, _int(out.get("n_states", 5), "output.n_states"), fmt,
                     out.get("path"), tables.get("path"), obj)


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise FileNotFoundError(f"cannot read config {path}: {e}") from e
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON ({e})") from None
    return parse_config(obj)


def config_hash(cfg: RunConfig) -> str:
    canon = json.dumps(cfg.raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()
