"""Run configuration: strict JSON parsing and canonical echo.

A run is described by one JSON document.  Parsing is strict: unknown keys
anywhere are rejected so a typo in a physics parameter cannot silently
fall back to a default.  config_echo produces a fully resolved canonical
dict that re-parses to an identical configuration, which is what run
summaries embed so a finished run can be reproduced from its outputs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .core import Schedule, SpatialGrid
from .ensemble import EnsembleConfig
from .master import MasterConfig
from .propagation import (
    AbsorbingMask,
    EvolutionConfig,
    Harmonic,
    SoftCoulomb,
    SystemSpec,
    TabulatedField,
)

__all__ = ["ConfigError", "RunConfig", "parse_config", "load_config", "config_echo", "config_schema"]

MODES = ("analytic", "effective", "stochastic", "ensemble", "master", "verify")
DEFAULT_MASTER_SEED = 0


class ConfigError(ValueError):
    """Invalid run configuration (unknown key, bad type, missing section)."""


@dataclass
class AnalyticConfig:
    mass: float = 1.0
    omega1: float = 1.0
    omega2: float = 1.0
    t_min: float | None = None  # default t_max / n_times, so t starts just above 0
    t_max: float = 6.0
    n_times: int = 120

    def __post_init__(self):
        if self.mass <= 0:
            raise ConfigError("analytic.mass must be positive")
        if self.omega1 < 0 or self.omega2 < 0:
            raise ConfigError("analytic frequencies must be non-negative")
        if self.t_max <= 0 or self.n_times < 1:
            raise ConfigError("analytic.t_max must be positive and n_times >= 1")
        if self.t_min is not None and not 0 < self.t_min <= self.t_max:
            raise ConfigError("analytic.t_min must lie in (0, t_max]")

    def times(self) -> np.ndarray:
        t0 = self.t_min if self.t_min is not None else self.t_max / self.n_times
        return np.linspace(t0, self.t_max, self.n_times)


@dataclass
class InitialState:
    kind: str = "ground_state"
    center: float = 0.0
    width: float = 1.0
    momentum: float = 0.0


@dataclass
class VerifyConfig:
    """Scales for the cross-module verification suite."""

    n_realizations: int = 10000
    scaling_fraction: int = 4  # stderr compared between n and n/scaling_fraction
    density_n_realizations: int = 10000
    t_final: float = 2.0
    dt: float = 1e-3
    grid_points: int = 512
    density_grid_points: int = 256
    half_width: float = 8.0
    master_seed: int = DEFAULT_MASTER_SEED
    snapshot_stride: int = 50
    probes: tuple = (0.5,)

    def __post_init__(self):
        if self.n_realizations < 8 or self.density_n_realizations < 8:
            raise ConfigError("verify ensembles need at least 8 realizations")
        if self.n_realizations % self.scaling_fraction:
            raise ConfigError("verify.n_realizations must divide by scaling_fraction")
        if self.t_final <= 0 or self.dt <= 0:
            raise ConfigError("verify.t_final and verify.dt must be positive")


@dataclass
class RunConfig:
    mode: str
    outputs_dir: str = "out"
    outputs_format: str = "csv"
    grid: SpatialGrid | None = None
    system: SystemSpec | None = None
    evolution: EvolutionConfig | None = None
    ensemble: EnsembleConfig | None = None
    master: MasterConfig | None = None
    analytic: AnalyticConfig | None = None
    initial: InitialState = field(default_factory=InitialState)
    probes: tuple = ()
    verify: VerifyConfig = field(default_factory=VerifyConfig)

    def master_seed(self) -> int:
        if self.mode == "verify":
            return self.verify.master_seed
        return self.ensemble.master_seed if self.ensemble is not None else DEFAULT_MASTER_SEED


def _require_keys(obj: dict, allowed: set, where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"unknown key {where}.{sorted(unknown)[0]}")


def _number(obj, where: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ConfigError(f"{where} must be a number")
    v = float(obj)
    if not math.isfinite(v):
        raise ConfigError(f"{where} must be finite")
    return v


def _integer(obj, where: str) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int):
        raise ConfigError(f"{where} must be an integer")
    return obj


def _number_list(obj, where: str) -> list:
    if not isinstance(obj, list) or not obj:
        raise ConfigError(f"{where} must be a non-empty list of numbers")
    return [_number(v, where) for v in obj]


def _parse_schedule(obj, where: str) -> Schedule:
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return Schedule(_number(obj, where))
    if isinstance(obj, dict):
        _require_keys(obj, {"times", "values"}, where)
        if "times" not in obj or "values" not in obj:
            raise ConfigError(f"{where} table needs 'times' and 'values'")
        try:
            return Schedule.tabulated(_number_list(obj["times"], where + ".times"),
                                      _number_list(obj["values"], where + ".values"))
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from None
    raise ConfigError(f"{where} must be a number or a times/values table")


def _parse_potential(obj, where: str):
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ConfigError(f"{where} must be an object with a 'kind'")
    kind = obj["kind"]
    if kind == "harmonic":
        _require_keys(obj, {"kind", "omega"}, where)
        return Harmonic(_number(obj.get("omega", 1.0), where + ".omega"))
    if kind == "soft_coulomb":
        _require_keys(obj, {"kind", "a"}, where)
        return SoftCoulomb(_number(obj.get("a", 1.0), where + ".a"))
    if kind == "tabulated":
        _require_keys(obj, {"kind", "values"}, where)
        return TabulatedField(_number_list(obj.get("values"), where + ".values"))
    raise ConfigError(f"{where}.kind must be harmonic, soft_coulomb or tabulated")


def _parse_system(obj: dict, where: str = "system") -> SystemSpec:
    _require_keys(obj, {"mass", "potential", "drive", "coupling", "coupling_lambda", "sigma2"}, where)
    mass = _number(obj.get("mass", 1.0), where + ".mass")
    potential = _parse_potential(obj.get("potential", {"kind": "harmonic", "omega": 1.0}), where + ".potential")
    drive = _parse_schedule(obj.get("drive", 0.0), where + ".drive")
    coupling = obj.get("coupling", "dipole")
    if coupling != "dipole":
        if not isinstance(coupling, dict):
            raise ConfigError(f"{where}.coupling must be 'dipole' or an object with 'values'")
        _require_keys(coupling, {"values"}, where + ".coupling")
        coupling = TabulatedField(_number_list(coupling.get("values"), where + ".coupling.values"))
    lam = _number(obj.get("coupling_lambda", 1.0), where + ".coupling_lambda")
    sigma2 = _parse_schedule(obj.get("sigma2", 0.0), where + ".sigma2")
    try:
        return SystemSpec(mass=mass, potential=potential, drive=drive,
                          coupling=coupling, coupling_lambda=lam, sigma2=sigma2)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _parse_grid(obj: dict) -> SpatialGrid:
    _require_keys(obj, {"x_min", "x_max", "n_points"}, "grid")
    try:
        return SpatialGrid(_number(obj.get("x_min", -8.0), "grid.x_min"),
                           _number(obj.get("x_max", 8.0), "grid.x_max"),
                           _integer(obj.get("n_points", 512), "grid.n_points"))
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from None


def _parse_evolution(obj: dict) -> EvolutionConfig:
    _require_keys(obj, {"dt", "n_steps", "snapshot_stride", "boundary"}, "evolution")
    if "dt" not in obj or "n_steps" not in obj:
        raise ConfigError("evolution needs dt and n_steps")
    boundary = obj.get("boundary", "periodic")
    if isinstance(boundary, dict):
        _require_keys(boundary, {"width", "strength"}, "evolution.boundary")
        try:
            boundary = AbsorbingMask(_number(boundary.get("width"), "evolution.boundary.width"),
                                     _number(boundary.get("strength"), "evolution.boundary.strength"))
        except ValueError as exc:
            raise ConfigError(f"evolution.boundary: {exc}") from None
    try:
        return EvolutionConfig(dt=_number(obj["dt"], "evolution.dt"),
                               n_steps=_integer(obj["n_steps"], "evolution.n_steps"),
                               snapshot_stride=_integer(obj.get("snapshot_stride", 1), "evolution.snapshot_stride"),
                               boundary=boundary)
    except ValueError as exc:
        raise ConfigError(f"evolution: {exc}") from None


def _parse_ensemble(obj: dict) -> EnsembleConfig:
    _require_keys(obj, {"n_realizations", "master_seed", "max_concurrent"}, "ensemble")
    try:
        return EnsembleConfig(
            n_realizations=_integer(obj.get("n_realizations", 1), "ensemble.n_realizations"),
            master_seed=_integer(obj.get("master_seed", DEFAULT_MASTER_SEED), "ensemble.master_seed"),
            max_concurrent=_integer(obj.get("max_concurrent", 8), "ensemble.max_concurrent"),
        )
    except ValueError as exc:
        raise ConfigError(f"ensemble: {exc}") from None


def _parse_master(obj: dict, evolution: EvolutionConfig | None) -> MasterConfig:
    _require_keys(obj, {"include_gain", "frozen_kinetic"}, "master")
    if evolution is None:
        raise ConfigError("a master section needs an evolution section for dt/n_steps")
    for key in ("include_gain", "frozen_kinetic"):
        if key in obj and not isinstance(obj[key], bool):
            raise ConfigError(f"master.{key} must be true or false")
    return MasterConfig(dt=evolution.dt, n_steps=evolution.n_steps,
                        snapshot_stride=evolution.snapshot_stride,
                        include_gain=obj.get("include_gain", True),
                        frozen_kinetic=obj.get("frozen_kinetic", False))


def _parse_analytic(obj: dict) -> AnalyticConfig:
    _require_keys(obj, {"mass", "omega1", "omega2", "t_min", "t_max", "n_times"}, "analytic")
    kwargs: dict[str, Any] = {}
    for key in ("mass", "omega1", "omega2", "t_max"):
        if key in obj:
            kwargs[key] = _number(obj[key], f"analytic.{key}")
    if obj.get("t_min") is not None:
        kwargs["t_min"] = _number(obj["t_min"], "analytic.t_min")
    if "n_times" in obj:
        kwargs["n_times"] = _integer(obj["n_times"], "analytic.n_times")
    return AnalyticConfig(**kwargs)


def _parse_initial(obj: dict) -> InitialState:
    _require_keys(obj, {"kind", "center", "width", "momentum"}, "initial")
    kind = obj.get("kind", "ground_state")
    if kind not in ("ground_state", "gaussian"):
        raise ConfigError("initial.kind must be ground_state or gaussian")
    init = InitialState(kind=kind,
                        center=_number(obj.get("center", 0.0), "initial.center"),
                        width=_number(obj.get("width", 1.0), "initial.width"),
                        momentum=_number(obj.get("momentum", 0.0), "initial.momentum"))
    if init.width <= 0:
        raise ConfigError("initial.width must be positive")
    return init


def _parse_verify(obj: dict) -> VerifyConfig:
    allowed = {"n_realizations", "scaling_fraction", "density_n_realizations", "t_final",
               "dt", "grid_points", "density_grid_points", "half_width", "master_seed",
               "snapshot_stride", "probes"}
    _require_keys(obj, allowed, "verify")
    kwargs: dict[str, Any] = {}
    for key in ("n_realizations", "scaling_fraction", "density_n_realizations",
                "grid_points", "density_grid_points", "master_seed", "snapshot_stride"):
        if key in obj:
            kwargs[key] = _integer(obj[key], f"verify.{key}")
    for key in ("t_final", "dt", "half_width"):
        if key in obj:
            kwargs[key] = _number(obj[key], f"verify.{key}")
    if "probes" in obj:
        kwargs["probes"] = tuple(_number_list(obj["probes"], "verify.probes"))
    return VerifyConfig(**kwargs)


_TOP_KEYS = {"mode", "outputs", "grid", "system", "evolution", "ensemble",
             "master", "analytic", "initial", "probes", "verify"}

_MODE_NEEDS = {
    "analytic": ("grid",),
    "effective": ("grid", "system", "evolution"),
    "stochastic": ("grid", "system", "evolution"),
    "ensemble": ("grid", "system", "evolution", "ensemble"),
    "master": ("grid", "system", "evolution"),
    "verify": (),
}


def parse_config(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    _require_keys(doc, _TOP_KEYS, "config")
    mode = doc.get("mode")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {', '.join(MODES)}")

    outputs = doc.get("outputs", {})
    if not isinstance(outputs, dict):
        raise ConfigError("outputs must be an object")
    _require_keys(outputs, {"directory", "format"}, "outputs")
    out_dir = outputs.get("directory", "out")
    if not isinstance(out_dir, str) or not out_dir:
        raise ConfigError("outputs.directory must be a non-empty string")
    out_format = outputs.get("format", "csv")
    if out_format not in ("csv", "json"):
        raise ConfigError("outputs.format must be csv or json")

    for section in _MODE_NEEDS[mode]:
        if section not in doc:
            raise ConfigError(f"mode {mode} needs the {section} section")

    rc = RunConfig(mode=mode, outputs_dir=out_dir, outputs_format=out_format)
    if "grid" in doc:
        rc.grid = _parse_grid(doc["grid"])
    if "system" in doc:
        rc.system = _parse_system(doc["system"])
    if "evolution" in doc:
        rc.evolution = _parse_evolution(doc["evolution"])
    if "ensemble" in doc:
        rc.ensemble = _parse_ensemble(doc["ensemble"])
    if "master" in doc or mode == "master":
        rc.master = _parse_master(doc.get("master", {}), rc.evolution)
    if "analytic" in doc or mode == "analytic":
        rc.analytic = _parse_analytic(doc.get("analytic", {}))
    if "initial" in doc:
        rc.initial = _parse_initial(doc["initial"])
    if "probes" in doc:
        rc.probes = tuple(_number_list(doc["probes"], "probes"))
    if "verify" in doc:
        rc.verify = _parse_verify(doc["verify"])

    if mode in ("effective", "stochastic", "ensemble", "master"):
        if rc.initial.kind == "ground_state" and not isinstance(rc.system.potential, Harmonic):
            raise ConfigError("initial.kind ground_state needs a harmonic potential")
        tab = [f for f in (rc.system.potential, rc.system.coupling)
               if isinstance(f, TabulatedField)]
        for f in tab:
            if f.values.shape != (rc.grid.n_points,):
                raise ConfigError("tabulated field length must equal grid.n_points")
    return rc


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return parse_config(doc)


def _echo_schedule(sched: Schedule):
    if sched.is_constant:
        return sched.constant_value()
    if sched._kind == "tabulated":
        return {"times": list(sched._times), "values": list(sched._values)}
    raise ConfigError("callable schedules cannot be serialized")


def _echo_system(spec: SystemSpec) -> dict:
    if isinstance(spec.potential, Harmonic):
        potential = {"kind": "harmonic", "omega": spec.potential.omega}
    elif isinstance(spec.potential, SoftCoulomb):
        potential = {"kind": "soft_coulomb", "a": spec.potential.a}
    else:
        potential = {"kind": "tabulated", "values": list(spec.potential.values)}
    coupling = "dipole" if isinstance(spec.coupling, str) else {"values": list(spec.coupling.values)}
    return {
        "mass": spec.mass,
        "potential": potential,
        "drive": _echo_schedule(spec.drive),
        "coupling": coupling,
        "coupling_lambda": spec.coupling_lambda,
        "sigma2": _echo_schedule(spec.sigma2),
    }


def config_echo(rc: RunConfig) -> dict:
    """Fully resolved canonical dict.

    Re-parsing the echo yields an equivalent RunConfig: config_echo o
    parse_config is idempotent, which is the round-trip contract the run
    summary relies on.
    """
    doc: dict[str, Any] = {
        "mode": rc.mode,
        "outputs": {"directory": rc.outputs_dir, "format": rc.outputs_format},
    }
    if rc.grid is not None:
        doc["grid"] = {"x_min": rc.grid.x_min, "x_max": rc.grid.x_max, "n_points": rc.grid.n_points}
    if rc.system is not None:
        doc["system"] = _echo_system(rc.system)
    if rc.evolution is not None:
        b = rc.evolution.boundary
        doc["evolution"] = {
            "dt": rc.evolution.dt,
            "n_steps": rc.evolution.n_steps,
            "snapshot_stride": rc.evolution.snapshot_stride,
            "boundary": b if isinstance(b, str) else {"width": b.width, "strength": b.strength},
        }
    if rc.ensemble is not None:
        doc["ensemble"] = {
            "n_realizations": rc.ensemble.n_realizations,
            "master_seed": rc.ensemble.master_seed,
            "max_concurrent": rc.ensemble.max_concurrent,
        }
    if rc.master is not None:
        doc["master"] = {"include_gain": rc.master.include_gain,
                         "frozen_kinetic": rc.master.frozen_kinetic}
    if rc.analytic is not None:
        doc["analytic"] = {
            "mass": rc.analytic.mass,
            "omega1": rc.analytic.omega1,
            "omega2": rc.analytic.omega2,
            "t_min": rc.analytic.t_min,
            "t_max": rc.analytic.t_max,
            "n_times": rc.analytic.n_times,
        }
    doc["initial"] = {"kind": rc.initial.kind, "center": rc.initial.center,
                      "width": rc.initial.width, "momentum": rc.initial.momentum}
    if rc.probes:
        doc["probes"] = list(rc.probes)
    doc["verify"] = {
        "n_realizations": rc.verify.n_realizations,
        "scaling_fraction": rc.verify.scaling_fraction,
        "density_n_realizations": rc.verify.density_n_realizations,
        "t_final": rc.verify.t_final,
        "dt": rc.verify.dt,
        "grid_points": rc.verify.grid_points,
        "density_grid_points": rc.verify.density_grid_points,
        "half_width": rc.verify.half_width,
        "master_seed": rc.verify.master_seed,
        "snapshot_stride": rc.verify.snapshot_stride,
        "probes": list(rc.verify.probes),
    }
    return doc


def config_schema() -> dict:
    """Machine-readable description of every recognized key and its default."""
    return {
        "mode": {"values": list(MODES), "required": True},
        "outputs": {"directory": "out", "format": ["csv", "json"]},
        "grid": {"x_min": -8.0, "x_max": 8.0, "n_points": 512,
                 "required_for": ["analytic", "effective", "stochastic", "ensemble", "master"]},
        "system": {
            "mass": 1.0,
            "potential": {"kind": ["harmonic", "soft_coulomb", "tabulated"],
                          "harmonic": {"omega": 1.0}, "soft_coulomb": {"a": 1.0},
                          "tabulated": {"values": "list of grid.n_points numbers"}},
            "drive": "number or {times: [...], values: [...]}",
            "coupling": "'dipole' or {values: [...]}",
            "coupling_lambda": 1.0,
            "sigma2": "number or {times: [...], values: [...]}",
            "required_for": ["effective", "stochastic", "ensemble", "master"],
        },
        "evolution": {"dt": "required", "n_steps": "required", "snapshot_stride": 1,
                      "boundary": "'periodic' or {width, strength}",
                      "required_for": ["effective", "stochastic", "ensemble", "master"]},
        "ensemble": {"n_realizations": 1, "master_seed": DEFAULT_MASTER_SEED, "max_concurrent": 8,
                     "required_for": ["ensemble"],
                     "note": "master_seed also seeds stochastic mode (trajectory 0); "
                             "absent section means master_seed 0"},
        "master": {"include_gain": True, "frozen_kinetic": False},
        "analytic": {"mass": 1.0, "omega1": 1.0, "omega2": 1.0,
                     "t_min": "default t_max/n_times", "t_max": 6.0, "n_times": 120},
        "initial": {"kind": ["ground_state", "gaussian"], "center": 0.0, "width": 1.0, "momentum": 0.0},
        "probes": "list of probe positions for the current time series",
        "verify": {
            "n_realizations": 10000, "scaling_fraction": 4, "density_n_realizations": 10000,
            "t_final": 2.0, "dt": 1e-3, "grid_points": 512, "density_grid_points": 256,
            "half_width": 8.0, "master_seed": DEFAULT_MASTER_SEED, "snapshot_stride": 50,
            "probes": [0.5],
        },
        "exit_codes": {"0": "success", "2": "config error", "3": "numerical failure",
                       "4": "verification failure"},
    }
