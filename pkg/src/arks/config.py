"""Experiment configuration: TOML sections with typed keys, strictly validated.

The exact grammar lives in docs/config.md.  Every key is checked for type and
range with a field-level message, and unknown sections or keys are errors so
typos never pass silently.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .grid import Geometry, Grid
from .initial import DENSITY_KINDS, DensitySpec, MeasureSpec
from .model import ModelParams, ScenarioConfig
from .stepper import Formulation, StepControl

__all__ = ["ExperimentConfig", "load_config", "parse_config", "config_to_dict"]

KINDS = ("single", "eps_family", "sweep", "convergence")


def _is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _number(section, key, v, lo=None, hi=None, lo_strict=False):
    if not _is_number(v):
        raise ConfigError(f"[{section}] {key} must be a number, got {v!r}")
    x = float(v)
    if lo is not None and (x <= lo if lo_strict else x < lo):
        cmp = ">" if lo_strict else ">="
        raise ConfigError(f"[{section}] {key} must be {cmp} {lo}, got {v}")
    if hi is not None and x > hi:
        raise ConfigError(f"[{section}] {key} must be <= {hi}, got {v}")
    return x


def _integer(section, key, v, lo=None):
    if not isinstance(v, int) or isinstance(v, bool):
        raise ConfigError(f"[{section}] {key} must be an integer, got {v!r}")
    if lo is not None and v < lo:
        raise ConfigError(f"[{section}] {key} must be >= {lo}, got {v}")
    return v


def _string(section, key, v, choices=None):
    if not isinstance(v, str):
        raise ConfigError(f"[{section}] {key} must be a string, got {v!r}")
    if choices and v not in choices:
        raise ConfigError(
            f"[{section}] {key} must be one of {sorted(choices)}, got {v!r}"
        )
    return v


def _number_list(section, key, v, min_len=1):
    if not isinstance(v, list) or len(v) < min_len or not all(_is_number(x) for x in v):
        raise ConfigError(
            f"[{section}] {key} must be a list of >= {min_len} numbers, got {v!r}"
        )
    return [float(x) for x in v]


def _check_keys(section, table, allowed):
    unknown = set(table) - set(allowed)
    if unknown:
        raise ConfigError(
            f"unknown key(s) {sorted(unknown)} in [{section}]; allowed: {sorted(allowed)}"
        )


@dataclass
class ExperimentConfig:
    model: ModelParams
    grid: Grid
    measure: MeasureSpec
    chemicals: tuple | None  # (v0 DensitySpec, w0 DensitySpec) when tau = 1
    eps: float
    control_kwargs: dict
    kind: str
    t_end: float
    sample_times: list | None
    ladder_rungs: int
    eps_list: list
    probe_time: float
    output: str
    scenario_kwargs: dict
    sweep_chi: list = field(default_factory=list)
    sweep_mass: list = field(default_factory=list)
    sweep_t_end: float = 0.5
    raw: dict = field(default_factory=dict)

    def step_control(self, default_blowup_threshold: float) -> StepControl:
        kw = dict(self.control_kwargs)
        if kw.get("blowup_threshold") is None:
            kw["blowup_threshold"] = default_blowup_threshold
        return StepControl(**kw)

    def scenario(self, m: float) -> ScenarioConfig:
        return ScenarioConfig(n=self.grid.dim, m=m, **self.scenario_kwargs)


def load_config(path) -> ExperimentConfig:
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: not valid TOML: {exc}") from exc
    return parse_config(data)


def _parse_model(table) -> ModelParams:
    required = ("chi", "xi", "alpha", "beta", "gamma", "delta", "tau")
    _check_keys("model", table, required)
    missing = [k for k in required if k not in table]
    if missing:
        raise ConfigError(f"[model] missing key(s) {missing}")
    return ModelParams(
        chi=_number("model", "chi", table["chi"], lo=0.0),
        xi=_number("model", "xi", table["xi"], lo=0.0),
        alpha=_number("model", "alpha", table["alpha"], lo=0.0, lo_strict=True),
        beta=_number("model", "beta", table["beta"], lo=0.0, lo_strict=True),
        gamma=_number("model", "gamma", table["gamma"], lo=0.0, lo_strict=True),
        delta=_number("model", "delta", table["delta"], lo=0.0, lo_strict=True),
        tau=_integer("model", "tau", table["tau"]),
    )


def _parse_grid(table) -> Grid:
    _check_keys("grid", table, ("geometry", "extents", "cells"))
    for k in ("geometry", "extents", "cells"):
        if k not in table:
            raise ConfigError(f"[grid] missing key {k!r}")
    geom = _string(
        "grid", "geometry", table["geometry"], choices=[g.value for g in Geometry]
    )
    extents = _number_list("grid", "extents", table["extents"])
    cells = table["cells"]
    if not isinstance(cells, list) or not all(
        isinstance(c, int) and not isinstance(c, bool) for c in cells
    ):
        raise ConfigError(f"[grid] cells must be a list of integers, got {cells!r}")
    return Grid(Geometry(geom), extents, cells)


def _parse_density(section, table, prefix) -> DensitySpec | None:
    kind_key = prefix if prefix in ("density",) else prefix
    if kind_key not in table:
        return None
    kind = _string(section, kind_key, table[kind_key], choices=DENSITY_KINDS)
    amp = _number(section, f"{prefix}_amplitude", table.get(f"{prefix}_amplitude", 1.0), lo=0.0)
    width = _number(section, f"{prefix}_width", table.get(f"{prefix}_width", 0.25), lo=0.0, lo_strict=True)
    center = table.get(f"{prefix}_center", [])
    if center:
        center = _number_list(section, f"{prefix}_center", center)
    return DensitySpec(kind=kind, amplitude=amp, center=tuple(center), width=width)


def _parse_initial(table, grid, tau):
    allowed = ["eps", "atoms"]
    for prefix in ("density", "v0", "w0"):
        allowed += [prefix, f"{prefix}_amplitude", f"{prefix}_width", f"{prefix}_center"]
    _check_keys("initial", table, allowed)
    eps = _number("initial", "eps", table.get("eps", 1e-2), lo=0.0, lo_strict=True)
    atoms = []
    raw_atoms = table.get("atoms", [])
    if not isinstance(raw_atoms, list):
        raise ConfigError("[initial] atoms must be a list of [coords..., mass] rows")
    rank = len(grid.cells)
    for row in raw_atoms:
        if (
            not isinstance(row, list)
            or len(row) != rank + 1
            or not all(_is_number(x) for x in row)
        ):
            raise ConfigError(
                f"[initial] each atom needs {rank} coordinate(s) plus a mass, got {row!r}"
            )
        atoms.append(tuple(float(x) for x in row))
    density = _parse_density("initial", table, "density")
    measure = MeasureSpec(atoms=tuple(atoms), density=density)
    measure.validate_on(grid)

    v0 = _parse_density("initial", table, "v0")
    w0 = _parse_density("initial", table, "w0")
    if tau == 1:
        if v0 is None or w0 is None:
            raise ConfigError("[initial] v0 and w0 are required when tau = 1")
        chemicals = (v0, w0)
    else:
        if v0 is not None or w0 is not None:
            raise ConfigError("[initial] v0/w0 are only meaningful when tau = 1")
        chemicals = None
    return eps, measure, chemicals


def _parse_control(table) -> dict:
    allowed = (
        "dt_init",
        "dt_min",
        "dt_max",
        "cfl_safety",
        "blowup_threshold",
        "formulation",
    )
    _check_keys("control", table, allowed)
    kw = {}
    for key in ("dt_init", "dt_min", "dt_max"):
        if key in table:
            kw[key] = _number("control", key, table[key], lo=0.0, lo_strict=True)
    if "cfl_safety" in table:
        kw["cfl_safety"] = _number("control", "cfl_safety", table["cfl_safety"], lo=0.0, hi=1.0, lo_strict=True)
    if "blowup_threshold" in table:
        kw["blowup_threshold"] = _number(
            "control", "blowup_threshold", table["blowup_threshold"], lo=0.0, lo_strict=True
        )
    else:
        kw["blowup_threshold"] = None
    if "formulation" in table:
        name = _string(
            "control",
            "formulation",
            table["formulation"],
            choices=[f.value for f in Formulation],
        )
        kw["formulation"] = Formulation(name)
    return kw


def _parse_scenario(table) -> dict:
    allowed = ("c_s2", "r", "u_exponent")
    _check_keys("scenario", table, allowed)
    kw = {}
    if "c_s2" in table:
        kw["c_s2"] = _number("scenario", "c_s2", table["c_s2"], lo=0.0, lo_strict=True)
    if "r" in table:
        kw["r"] = _number("scenario", "r", table["r"])
    if "u_exponent" in table:
        kw["u_exponent"] = _number("scenario", "u_exponent", table["u_exponent"])
    return kw


def _parse_experiment(table):
    allowed = (
        "kind",
        "t_end",
        "sample_times",
        "ladder_rungs",
        "eps_list",
        "probe_time",
        "output",
    )
    _check_keys("experiment", table, allowed)
    kind = _string("experiment", "kind", table.get("kind", "single"), choices=KINDS)
    t_end = _number("experiment", "t_end", table.get("t_end", 1.0), lo=0.0, lo_strict=True)
    sample_times = None
    if "sample_times" in table:
        sample_times = _number_list("experiment", "sample_times", table["sample_times"])
        if sorted(sample_times) != sample_times:
            raise ConfigError("[experiment] sample_times must be sorted ascending")
    ladder_rungs = _integer("experiment", "ladder_rungs", table.get("ladder_rungs", 20), lo=1)
    if "eps_list" in table:
        eps_list = table["eps_list"]
        if not eps_list:
            raise ConfigError("[experiment] eps_list must be nonempty")
        eps_list = _number_list("experiment", "eps_list", eps_list)
        if any(e <= 0 for e in eps_list):
            raise ConfigError("[experiment] eps_list entries must be > 0")
        if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
            raise ConfigError("[experiment] eps_list must be strictly decreasing")
    elif kind in ("eps_family", "convergence"):
        # default smoothing ladder 4^{-k} * 0.1
        eps_list = [0.1 * 4.0**-k for k in range(3)]
    else:
        eps_list = []
    if kind == "convergence" and len(eps_list) < 3:
        raise ConfigError("[experiment] convergence needs >= 3 eps_list entries")
    probe_time = _number(
        "experiment", "probe_time", table.get("probe_time", 0.1), lo=0.0, lo_strict=True
    )
    output = _string("experiment", "output", table.get("output", "out"))
    return kind, t_end, sample_times, ladder_rungs, eps_list, probe_time, output


def _parse_sweep(table):
    allowed = ("chi_values", "mass_values", "t_end")
    _check_keys("sweep", table, allowed)
    chi = _number_list("sweep", "chi_values", table.get("chi_values", []), min_len=1)
    mass = _number_list("sweep", "mass_values", table.get("mass_values", []), min_len=1)
    if any(m <= 0 for m in mass):
        raise ConfigError("[sweep] mass_values must be > 0")
    if any(c < 0 for c in chi):
        raise ConfigError("[sweep] chi_values must be >= 0")
    t_end = _number("sweep", "t_end", table.get("t_end", 0.5), lo=0.0, lo_strict=True)
    return chi, mass, t_end


def parse_config(data: dict) -> ExperimentConfig:
    known_sections = ("model", "scenario", "grid", "initial", "control", "experiment", "sweep")
    _check_keys("(top level)", data, known_sections)
    for section in ("model", "grid", "initial", "experiment"):
        if section not in data:
            raise ConfigError(f"missing required section [{section}]")

    model = _parse_model(data["model"])
    grid = _parse_grid(data["grid"])
    eps, measure, chemicals = _parse_initial(data["initial"], grid, model.tau)
    control_kwargs = _parse_control(data.get("control", {}))
    scenario_kwargs = _parse_scenario(data.get("scenario", {}))
    kind, t_end, sample_times, rungs, eps_list, probe_time, output = _parse_experiment(
        data["experiment"]
    )
    if kind == "sweep":
        if "sweep" not in data:
            raise ConfigError("missing required section [sweep] for kind='sweep'")
        chi_values, mass_values, sweep_t_end = _parse_sweep(data["sweep"])
    else:
        if "sweep" in data:
            raise ConfigError("[sweep] section is only allowed for kind='sweep'")
        chi_values, mass_values, sweep_t_end = [], [], 0.5

    return ExperimentConfig(
        model=model,
        grid=grid,
        measure=measure,
        chemicals=chemicals,
        eps=eps,
        control_kwargs=control_kwargs,
        kind=kind,
        t_end=t_end,
        sample_times=sample_times,
        ladder_rungs=rungs,
        eps_list=eps_list,
        probe_time=probe_time,
        output=output,
        scenario_kwargs=scenario_kwargs,
        sweep_chi=chi_values,
        sweep_mass=mass_values,
        sweep_t_end=sweep_t_end,
        raw=data,
    )


def config_to_dict(cfg: ExperimentConfig) -> dict:
    """Round-trippable echo of the raw config for run manifests."""
    return cfg.raw
