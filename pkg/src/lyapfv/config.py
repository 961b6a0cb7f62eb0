"""Run configuration: TOML schema, strict parsing, and problem assembly.

Unknown keys are hard errors, not warnings: a silently ignored typo in q
or cfl would invalidate every bound check downstream. All scheme
preconditions (CFL band, viscosity band, 1 - C_L*dt > 0) are checked at
load time, before any computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np
import tomli

from .errors import ConfigError, ValidationError
from .grid import GridMD, build_grid_md, cfl_timestep
from .scheme1d import (
    ControlLaw,
    EqualityReflect,
    Prescribed,
    ScaledReflect,
    SchemeParams,
    ZeroControl,
)
from .splitmd import MDControl, PerDirectionEquality, ZeroInflow
from .weights import GeneralAffine, PerDirectionAffine, WeightSpec

SOLVER_ID = "fv-split-1"

_CONTROL_LAWS = ("equality", "scaled", "zero", "prescribed", "aggregate")
_INITIAL_KINDS = ("sin1d", "sinsin2d", "constant", "table")
_WEIGHT_KINDS = ("per-direction", "general")


@dataclass(frozen=True)
class RunConfig:
    """Validated run description; all collections normalized to tuples."""

    solver: str
    bounds: tuple[tuple[float, float], ...]
    m: tuple[int, ...]
    t_final: float
    cfl: float
    q: tuple[float, ...]
    c_l: float
    speeds: tuple[float, ...] | None
    system_speeds: tuple[tuple[float, ...], ...] | None
    system_gradients: tuple[tuple[float, ...], ...] | None
    system_control_faces: tuple[tuple[tuple[int, str], ...], ...] | None
    weight_kind: str
    weight_gradient: tuple[float, ...] | None
    weight_offset: float
    control_law: str
    control_theta: float | None
    control_values: tuple[float, ...] | None
    initial_kind: str
    initial_value: float | None
    initial_path: str | None
    stride: int
    snapshot_times: tuple[float, ...]

    @property
    def ndim(self) -> int:
        return len(self.bounds)

    @property
    def is_system(self) -> bool:
        return self.system_speeds is not None


_SCHEMA: dict[str, tuple[str, ...]] = {
    "": ("solver", "domain", "time", "scheme", "transport", "weights", "control",
         "initial", "output"),
    "domain": ("bounds", "m"),
    "time": ("T", "cfl"),
    "scheme": ("q", "c_l"),
    "transport": ("speeds", "system_speeds", "system_gradients", "control_faces"),
    "weights": ("kind", "gradient", "offset"),
    "control": ("law", "theta", "values"),
    "initial": ("kind", "value", "path"),
    "output": ("stride", "snapshot_times"),
}


def _reject_unknown(data: dict[str, Any]) -> None:
    for section, keys in _SCHEMA.items():
        node = data if section == "" else data.get(section, {})
        if not isinstance(node, dict):
            raise ConfigError(f"section [{section}] must be a table")
        for key in node:
            if key not in keys:
                where = f"[{section}]" if section else "top level"
                raise ConfigError(f"unknown key '{key}' at {where}")


def _need(node: dict[str, Any], key: str, section: str) -> Any:
    if key not in node:
        raise ConfigError(f"missing key '{key}' in [{section}]")
    return node[key]


def _floats(value: Any, what: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{what} must be a list of numbers") from exc


def parse_config(text: str) -> RunConfig:
    """Parse and validate a TOML configuration document."""
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}") from exc
    _reject_unknown(data)

    solver = data.get("solver", SOLVER_ID)
    if solver != SOLVER_ID:
        raise ConfigError(f"unsupported solver '{solver}', expected '{SOLVER_ID}'")

    domain = _need(data, "domain", "")
    bounds_raw = _need(domain, "bounds", "domain")
    try:
        bounds = tuple((float(lo), float(hi)) for lo, hi in bounds_raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError("domain.bounds must be a list of [lo, hi] pairs") from exc
    m_raw = _need(domain, "m", "domain")
    try:
        m = tuple(int(v) for v in m_raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError("domain.m must be a list of integers") from exc
    if len(bounds) != len(m):
        raise ConfigError("domain.bounds and domain.m must have equal length")

    time_sec = _need(data, "time", "")
    t_final = float(_need(time_sec, "T", "time"))
    cfl = float(_need(time_sec, "cfl", "time"))
    if t_final <= 0.0:
        raise ConfigError(f"time.T must be positive, got {t_final}")

    scheme = _need(data, "scheme", "")
    q = _floats(_need(scheme, "q", "scheme"), "scheme.q")
    c_l = float(_need(scheme, "c_l", "scheme"))
    if len(q) != len(bounds):
        raise ConfigError("scheme.q needs one entry per axis")

    transport = _need(data, "transport", "")
    speeds = None
    system_speeds = None
    system_gradients = None
    system_faces = None
    if "system_speeds" in transport:
        system_speeds = tuple(_floats(row, "system_speeds row")
                              for row in transport["system_speeds"])
        system_gradients = tuple(
            _floats(row, "system_gradients row")
            for row in _need(transport, "system_gradients", "transport")
        )
        faces_raw = _need(transport, "control_faces", "transport")
        try:
            system_faces = tuple(
                tuple((int(k), str(side)) for k, side in comp) for comp in faces_raw
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(
                "transport.control_faces must be lists of [direction, side] pairs"
            ) from exc
        for comp in system_faces:
            for k, side in comp:
                if side not in ("L", "R"):
                    raise ConfigError(f"control face side must be 'L' or 'R', got '{side}'")
                if not 0 <= k < len(bounds):
                    raise ConfigError(f"control face direction {k} out of range")
        if not (len(system_speeds) == len(system_gradients) == len(system_faces)):
            raise ConfigError("system speeds, gradients, and control_faces must align")
        if "speeds" in transport:
            raise ConfigError("give either transport.speeds or transport.system_speeds")
    else:
        speeds = _floats(_need(transport, "speeds", "transport"), "transport.speeds")
        if len(speeds) != len(bounds):
            raise ConfigError("transport.speeds needs one entry per axis")

    weights = data.get("weights", {})
    weight_gradient = None
    weight_offset = float(weights.get("offset", 0.0))
    if system_speeds is not None:
        # system runs carry their weights in transport.system_gradients
        weight_kind = "general"
        if "kind" in weights or "gradient" in weights:
            raise ConfigError(
                "system runs take their weights from transport.system_gradients; "
                "drop [weights] kind/gradient"
            )
    else:
        weight_kind = _need(weights, "kind", "weights")
        if weight_kind not in _WEIGHT_KINDS:
            raise ConfigError(f"weights.kind must be one of {_WEIGHT_KINDS}")
        if weight_kind == "general":
            weight_gradient = _floats(_need(weights, "gradient", "weights"),
                                      "weights.gradient")
            if len(weight_gradient) != len(bounds):
                raise ConfigError("weights.gradient needs one entry per axis")
        elif "gradient" in weights:
            raise ConfigError("weights.gradient is only valid with kind = 'general'")

    control = _need(data, "control", "")
    law = _need(control, "law", "control")
    if law not in _CONTROL_LAWS:
        raise ConfigError(f"control.law must be one of {_CONTROL_LAWS}")
    theta = None
    values = None
    if law == "scaled":
        theta = float(_need(control, "theta", "control"))
    elif "theta" in control:
        raise ConfigError("control.theta is only valid with law = 'scaled'")
    if law == "prescribed":
        values = _floats(_need(control, "values", "control"), "control.values")
    elif "values" in control:
        raise ConfigError("control.values is only valid with law = 'prescribed'")
    if (law == "aggregate") != (system_speeds is not None):
        raise ConfigError("law = 'aggregate' is required for, and only for, system runs")

    initial = _need(data, "initial", "")
    init_kind = _need(initial, "kind", "initial")
    if init_kind not in _INITIAL_KINDS:
        raise ConfigError(f"initial.kind must be one of {_INITIAL_KINDS}")
    init_value = None
    init_path = None
    if init_kind == "constant":
        init_value = float(_need(initial, "value", "initial"))
    elif "value" in initial:
        raise ConfigError("initial.value is only valid with kind = 'constant'")
    if init_kind == "table":
        init_path = str(_need(initial, "path", "initial"))
    elif "path" in initial:
        raise ConfigError("initial.path is only valid with kind = 'table'")
    if init_kind == "sin1d" and len(bounds) != 1:
        raise ConfigError("initial.kind = 'sin1d' needs a 1D domain")
    if init_kind == "sinsin2d" and len(bounds) != 2:
        raise ConfigError("initial.kind = 'sinsin2d' needs a 2D domain")

    output = data.get("output", {})
    stride = int(output.get("stride", 0))
    if stride < 0:
        raise ConfigError(f"output.stride must be nonnegative, got {stride}")
    snapshot_times = _floats(output.get("snapshot_times", ()), "output.snapshot_times")

    cfg = RunConfig(
        solver=solver,
        bounds=bounds,
        m=m,
        t_final=t_final,
        cfl=cfl,
        q=q,
        c_l=c_l,
        speeds=speeds,
        system_speeds=system_speeds,
        system_gradients=system_gradients,
        system_control_faces=system_faces,
        weight_kind=weight_kind,
        weight_gradient=weight_gradient,
        weight_offset=weight_offset,
        control_law=law,
        control_theta=theta,
        control_values=values,
        initial_kind=init_kind,
        initial_value=init_value,
        initial_path=init_path,
        stride=stride,
        snapshot_times=snapshot_times,
    )
    build_problem(cfg)  # surface all domain-level validation now
    return cfg


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config(text)


def serialize_config(cfg: RunConfig) -> str:
    """TOML document that parses back to an equal RunConfig."""
    lines = [f'solver = "{cfg.solver}"', ""]
    lines += ["[domain]",
              f"bounds = {[[lo, hi] for lo, hi in cfg.bounds]}",
              f"m = {list(cfg.m)}", ""]
    lines += ["[time]", f"T = {cfg.t_final!r}", f"cfl = {cfg.cfl!r}", ""]
    lines += ["[scheme]", f"q = {list(cfg.q)}", f"c_l = {cfg.c_l!r}", ""]
    lines.append("[transport]")
    if cfg.is_system:
        lines.append(f"system_speeds = {[list(r) for r in cfg.system_speeds]}")
        lines.append(f"system_gradients = {[list(r) for r in cfg.system_gradients]}")
        faces = [[[k, side] for k, side in comp] for comp in cfg.system_control_faces]
        lines.append(f"control_faces = {faces}".replace("'", '"'))
    else:
        lines.append(f"speeds = {list(cfg.speeds)}")
    lines.append("")
    lines.append("[weights]")
    if not cfg.is_system:
        lines.append(f'kind = "{cfg.weight_kind}"')
        if cfg.weight_gradient is not None:
            lines.append(f"gradient = {list(cfg.weight_gradient)}")
    lines.append(f"offset = {cfg.weight_offset!r}")
    lines.append("")
    lines += ["[control]", f'law = "{cfg.control_law}"']
    if cfg.control_theta is not None:
        lines.append(f"theta = {cfg.control_theta!r}")
    if cfg.control_values is not None:
        lines.append(f"values = {list(cfg.control_values)}")
    lines.append("")
    lines += ["[initial]", f'kind = "{cfg.initial_kind}"']
    if cfg.initial_value is not None:
        lines.append(f"value = {cfg.initial_value!r}")
    if cfg.initial_path is not None:
        lines.append(f'path = "{cfg.initial_path}"')
    lines.append("")
    lines += ["[output]", f"stride = {cfg.stride}",
              f"snapshot_times = {list(cfg.snapshot_times)}", ""]
    return "\n".join(lines)


@dataclass(frozen=True)
class Problem:
    """Everything a driver needs, built once from a RunConfig."""

    grid: GridMD
    dt: float
    n_steps: int
    params: tuple[tuple[SchemeParams, ...], ...]  # per component, per direction
    weight_specs: tuple[WeightSpec, ...]
    control_1d: ControlLaw | None
    control_md: MDControl | None
    initial: Callable[..., np.ndarray]


def _initial_callable(cfg: RunConfig) -> Callable[..., np.ndarray]:
    if cfg.initial_kind == "sin1d":
        return lambda x: np.sin(2.0 * np.pi * x)
    if cfg.initial_kind == "sinsin2d":
        return lambda x1, x2: np.sin(2.0 * np.pi * x1) * np.sin(2.0 * np.pi * x2)
    if cfg.initial_kind == "constant":
        c = cfg.initial_value
        return lambda *xs: np.full(np.broadcast(*xs).shape, c) if len(xs) > 1 else \
            np.full_like(np.asarray(xs[0], dtype=float), c)
    # table initial data is loaded directly as interior cell averages
    def from_table(*xs: np.ndarray) -> np.ndarray:
        raise ConfigError("table initial data bypasses projection; use load_table")

    return from_table


def load_table(cfg: RunConfig) -> np.ndarray:
    data = np.loadtxt(cfg.initial_path, delimiter=",", ndmin=len(cfg.m))
    if data.shape != cfg.m:
        raise ConfigError(
            f"initial table shape {data.shape} does not match domain.m {cfg.m}"
        )
    return data


def build_problem(cfg: RunConfig) -> Problem:
    """Assemble validated domain objects; raises ConfigError on any violation."""
    try:
        grid = build_grid_md(cfg.bounds, cfg.m)
        if cfg.is_system:
            speed_rows = cfg.system_speeds
        else:
            speed_rows = (cfg.speeds,)
        dt = min(cfl_timestep(row, grid, cfg.cfl) for row in speed_rows)
        n_steps = math.ceil(cfg.t_final / dt - 1e-9)
        d = grid.ndim
        params = tuple(
            tuple(
                SchemeParams(a=row[k], lam=dt / grid.spacings[k], q=cfg.q[k], dt=dt,
                             c_l=cfg.c_l / d)
                for k in range(d)
            )
            for row in speed_rows
        )
        if cfg.is_system:
            weight_specs: tuple[WeightSpec, ...] = tuple(
                GeneralAffine(gradient=g, offset=cfg.weight_offset)
                for g in cfg.system_gradients
            )
        elif cfg.weight_kind == "per-direction":
            weight_specs = (PerDirectionAffine(c_l=cfg.c_l, speeds=cfg.speeds),)
        else:
            weight_specs = (GeneralAffine(gradient=cfg.weight_gradient,
                                          offset=cfg.weight_offset),)

        control_1d: ControlLaw | None = None
        control_md: MDControl | None = None
        if cfg.control_law == "equality":
            control_1d = EqualityReflect()
            control_md = PerDirectionEquality()
        elif cfg.control_law == "scaled":
            control_1d = ScaledReflect(theta=cfg.control_theta)
        elif cfg.control_law == "zero":
            control_1d = ZeroControl()
            control_md = ZeroInflow()
        elif cfg.control_law == "prescribed":
            control_1d = Prescribed(values=cfg.control_values)
        if d > 1 and not cfg.is_system and control_md is None:
            raise ConfigError(
                f"control.law = '{cfg.control_law}' is not available for multi-D scalar runs"
            )
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc
    return Problem(
        grid=grid,
        dt=dt,
        n_steps=n_steps,
        params=params,
        weight_specs=weight_specs,
        control_1d=control_1d,
        control_md=control_md,
        initial=_initial_callable(cfg),
    )
