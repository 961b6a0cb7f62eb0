"""Simulation drivers shared by the CLI and the refinement studies.

Each driver records the full diagnostic series: Lyapunov values per step,
control values, residual ledgers, and (where the theory applies) the
geometric and exponential bound trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np

from .errors import ValidationError
from .grid import Grid1D, GridMD
from .lyapunov import (
    BoundTrajectory,
    ResidualBreakdown,
    assemble_sweep_residual,
    bound_trajectory,
    discrete_lyapunov,
    quadrature_lyapunov,
    residual_terms_1d,
)
from .scheme1d import (
    ControlLaw,
    Line,
    SchemeParams,
    apply_boundary,
    copy_out_ghost,
    viscous_update,
)
from .splitmd import (
    AggregateIntegral2D,
    FieldMD,
    MDControl,
    aggregate_control_2d,
    project_initial,
    step_md,
)
from .weights import WeightSpec, weight_on_grid


@dataclass
class Sim1DResult:
    """Per-step series of a 1D run; index n covers 0..N inclusive."""

    times: np.ndarray
    lyap: np.ndarray
    controls: np.ndarray
    residuals: list[ResidualBreakdown]
    bounds: BoundTrajectory
    final: Line


def simulate_1d(
    grid: Grid1D,
    p: SchemeParams,
    law: ControlLaw,
    spec: WeightSpec,
    w0: Callable[[np.ndarray], np.ndarray],
    n_steps: int,
    quad_points: int = 5,
) -> Sim1DResult:
    """Run the controlled 1D scheme for n_steps and record all diagnostics.

    Diagnostics (control and residuals) are also evaluated at the final
    time, so a Prescribed law must supply n_steps + 1 values.
    """
    if n_steps < 1:
        raise ValidationError(f"need at least one step, got {n_steps}")
    if abs(p.dx - grid.dx) > 1e-12 * grid.dx:
        raise ValidationError(
            f"scheme cell width {p.dx} does not match the grid's {grid.dx}"
        )
    md = GridMD((grid,))
    values = project_initial(md, w0, quad_points=quad_points).values
    weights = np.exp(np.asarray(spec.gradient)[0] * grid.centers() + spec.offset)
    line = Line(values, weights)
    a_sign = 1 if p.a > 0 else -1

    times = p.dt * np.arange(n_steps + 1)
    lyap = np.empty(n_steps + 1)
    controls = np.empty(n_steps + 1)
    residuals: list[ResidualBreakdown] = []
    for n in range(n_steps + 1):
        lyap[n] = float(np.sum(line.values[1:-1] ** 2 * weights[1:-1]) * grid.dx)
        closed = apply_boundary(line, p, law, times[n])
        u_n = float(closed.values[0] if a_sign > 0 else closed.values[-1])
        controls[n] = u_n
        residuals.append(residual_terms_1d(closed, p, u_n))
        if n == n_steps:
            line = closed
            break
        closed.values[1:-1] += viscous_update(closed.values, p.courant, p.q)
        copy_out_ghost(closed.values, a_sign)
        line = closed

    bounds = bound_trajectory(lyap[0], residuals[:-1], p.c_l, p.dt, d=1)
    return Sim1DResult(times, lyap, controls, residuals, bounds, line)


@dataclass
class SimMDResult:
    """Per-step series of a scalar multi-D run under dimensional splitting."""

    times: np.ndarray
    lyap: np.ndarray
    sweep_residuals: list[float]
    bounds: BoundTrajectory | None
    final: FieldMD


def simulate_md(
    grid: GridMD,
    params: Sequence[SchemeParams],
    ctl: MDControl,
    spec: WeightSpec,
    w0: Callable[..., np.ndarray],
    n_steps: int,
    c_l: float,
    with_bounds: bool = True,
    quad_points: int = 5,
) -> SimMDResult:
    """Run one scalar field with per-direction sweeps for n_steps."""
    if n_steps < 1:
        raise ValidationError(f"need at least one step, got {n_steps}")
    dt = params[0].dt
    for p in params:
        if p.dt != dt:
            raise ValidationError("all directions must share one time step")
    speeds = tuple(p.a for p in params)
    fld = project_initial(grid, w0, quad_points=quad_points)
    ew = weight_on_grid(spec, grid)

    times = dt * np.arange(n_steps + 1)
    lyap = np.empty(n_steps + 1)
    lyap[0] = discrete_lyapunov(fld, spec).value
    sweep_res: list[float] = []
    for n in range(n_steps):
        recs = step_md(fld, params, ctl, ew, record=with_bounds)
        if with_bounds:
            for rec in recs:
                sweep_res.append(assemble_sweep_residual(rec, grid, spec, c_l, speeds))
        lyap[n + 1] = discrete_lyapunov(fld, spec).value

    bounds = None
    if with_bounds:
        bounds = bound_trajectory(lyap[0], sweep_res, c_l, dt, d=grid.ndim)
    return SimMDResult(times, lyap, sweep_res, bounds, fld)


@dataclass
class SimSystem2DResult:
    """Per-step series of the two-component 2D run with aggregate control."""

    times: np.ndarray
    lyap_quad: np.ndarray
    controls: np.ndarray
    finals: list[FieldMD]
    snapshots: dict[tuple[int, int], np.ndarray] = dc_field(default_factory=dict)


def simulate_system_2d(
    grid: GridMD,
    params: Sequence[Sequence[SchemeParams]],
    specs: Sequence[WeightSpec],
    control_faces: Sequence[tuple[tuple[int, str], ...]],
    w0: Callable[..., np.ndarray],
    n_steps: int,
    quad_points: int = 2,
    snapshot_steps: Sequence[int] = (),
) -> SimSystem2DResult:
    """Run a decoupled system of 2D fields under one shared scalar control.

    The control is refreshed once per time step from the weighted outflow
    boundary integral over all components, then applied on each component's
    configured inflow faces. lyap_quad is the Gauss-Legendre functional
    summed over components.
    """
    if n_steps < 1:
        raise ValidationError(f"need at least one step, got {n_steps}")
    n_comp = len(params)
    if not (len(specs) == len(control_faces) == n_comp):
        raise ValidationError("params, specs, and control_faces must align per component")
    dt = params[0][0].dt
    for per_comp in params:
        for p in per_comp:
            if p.dt != dt:
                raise ValidationError("all components and directions must share one time step")
    speeds = [tuple(p.a for p in per_comp) for per_comp in params]
    fields = [project_initial(grid, w0, quad_points=5) for _ in range(n_comp)]
    ews = [weight_on_grid(spec, grid) for spec in specs]

    times = dt * np.arange(n_steps + 1)
    lyap = np.empty(n_steps + 1)
    controls = np.empty(n_steps + 1)
    snapshots: dict[tuple[int, int], np.ndarray] = {}
    wanted = set(int(s) for s in snapshot_steps)

    def lhat() -> float:
        return sum(
            quadrature_lyapunov(f, s, quad_points).value for f, s in zip(fields, specs)
        )

    def snap(n: int) -> None:
        if n in wanted:
            for c, f in enumerate(fields):
                snapshots[(c, n)] = f.interior().copy()

    lyap[0] = lhat()
    snap(0)
    for n in range(n_steps):
        u = aggregate_control_2d(fields, specs, speeds, times[n])
        controls[n] = u
        for c in range(n_comp):
            ctl = AggregateIntegral2D(u=u, control_faces=control_faces[c])
            step_md(fields[c], params[c], ctl, ews[c])
        lyap[n + 1] = lhat()
        snap(n + 1)
    controls[n_steps] = aggregate_control_2d(fields, specs, speeds, times[n_steps])

    return SimSystem2DResult(times, lyap, controls, fields, snapshots)
