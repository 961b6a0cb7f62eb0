"""Command-line runner: configuration in, CSV series out.

Verbs:
  run    one simulation, emitting lyapunov/control/residual series
  study  refinement study over a list of resolutions
  check  validate a configuration without computing

Exit codes: 0 success, 2 configuration error, 3 runtime or numerical error.

All floats are written with repr(), the shortest decimal that round-trips
the binary value, so downstream comparisons can be exact.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from typing import Sequence

import numpy as np

from .analysis import continuous_l0, run_refinement_study
from .config import Problem, RunConfig, build_problem, load_config, load_table
from .errors import ConfigError, LyapFvError
from .simulate import simulate_1d, simulate_md, simulate_system_2d
from .splitmd import FieldMD, project_initial
from .weights import verify_decay_condition


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_csv(path: str, header: Sequence[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _emit_steps(n_steps: int, stride: int) -> list[int]:
    """Row indices to emit: every stride-th step plus both endpoints."""
    if stride == 0:
        stride = max(1, n_steps // 10)
    steps = list(range(0, n_steps + 1, stride))
    if steps[-1] != n_steps:
        steps.append(n_steps)
    return steps


def _initial_field(cfg: RunConfig, problem: Problem) -> FieldMD:
    if cfg.initial_kind == "table":
        fld = FieldMD(problem.grid, np.zeros(problem.grid.shape))
        fld.values[problem.grid.interior()] = load_table(cfg)
        return fld
    return project_initial(problem.grid, problem.initial)


def _run_1d(cfg: RunConfig, problem: Problem, out: str, stride: int) -> None:
    result = simulate_1d(
        grid=problem.grid.axes[0],
        p=problem.params[0][0],
        law=problem.control_1d,
        spec=problem.weight_specs[0],
        w0=problem.initial,
        n_steps=problem.n_steps,
    )
    l0_cont = continuous_l0(cfg, problem)
    if l0_cont is None:
        l0_cont = float(result.lyap[0])
    steps = _emit_steps(problem.n_steps, stride)
    c_l = cfg.c_l

    _write_csv(
        os.path.join(out, "lyapunov.csv"),
        ["n", "t", "L", "bound_geom", "bound_exp", "exact_ref_grid", "exact_ref_cont"],
        (
            [n, result.times[n], result.lyap[n], result.bounds.geometric[n],
             result.bounds.exponential[n],
             result.lyap[0] * math.exp(-c_l * result.times[n]),
             l0_cont * math.exp(-c_l * result.times[n])]
            for n in steps
        ),
    )
    _write_csv(
        os.path.join(out, "control.csv"),
        ["n", "t", "u"],
        ([n, result.times[n], result.controls[n]] for n in steps),
    )
    _write_csv(
        os.path.join(out, "residual.csv"),
        ["n", "t", "R0", "RE1", "RE2_bound", "Ru", "R2", "R1", "RE_exact", "R_total"],
        (
            [n, result.times[n], r.r0, r.re1, r.re2_bound, r.ru, r.r2, r.r1,
             r.re_exact, r.total_r]
            for n in steps
            for r in [result.residuals[n]]
        ),
    )


def _run_md_scalar(cfg: RunConfig, problem: Problem, out: str, stride: int) -> None:
    result = simulate_md(
        grid=problem.grid,
        params=problem.params[0],
        ctl=problem.control_md,
        spec=problem.weight_specs[0],
        w0=problem.initial,
        n_steps=problem.n_steps,
        c_l=cfg.c_l,
    )
    l0_cont = continuous_l0(cfg, problem)
    if l0_cont is None:
        l0_cont = float(result.lyap[0])
    steps = _emit_steps(problem.n_steps, stride)
    c_l = cfg.c_l
    _write_csv(
        os.path.join(out, "lyapunov.csv"),
        ["n", "t", "L", "bound_geom", "bound_exp", "exact_ref_grid", "exact_ref_cont"],
        (
            [n, result.times[n], result.lyap[n], result.bounds.geometric[n],
             result.bounds.exponential[n],
             result.lyap[0] * math.exp(-c_l * result.times[n]),
             l0_cont * math.exp(-c_l * result.times[n])]
            for n in steps
        ),
    )


def _run_system_2d(cfg: RunConfig, problem: Problem, out: str, stride: int) -> None:
    snapshot_steps = [int(round(t / problem.dt)) for t in cfg.snapshot_times]
    result = simulate_system_2d(
        grid=problem.grid,
        params=problem.params,
        specs=problem.weight_specs,
        control_faces=cfg.system_control_faces,
        w0=problem.initial,
        n_steps=problem.n_steps,
        snapshot_steps=snapshot_steps,
    )
    steps = _emit_steps(problem.n_steps, stride)
    c_l = cfg.c_l
    _write_csv(
        os.path.join(out, "lyapunov.csv"),
        ["n", "t", "L", "exact_ref_grid"],
        (
            [n, result.times[n], result.lyap_quad[n],
             result.lyap_quad[0] * math.exp(-c_l * result.times[n])]
            for n in steps
        ),
    )
    _write_csv(
        os.path.join(out, "control.csv"),
        ["n", "t", "u"],
        ([n, result.times[n], result.controls[n]] for n in steps),
    )
    for (comp, n), data in sorted(result.snapshots.items()):
        # one row per x2 index, columns along x1
        _write_csv(
            os.path.join(out, f"snapshot_c{comp}_n{n}.csv"),
            [f"x1_{i}" for i in range(data.shape[0])],
            (data[:, j] for j in range(data.shape[1])),
        )


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    problem = build_problem(cfg)
    os.makedirs(args.out, exist_ok=True)
    stride = args.stride if args.stride is not None else cfg.stride
    if cfg.is_system:
        _run_system_2d(cfg, problem, args.out, stride)
    elif cfg.ndim == 1:
        _run_1d(cfg, problem, args.out, stride)
    else:
        _run_md_scalar(cfg, problem, args.out, stride)
    return 0


def _cmd_study(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    study = run_refinement_study(cfg, args.resolutions)
    os.makedirs(args.out, exist_ok=True)
    rows = []
    for i, level in enumerate(study.levels):
        order = study.eocs[i - 1] if i > 0 else float("nan")
        rows.append([level.m, level.l_final, level.error, order])
    _write_csv(os.path.join(args.out, "study.csv"),
               ["resolution", "L_final", "error", "eoc"], rows)
    return 0


def _cmd_check(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    problem = build_problem(cfg)
    print(f"config OK: d={cfg.ndim}, dt={problem.dt!r}, steps={problem.n_steps}")
    if cfg.is_system:
        for c, (spec, row) in enumerate(zip(problem.weight_specs, cfg.system_speeds)):
            report = verify_decay_condition(spec, row, cfg.c_l, per_direction=False)
            state = "holds" if report.holds else "violated"
            print(f"component {c}: aggregate decay condition {state} "
                  f"(residual {report.residual!r})")
            per = verify_decay_condition(spec, row, cfg.c_l, per_direction=True)
            if not per.holds:
                print(f"component {c}: per-direction condition violated; "
                      "theorem preconditions unmet for multi-D bounds")
    else:
        spec = problem.weight_specs[0]
        report = verify_decay_condition(spec, cfg.speeds, cfg.c_l,
                                        per_direction=cfg.ndim > 1)
        state = "holds" if report.holds else "violated"
        print(f"decay condition {state} (residual {report.residual!r})")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="lyapfv",
        description="Finite-volume transport with boundary feedback and decay diagnostics",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, help="path to a TOML run configuration")
        p.add_argument("--out", default=".", help="output directory for CSV files")
        p.add_argument("--stride", type=int, default=None,
                       help="emit every N-th step (0 = about 10 samples plus endpoints)")
        p.add_argument("--threads", type=int, default=1,
                       help="reserved; accepted for interface stability")

    p_run = sub.add_parser("run", help="run one simulation")
    common(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_study = sub.add_parser("study", help="refinement study over resolutions")
    common(p_study)
    p_study.add_argument("resolutions", nargs="+", type=int,
                         help="interior cell counts, strictly refining")
    p_study.set_defaults(func=_cmd_study)

    p_check = sub.add_parser("check", help="validate a configuration, no simulation")
    common(p_check)
    p_check.set_defaults(func=_cmd_check)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (LyapFvError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
