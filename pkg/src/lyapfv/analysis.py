"""Refinement studies and empirical orders of convergence.

The study error is the distance of the final-time Lyapunov value from the
exact decay reference L(0) exp(-C_L t), with L(0) obtained by high-accuracy
quadrature of the continuous initial data so the reference is
grid-independent.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .config import Problem, RunConfig, build_problem
from .errors import UndefinedOrderError, ValidationError
from .simulate import simulate_1d
from .weights import mu_value


def exact_reference(l0: float, c_l: float, t: float) -> float:
    """Exact decay reference L(0) exp(-C_L t)."""
    if l0 < 0.0:
        raise ValidationError(f"reference L(0) must be nonnegative, got {l0}")
    return l0 * math.exp(-c_l * t)


def eoc(err_coarse: float, err_fine: float, ratio: float) -> float:
    """Empirical order of convergence between two refinement levels."""
    if ratio <= 1.0:
        raise ValidationError(f"refinement ratio must exceed 1, got {ratio}")
    if err_coarse <= 0.0 or err_fine <= 0.0:
        raise UndefinedOrderError(
            f"order undefined for nonpositive errors ({err_coarse}, {err_fine})"
        )
    return math.log(err_coarse / err_fine) / math.log(ratio)


def continuous_l0(cfg: RunConfig, problem: Problem) -> float | None:
    """L(0) of the continuous initial data by adaptive quadrature.

    Returns None when the initial data has no closed form (table input);
    callers then fall back to the grid value.
    """
    spec = problem.weight_specs[0]
    if cfg.initial_kind == "sin1d":
        (lo, hi), = cfg.bounds
        val, _ = integrate.quad(
            lambda x: math.sin(2.0 * math.pi * x) ** 2 * math.exp(mu_value(spec, [x])),
            lo, hi, epsabs=1e-13, epsrel=1e-13,
        )
        return val
    if cfg.initial_kind == "constant":
        c = cfg.initial_value
        if cfg.ndim == 1:
            (lo, hi), = cfg.bounds
            val, _ = integrate.quad(
                lambda x: math.exp(mu_value(spec, [x])), lo, hi,
                epsabs=1e-13, epsrel=1e-13,
            )
        else:
            val, _ = integrate.nquad(
                lambda *xs: math.exp(mu_value(spec, xs)), cfg.bounds,
                opts={"epsabs": 1e-13, "epsrel": 1e-13},
            )
        return c**2 * val
    if cfg.initial_kind == "sinsin2d":
        val, _ = integrate.nquad(
            lambda x1, x2: (math.sin(2.0 * math.pi * x1) * math.sin(2.0 * math.pi * x2)) ** 2
            * math.exp(mu_value(spec, [x1, x2])),
            cfg.bounds,
            opts={"epsabs": 1e-12, "epsrel": 1e-12},
        )
        return val
    return None


@dataclass(frozen=True)
class LevelResult:
    m: int
    dx: float
    l_final: float
    error: float


@dataclass(frozen=True)
class RefinementStudy:
    levels: tuple[LevelResult, ...]
    ratio: float
    eocs: tuple[float, ...]


def run_refinement_study(cfg: RunConfig, resolutions: list[int]) -> RefinementStudy:
    """One 1D simulation per resolution, errors against the continuous reference.

    The CFL number is fixed across levels, so the mesh ratio is constant.
    """
    if cfg.ndim != 1 or cfg.is_system:
        raise ValidationError("refinement studies are defined for 1D scalar runs")
    if len(resolutions) < 2:
        raise ValidationError("a study needs at least two resolutions")
    for coarse, fine in zip(resolutions, resolutions[1:]):
        if fine <= coarse:
            raise ValidationError(
                f"resolutions must be strictly refining, got {coarse} -> {fine}"
            )
    ratios = [fine / coarse for coarse, fine in zip(resolutions, resolutions[1:])]
    if any(abs(r - ratios[0]) > 1e-9 * ratios[0] for r in ratios):
        raise ValidationError(f"refinement ratio must be constant, got {ratios}")

    levels = []
    for m in resolutions:
        level_cfg = dataclasses.replace(cfg, m=(m,))
        problem = build_problem(level_cfg)
        l0_cont = continuous_l0(level_cfg, problem)
        result = simulate_1d(
            grid=problem.grid.axes[0],
            p=problem.params[0][0],
            law=problem.control_1d,
            spec=problem.weight_specs[0],
            w0=problem.initial,
            n_steps=problem.n_steps,
        )
        t_final = float(result.times[-1])
        l0 = l0_cont if l0_cont is not None else float(result.lyap[0])
        ref = exact_reference(l0, cfg.c_l, t_final)
        l_final = float(result.lyap[-1])
        levels.append(
            LevelResult(m=m, dx=problem.grid.spacings[0], l_final=l_final,
                        error=abs(l_final - ref))
        )
    eocs = tuple(
        eoc(coarse.error, fine.error, ratios[0])
        for coarse, fine in zip(levels, levels[1:])
    )
    return RefinementStudy(levels=tuple(levels), ratio=ratios[0], eocs=eocs)
