"""Affine weight functions mu and the exponential weight exp(mu).

Only affine mu are supported: their exponential weights have exact
derivatives, which the decay machinery relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import ValidationError
from .grid import GridMD


@dataclass(frozen=True)
class PerDirectionAffine:
    """mu(x) = sum_k mu_k(x_k) with a_k mu_k'(x) = -c_l/d enforced by construction."""

    c_l: float
    speeds: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.c_l <= 0.0:
            raise ValidationError(f"decay constant must be positive, got {self.c_l}")
        for a in self.speeds:
            if a == 0.0:
                raise ValidationError("advection speeds must be nonzero")

    @property
    def ndim(self) -> int:
        return len(self.speeds)

    @property
    def gradient(self) -> tuple[float, ...]:
        d = self.ndim
        return tuple(-(self.c_l / d) / a for a in self.speeds)

    @property
    def offset(self) -> float:
        return 0.0


@dataclass(frozen=True)
class GeneralAffine:
    """mu(x) = gradient . x + offset."""

    gradient: tuple[float, ...]
    offset: float = 0.0

    @property
    def ndim(self) -> int:
        return len(self.gradient)


WeightSpec = Union[PerDirectionAffine, GeneralAffine]


def _check_point(spec: WeightSpec, x: Sequence[float]) -> np.ndarray:
    pt = np.atleast_1d(np.asarray(x, dtype=float))
    if pt.shape[-1] != spec.ndim:
        raise ValidationError(
            f"point dimension {pt.shape[-1]} does not match weight dimension {spec.ndim}"
        )
    return pt


def mu_value(spec: WeightSpec, x: Sequence[float]) -> float:
    pt = _check_point(spec, x)
    g = np.asarray(spec.gradient)
    return float(pt @ g + spec.offset)


def exp_weight(spec: WeightSpec, x: Sequence[float]) -> float:
    return float(np.exp(mu_value(spec, x)))


def axis_factors(spec: WeightSpec, grid: GridMD) -> list[np.ndarray]:
    """Per-axis factors E_k(x_k) = exp(g_k x_k) at centers, ghosts included.

    The offset is folded into axis 0, so the tensor product of the factors
    equals exp(mu) at every center.
    """
    if spec.ndim != grid.ndim:
        raise ValidationError("weight and grid dimensions differ")
    factors = []
    for k, (g, ax) in enumerate(zip(spec.gradient, grid.axes)):
        mu_axis = g * ax.centers()
        if k == 0:
            mu_axis = mu_axis + spec.offset
        factors.append(np.exp(mu_axis))
    return factors


def weight_on_grid(spec: WeightSpec, grid: GridMD) -> np.ndarray:
    """exp(mu) at all cell centers including ghosts, shaped like the grid."""
    factors = axis_factors(spec, grid)
    out = factors[0]
    for f in factors[1:]:
        out = np.multiply.outer(out, f)
    return out


@dataclass(frozen=True)
class DecayReport:
    holds: bool
    residual: float


def verify_decay_condition(
    spec: WeightSpec,
    speeds: Sequence[float],
    c_l: float,
    per_direction: bool,
    tol: float = 1e-12,
) -> DecayReport:
    """Check the weight decay condition for constant speeds.

    Aggregate mode checks a . grad(mu) + c_l = 0; per-direction mode checks
    a_k g_k + c_l/d = 0 for every k. The report's residual is the largest
    violation in absolute value.
    """
    g = np.asarray(spec.gradient)
    a = np.asarray(speeds, dtype=float)
    if a.shape != g.shape:
        raise ValidationError("speeds must match the weight dimension")
    if per_direction:
        residual = float(np.max(np.abs(a * g + c_l / len(a))))
    else:
        residual = abs(float(a @ g) + c_l)
    return DecayReport(holds=residual <= tol, residual=residual)
