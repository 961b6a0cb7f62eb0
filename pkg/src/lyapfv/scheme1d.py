"""The 1D three-point finite-volume kernel in viscous form.

One interior update reads

    w_j' = w_j - (a*lam/2)(w_{j+1} - w_{j-1}) + (q/2)(w_{j-1} - 2 w_j + w_{j+1})

with the inflow ghost carrying the feedback control and the outflow ghost
extrapolated from the adjacent interior cell. The array kernels act on the
last axis so a whole batch of lines can be stepped at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InputDataError, ValidationError

_EPS = 1e-12


@dataclass(frozen=True)
class SchemeParams:
    """Scheme coefficients for one direction.

    c_l is the decay constant entering this direction's residual terms:
    the full constant in 1D, C_L/d per direction under dimensional splitting.
    """

    a: float
    lam: float
    q: float
    dt: float
    c_l: float

    def __post_init__(self) -> None:
        if self.a == 0.0:
            raise ValidationError("advection speed must be nonzero")
        if self.lam <= 0.0 or self.dt <= 0.0:
            raise ValidationError("mesh ratio and time step must be positive")
        courant = self.lam * abs(self.a)
        if courant > 1.0 + _EPS:
            raise ValidationError(f"CFL violated: lam*|a| = {courant} > 1")
        if not (courant**2 - _EPS <= self.q <= 1.0 + _EPS):
            raise ValidationError(
                f"viscosity q = {self.q} outside stability band [{courant**2}, 1]"
            )
        if 1.0 - self.c_l * self.dt <= 0.0:
            raise ValidationError(
                f"time step too large: 1 - c_l*dt = {1.0 - self.c_l * self.dt} <= 0"
            )

    @property
    def dx(self) -> float:
        return self.dt / self.lam

    @property
    def courant(self) -> float:
        return self.lam * self.a


@dataclass
class Line:
    """Cell averages w_0..w_{M+1} and exponential weights at the same centers."""

    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.values.ndim != 1 or self.values.shape != self.weights.shape:
            raise ValidationError("values and weights must be equal-length 1D arrays")
        if self.m < 1:
            raise ValidationError("a line needs at least one interior cell")
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("line values must be finite")
        if not np.all(self.weights > 0.0):
            raise ValidationError("weights must be positive")

    @property
    def m(self) -> int:
        return len(self.values) - 2

    def copy(self) -> "Line":
        return Line(self.values.copy(), self.weights)


@dataclass(frozen=True)
class EqualityReflect:
    """Control making the discrete admissibility condition an equality."""


@dataclass(frozen=True)
class ScaledReflect:
    """theta times the equality control; strict inequality for theta < 1."""

    theta: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.theta <= 1.0:
            raise ValidationError(f"theta must lie in [0, 1], got {self.theta}")


@dataclass(frozen=True)
class ZeroControl:
    """u = 0 at the inflow ghost."""


@dataclass(frozen=True)
class Prescribed:
    """Externally given control values u(t_n), indexed by step."""

    values: tuple[float, ...]


ControlLaw = Union[EqualityReflect, ScaledReflect, ZeroControl, Prescribed]


# --- array kernels (last axis = line) ---------------------------------------


def viscous_update(values: np.ndarray, courant: float, q: float) -> np.ndarray:
    """Increment for the interior cells 1..M, given populated ghosts."""
    wm = values[..., :-2]
    wi = values[..., 1:-1]
    wp = values[..., 2:]
    return -0.5 * courant * (wp - wm) + 0.5 * q * (wm - 2.0 * wi + wp)


def copy_out_ghost(values: np.ndarray, a_sign: int) -> None:
    """Constant extrapolation into the outflow ghost, in place."""
    if a_sign > 0:
        values[..., -1] = values[..., -2]
    else:
        values[..., 0] = values[..., 1]


def equality_control(values: np.ndarray, weights: np.ndarray, a_sign: int) -> np.ndarray:
    """Nonnegative control with exact equality in the admissibility condition.

    For a > 0 the observation is the right ghost value; for a < 0 the left.
    """
    e0, e1 = weights[..., 0], weights[..., 1]
    em, ep = weights[..., -2], weights[..., -1]
    if a_sign > 0:
        return np.sqrt(values[..., -1] ** 2 * (em + ep) / (e0 + e1))
    return np.sqrt(values[..., 0] ** 2 * (e0 + e1) / (em + ep))


# --- line-level operations ---------------------------------------------------


def step_interior(line: Line, p: SchemeParams) -> Line:
    """Advance the interior cells by one update; ghosts are left untouched."""
    out = line.copy()
    out.values[1:-1] += viscous_update(line.values, p.courant, p.q)
    return out


def control_equality_1d(line: Line, a_sign: int) -> float:
    return float(equality_control(line.values, line.weights, a_sign))


def control_value(line: Line, p: SchemeParams, law: ControlLaw, t_n: float) -> float:
    """Control value u(t_n) for the given law, observing the current line.

    The outflow ghost must already be populated (copy-out happens first in
    apply_boundary), since the equality laws observe it.
    """
    a_sign = 1 if p.a > 0 else -1
    if isinstance(law, EqualityReflect):
        return control_equality_1d(line, a_sign)
    if isinstance(law, ScaledReflect):
        return law.theta * control_equality_1d(line, a_sign)
    if isinstance(law, ZeroControl):
        return 0.0
    if isinstance(law, Prescribed):
        n = int(round(t_n / p.dt))
        if n >= len(law.values):
            raise InputDataError(
                f"prescribed control exhausted: step {n} of {len(law.values)} values"
            )
        return float(law.values[n])
    raise ValidationError(f"unknown control law {law!r}")


def apply_boundary(line: Line, p: SchemeParams, law: ControlLaw, t_n: float) -> Line:
    """Populate both ghosts: copy-out at the outflow, control at the inflow."""
    out = line.copy()
    a_sign = 1 if p.a > 0 else -1
    copy_out_ghost(out.values, a_sign)
    u = control_value(out, p, law, t_n)
    if a_sign > 0:
        out.values[0] = u
    else:
        out.values[-1] = u
    return out


def step_line(line: Line, p: SchemeParams, law: ControlLaw, t_n: float) -> Line:
    """One full step: boundary closure, interior update, outflow refresh."""
    out = apply_boundary(line, p, law, t_n)
    out.values[1:-1] += viscous_update(out.values, p.courant, p.q)
    copy_out_ghost(out.values, 1 if p.a > 0 else -1)
    return out
