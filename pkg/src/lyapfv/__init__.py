"""Finite-volume transport with boundary feedback and discrete decay diagnostics."""

from .errors import (
    ConfigError,
    InputDataError,
    LyapFvError,
    NumericalError,
    TheoremPreconditionError,
    UndefinedOrderError,
    ValidationError,
)
from .grid import Grid1D, GridMD, build_grid_1d, build_grid_md, cfl_timestep
from .weights import (
    DecayReport,
    GeneralAffine,
    PerDirectionAffine,
    WeightSpec,
    exp_weight,
    mu_value,
    verify_decay_condition,
    weight_on_grid,
)
from .scheme1d import (
    ControlLaw,
    EqualityReflect,
    Line,
    Prescribed,
    ScaledReflect,
    SchemeParams,
    ZeroControl,
    step_line,
)
from .splitmd import (
    AggregateIntegral2D,
    FieldMD,
    MDControl,
    PerDirectionEquality,
    ZeroInflow,
    aggregate_control_2d,
    project_initial,
    step_md,
)
from .lyapunov import (
    BoundTrajectory,
    LyapunovSample,
    ResidualBreakdown,
    bound_trajectory,
    discrete_lyapunov,
    quadrature_lyapunov,
    residual_terms_1d,
    viscous_residual,
)
from .analysis import RefinementStudy, eoc, exact_reference, run_refinement_study
from .config import RunConfig, build_problem, load_config, parse_config, serialize_config
from .simulate import simulate_1d, simulate_md, simulate_system_2d

__all__ = [name for name in dir() if not name.startswith("_")]
