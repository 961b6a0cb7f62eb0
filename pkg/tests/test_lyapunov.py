import math

import numpy as np
import pytest
from scipy import integrate

from lyapfv import (
    EqualityReflect,
    FieldMD,
    GeneralAffine,
    Line,
    PerDirectionAffine,
    PerDirectionEquality,
    SchemeParams,
    TheoremPreconditionError,
    ValidationError,
    bound_trajectory,
    build_grid_md,
    discrete_lyapunov,
    project_initial,
    quadrature_lyapunov,
    residual_terms_1d,
    step_md,
    viscous_residual,
)
from lyapfv.lyapunov import (
    LyapunovSample,
    ResidualBreakdown,
    assemble_sweep_ledger,
    assemble_sweep_residual,
)
from lyapfv.scheme1d import apply_boundary
from lyapfv.simulate import simulate_1d
from lyapfv.weights import weight_on_grid

from oracles import lyapunov_oracle, residual_oracle

RNG = np.random.default_rng(99173)


def test_sample_rejects_negative():
    with pytest.raises(ValidationError):
        LyapunovSample(t=0.0, value=-1.0)


def test_breakdown_total_identity():
    r = ResidualBreakdown(r0=1.0, re1=2.0, re2_bound=3.0, ru=4.0, r2=5.0, r1=6.0,
                          re_exact=7.0, dx=0.1)
    assert r.total_r == pytest.approx(1.0 * 0.1 + 2.0 * 0.01 + 3.0 * 0.001 + 15.0)
    zero = ResidualBreakdown(0, 0, 0, 0, 0, 0, 0, dx=0.1)
    assert zero.total_r == 0.0


def test_discrete_lyapunov_trivia():
    grid = build_grid_md([(0, 1), (0, 2)], [5, 5])
    zero = FieldMD(grid, np.zeros(grid.shape))
    spec = GeneralAffine(gradient=(0.0, 0.0))
    assert discrete_lyapunov(zero, spec).value == 0.0
    const = FieldMD(grid, np.full(grid.shape, 3.0))
    assert discrete_lyapunov(const, spec).value == pytest.approx(9.0 * 2.0)


def test_discrete_lyapunov_quadrature_oracle():
    grid = build_grid_md([(0, 1)], [1000])
    spec = PerDirectionAffine(c_l=3.0, speeds=(2.0,))
    fld = project_initial(grid, lambda x: np.sin(2 * np.pi * x))
    want, _ = integrate.quad(
        lambda x: math.sin(2 * math.pi * x) ** 2 * math.exp(-1.5 * x), 0, 1,
        epsabs=1e-13,
    )
    got = discrete_lyapunov(fld, spec).value
    assert got == pytest.approx(want, abs=5e-6)  # O(dx^2)


def test_discrete_lyapunov_matches_scalar_oracle():
    grid = build_grid_md([(0, 1)], [17])
    spec = PerDirectionAffine(c_l=3.0, speeds=(2.0,))
    values = RNG.normal(size=grid.shape)
    fld = FieldMD(grid, values)
    e = weight_on_grid(spec, grid)
    want = lyapunov_oracle(values.tolist(), e.tolist(), grid.spacings[0])
    assert discrete_lyapunov(fld, spec).value == pytest.approx(want, rel=1e-13)


def test_quadrature_lyapunov_unit_weight_equals_discrete():
    grid = build_grid_md([(0, 1), (0, 1)], [4, 6])
    spec = GeneralAffine(gradient=(0.0, 0.0))
    fld = FieldMD(grid, RNG.normal(size=grid.shape))
    for pts in (1, 2, 4):
        got = quadrature_lyapunov(fld, spec, pts).value
        assert got == pytest.approx(discrete_lyapunov(fld, spec).value, rel=1e-13)


def test_quadrature_lyapunov_two_point_one_cell():
    grid = build_grid_md([(0, 1)], [1])
    spec = GeneralAffine(gradient=(-1.5,))
    fld = FieldMD(grid, np.ones(grid.shape))
    nodes, wts = np.polynomial.legendre.leggauss(2)
    want = sum(0.5 * w * math.exp(-1.5 * (0.5 + 0.5 * xi)) for xi, w in zip(nodes, wts))
    assert quadrature_lyapunov(fld, spec, 2).value == pytest.approx(want, rel=1e-14)
    # and the 2-point value approximates the closed form (1 - e^{-1.5})/1.5
    assert quadrature_lyapunov(fld, spec, 2).value == pytest.approx(
        (1 - math.exp(-1.5)) / 1.5, rel=2e-3
    )


def test_quadrature_lyapunov_rejects_zero_points():
    grid = build_grid_md([(0, 1)], [4])
    fld = FieldMD(grid, np.zeros(grid.shape))
    with pytest.raises(ValidationError):
        quadrature_lyapunov(fld, GeneralAffine(gradient=(0.0,)), 0)


def _random_closed_line(m, p):
    values = RNG.normal(size=m + 2)
    weights = np.exp(np.linspace(0.5, -0.8, m + 2))
    line = apply_boundary(Line(values, weights), p, EqualityReflect(), 0.0)
    u = float(line.values[0] if p.a > 0 else line.values[-1])
    return line, u


def test_residual_terms_zero_field():
    p = SchemeParams(a=2.0, lam=0.25, q=1.0, dt=0.01, c_l=3.0)
    line = Line(np.zeros(7), np.exp(np.linspace(0, -1, 7)))
    r = residual_terms_1d(line, p, 0.0)
    for name in ("r0", "re1", "re2_bound", "ru", "r2", "r1", "re_exact"):
        assert getattr(r, name) == 0.0


def test_residual_terms_match_oracle_3cell():
    p = SchemeParams(a=2.0, lam=0.1, q=0.5, dt=0.02, c_l=3.0)
    u = 0.4
    values = np.array([u, 1.0, 2.0, 3.0, 3.0])
    weights = np.exp(np.linspace(0.2, -0.6, 5))
    line = Line(values, weights)
    got = residual_terms_1d(line, p, u)
    want = residual_oracle(values.tolist(), weights.tolist(), p.a, p.lam, p.q, p.c_l, u)
    for name, val in want.items():
        assert getattr(got, name) == pytest.approx(val, rel=1e-12, abs=1e-15)


def test_residual_terms_match_oracle_randomized():
    for _ in range(1000):
        a = float(RNG.choice([-1, 1]) * RNG.uniform(0.5, 3.0))
        lam = RNG.uniform(0.1, 1.0) / abs(a)
        q = RNG.uniform((lam * a) ** 2, 1.0)
        p = SchemeParams(a=a, lam=lam, q=q, dt=0.01, c_l=2.0)
        m = int(RNG.integers(3, 11))
        line, u = _random_closed_line(m, p)
        got = residual_terms_1d(line, p, u)
        want = residual_oracle(
            line.values.tolist(), line.weights.tolist(), a, lam, q, 2.0, u
        )
        for name, val in want.items():
            assert getattr(got, name) == pytest.approx(val, rel=1e-12, abs=1e-14)


def test_exact_ledger_small_run():
    # (L^{n+1} - L^n)/dt equals RE_exact + Ru + R2 + R1 under equality control
    from lyapfv import build_grid_1d

    g = build_grid_1d(0.0, 1.0, 50)
    dt = 0.5 * g.dx / 2.0
    p = SchemeParams(a=2.0, lam=dt / g.dx, q=0.6, dt=dt, c_l=3.0)
    spec = PerDirectionAffine(c_l=3.0, speeds=(2.0,))
    res = simulate_1d(g, p, EqualityReflect(), spec,
                      lambda x: np.sin(2 * np.pi * x), 200)
    for n in range(200):
        lhs = (res.lyap[n + 1] - res.lyap[n]) / dt
        rhs = res.residuals[n].ledger_rate
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, res.lyap[n] / dt)


def test_affine_weight_identity_re0():
    # R_{E,0} dx = -C_L L + R0 dx for affine weights, to round-off
    c_l, a = 3.0, 2.0
    p = SchemeParams(a=a, lam=0.1, q=0.5, dt=0.02, c_l=c_l)
    m = 20
    line, u = _random_closed_line(m, p)
    dx = p.dx
    w, e = line.values, line.weights
    # E_j' = -(C_L/a) E_j exactly for this weight family
    re0 = sum(
        0.5 * a * (w[i + 1] ** 2 * (-(c_l / a) * e[i + 1])
                   + w[i - 1] ** 2 * (-(c_l / a) * e[i - 1]))
        for i in range(1, m + 1)
    )
    lyap = lyapunov_oracle(w.tolist(), e.tolist(), dx)
    r = residual_terms_1d(line, p, u)
    assert re0 * dx == pytest.approx(-c_l * lyap + r.r0 * dx, rel=1e-12)


def test_viscous_residual_trivia():
    grid = build_grid_md([(0, 1), (0, 1)], [8, 8])
    spec = GeneralAffine(gradient=(0.3, -0.2))
    const = FieldMD(grid, np.full(grid.shape, 2.0))
    assert viscous_residual(const, spec, 1.0) == pytest.approx(0.0, abs=1e-12)
    rand = FieldMD(grid, RNG.normal(size=grid.shape))
    assert viscous_residual(rand, spec, 0.0) == 0.0


def test_viscous_residual_linear_in_q_and_quadratic_in_w():
    grid = build_grid_md([(0, 1)], [30])
    spec = GeneralAffine(gradient=(-0.5,))
    values = RNG.normal(size=grid.shape)
    f1 = FieldMD(grid, values)
    f2 = FieldMD(grid, 2.0 * values)
    r1 = viscous_residual(f1, spec, 0.7)
    assert viscous_residual(f1, spec, 1.4) == pytest.approx(2.0 * r1, rel=1e-13)
    assert viscous_residual(f2, spec, 0.7) == pytest.approx(4.0 * r1, rel=1e-13)


def test_viscous_residual_sine_closed_form():
    # 2 q int w w_xx = -2 (2 pi)^2 int sin^2 = -4 pi^2 for q = 1, mu = 0
    grid = build_grid_md([(0, 1)], [100])
    x = grid.axes[0].centers()
    fld = FieldMD(grid, np.sin(2 * np.pi * x))
    spec = GeneralAffine(gradient=(0.0,))
    got = viscous_residual(fld, spec, 1.0)
    assert got == pytest.approx(-4.0 * math.pi**2, rel=5e-3)


def test_bound_trajectory_trivia():
    traj = bound_trajectory(2.0, [0.0, 0.0, 0.0], c_l=3.0, dt=0.01, d=1)
    assert traj.geometric[0] == traj.exponential[0] == 2.0
    np.testing.assert_allclose(traj.geometric,
                               2.0 * (1 - 0.03) ** np.arange(4), rtol=1e-14)
    np.testing.assert_allclose(traj.exponential,
                               2.0 * np.exp(-3.0 * traj.times), rtol=1e-14)
    assert np.all(traj.exponential >= traj.geometric - 1e-15)


def test_bound_trajectory_accepts_breakdowns():
    r = ResidualBreakdown(0, 0, 0, 0, 0, 0.5, 0, dx=0.1)
    traj = bound_trajectory(1.0, [r], c_l=1.0, dt=0.1, d=1)
    assert traj.geometric[1] == pytest.approx(0.9 + 0.1 * 0.5)


def test_bound_trajectory_precondition():
    with pytest.raises(TheoremPreconditionError):
        bound_trajectory(1.0, [0.0], c_l=3.0, dt=0.5, d=1)


def test_bound_trajectory_sweep_count_validation():
    with pytest.raises(ValidationError):
        bound_trajectory(1.0, [0.0, 0.0, 0.0], c_l=1.0, dt=0.01, d=2)


def _md_setup():
    grid = build_grid_md([(0, 1), (0, 1)], [16, 16])
    speeds = (1.0, -2.0)
    c_l = 2.0
    spec = PerDirectionAffine(c_l=c_l, speeds=speeds)
    dt = 0.5 * min(dx / abs(a) for dx, a in zip(grid.spacings, speeds))
    params = [
        SchemeParams(a=a, lam=dt / dx, q=1.0, dt=dt, c_l=c_l / 2)
        for a, dx in zip(speeds, grid.spacings)
    ]
    return grid, speeds, c_l, spec, dt, params


def test_md_per_sweep_ledger_exact():
    from lyapfv.splitmd import sweep_direction

    grid, speeds, c_l, spec, dt, params = _md_setup()
    ew = weight_on_grid(spec, grid)
    fld = project_initial(grid, lambda x, y: np.sin(2 * np.pi * x) * np.sin(2 * np.pi * y))
    for _ in range(20):
        for k in range(grid.ndim):
            before = discrete_lyapunov(fld, spec).value
            rec = sweep_direction(fld, k, params[k], PerDirectionEquality(), ew,
                                  record=True)
            after = discrete_lyapunov(fld, spec).value
            ledger = assemble_sweep_ledger(rec, grid, spec)
            assert abs((after - before) / dt - ledger) <= 1e-10 * max(1.0, before / dt)


def test_md_bound_assembly_refuses_non_per_direction_weight():
    grid, speeds, c_l, spec, dt, params = _md_setup()
    bad = GeneralAffine(gradient=(-1.25, 1.0))
    ew = weight_on_grid(bad, grid)
    fld = project_initial(grid, lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y))
    recs = step_md(fld, params, PerDirectionEquality(), ew, record=True)
    with pytest.raises(TheoremPreconditionError, match="theorem preconditions unmet"):
        assemble_sweep_residual(recs[0], grid, bad, 3.0, (4.0, 2.0))
