import math

import numpy as np
import pytest

from lyapfv import (
    EqualityReflect,
    InputDataError,
    Line,
    Prescribed,
    ScaledReflect,
    SchemeParams,
    ValidationError,
    ZeroControl,
    step_line,
)
from lyapfv.scheme1d import (
    apply_boundary,
    control_equality_1d,
    control_value,
    step_interior,
)

from oracles import control_oracle, full_step_oracle, step_oracle

RNG = np.random.default_rng(20240811)


def random_line(m=None):
    m = m if m is not None else int(RNG.integers(3, 11))
    values = RNG.normal(size=m + 2)
    weights = np.exp(RNG.uniform(-1.5, 1.5, size=m + 2))
    return Line(values, weights)


def random_params():
    a = float(RNG.choice([-1, 1]) * RNG.uniform(0.5, 4.0))
    lam = RNG.uniform(0.1, 1.0) / abs(a)
    q = RNG.uniform((lam * a) ** 2, 1.0)
    dt = RNG.uniform(0.001, 0.01)
    return SchemeParams(a=a, lam=lam, q=q, dt=dt, c_l=1.0)


def test_params_validation():
    with pytest.raises(ValidationError):
        SchemeParams(a=0.0, lam=0.5, q=1.0, dt=0.1, c_l=1.0)
    with pytest.raises(ValidationError):
        SchemeParams(a=3.0, lam=0.5, q=1.0, dt=0.1, c_l=1.0)  # CFL
    with pytest.raises(ValidationError):
        SchemeParams(a=1.0, lam=0.5, q=0.1, dt=0.1, c_l=1.0)  # below (lam a)^2
    with pytest.raises(ValidationError):
        SchemeParams(a=1.0, lam=0.5, q=1.5, dt=0.1, c_l=1.0)  # above 1
    with pytest.raises(ValidationError):
        SchemeParams(a=1.0, lam=0.5, q=0.5, dt=1.0, c_l=2.0)  # 1 - c_l dt <= 0


def test_line_validation():
    with pytest.raises(ValidationError):
        Line(np.zeros(2), np.ones(2))  # no interior cell
    with pytest.raises(ValidationError):
        Line(np.array([0.0, np.nan, 0.0]), np.ones(3))
    with pytest.raises(ValidationError):
        Line(np.zeros(4), np.array([1.0, 1.0, 0.0, 1.0]))


def test_hand_evaluated_update():
    # (w_{j-1}, w_j, w_{j+1}) = (1, 2, 3), lam*a = 0.5, q = 0.5 -> 1.5
    p = SchemeParams(a=1.0, lam=0.5, q=0.5, dt=0.05, c_l=1.0)
    line = Line(np.array([1.0, 2.0, 3.0]), np.ones(3))
    out = step_interior(line, p)
    assert out.values[1] == pytest.approx(1.5)


def test_constant_fixed_point():
    p = SchemeParams(a=2.0, lam=0.25, q=0.7, dt=0.05, c_l=1.0)
    line = Line(np.full(8, 3.25), np.ones(8))
    out = step_interior(line, p)
    assert np.array_equal(out.values, line.values)


def test_unit_cfl_is_exact_shift():
    p = SchemeParams(a=1.0, lam=1.0, q=1.0, dt=0.1, c_l=1.0)
    w = np.array([0.0, 1.0, 0.0, 0.0, 0.0])
    out = step_interior(Line(w, np.ones(5)), p)
    assert np.array_equal(out.values[1:-1], w[:-2])


def test_step_interior_matches_oracle_randomized():
    for _ in range(1000):
        line = random_line()
        p = random_params()
        out = step_interior(line, p)
        expected = step_oracle(line.values.tolist(), p.a, p.lam, p.q)
        np.testing.assert_allclose(out.values[1:-1], expected[1:-1], rtol=1e-12)
        np.testing.assert_array_equal(out.values[[0, -1]], line.values[[0, -1]])


def test_control_matches_oracle_randomized():
    for _ in range(1000):
        line = random_line()
        for a_sign in (1, -1):
            got = control_equality_1d(line, a_sign)
            want = control_oracle(line.values.tolist(), line.weights.tolist(), a_sign)
            assert got == pytest.approx(want, rel=1e-12)
            assert got >= 0.0


def test_control_trivia():
    line = Line(np.array([0.5, 1.0, 2.0, 0.0]), np.ones(4))
    assert control_equality_1d(line, 1) == 0.0
    line2 = Line(np.array([0.0, 1.0, 2.0, -3.0]), np.ones(4))
    assert control_equality_1d(line2, 1) == pytest.approx(3.0)


def test_control_explicit_m4():
    # M = 4 on [0,1], mu = -1.5x, w_5 = 1
    centers = np.array([-0.125, 0.125, 0.375, 0.625, 0.875, 1.125])
    weights = np.exp(-1.5 * centers)
    values = np.zeros(6)
    values[5] = 1.0
    line = Line(values, weights)
    want = math.sqrt(
        (math.exp(-1.3125) + math.exp(-1.6875))
        / (math.exp(0.1875) + math.exp(-0.1875))
    )
    assert control_equality_1d(line, 1) == pytest.approx(want, rel=1e-14)


def test_control_admissibility_all_laws():
    # a (u)^2 (E_0+E_1)/2 <= a (w_{M+1})^2 (E_M+E_{M+1})/2 for a > 0
    p = SchemeParams(a=2.0, lam=0.25, q=1.0, dt=0.05, c_l=1.0)
    for law in (EqualityReflect(), ScaledReflect(0.5), ScaledReflect(0.0), ZeroControl()):
        for _ in range(50):
            line = random_line()
            closed = apply_boundary(line, p, law, 0.0)
            u = closed.values[0]
            e = line.weights
            lhs = u**2 * (e[0] + e[1]) / 2
            rhs = closed.values[-1] ** 2 * (e[-2] + e[-1]) / 2
            assert lhs <= rhs * (1 + 1e-12) + 1e-15
            if isinstance(law, EqualityReflect):
                assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-15)


def test_apply_boundary_negative_speed():
    p = SchemeParams(a=-1.5, lam=0.25, q=1.0, dt=0.05, c_l=1.0)
    line = random_line()
    closed = apply_boundary(line, p, EqualityReflect(), 0.0)
    assert closed.values[0] == closed.values[1]  # outflow copy-out on the left
    want = control_oracle(closed.values.tolist(), line.weights.tolist(), -1)
    assert closed.values[-1] == pytest.approx(want, rel=1e-12)


def test_prescribed_control_indexing_and_exhaustion():
    p = SchemeParams(a=1.0, lam=0.5, q=1.0, dt=0.1, c_l=1.0)
    law = Prescribed(values=(0.3, 0.7))
    line = random_line()
    assert control_value(line, p, law, 0.0) == 0.3
    assert control_value(line, p, law, 0.1) == 0.7
    with pytest.raises(InputDataError):
        control_value(line, p, law, 0.2)


def test_step_line_zero_invariance():
    p = SchemeParams(a=2.0, lam=0.3, q=0.9, dt=0.05, c_l=1.0)
    line = Line(np.zeros(9), np.exp(np.linspace(0, -1, 9)))
    for law in (ZeroControl(), EqualityReflect()):
        out = step_line(line, p, law, 0.0)
        assert np.array_equal(out.values, np.zeros(9))


def test_step_line_exact_shift_with_injection():
    p = SchemeParams(a=1.0, lam=1.0, q=1.0, dt=0.1, c_l=1.0)
    w = np.array([0.0, 0.1, 0.2, 0.3, 0.0])
    line = Line(w, np.ones(5))
    out = step_line(line, p, Prescribed(values=(0.9,)), 0.0)
    np.testing.assert_allclose(out.values[1:-1], [0.9, 0.1, 0.2])


def test_step_line_matches_full_oracle_randomized():
    for _ in range(300):
        line = random_line()
        p = random_params()
        law = EqualityReflect()
        closed = apply_boundary(line, p, law, 0.0)
        u = closed.values[0] if p.a > 0 else closed.values[-1]
        got = step_line(line, p, law, 0.0)
        want = full_step_oracle(
            line.values.tolist(), line.weights.tolist(), p.a, p.lam, p.q, u
        )
        np.testing.assert_allclose(got.values, want, rtol=1e-12, atol=1e-15)


def test_max_principle_in_monotone_band():
    for _ in range(300):
        line = random_line()
        a = float(RNG.choice([-1, 1]) * RNG.uniform(0.5, 3.0))
        lam = RNG.uniform(0.1, 1.0) / abs(a)
        q = RNG.uniform(lam * abs(a), 1.0)
        p = SchemeParams(a=a, lam=lam, q=q, dt=0.001, c_l=1.0)
        out = step_interior(line, p)
        assert out.values[1:-1].max() <= line.values.max() + 1e-12
        assert out.values[1:-1].min() >= line.values.min() - 1e-12


def test_step_interior_linearity():
    p = random_params()
    la, lb = random_line(6), random_line(6)
    lb = Line(lb.values, la.weights)
    combo = Line(2.0 * la.values - 3.0 * lb.values, la.weights)
    out = step_interior(combo, p).values
    want = 2.0 * step_interior(la, p).values - 3.0 * step_interior(lb, p).values
    np.testing.assert_allclose(out, want, rtol=1e-12, atol=1e-13)


def test_scaled_reflect_theta_validation():
    with pytest.raises(ValidationError):
        ScaledReflect(theta=1.5)
    with pytest.raises(ValidationError):
        ScaledReflect(theta=-0.1)
