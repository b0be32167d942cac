import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from eigenscope.errors import ConfigurationError, PreconditionError
from eigenscope.flow import (
    FlowSettings,
    PhasePoint,
    closed_flow,
    conormal_arrays,
    conormal_sample,
    detect_loop,
    flow,
    looping_fraction,
    ode_flow,
)
from eigenscope.manifolds import ManifoldModel
from eigenscope.submanifolds import make_submanifold

S2 = ManifoldModel.sphere()
T2 = ManifoldModel.torus()
ODE = FlowSettings(mode="ode")


def _random_unit(rng, count):
    x = rng.standard_normal((count, 3))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    v = rng.standard_normal((count, 3))
    v -= np.sum(v * x, axis=1, keepdims=True) * x
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return x, v


unit_points = st.integers(0, 2**32 - 1).map(lambda s: _random_unit(np.random.default_rng(s), 1))
times = st.floats(-2, 2)


def test_sphere_period():
    rng = np.random.default_rng(0)
    x, v = _random_unit(rng, 5)
    for xi, vi in zip(x, v):
        p = flow(S2, PhasePoint(xi, vi), 2 * math.pi)
        np.testing.assert_allclose(p.x, xi, atol=1e-14)
        np.testing.assert_allclose(p.xi, vi, atol=1e-14)


def test_torus_straight_line():
    p = flow(T2, PhasePoint([0.3, 0.0], [0.0, 1.0]), 0.25)
    np.testing.assert_allclose(p.x, [0.3, 0.25])
    np.testing.assert_allclose(p.xi, [0.0, 1.0])


def test_ode_matches_closed_form():
    rng = np.random.default_rng(1)
    x, v = _random_unit(rng, 100)
    for t in (1.0, 2 * math.pi, -2 * math.pi):
        a = closed_flow(S2, x, v, t)
        b = ode_flow(S2, x, v, t, ODE)
        assert np.max(np.abs(a[0] - b[0])) < 1e-8 and np.max(np.abs(a[1] - b[1])) < 1e-8


def test_ode_unit_speed_to_t20():
    rng = np.random.default_rng(2)
    x, v = _random_unit(rng, 20)
    for settings in (ODE, FlowSettings(mode="ode", renormalize=False)):
        for t in (5.0, 20.0):
            xt, vt = ode_flow(S2, x, v, t, settings)
            assert np.max(np.abs(np.linalg.norm(vt, axis=1) - 1)) < 1e-8
            assert np.max(np.abs(np.sum(xt * vt, axis=1))) < 1e-8


def test_non_unit_input_rejected():
    with pytest.raises(PreconditionError):
        flow(S2, PhasePoint([1.0, 0, 0], [0, 2.0, 0]), 1.0)
    with pytest.raises(PreconditionError):
        flow(T2, PhasePoint([0.0, 0.0], [0.5, 0.0]), 1.0)


def test_settings_validation():
    with pytest.raises(ConfigurationError):
        FlowSettings(dt=0)
    with pytest.raises(ConfigurationError):
        FlowSettings(mode="leapfrog")


@given(unit_points, times, times)
def test_group_law(pt, s, t):
    (x,), (v,) = pt
    for mode in (FlowSettings(), ODE):
        a = flow(S2, flow(S2, PhasePoint(x, v), s, mode), t, mode)
        b = flow(S2, PhasePoint(x, v), s + t, mode)
        np.testing.assert_allclose(a.x, b.x, atol=1e-8)
        np.testing.assert_allclose(a.xi, b.xi, atol=1e-8)


@given(unit_points, times)
def test_time_reversal(pt, t):
    (x,), (v,) = pt
    for mode in (FlowSettings(), ODE):
        a = flow(S2, PhasePoint(x, -v), t, mode)
        b = flow(S2, PhasePoint(x, v), -t, mode)
        np.testing.assert_allclose(a.x, b.x, atol=1e-8)
        np.testing.assert_allclose(a.xi, -b.xi, atol=1e-8)


def test_conormal_samples():
    eq = make_submanifold(S2, "equator")
    for p in conormal_sample(eq, 50, seed=3):
        assert abs(abs(p.xi[2]) - 1) < 1e-12 and abs(p.x[2]) < 1e-15
    line = make_submanifold(T2, "line")
    for p in conormal_sample(line, 50, seed=3):
        np.testing.assert_allclose(np.abs(p.xi), [0.0, 1.0])
    arc = make_submanifold(T2, "sine_arc")
    X, XI, U = conormal_arrays(arc, 200, seed=3)
    assert np.max(arc.tangential_component(U, XI)) < 1e-10
    assert np.all(arc.in_support(U))


def test_point_fiber_uniform():
    from scipy.stats import chisquare  # noqa: PLC0415  (test-only dependency)

    pt = make_submanifold(T2, "point", base=[0.4, 0.6])
    _, XI, _ = conormal_arrays(pt, 10_000, seed=11)
    ang = np.mod(np.arctan2(XI[:, 1], XI[:, 0]), 2 * math.pi)
    counts = np.bincount((ang / (2 * math.pi) * 24).astype(int), minlength=24)
    assert chisquare(counts).pvalue > 0.01


def test_sampling_deterministic_and_prefix_stable():
    arc = make_submanifold(T2, "sine_arc")
    a = conormal_arrays(arc, 40, seed=9)
    b = conormal_arrays(arc, 80, seed=9)
    np.testing.assert_array_equal(a[0], b[0][:40])
    np.testing.assert_array_equal(a[1], b[1][:40])


def test_detect_loop_examples():
    line = make_submanifold(T2, "line")
    ev = detect_loop(T2, PhasePoint([0.3, 0.0], [0.0, 1.0]), line, 2.0, 1e-3)
    assert ev.t_return == pytest.approx(1.0, abs=1e-9)
    eq = make_submanifold(S2, "equator")
    ev = detect_loop(S2, PhasePoint([math.cos(0.4), math.sin(0.4), 0], [0, 0, -1.0]), eq, 4.0, 1e-3)
    assert ev.t_return == pytest.approx(math.pi, abs=1e-9)
    np.testing.assert_allclose(ev.landing.x, [-math.cos(0.4), -math.sin(0.4), 0], atol=1e-9)
    assert abs(abs(ev.landing.xi[2]) - 1) < 1e-9
    ev = detect_loop(S2, PhasePoint([1.0, 0, 0], [0, 0, 1.0]), eq, 4.0, 1e-3, ODE)
    assert ev.t_return == pytest.approx(math.pi, abs=1e-8)


def test_detect_loop_generic_arc_none():
    arc = make_submanifold(T2, "sine_arc")
    u = np.array([[0.37]])
    p = PhasePoint(arc.embed(u)[0], arc.normal_frame(u)[0, 0])
    assert detect_loop(T2, p, arc, 10.0, 1e-3) is None


def test_detect_loop_errors():
    line = make_submanifold(T2, "line")
    p = PhasePoint([0.3, 0.0], [0.0, 1.0])
    with pytest.raises(ConfigurationError):
        detect_loop(T2, p, line, 2.0, 1e-6, FlowSettings(dt=2e-3))
    with pytest.raises(ConfigurationError):
        detect_loop(T2, p, line, 0.05, 1e-3)
    with pytest.raises(PreconditionError):
        detect_loop(T2, PhasePoint([0.3, 0.2], [0.0, 1.0]), line, 2.0, 1e-3)


def test_fractions_saturating_cases():
    eq = looping_fraction(S2, make_submanifold(S2, "equator"), 4.0, 200, seed=1)
    assert eq.fraction == 1.0 and eq.stderr == 0.0
    ln = looping_fraction(T2, make_submanifold(T2, "line"), 2.0, 200, seed=1)
    assert ln.fraction == 1.0
    with pytest.raises(ConfigurationError):
        looping_fraction(T2, make_submanifold(T2, "line"), 2.0, 50)


def test_tolerance_stability():
    eq = make_submanifold(S2, "equator")
    line = make_submanifold(T2, "line")
    for tol in (1e-2, 1e-3, 1e-4, 1e-5):
        s = FlowSettings(dt=min(2e-3, math.sqrt(tol)))
        assert looping_fraction(S2, eq, 4.0, 100, tol, seed=2, s=s).fraction == 1.0
        assert looping_fraction(T2, line, 2.0, 100, tol, seed=2, s=s).fraction == 1.0


@pytest.mark.slow
def test_sine_arc_fraction_monotone():
    arc = make_submanifold(T2, "sine_arc")
    fr = [looping_fraction(T2, arc, 5.0, 300, tol, seed=4).fraction for tol in (4e-3, 2e-3, 1e-3)]
    assert fr[0] >= fr[1] >= fr[2]
    assert fr[0] <= 0.1


def test_csv(tmp_path):
    est = looping_fraction(T2, make_submanifold(T2, "line"), 2.0, 100, seed=5)
    est.write_csv(tmp_path / "l.csv")
    lines = (tmp_path / "l.csv").read_text().splitlines()
    assert lines[0] == "sample_id,loops,t_return" and len(lines) == 101
