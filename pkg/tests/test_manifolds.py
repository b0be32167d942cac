import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from eigenscope.errors import DomainError, ModelError
from eigenscope.manifolds import (
    ChartPoint,
    ManifoldModel,
    fermi_chart,
    principal_symbol,
    sphere_eigenvalue,
)
from eigenscope.submanifolds import make_submanifold

S2 = ManifoldModel.sphere()
T2 = ManifoldModel.torus()


@pytest.mark.parametrize("j, n, expected", [(0, 2, 0.0), (1, 2, 1.414214), (3, 3, 3.872983)])
def test_sphere_eigenvalue(j, n, expected):
    assert sphere_eigenvalue(j, n) == pytest.approx(expected, abs=1e-6)


def test_invalid_models():
    with pytest.raises(ModelError):
        ManifoldModel("sphere", 0)
    with pytest.raises(ModelError):
        ManifoldModel.torus(periods=(1.0, -2.0))
    with pytest.raises(ModelError):
        ManifoldModel.from_config({"kind": "hyperbolic"})


def test_config_round_trip():
    for m in (S2, ManifoldModel.sphere(3), ManifoldModel.torus((1.0, 2.5))):
        assert ManifoldModel.from_config(m.to_config()) == m


def test_torus_symbol_and_zero():
    pt = ChartPoint(T2.charts()[0], [0.2, 0.7])
    assert principal_symbol(T2, pt, [3.0, 4.0]) == pytest.approx(5.0, abs=1e-14)
    assert principal_symbol(T2, pt, [0.0, 0.0]) == 0.0
    sp = ChartPoint(S2.charts()[0], [0.3, -0.1])
    assert principal_symbol(S2, sp, [0.0, 0.0]) == 0.0


def test_equator_fermi_chart():
    chart = fermi_chart(S2, make_submanifold(S2, "equator"))
    np.testing.assert_allclose(chart.metric(np.array([1.0, 0.0])), np.eye(2), atol=1e-15)
    assert chart.metric(np.array([0.4, 0.5]))[0, 0] == pytest.approx(math.cos(0.5) ** 2, abs=1e-12)
    pt = ChartPoint(chart, [0.3, 0.0])
    assert principal_symbol(S2, pt, [0.0, 1.0]) == pytest.approx(1.0, abs=1e-14)


def test_torus_line_chart_is_identity():
    chart = fermi_chart(T2, make_submanifold(T2, "line"))
    rng = np.random.default_rng(1)
    for c in rng.random((20, 2)):
        np.testing.assert_array_equal(chart.metric(c), np.eye(2))


def test_chart_domain_violation():
    chart = S2.charts()[0]
    with pytest.raises(DomainError):
        principal_symbol(S2, ChartPoint(chart, [3.0, 0.0]), [1.0, 0.0])


def test_fermi_chart_model_mismatch():
    with pytest.raises(ModelError):
        fermi_chart(T2, make_submanifold(S2, "equator"))


def test_chart_round_trip():
    rng = np.random.default_rng(2)
    pts = S2.random_points(200, rng)
    for x in pts:
        chart = S2.chart_for(x)
        c = chart.from_manifold(x)
        np.testing.assert_allclose(chart.to_manifold(c), x, atol=1e-12)


def test_stereographic_metric_matches_pullback():
    chart = S2.charts()[0]
    rng = np.random.default_rng(3)
    h = 1e-6
    for u in rng.uniform(-0.6, 0.6, (10, 2)):
        J = np.column_stack(
            [(chart.to_manifold(u + h * e) - chart.to_manifold(u - h * e)) / (2 * h) for e in np.eye(2)]
        )
        np.testing.assert_allclose(chart.metric(u), J.T @ J, atol=1e-8)


SHIPPED = [
    (S2, "equator", {}),
    (S2, "latitude", {"colatitude": 1.0}),
    (S2, "point", {}),
    (T2, "line", {}),
    (T2, "sine_arc", {}),
    (T2, "point", {}),
]


@pytest.mark.parametrize("m, name, params", SHIPPED)
def test_fermi_block_form_on_sigma(m, name, params):
    sigma = make_submanifold(m, name, **params)
    chart = fermi_chart(m, sigma)
    d = chart.tangential_dim
    rng = np.random.default_rng(4)
    for _ in range(100):
        coords = np.zeros(m.dim)
        if d:
            length = sigma.diameter if name == "sine_arc" else (sigma.upper - sigma.lower) * sigma.max_speed
            coords[:d] = rng.uniform(0, length, d)
        g = chart.metric(coords)
        np.testing.assert_allclose(g[d:, d:], np.eye(m.dim - d), atol=1e-9)
        np.testing.assert_allclose(g[:d, d:], 0.0, atol=1e-9)
        np.testing.assert_allclose(np.linalg.eigvalsh(g) > 0, True)


@pytest.mark.parametrize("m, name, params", SHIPPED)
def test_fermi_chart_parametrizes_sigma(m, name, params):
    sigma = make_submanifold(m, name, **params)
    chart = fermi_chart(m, sigma)
    if sigma.dim == 0:
        np.testing.assert_allclose(chart.to_manifold(np.zeros(m.dim)), sigma.embed(np.zeros((1, 0)))[0], atol=1e-12)
        return
    # (x', 0) lies on Sigma and x' is arclength (dx' agrees with dsigma)
    s = np.linspace(0.05, 0.5, 7)
    pts = chart.to_manifold(np.stack([s, np.zeros_like(s)], axis=-1))
    u, foot = sigma.project(pts)
    np.testing.assert_allclose(m.distance(pts, foot), 0.0, atol=1e-10)
    steps = m.distance(pts[1:], pts[:-1])
    assert np.all(steps <= np.diff(s) + 1e-12) and np.all(steps >= 0.98 * np.diff(s))


@given(
    st.floats(-0.9, 0.9), st.floats(-0.9, 0.9),
    st.floats(-5, 5), st.floats(-5, 5),
    st.floats(0.01, 100),
)
def test_symbol_homogeneous(u1, u2, a, b, c):
    for chart in S2.charts():
        pt = ChartPoint(chart, [u1 * 0.7, u2 * 0.7])
        p = principal_symbol(S2, pt, [a, b])
        assert principal_symbol(S2, pt, [c * a, c * b]) == pytest.approx(c * p, rel=1e-12, abs=1e-12)


@given(st.floats(0.0, 0.7), st.floats(-5, 5), st.floats(-5, 5))
def test_symbol_dominates_normal_part(s, tangential, normal):
    for m, name in ((S2, "equator"), (S2, "latitude"), (T2, "sine_arc"), (T2, "line")):
        chart = fermi_chart(m, make_submanifold(m, name))
        pt = ChartPoint(chart, [s, 0.0])
        assert principal_symbol(m, pt, [tangential, normal]) >= principal_symbol(m, pt, [0.0, normal]) - 1e-12
