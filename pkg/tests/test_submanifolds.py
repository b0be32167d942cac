import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from eigenscope.errors import ModelError
from eigenscope.manifolds import ManifoldModel
from eigenscope.submanifolds import make_submanifold, plateau_bump

S2 = ManifoldModel.sphere()
T2 = ManifoldModel.torus()


def test_catalog_errors():
    with pytest.raises(ModelError):
        make_submanifold(S2, "line")
    with pytest.raises(ModelError):
        make_submanifold(T2, "sine_arc", eps=0.6)


def test_bump_shape():
    s = np.linspace(0, 1, 1001)
    h = plateau_bump(s)
    assert h[0] == 0 and h[-1] == 0
    assert np.all(h[(s >= 0.2) & (s <= 0.8)] == 1.0)
    assert np.all((h >= 0) & (h <= 1))


@pytest.mark.parametrize("name, m", [("equator", S2), ("line", T2), ("sine_arc", T2)])
def test_injective(name, m):
    assert make_submanifold(m, name).check_injective() > 0


def test_masses():
    assert make_submanifold(S2, "equator").mass() == pytest.approx(2 * math.pi)
    assert make_submanifold(S2, "latitude", colatitude=0.5).mass() == pytest.approx(2 * math.pi * math.sin(0.5))
    assert make_submanifold(T2, "line").mass() == pytest.approx(1.0)


@given(st.floats(0.12, 0.88), st.floats(-0.05, 0.05))
def test_sine_arc_projection(t, offset):
    arc = make_submanifold(T2, "sine_arc")
    u = np.array([[t]])
    x = arc.embed(u) + offset * arc.normal_frame(u)[:, 0, :]
    up, foot = arc.project(x)
    assert up[0, 0] == pytest.approx(t, abs=1e-9)
    assert T2.distance(x, foot)[0] == pytest.approx(abs(offset), abs=1e-12)


def test_normal_frames_are_conormal():
    rng = np.random.default_rng(0)
    for m, name in ((S2, "equator"), (S2, "latitude"), (T2, "line"), (T2, "sine_arc")):
        sigma = make_submanifold(m, name)
        u = rng.uniform(sigma.lower, sigma.upper, (50, 1))
        nf = sigma.normal_frame(u)[:, 0, :]
        assert np.max(sigma.tangential_component(u, nf)) < 1e-12
        np.testing.assert_allclose(np.linalg.norm(nf, axis=-1), 1.0)
