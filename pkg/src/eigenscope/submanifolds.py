"""Parametrized submanifolds with densities and quadrature rules.

A submanifold of dimension d is given on a parameter box (d <= 1 for the
shipped catalog).  The quadrature weights already include the density h and
the surface element, so ``sum(weights * f(embed(nodes)))`` approximates the
integral of f against dmu = h dsigma.

Catalog (see :func:`make_submanifold`):

=============  =======  =====================================================
name           model    geometry
=============  =======  =====================================================
``equator``    S^2      great circle z = 0, parametrized by longitude
``latitude``   S^2      circle of colatitude ``colatitude``
``point``      S^n/T^n  a single point (d = 0); fiber is the whole cosphere
``line``       T^n      closed geodesic {x_2 = ... = x_n = 0}
``sine_arc``   T^2      (t, eps sin 2 pi t) for t in [0.1, 0.9]
=============  =======  =====================================================
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Any, ClassVar

import numpy as np

from .errors import ModelError, ResolutionError
from .manifolds import (
    LatitudeFermiChart,
    ManifoldModel,
    SineArcFermiChart,
    SphereNormalChart,
    TorusFermiChart,
    tangent_frame,
)

#: Nodes per wavelength along each parameter direction.
NODES_PER_WAVELENGTH = 12
MIN_NODES = 64
_PANEL = 16


def _psi(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def smooth_step(x):
    """C^infinity step: 0 for x <= 0, 1 for x >= 1."""
    x = np.asarray(x, dtype=float)
    a, b = _psi(x), _psi(1 - x)
    return a / (a + b)


def plateau_bump(s, plateau: float = 0.6):
    """Smooth bump on [0, 1] equal to 1 on the middle ``plateau`` fraction."""
    s = np.asarray(s, dtype=float)
    ramp = (1 - plateau) / 2
    return smooth_step(s / ramp) * smooth_step((1 - s) / ramp)


@dataclass(frozen=True)
class Submanifold:
    """Base class; subclasses supply the geometry."""

    manifold: ManifoldModel
    nodes: int = 256
    density: str = "bump"

    kind: ClassVar[str] = ""
    dim: ClassVar[int] = 1
    periodic: ClassVar[bool] = False

    def __post_init__(self):
        if self.density not in ("bump", "one"):
            raise ModelError(f"density must be 'bump' or 'one', got {self.density!r}")
        self._check_model()

    def _check_model(self):
        pass

    # geometry hooks ---------------------------------------------------------
    @property
    def lower(self) -> float:
        return 0.0

    @property
    def upper(self) -> float:
        return 0.0

    def embed(self, u) -> np.ndarray:
        raise NotImplementedError

    def tangents(self, u) -> np.ndarray:
        """d embed / du as an ambient vector, shape (N, amb)."""
        raise NotImplementedError

    def project(self, points) -> tuple[np.ndarray, np.ndarray]:
        """Nearest parameter and foot point for each ambient point: ((N, d), (N, amb))."""
        raise NotImplementedError

    def normal_frame(self, u) -> np.ndarray:
        """Orthonormal normal vectors in T_x M at embed(u), shape (N, n - d, amb)."""
        raise NotImplementedError

    def fermi_chart(self):
        raise NotImplementedError

    @property
    def name(self) -> str:
        return self.kind

    def describe(self) -> dict[str, Any]:
        return {"name": self.name, "density": self.density, "nodes": self.nodes}

    # derived ----------------------------------------------------------------
    def speed(self, u) -> np.ndarray:
        return np.linalg.norm(self.tangents(u), axis=-1)

    def unit_tangents(self, u) -> np.ndarray:
        t = self.tangents(u)
        return t / np.linalg.norm(t, axis=-1, keepdims=True)

    @property
    def max_speed(self) -> float:
        u = np.linspace(self.lower, self.upper, 513)[:, None]
        return float(np.max(self.speed(u)))

    @property
    def diameter(self) -> float:
        """Upper bound on the arclength of the parameter domain."""
        if self.dim == 0:
            return 0.0
        return (self.upper - self.lower) * self.max_speed

    def density_values(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.dim == 0 or self.density == "one":
            return np.ones(u.shape[:-1])
        s = (u[..., 0] - self.lower) / (self.upper - self.lower)
        return plateau_bump(s)

    def in_support(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.dim == 0:
            return np.ones(u.shape[:-1], dtype=bool)
        if self.density == "one":
            return (u[..., 0] >= self.lower) & (u[..., 0] <= self.upper)
        return (u[..., 0] > self.lower) & (u[..., 0] < self.upper)

    def required_nodes(self, lam: float) -> int:
        if self.dim == 0:
            return 1
        waves = lam * self.diameter / (2 * math.pi)
        return max(MIN_NODES, math.ceil(NODES_PER_WAVELENGTH * waves))

    def with_nodes(self, nodes: int) -> "Submanifold":
        return dataclasses.replace(self, nodes=int(nodes))

    def resolved_for(self, lam: float) -> "Submanifold":
        """Same submanifold with at least the node count the resolution rule asks for at ``lam``."""
        need = self.required_nodes(lam)
        return self if self.nodes >= need else self.with_nodes(need)

    def check_resolution(self, lam: float) -> None:
        need = self.required_nodes(lam)
        if self.dim and self.nodes < need:
            raise ResolutionError(
                f"{self.name}: {self.nodes} nodes is below the {need} required at lambda={lam:g}"
            )

    def quadrature(self) -> tuple[np.ndarray, np.ndarray]:
        """(parameter nodes (N, d), weights (N,)) including h and dsigma."""
        if self.dim == 0:
            return np.zeros((1, 0)), np.ones(1)
        a, b = self.lower, self.upper
        if self.periodic:
            n = self.nodes
            u = a + (b - a) * np.arange(n) / n
            q = np.full(n, (b - a) / n)
        else:
            panels = max(1, math.ceil(self.nodes / _PANEL))
            x, w = np.polynomial.legendre.leggauss(_PANEL)
            edges = np.linspace(a, b, panels + 1)
            half = np.diff(edges)[:, None] / 2
            u = (edges[:-1, None] + half * (x + 1)).ravel()
            q = (half * w).ravel()
        u = u[:, None]
        return u, q * self.density_values(u) * self.speed(u)

    def quadrature_points(self) -> tuple[np.ndarray, np.ndarray]:
        u, w = self.quadrature()
        return self.embed(u), w

    def mass(self) -> float:
        return float(np.sum(self.quadrature()[1]))

    def check_injective(self) -> float:
        """Smallest pairwise separation of quadrature nodes (> 0 for an embedding)."""
        pts = self.quadrature_points()[0]
        if len(pts) < 2:
            return math.inf
        d = self.manifold.distance(pts[:, None, :], pts[None, :, :])
        d[np.diag_indices(len(pts))] = np.inf
        return float(d.min())

    def tangential_component(self, u, xi) -> np.ndarray:
        """Norm of the part of ``xi`` pairing with T Sigma at embed(u)."""
        if self.dim == 0:
            return np.zeros(np.shape(xi)[:-1])
        return np.abs(np.sum(self.unit_tangents(u) * xi, axis=-1))


# --------------------------------------------------------------------------
# sphere catalog


@dataclass(frozen=True)
class LatitudeCircle(Submanifold):
    colatitude: float = math.pi / 2
    density: str = "one"

    kind: ClassVar[str] = "latitude"
    dim: ClassVar[int] = 1
    periodic: ClassVar[bool] = True

    def _check_model(self):
        if not (self.manifold.is_sphere and self.manifold.dim == 2):
            raise ModelError("latitude circles are defined on S^2")
        if not 0 < self.colatitude < math.pi:
            raise ModelError("colatitude must lie strictly between 0 and pi")

    @property
    def name(self) -> str:
        return "equator" if self.colatitude == math.pi / 2 else "latitude"

    def describe(self):
        return {**super().describe(), "colatitude": self.colatitude}

    @property
    def upper(self) -> float:
        return 2 * math.pi

    def embed(self, u):
        phi = np.asarray(u, dtype=float)[..., 0]
        s, c = math.sin(self.colatitude), math.cos(self.colatitude)
        return np.stack([s * np.cos(phi), s * np.sin(phi), np.full(phi.shape, c)], axis=-1)

    def tangents(self, u):
        phi = np.asarray(u, dtype=float)[..., 0]
        s = math.sin(self.colatitude)
        return np.stack([-s * np.sin(phi), s * np.cos(phi), np.zeros(phi.shape)], axis=-1)

    def project(self, points):
        x = np.asarray(points, dtype=float)
        phi = np.mod(np.arctan2(x[..., 1], x[..., 0]), 2 * math.pi)[..., None]
        return phi, self.embed(phi)

    def normal_frame(self, u):
        phi = np.asarray(u, dtype=float)[..., 0]
        s, c = math.sin(self.colatitude), math.cos(self.colatitude)
        north = np.stack([-c * np.cos(phi), -c * np.sin(phi), np.full(phi.shape, s)], axis=-1)
        return north[..., None, :]

    def fermi_chart(self):
        return LatitudeFermiChart(self, self.colatitude)


@dataclass(frozen=True)
class SpherePoint(Submanifold):
    base: tuple[float, ...] = ()
    density: str = "one"

    kind: ClassVar[str] = "point"
    dim: ClassVar[int] = 0

    def _check_model(self):
        if not self.manifold.is_sphere:
            raise ModelError("SpherePoint needs a sphere")
        base = np.asarray(self.base or np.eye(self.manifold.ambient_dim)[-1], dtype=float)
        if base.shape != (self.manifold.ambient_dim,):
            raise ModelError("base point has the wrong dimension")
        object.__setattr__(self, "base", tuple(base / np.linalg.norm(base)))

    def describe(self):
        return {**super().describe(), "base": list(self.base)}

    def embed(self, u):
        u = np.asarray(u, dtype=float)
        return np.broadcast_to(np.asarray(self.base), u.shape[:-1] + (len(self.base),)).copy()

    def tangents(self, u):
        return np.zeros(np.shape(u)[:-1] + (len(self.base),))

    def project(self, points):
        pts = np.asarray(points, dtype=float)
        u = np.zeros(pts.shape[:-1] + (0,))
        return u, self.embed(u)

    def normal_frame(self, u):
        frame = tangent_frame(np.asarray(self.base))
        return np.broadcast_to(frame, np.shape(u)[:-1] + frame.shape).copy()

    def fermi_chart(self):
        return SphereNormalChart(self, self.base)


# --------------------------------------------------------------------------
# torus catalog


@dataclass(frozen=True)
class TorusLine(Submanifold):
    density: str = "one"

    kind: ClassVar[str] = "line"
    dim: ClassVar[int] = 1
    periodic: ClassVar[bool] = True

    def _check_model(self):
        if not (self.manifold.is_torus and self.manifold.dim >= 2):
            raise ModelError("the closed geodesic line needs a torus of dimension >= 2")

    @property
    def upper(self) -> float:
        return self.manifold.periods[0]

    def embed(self, u):
        t = np.asarray(u, dtype=float)[..., 0]
        out = np.zeros(t.shape + (self.manifold.dim,))
        out[..., 0] = t
        return out

    def tangents(self, u):
        t = np.asarray(u, dtype=float)[..., 0]
        out = np.zeros(t.shape + (self.manifold.dim,))
        out[..., 0] = 1.0
        return out

    def project(self, points):
        x = np.asarray(points, dtype=float)
        t = np.mod(x[..., 0:1], self.manifold.periods[0])
        return t, self.embed(t)

    def normal_frame(self, u):
        n = self.manifold.dim
        frame = np.eye(n)[1:]
        return np.broadcast_to(frame, np.shape(u)[:-1] + frame.shape).copy()

    def fermi_chart(self):
        return TorusFermiChart(self, np.zeros(self.manifold.dim), 1)


@dataclass(frozen=True)
class SineArc(Submanifold):
    eps: float = 0.15
    t0: float = 0.1
    t1: float = 0.9
    nodes: int = 512

    kind: ClassVar[str] = "sine_arc"
    dim: ClassVar[int] = 1

    def _check_model(self):
        m = self.manifold
        if not (m.is_torus and m.dim == 2):
            raise ModelError("the sine arc lives on a 2-torus")
        if not (0 <= self.t0 < self.t1) or self.t1 - self.t0 >= m.periods[0]:
            raise ModelError("arc parameter range must be shorter than the first period")
        if 2 * abs(self.eps) >= m.periods[1]:
            raise ModelError("arc amplitude too large to embed")

    def describe(self):
        return {**super().describe(), "eps": self.eps, "t0": self.t0, "t1": self.t1}

    @property
    def lower(self) -> float:
        return self.t0

    @property
    def upper(self) -> float:
        return self.t1

    def embed(self, u):
        t = np.asarray(u, dtype=float)[..., 0]
        return np.stack([t, self.eps * np.sin(2 * math.pi * t)], axis=-1)

    def tangents(self, u):
        t = np.asarray(u, dtype=float)[..., 0]
        return np.stack(
            [np.ones(t.shape), 2 * math.pi * self.eps * np.cos(2 * math.pi * t)], axis=-1
        )

    def _second(self, t):
        return np.stack(
            [np.zeros(t.shape), -4 * math.pi**2 * self.eps * np.sin(2 * math.pi * t)], axis=-1
        )

    def project(self, points, iterations: int = 12):
        """Newton projection in the parameter, starting from the clamped first coordinate."""
        m = self.manifold
        x = np.asarray(points, dtype=float)
        t = np.clip(np.mod(x[..., 0], m.periods[0]), self.t0, self.t1)
        for _ in range(iterations):
            tt = t[..., None]
            d = m.displacement(x, self.embed(tt))
            g1 = self.tangents(tt)
            grad = -np.sum(d * g1, axis=-1)
            curv = np.sum(g1 * g1, axis=-1) - np.sum(d * self._second(t), axis=-1)
            fallback = np.sum(g1 * g1, axis=-1)
            step = grad / np.where(curv > 0.1 * fallback, curv, fallback)
            t = np.clip(t - step, self.t0, self.t1)
        u = t[..., None]
        return u, self.embed(u)

    def normal_frame(self, u):
        tan = self.unit_tangents(u)
        normal = np.stack([-tan[..., 1], tan[..., 0]], axis=-1)
        return normal[..., None, :]

    def fermi_chart(self):
        return SineArcFermiChart(self, self.eps, self.t0, self.t1)


@dataclass(frozen=True)
class TorusPoint(Submanifold):
    base: tuple[float, ...] = ()
    density: str = "one"

    kind: ClassVar[str] = "point"
    dim: ClassVar[int] = 0

    def _check_model(self):
        if not self.manifold.is_torus:
            raise ModelError("TorusPoint needs a torus")
        base = np.asarray(self.base or np.zeros(self.manifold.dim), dtype=float)
        if base.shape != (self.manifold.dim,):
            raise ModelError("base point has the wrong dimension")
        object.__setattr__(self, "base", tuple(self.manifold.canonical(base)))

    def describe(self):
        return {**super().describe(), "base": list(self.base)}

    def embed(self, u):
        u = np.asarray(u, dtype=float)
        return np.broadcast_to(np.asarray(self.base), u.shape[:-1] + (len(self.base),)).copy()

    def tangents(self, u):
        return np.zeros(np.shape(u)[:-1] + (len(self.base),))

    def project(self, points):
        pts = np.asarray(points, dtype=float)
        u = np.zeros(pts.shape[:-1] + (0,))
        return u, self.embed(u)

    def normal_frame(self, u):
        frame = np.eye(self.manifold.dim)
        return np.broadcast_to(frame, np.shape(u)[:-1] + frame.shape).copy()

    def fermi_chart(self):
        return TorusFermiChart(self, np.asarray(self.base), 0)


def make_submanifold(m: ManifoldModel, name: str, **params) -> Submanifold:
    """Catalog constructor: ``name`` is one of equator, latitude, point, line, sine_arc."""
    if m.is_sphere:
        if name == "equator":
            return LatitudeCircle(m, colatitude=math.pi / 2, **params)
        if name == "latitude":
            return LatitudeCircle(m, **params)
        if name == "point":
            if "base" in params:
                params["base"] = tuple(params["base"])
            return SpherePoint(m, **params)
    else:
        if name == "line":
            return TorusLine(m, **params)
        if name == "sine_arc":
            return SineArc(m, **params)
        if name == "point":
            if "base" in params:
                params["base"] = tuple(params["base"])
            return TorusPoint(m, **params)
    raise ModelError(f"no submanifold {name!r} in the {m.kind} catalog")
