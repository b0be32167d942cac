"""Eigenlevels and L^2-normalized eigenfunctions of the model manifolds.

Sphere S^2: real spherical harmonics built from the fully normalized
associated Legendre functions (no Condon-Shortley phase)::

    Y_{j,0}  = P_j^0(cos th)
    Y_{j,m}  = sqrt(2) P_j^m(cos th) cos(m ph)      (m > 0)
    Y_{j,-m} = sqrt(2) P_j^m(cos th) sin(m ph)      (m > 0)

S^1 uses cos/sin modes; S^n with n >= 3 enumerates full eigenspaces (indexed
by Gelfand-Tsetlin patterns) but only the zonal member is evaluable.

Torus T^n: exponentials exp(2 pi i <k / L, x>) / sqrt(vol) with frequency
2 pi |k / L|.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Union

import numpy as np

from .errors import DomainError, ResourceError
from .manifolds import ManifoldModel, sphere_eigenvalue

#: Lattice enumeration cap for tori (number of candidate lattice points).
DEFAULT_LATTICE_CAP = 4_000_000


@dataclass(frozen=True, order=True)
class SphereIndex:
    """Degree ``j`` plus order data ``m`` (a Gelfand-Tsetlin pattern for n >= 3)."""

    j: int
    m: tuple[int, ...] = ()

    @property
    def is_zonal(self) -> bool:
        return all(v == 0 for v in self.m)

    def __str__(self) -> str:
        return f"j={self.j};m=" + ",".join(str(v) for v in self.m)


@dataclass(frozen=True, order=True)
class TorusIndex:
    k: tuple[int, ...]

    def __str__(self) -> str:
        return "k=(" + ",".join(str(v) for v in self.k) + ")"


SpectralIndex = Union[SphereIndex, TorusIndex]


@dataclass(frozen=True)
class EigenLevel:
    lam: float
    indices: tuple[SpectralIndex, ...]

    @property
    def multiplicity(self) -> int:
        return len(self.indices)

    def index_repr(self) -> str:
        return " ".join(str(i) for i in self.indices)


@dataclass(frozen=True)
class Eigenfunction:
    manifold: ManifoldModel
    index: SpectralIndex

    @property
    def lam(self) -> float:
        return eigen_frequency(self.manifold, self.index)

    def __call__(self, points) -> np.ndarray:
        return evaluate(self, points)


def eigen_frequency(m: ManifoldModel, index: SpectralIndex) -> float:
    if m.is_sphere:
        return sphere_eigenvalue(index.j, m.dim)
    k = np.asarray(index.k, dtype=float)
    return 2 * math.pi * float(np.linalg.norm(k / np.asarray(m.periods)))


def sphere_multiplicity(j: int, n: int) -> int:
    """dim of the degree-j harmonic space on S^n."""
    if j == 0:
        return 1
    return math.comb(j + n, n) - math.comb(j + n - 2, n)


def _gt_patterns(j: int, n: int) -> Iterable[tuple[int, ...]]:
    """Gelfand-Tsetlin patterns j >= m_1 >= ... >= m_{n-2} >= |m_{n-1}|."""
    if n == 1:
        yield from ((0,),) if j == 0 else ((1,), (-1,))
        return
    if n == 2:
        for m in range(-j, j + 1):
            yield (m,)
        return

    def rec(top: int, depth: int):
        if depth == 1:
            for last in range(-top, top + 1):
                yield (last,)
            return
        for v in range(top, -1, -1):
            for rest in rec(v, depth - 1):
                yield (v,) + rest

    yield from rec(j, n - 1)


def sphere_level_indices(j: int, n: int) -> tuple[SphereIndex, ...]:
    return tuple(SphereIndex(j, m) for m in _gt_patterns(j, n))


def enumerate_levels(
    m: ManifoldModel, lam_max: float, cap: int = DEFAULT_LATTICE_CAP
) -> list[EigenLevel]:
    """All eigenlevels with frequency <= lam_max, ascending, with full multiplicity."""
    if lam_max < 0:
        raise DomainError("lam_max must be nonnegative")
    if m.is_sphere:
        return _sphere_levels(m.dim, lam_max, cap)
    return _torus_levels(m, lam_max, cap)


def _sphere_levels(n: int, lam_max: float, cap: int) -> list[EigenLevel]:
    levels = []
    j = 0
    total = 0
    while sphere_eigenvalue(j, n) <= lam_max * (1 + 1e-15):
        total += sphere_multiplicity(j, n)
        if total > cap:
            raise ResourceError(f"sphere enumeration exceeds cap of {cap} indices")
        levels.append(EigenLevel(sphere_eigenvalue(j, n), sphere_level_indices(j, n)))
        j += 1
    return levels


def _torus_levels(m: ManifoldModel, lam_max: float, cap: int) -> list[EigenLevel]:
    L = np.asarray(m.periods)
    radius = lam_max / (2 * math.pi)
    bounds = np.floor(radius * L + 1e-12).astype(int)
    count = int(np.prod(2 * bounds + 1))
    if count > cap:
        raise ResourceError(
            f"lattice enumeration needs {count} points, above the cap of {cap}; lower lambda_max"
        )
    axes = [np.arange(-b, b + 1) for b in bounds]
    ks = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, m.dim)
    lam = 2 * math.pi * np.linalg.norm(ks / L, axis=1)
    keep = lam <= lam_max * (1 + 1e-15)
    ks, lam = ks[keep], lam[keep]
    order = np.lexsort((*ks.T[::-1], lam))
    ks, lam = ks[order], lam[order]
    levels = []
    start = 0
    for i in range(1, len(lam) + 1):
        if i == len(lam) or lam[i] - lam[start] > 1e-12 * max(1.0, lam[start]):
            idx = tuple(TorusIndex(tuple(int(v) for v in k)) for k in ks[start:i])
            levels.append(EigenLevel(float(lam[start]), idx))
            start = i
    return levels


def levels_to_csv(levels: Iterable[EigenLevel], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lambda", "multiplicity", "index_repr"])
        for lv in levels:
            w.writerow([format(lv.lam, ".17g"), lv.multiplicity, lv.index_repr()])


# --------------------------------------------------------------------------
# Legendre machinery


@lru_cache(maxsize=None)
def _sectoral_coefficients(jmax: int) -> np.ndarray:
    """Normalization of P_m^m: sqrt(prod_{k<=m} (2k+1)/(2k) / (4 pi))."""
    ratios = np.ones(jmax + 1)
    k = np.arange(1, jmax + 1)
    ratios[1:] = (2 * k + 1) / (2 * k)
    return np.sqrt(np.cumprod(ratios) / (4 * math.pi))


def assoc_legendre_degree(j: int, z) -> np.ndarray:
    """Fully normalized P_j^m(z) for m = 0..j, shape (j + 1,) + z.shape.

    Runs the three-term recurrence upward in degree for every order at once;
    every intermediate is bounded by sqrt((2l+1)/4pi), so nothing overflows.
    """
    z = np.asarray(z, dtype=float)
    m = np.arange(j + 1, dtype=float).reshape((-1,) + (1,) * z.ndim)
    sin = np.sqrt(np.clip(1 - z * z, 0.0, None))
    with np.errstate(under="ignore"):
        prev = _sectoral_coefficients(j).reshape(m.shape) * sin**m  # P_m^m
    out = np.empty((j + 1,) + z.shape)
    out[j] = prev[j]
    if j == 0:
        return out
    # step 1: P_{m+1}^m = sqrt(2m+3) z P_m^m
    cur = np.sqrt(2 * m + 3) * z * prev
    out[j - 1] = cur[j - 1]
    for s in range(2, j + 1):
        l = m + s
        rows = j - s + 1  # orders still advancing toward degree j
        mm, ll = m[:rows], l[:rows]
        a = np.sqrt((4 * ll * ll - 1) / (ll * ll - mm * mm))
        b = -np.sqrt((2 * ll + 1) * ((ll - 1) ** 2 - mm * mm) / ((2 * ll - 3) * (ll * ll - mm * mm)))
        nxt = a * z * cur[:rows] + b * prev[:rows]
        prev, cur = cur[:rows], nxt
        out[j - s] = cur[j - s]
    return out


def legendre_family(n: int, jmax: int, t) -> np.ndarray:
    """Normalized Legendre polynomials of S^n (P_j(1) = 1), j = 0..jmax.

    Uses (j + 2a) P_{j+1} = 2 (j + a) t P_j - j P_{j-1} with a = (n - 1)/2;
    for n = 1 this is the Chebyshev recurrence.
    """
    t = np.asarray(t, dtype=float)
    a = (n - 1) / 2
    out = np.empty((jmax + 1,) + t.shape)
    out[0] = 1.0
    if jmax >= 1:
        out[1] = t
    for j in range(1, jmax):
        out[j + 1] = (2 * (j + a) * t * out[j] - j * out[j - 1]) / (j + 2 * a)
    return out


def zonal_value_closed_form(j: int, n: int) -> float:
    """sqrt(dim H_j / vol S^n): the zonal harmonic's value at its own pole."""
    return math.sqrt(sphere_multiplicity(j, n) / ManifoldModel.sphere(n).volume)


# --------------------------------------------------------------------------
# evaluation


def _spherical_angles(points) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(points, dtype=float)
    z = np.clip(x[..., 2], -1.0, 1.0)
    phi = np.arctan2(x[..., 1], x[..., 0])
    return z, phi


def level_values(m: ManifoldModel, level: EigenLevel, points) -> np.ndarray:
    """Values of every basis function of ``level`` at ``points``: shape (mult, N)."""
    points = np.asarray(points, dtype=float)
    if m.is_torus:
        k = np.array([idx.k for idx in level.indices], dtype=float) / np.asarray(m.periods)
        phase = 2 * math.pi * (points @ k.T).T
        return np.exp(1j * phase) / math.sqrt(m.volume)
    j = level.indices[0].j
    return _sphere_degree_values(m.dim, j, [idx.m for idx in level.indices], points)


def _sphere_degree_values(n: int, j: int, orders, points) -> np.ndarray:
    if n == 1:
        th = np.arctan2(points[..., 1], points[..., 0])
        rows = []
        for (s,) in orders:
            if j == 0:
                rows.append(np.full(th.shape, 1 / math.sqrt(2 * math.pi)))
            elif s > 0:
                rows.append(np.cos(j * th) / math.sqrt(math.pi))
            else:
                rows.append(np.sin(j * th) / math.sqrt(math.pi))
        return np.array(rows)
    if n == 2:
        z, phi = _spherical_angles(points)
        P = assoc_legendre_degree(j, z)
        rows = []
        for (mm,) in orders:
            if mm == 0:
                rows.append(P[0])
            elif mm > 0:
                rows.append(math.sqrt(2) * P[mm] * np.cos(mm * phi))
            else:
                rows.append(math.sqrt(2) * P[-mm] * np.sin(-mm * phi))
        return np.array(rows)
    # n >= 3: zonal about the north pole only
    rows = []
    for mm in orders:
        if any(mm):
            raise NotImplementedError(
                "only zonal harmonics are evaluable on S^n for n >= 3"
            )
        rows.append(zonal_harmonic(n, j, points[..., -1]))
    return np.array(rows)


def zonal_harmonic(n: int, j: int, cos_angle) -> np.ndarray:
    """L^2-normalized degree-j zonal harmonic of S^n as a function of cos(distance to pole)."""
    P = legendre_family(n, j, cos_angle)[j]
    return zonal_value_closed_form(j, n) * P


def evaluate(e: Eigenfunction, points) -> np.ndarray:
    """Value of the basis eigenfunction ``e`` at ambient point(s)."""
    points = np.asarray(points, dtype=float)
    single = points.ndim == 1
    pts = points[None] if single else points
    lam = eigen_frequency(e.manifold, e.index)
    vals = level_values(e.manifold, EigenLevel(lam, (e.index,)), pts)[0]
    if e.manifold.is_sphere:
        vals = vals.astype(complex)
    return vals[0] if single else vals


def zonal_at_base(m: ManifoldModel, j: int, basepoint=None) -> float:
    """Value at ``basepoint`` of the normalized degree-j zonal harmonic centred there."""
    if not m.is_sphere:
        raise DomainError("zonal harmonics are defined on spheres only")
    if basepoint is None:
        basepoint = np.eye(m.ambient_dim)[-1]
    base = np.asarray(basepoint, dtype=float)
    base = base / np.linalg.norm(base)
    return float(zonal_harmonic(m.dim, j, np.dot(base, base)))
