"""Submanifold integrals of eigenfunctions and the sums built from them.

For an eigenlevel with basis {e_m} the moments are mu_m = int_Sigma e_m dmu.
The best unit combination sum c_m e_m has |int| = ||mu||_2 (Cauchy-Schwarz),
and spectral sums only ever see ||mu||^2, which does not depend on the basis.
Spectral windows are sharp: a band [lam, lam + width] collects every level
whose frequency lies in it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ._parallel import parallel_map
from .eigenbasis import (
    DEFAULT_LATTICE_CAP,
    EigenLevel,
    Eigenfunction,
    enumerate_levels,
    level_values,
)
from .errors import InsufficientDataError, ModelError
from .manifolds import ManifoldModel
from .submanifolds import Submanifold

#: Fit samples below this fraction of the largest value are treated as exact zeros.
ZERO_THRESHOLD = 1e-12


@dataclass(frozen=True)
class BandSum:
    lam: float
    width: float
    value: float
    levels: tuple[EigenLevel, ...] = ()


@dataclass(frozen=True)
class ExponentFit:
    samples: tuple[tuple[float, float], ...]
    slope: float
    intercept: float
    r2: float
    dropped: int = 0

    def predict(self, lam) -> np.ndarray:
        return np.exp(self.intercept) * np.asarray(lam, dtype=float) ** self.slope


@dataclass(frozen=True)
class Maximizer:
    coefficients: np.ndarray
    value: float
    degenerate: bool


def _check_same_manifold(m: ManifoldModel, sigma: Submanifold):
    if sigma.manifold != m:
        raise ModelError("submanifold lives on a different manifold")


def integrate_eigenfunction(e: Eigenfunction, sigma: Submanifold) -> complex:
    """Quadrature value of the integral of ``e`` against dmu on ``sigma``."""
    _check_same_manifold(e.manifold, sigma)
    sigma.check_resolution(e.lam)
    pts, w = sigma.quadrature_points()
    return complex(np.sum(e(pts) * w))


def eigenspace_moments(level: EigenLevel, sigma: Submanifold) -> np.ndarray:
    """Moments of every basis function of ``level``, in index order."""
    sigma.check_resolution(level.lam)
    pts, w = sigma.quadrature_points()
    vals = level_values(sigma.manifold, level, pts)
    return (vals @ w).astype(complex)


def maximize_moments(moments: Sequence[complex]) -> Maximizer:
    mu = np.asarray(moments, dtype=complex)
    value = float(np.linalg.norm(mu))
    scale = float(np.max(np.abs(mu))) if mu.size else 0.0
    if mu.size == 0 or value <= 1e-14 * max(1.0, scale):
        c = np.zeros(max(mu.size, 1), dtype=complex)
        c[0] = 1.0
        return Maximizer(c, 0.0, True)
    return Maximizer(np.conj(mu) / value, value, False)


def eigenspace_maximizer(level: EigenLevel, sigma: Submanifold) -> Maximizer:
    """Unit coefficients c maximizing |sum c_m mu_m| and the attained value ||mu||."""
    return maximize_moments(eigenspace_moments(level, sigma))


@dataclass(frozen=True)
class MomentTable:
    """Moments for every level up to ``lam_max``; shared by band, Weyl and scaling sweeps."""

    levels: tuple[EigenLevel, ...]
    moments: tuple[np.ndarray, ...]
    lams: np.ndarray = field(repr=False)
    norms2: np.ndarray = field(repr=False)

    def band(self, lam: float, width: float) -> np.ndarray:
        return (self.lams >= lam) & (self.lams <= lam + width)


def moment_table(
    m: ManifoldModel, sigma: Submanifold, lam_max: float, cap: int = DEFAULT_LATTICE_CAP
) -> MomentTable:
    _check_same_manifold(m, sigma)
    levels = enumerate_levels(m, lam_max, cap=cap)
    sigma = sigma.resolved_for(lam_max)
    pts, w = sigma.quadrature_points()

    def one(level):
        return (level_values(m, level, pts) @ w).astype(complex)

    moments = parallel_map(one, levels)
    lams = np.array([lv.lam for lv in levels])
    norms2 = np.array([float(np.sum(np.abs(mu) ** 2)) for mu in moments])
    return MomentTable(tuple(levels), tuple(moments), lams, norms2)


def band_sum(
    m: ManifoldModel,
    sigma: Submanifold,
    lam: float,
    width: float = 1.0,
    table: MomentTable | None = None,
) -> BandSum:
    """Sum of ||mu||^2 over levels with frequency in [lam, lam + width]."""
    if lam < 0 or width <= 0:
        raise ValueError("need lam >= 0 and width > 0")
    if table is None:
        table = moment_table(m, sigma, lam + width)
    sel = table.band(lam, width)
    levels = tuple(lv for lv, s in zip(table.levels, sel) if s)
    return BandSum(lam, width, float(np.sum(table.norms2[sel])), levels)


def weyl_sum(
    m: ManifoldModel, sigma: Submanifold, lam: float, table: MomentTable | None = None
) -> float:
    """Cumulative sum of ||mu||^2 over levels with frequency <= lam."""
    if lam < 0:
        raise ValueError("need lam >= 0")
    if table is None:
        table = moment_table(m, sigma, lam)
    return float(np.sum(table.norms2[table.lams <= lam]))


def weyl_curve(table: MomentTable, lams: Iterable[float]) -> np.ndarray:
    cum = np.concatenate([[0.0], np.cumsum(table.norms2)])
    idx = np.searchsorted(table.lams, np.asarray(list(lams), dtype=float), side="right")
    return cum[idx]


def level_maxima(table: MomentTable) -> np.ndarray:
    """Eigenspace maximizer value sqrt(||mu||^2) for each level of the table."""
    return np.sqrt(table.norms2)


def band_maxima(table: MomentTable, lams: Iterable[float], width: float = 1.0, per: str = "mode"):
    """Largest |int e dmu| over eigenfunctions in each band.

    ``per="mode"`` maximizes over the basis functions themselves (single
    exponentials on the torus); ``per="level"`` over all unit combinations
    inside one eigenspace.  Bands without levels give 0.
    """
    if per not in ("mode", "level"):
        raise ValueError("per must be 'mode' or 'level'")
    if per == "mode":
        best = np.array([np.max(np.abs(mu)) if mu.size else 0.0 for mu in table.moments])
    else:
        best = level_maxima(table)
    out = []
    for lam in lams:
        sel = table.band(lam, width)
        out.append(float(best[sel].max()) if sel.any() else 0.0)
    return np.array(out)


def fit_exponent(samples: Iterable[tuple[float, float]], threshold: float = ZERO_THRESHOLD) -> ExponentFit:
    """Least-squares slope of log(value) against log(lam).

    Values below ``threshold * max(value)`` are dropped first (exact
    symmetry zeros would otherwise wreck the fit); the count is reported.
    """
    samples = tuple((float(a), float(b)) for a, b in samples)
    if not samples:
        raise InsufficientDataError("no samples to fit")
    lam = np.array([s[0] for s in samples])
    val = np.abs(np.array([s[1] for s in samples]))
    vmax = float(val.max())
    keep = (val > threshold * vmax) & (lam > 0) & np.isfinite(val)
    if keep.sum() < 3:
        raise InsufficientDataError(f"only {int(keep.sum())} usable samples; need 3")
    x, y = np.log(lam[keep]), np.log(val[keep])
    A = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return ExponentFit(samples, float(slope), float(intercept), r2, int((~keep).sum()))


def bound_exponent(m: ManifoldModel, sigma: Submanifold) -> float:
    """(n - d - 1) / 2: the growth exponent of the universal bound."""
    return (m.dim - sigma.dim - 1) / 2
