"""Stationary phase with a brute-force quadrature oracle.

For a phase phi(x, y) with a nondegenerate critical point y(x) in the inner
variables, the integral  I(lam) = int e^{i lam phi(x, y)} a(lam; x, y) dy
is approximated to leading order by

    (lam / 2 pi)^{-n/2} |det H|^{-1/2} e^{pi i (p - q) / 4} e^{i lam phi(x, y(x))} a(lam; x, y(x)),

H the inner Hessian at y(x) with p positive and q negative eigenvalues, and
the error is O(lam^{-n/2 - 1}).  The oracle is a tensor Gauss-Legendre rule
resolved at a fixed number of nodes per wavelength, with an error estimate
from one grid doubling.

Phase contract: ``phase(x, y)`` takes x of shape (m,) and y of shape (N, n)
and returns (N,).  ``gradient`` (same signature, returning (N, n)) and
``hessian`` (x, y of shape (n,) -> (n, n)) are optional; missing
derivatives fall back to central differences at step 1e-5.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from ._parallel import parallel_map
from .errors import (
    ConfigurationError,
    DegeneracyError,
    InsufficientDataError,
    NoCriticalPointError,
    ResourceError,
)
from .integrals import ExponentFit, fit_exponent

FD_STEP = 1e-5
NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 50
DEGENERACY_RATIO = 1e-6
NODES_PER_WAVELENGTH = 10
MAX_INNER_DIM = 3
DEFAULT_NODE_CAP = 20_000_000
_PANEL = 16
_BLOCK = 200_000


# --------------------------------------------------------------------------
# amplitudes


def bump(y, center=0.0, radius: float = 1.0) -> np.ndarray:
    """Product C-infinity bump prod exp(1 - 1/(1 - s^2)), s = (y - c)/r; equals 1 at the center."""
    y = np.atleast_2d(np.asarray(y, dtype=float))
    s = (y - center) / radius
    inside = np.abs(s) < 1
    out = np.zeros_like(s)
    si = s[inside]
    out[inside] = np.exp(1 - 1 / (1 - si * si))
    return np.prod(out, axis=-1)


def _step(x):
    # smooth 0 -> 1 transition on [0, 1]
    x = np.clip(x, 0.0, 1.0)
    f = np.where(x > 0, np.exp(-1 / np.where(x > 0, x, 1)), 0.0)
    g = np.where(x < 1, np.exp(-1 / np.where(x < 1, 1 - x, 1)), 0.0)
    return f / (f + g)


def plateau(y, radius: float = 1.0, flat: float = 0.5) -> np.ndarray:
    """Product cutoff equal to 1 on |y_k| <= flat*radius, 0 beyond radius."""
    y = np.atleast_2d(np.asarray(y, dtype=float))
    s = np.abs(y) / radius
    return np.prod(1 - _step((s - flat) / (1 - flat)), axis=-1)


# --------------------------------------------------------------------------
# problem description


@dataclass(frozen=True)
class OscillatoryProblem:
    inner_dim: int
    phase: Callable
    amplitude: Callable  # (lam, x, y) -> (N,)
    box: tuple[tuple[float, float], ...]
    outer_dim: int = 0
    gradient: Optional[Callable] = None
    hessian: Optional[Callable] = None
    base_y: Optional[tuple[float, ...]] = None
    name: str = "custom"

    def __post_init__(self):
        if self.inner_dim < 1 or self.outer_dim < 0:
            raise ConfigurationError("need inner_dim >= 1 and outer_dim >= 0")
        if len(self.box) != self.inner_dim:
            raise ConfigurationError("box needs one (lo, hi) pair per inner variable")

    def _x(self, x) -> np.ndarray:
        if x is None:
            return np.zeros(self.outer_dim)
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.shape != (self.outer_dim,):
            raise ConfigurationError(f"outer point must have {self.outer_dim} entries")
        return x

    def phi(self, x, y) -> np.ndarray:
        return np.asarray(self.phase(self._x(x), np.atleast_2d(y)), dtype=float)

    def grad(self, x, y) -> np.ndarray:
        x = self._x(x)
        y = np.atleast_2d(np.asarray(y, dtype=float))
        if self.gradient is not None:
            return np.asarray(self.gradient(x, y), dtype=float)
        out = np.empty_like(y)
        for k in range(self.inner_dim):
            e = np.zeros(self.inner_dim)
            e[k] = FD_STEP
            out[:, k] = (self.phase(x, y + e) - self.phase(x, y - e)) / (2 * FD_STEP)
        return out

    def hess(self, x, y) -> np.ndarray:
        x = self._x(x)
        y = np.asarray(y, dtype=float).reshape(self.inner_dim)
        if self.hessian is not None:
            H = np.asarray(self.hessian(x, y), dtype=float)
        else:
            n = self.inner_dim
            H = np.empty((n, n))
            E = np.eye(n) * FD_STEP
            if self.gradient is not None:
                for k in range(n):
                    gp = self.gradient(x, (y + E[k])[None])[0]
                    gm = self.gradient(x, (y - E[k])[None])[0]
                    H[:, k] = (gp - gm) / (2 * FD_STEP)
            else:
                f = lambda z: float(self.phase(x, np.atleast_2d(z))[0])  # noqa: E731
                for j in range(n):
                    for k in range(n):
                        H[j, k] = (
                            f(y + E[j] + E[k]) - f(y + E[j] - E[k]) - f(y - E[j] + E[k]) + f(y - E[j] - E[k])
                        ) / (4 * FD_STEP**2)
        return (H + H.T) / 2

    def amp(self, lam, x, y) -> np.ndarray:
        return np.asarray(self.amplitude(lam, self._x(x), np.atleast_2d(y)))


@dataclass(frozen=True)
class CriticalPointData:
    x: np.ndarray
    y: np.ndarray
    H: np.ndarray
    detH: float
    signature: tuple[int, int]
    residual: float
    iterations: int

    def to_json(self) -> dict:
        return {
            "x": self.x.tolist(),
            "y": self.y.tolist(),
            "H": self.H.tolist(),
            "detH": self.detH,
            "signature": list(self.signature),
            "residual": self.residual,
            "iterations": self.iterations,
        }


@dataclass(frozen=True)
class QuadratureEstimate:
    value: complex
    error: float
    nodes_per_axis: int


@dataclass(frozen=True)
class OscIntegralResult:
    lam: float
    quadrature: complex
    leading: complex
    remainder: complex
    error: float


@dataclass(frozen=True)
class RemainderFit(ExponentFit):
    results: tuple[OscIntegralResult, ...] = ()
    floor_limited: bool = False


def signature_of(H: np.ndarray) -> tuple[tuple[int, int], np.ndarray]:
    """(p, q) eigenvalue sign counts; raises DegeneracyError for near-zero eigenvalues."""
    ev = np.linalg.eigvalsh((H + H.T) / 2)
    scale = float(np.max(np.abs(ev))) if ev.size else 0.0
    if scale == 0 or np.min(np.abs(ev)) <= DEGENERACY_RATIO * scale:
        raise DegeneracyError(f"Hessian is degenerate (eigenvalues {ev})")
    return (int(np.sum(ev > 0)), int(np.sum(ev < 0))), ev


def find_critical_point(prob: OscillatoryProblem, x=None, guess=None) -> CriticalPointData:
    """Newton iteration on grad_y phi from ``guess``."""
    xv = prob._x(x)
    if guess is None:
        guess = prob.base_y if prob.base_y is not None else np.zeros(prob.inner_dim)
    y = np.asarray(guess, dtype=float).reshape(prob.inner_dim).copy()
    for it in range(NEWTON_MAX_ITER + 1):
        g = prob.grad(xv, y[None])[0]
        res = float(np.linalg.norm(g))
        if not np.isfinite(res):
            break
        if res < NEWTON_TOL:
            H = prob.hess(xv, y)
            sig, _ = signature_of(H)
            det = float(np.linalg.det(H))
            if abs(det) <= 1e-8:
                raise DegeneracyError(f"|det H| = {abs(det):.3g} is below 1e-8")
            return CriticalPointData(xv, y, H, det, sig, res, it)
        if it == NEWTON_MAX_ITER:
            break
        H = prob.hess(xv, y)
        try:
            y = y - np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            raise DegeneracyError("singular Hessian during Newton iteration") from None
    raise NoCriticalPointError(f"Newton did not reach |grad| < {NEWTON_TOL:g} in {NEWTON_MAX_ITER} iterations")


def leading_term(prob: OscillatoryProblem, cp: CriticalPointData, lam: float, x=None) -> complex:
    """First stationary-phase term at the critical point ``cp``."""
    xv = cp.x if x is None else prob._x(x)
    n = prob.inner_dim
    p, q = cp.signature
    a = complex(prob.amp(lam, xv, cp.y[None])[0])
    phi0 = float(prob.phi(xv, cp.y[None])[0])
    return (
        (lam / (2 * math.pi)) ** (-n / 2)
        * abs(cp.detH) ** -0.5
        * np.exp(1j * math.pi * (p - q) / 4)
        * np.exp(1j * lam * phi0)
        * a
    )


# --------------------------------------------------------------------------
# quadrature oracle


@lru_cache(maxsize=None)
def _gl(k: int):
    return np.polynomial.legendre.leggauss(k)


def _panel_rule(lo: float, hi: float, panels: int):
    t, w = _gl(_PANEL)
    edges = np.linspace(lo, hi, panels + 1)
    mid = (edges[:-1] + edges[1:]) / 2
    half = (edges[1:] - edges[:-1]) / 2
    nodes = (mid[:, None] + half[:, None] * t).ravel()
    weights = (half[:, None] * w).ravel()
    return nodes, weights


def _max_gradient(prob: OscillatoryProblem, x) -> float:
    k = {1: 257, 2: 65, 3: 17}[prob.inner_dim]
    axes = [np.linspace(lo, hi, k) for lo, hi in prob.box]
    Y = np.stack([a.ravel() for a in np.meshgrid(*axes, indexing="ij")], axis=-1)
    return float(np.max(np.linalg.norm(prob.grad(x, Y), axis=-1)))


def required_nodes(prob: OscillatoryProblem, lam: float, x=None) -> int:
    """Nodes per axis for the base grid (at least 10 per wavelength across the box)."""
    xv = prob._x(x)
    diam = math.sqrt(sum((hi - lo) ** 2 for lo, hi in prob.box))
    waves = lam * _max_gradient(prob, xv) * diam / (2 * math.pi)
    return max(4 * _PANEL, math.ceil(NODES_PER_WAVELENGTH * waves))


def _tensor_integral(prob, lam, x, panels: int) -> complex:
    rules = [_panel_rule(lo, hi, panels) for lo, hi in prob.box]
    first_nodes, first_w = rules[0]
    if prob.inner_dim > 1:
        rest = np.meshgrid(*[r[0] for r in rules[1:]], indexing="ij")
        rest_w = np.ones(rest[0].shape)
        for k, r in enumerate(rules[1:]):
            shape = [1] * len(rest)
            shape[k] = -1
            rest_w = rest_w * r[1].reshape(shape)
        rest_pts = np.stack([a.ravel() for a in rest], axis=-1)
        rest_w = rest_w.ravel()
    else:
        rest_pts = np.zeros((1, 0))
        rest_w = np.ones(1)
    block = max(1, _BLOCK // len(rest_w))
    total = 0j
    for i0 in range(0, len(first_nodes), block):
        y0 = first_nodes[i0 : i0 + block]
        Y = np.concatenate(
            [np.repeat(y0, len(rest_w))[:, None], np.tile(rest_pts, (len(y0), 1))], axis=-1
        )
        W = np.outer(first_w[i0 : i0 + block], rest_w).ravel()
        vals = np.exp(1j * lam * prob.phi(x, Y)) * prob.amp(lam, x, Y)
        total += complex(np.sum(vals * W))
    return total


def oscillatory_quadrature(
    prob: OscillatoryProblem, lam: float, x=None, max_nodes: int = DEFAULT_NODE_CAP
) -> QuadratureEstimate:
    """Brute-force value of int e^{i lam phi} a dy over ``prob.box``."""
    if prob.inner_dim > MAX_INNER_DIM:
        raise ResourceError(f"quadrature oracle supports inner_dim <= {MAX_INNER_DIM}; reduce n")
    xv = prob._x(x)
    panels = math.ceil(required_nodes(prob, lam, xv) / _PANEL)
    fine = (2 * panels * _PANEL) ** prob.inner_dim
    if fine > max_nodes:
        raise ResourceError(
            f"quadrature needs {fine} nodes (cap {max_nodes}); reduce lambda or the inner dimension"
        )
    coarse_val = _tensor_integral(prob, lam, xv, panels)
    fine_val = _tensor_integral(prob, lam, xv, 2 * panels)
    return QuadratureEstimate(fine_val, abs(fine_val - coarse_val), 2 * panels * _PANEL)


def compare(prob: OscillatoryProblem, lam: float, x=None, cp: CriticalPointData | None = None) -> OscIntegralResult:
    if cp is None:
        cp = find_critical_point(prob, x)
    q = oscillatory_quadrature(prob, lam, x)
    lead = leading_term(prob, cp, lam, x)
    return OscIntegralResult(float(lam), q.value, lead, q.value - lead, q.error)


def remainder_decay_fit(prob: OscillatoryProblem, lams: Sequence[float], x=None) -> RemainderFit:
    """Slope of log|quadrature - leading| against log lam.

    When every remainder sits at the quadrature error floor (the expansion is
    exact to all orders) the fit is skipped: slope is NaN and
    ``floor_limited`` is set.
    """
    lams = sorted(float(v) for v in lams)
    if len(lams) < 5 or lams[-1] < 10 * lams[0] * (1 - 1e-12):
        raise InsufficientDataError("need at least 5 lambda values spanning a decade")
    cp = find_critical_point(prob, x)
    results = tuple(parallel_map(lambda lam: compare(prob, lam, x, cp), lams))
    floors = [max(10 * r.error, 1e-13 * abs(r.quadrature), 1e-15) for r in results]
    usable = [(r.lam, abs(r.remainder)) for r, f in zip(results, floors) if abs(r.remainder) > f]
    samples = tuple((r.lam, abs(r.remainder)) for r in results)
    floor_limited = len(usable) < 3
    if floor_limited:
        return RemainderFit(samples, math.nan, math.nan, math.nan, len(samples), results, True)
    fit = fit_exponent(usable)
    return RemainderFit(
        samples, fit.slope, fit.intercept, fit.r2, len(samples) - len(usable), results, False
    )


def write_results_csv(path, results: Sequence[OscIntegralResult]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lambda", "quad_re", "quad_im", "lead_re", "lead_im", "remainder_abs"])
        for r in results:
            w.writerow(
                [
                    format(v, ".17g")
                    for v in (
                        r.lam,
                        r.quadrature.real,
                        r.quadrature.imag,
                        r.leading.real,
                        r.leading.imag,
                        abs(r.remainder),
                    )
                ]
            )


# --------------------------------------------------------------------------
# shipped test phases


def _poly_phase(signs, cubic):
    signs = np.asarray(signs, dtype=float)
    cubic = np.asarray(cubic, dtype=float)

    def phase(x, y):
        return np.sum(signs * y * y / 2 + cubic * y**3, axis=-1)

    def gradient(x, y):
        return signs * y + 3 * cubic * y * y

    def hessian(x, y):
        return np.diag(signs + 6 * cubic * y)

    return phase, gradient, hessian


def catalog_phase(name: str, radius: float | None = None) -> OscillatoryProblem:
    """Catalog of nondegenerate phases used by the checks and experiments.

    quadratic, negative: +-y^2/2 (bump amplitude, radius 1.5)
    cubic: y^2/2 + y^3/10 (radius 1)
    saddle: (y1^2 - y2^2)/2 (radius 0.5)
    product: (y1^2/2 + y1^3/10) + (y2^2/2 + y2^3/10) (radius 0.5)
    plateau: y^2/2 with an amplitude equal to 1 on |y| <= 3 (radius 6)

    The product phase uses equal signs on purpose: with opposite signs the
    first corrections of the two factors cancel and the remainder decays
    faster than the generic rate.
    shifted: (y - x)^2/2 with one outer variable
    """
    table = {
        "quadratic": ((1.0,), (0.0,), 1.5),
        "negative": ((-1.0,), (0.0,), 1.5),
        "cubic": ((1.0,), (0.1,), 1.0),
        "saddle": ((1.0, -1.0), (0.0, 0.0), 0.5),
        "product": ((1.0, 1.0), (0.1, 0.1), 0.5),
        "plateau": ((1.0,), (0.0,), 6.0),
    }
    if name == "shifted":
        r = 1.0 if radius is None else radius
        return OscillatoryProblem(
            inner_dim=1,
            outer_dim=1,
            phase=lambda x, y: ((y[:, 0] - x[0]) ** 2) / 2,
            gradient=lambda x, y: y - x[0],
            hessian=lambda x, y: np.eye(1),
            amplitude=lambda lam, x, y: bump(y, 0.0, r),
            box=((-r, r),),
            name=name,
        )
    if name not in table:
        raise ConfigurationError(f"unknown test phase {name!r}; choose from {sorted(table) + ['shifted']}")
    signs, cubic, r0 = table[name]
    r = r0 if radius is None else radius
    phase, gradient, hessian = _poly_phase(signs, cubic)
    if name == "plateau":
        amplitude = lambda lam, x, y: plateau(y, r)  # noqa: E731
    else:
        amplitude = lambda lam, x, y: bump(y, 0.0, r)  # noqa: E731
    n = len(signs)
    return OscillatoryProblem(
        inner_dim=n,
        phase=phase,
        gradient=gradient,
        hessian=hessian,
        amplitude=amplitude,
        box=tuple((-r, r) for _ in range(n)),
        name=name,
    )


def fresnel_value(lam: float) -> complex:
    """int e^{i lam t^2 / 2} dt over the real line."""
    return (lam / (2 * math.pi)) ** -0.5 * np.exp(1j * math.pi / 4)


# --------------------------------------------------------------------------
# flat-model Hessian checks


def _check_dims(d: int, n: int):
    if not (1 <= d < n <= 3):
        raise ConfigurationError(f"need 1 <= d < n <= 3, got d={d}, n={n}")


def build_paper_phase(d: int, n: int) -> OscillatoryProblem:
    """Phase <x' - y', xi'> + t(sqrt(|xi'|^2 + r^2) - 1) in the flat model.

    Inner variables are (t, x', xi', r) in R^{2d+2}; the outer variable is
    y' in R^d.  The normal direction omega only enters through r, so the
    phase does not depend on n beyond the range check.
    """
    _check_dims(d, n)

    def split(y):
        return y[:, 0], y[:, 1 : 1 + d], y[:, 1 + d : 1 + 2 * d], y[:, 1 + 2 * d]

    def phase(x, y):
        t, xp, kp, r = split(y)
        p = np.sqrt(np.sum(kp * kp, axis=-1) + r * r)
        return np.sum((xp - x) * kp, axis=-1) + t * (p - 1)

    def gradient(x, y):
        t, xp, kp, r = split(y)
        p = np.sqrt(np.sum(kp * kp, axis=-1) + r * r)
        return np.concatenate(
            [
                (p - 1)[:, None],
                kp,
                (xp - x) + t[:, None] * kp / p[:, None],
                (t * r / p)[:, None],
            ],
            axis=-1,
        )

    def hessian(x, y):
        t, xp, kp, r = y[0], y[1 : 1 + d], y[1 + d : 1 + 2 * d], y[1 + 2 * d]
        p = math.sqrt(float(kp @ kp) + r * r)
        k = 2 * d + 2
        H = np.zeros((k, k))
        full = np.concatenate([kp, [r]]) / p  # gradient of p in (xi', r)
        sec = (np.eye(d + 1) - np.outer(full, full)) / p  # Hessian of p in (xi', r)
        idx = list(range(1 + d, 1 + 2 * d)) + [1 + 2 * d]
        H[0, idx] = full
        H[idx, 0] = full
        H[np.ix_(idx, idx)] = t * sec
        H[1 : 1 + d, 1 + d : 1 + 2 * d] = np.eye(d)
        H[1 + d : 1 + 2 * d, 1 : 1 + d] = np.eye(d)
        return H

    base = np.concatenate([[0.0], np.zeros(d), np.zeros(d), [1.0]])
    return OscillatoryProblem(
        inner_dim=2 * d + 2,
        outer_dim=d,
        phase=phase,
        gradient=gradient,
        hessian=hessian,
        amplitude=lambda lam, x, y: bump(y, np.concatenate([[0.0], x, np.zeros(d), [1.0]]), 0.5),
        box=tuple((-0.5, 0.5) for _ in range(2 * d + 2)),
        base_y=tuple(base),
        name=f"flat-band-phase(d={d},n={n})",
    )


def band_phase_critical_point(d: int, y_prime=None) -> np.ndarray:
    """(t, x', xi', r) = (0, y', 0, 1)."""
    yp = np.zeros(d) if y_prime is None else np.asarray(y_prime, dtype=float)
    return np.concatenate([[0.0], yp, np.zeros(d), [1.0]])


def band_hessian_pattern(d: int) -> np.ndarray:
    """Expected flat-model block matrix in (t, x', xi', r); the x'x' block is zero here."""
    k = 2 * d + 2
    H = np.zeros((k, k))
    H[0, -1] = H[-1, 0] = 1
    H[1 : 1 + d, 1 + d : 1 + 2 * d] = np.eye(d)
    H[1 + d : 1 + 2 * d, 1 : 1 + d] = np.eye(d)
    return H


@dataclass(frozen=True)
class HessianCheck:
    d: int
    n: int
    det: float
    signature: tuple[int, int]
    hessian: np.ndarray = field(repr=False)
    residual: float = 0.0

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "n": self.n,
            "det": self.det,
            "signature": list(self.signature),
            "residual": self.residual,
            "hessian": self.hessian.tolist(),
        }


def composed_phase(d: int, n: int, t: float = 0.3, x_prime=None, y_prime=None, xi=None) -> OscillatoryProblem:
    """<x' - w, eta> + <w - z, xi> + t(|xi| - 1) + <z - y', zeta> over (w, z, eta, zeta) in R^{4n}.

    x' and y' sit on Sigma = R^d x {0}; t and xi are held fixed.
    """
    _check_dims(d, n)
    xp = np.zeros(n)
    yp = np.zeros(n)
    xp[:d] = 0.2 if x_prime is None else np.asarray(x_prime, dtype=float)
    yp[:d] = -0.1 if y_prime is None else np.asarray(y_prime, dtype=float)
    if xi is None:
        xi = np.linspace(1.0, 2.0, n) / np.linalg.norm(np.linspace(1.0, 2.0, n))
    xi = np.asarray(xi, dtype=float)
    pxi = float(np.linalg.norm(xi))

    def split(y):
        return y[:, :n], y[:, n : 2 * n], y[:, 2 * n : 3 * n], y[:, 3 * n :]

    def phase(x, y):
        w, z, eta, zeta = split(y)
        return (
            np.sum((xp - w) * eta, axis=-1)
            + (w - z) @ xi
            + t * (pxi - 1)
            + np.sum((z - yp) * zeta, axis=-1)
        )

    def gradient(x, y):
        w, z, eta, zeta = split(y)
        return np.concatenate([-eta + xi, -xi + zeta, xp - w, z - yp], axis=-1)

    def hessian(x, y):
        I = np.eye(n)
        Z = np.zeros((n, n))
        return np.block([[Z, Z, -I, Z], [Z, Z, Z, I], [-I, Z, Z, Z], [Z, I, Z, Z]])

    crit = np.concatenate([xp, yp, xi, xi])
    return OscillatoryProblem(
        inner_dim=4 * n,
        phase=phase,
        gradient=gradient,
        hessian=hessian,
        amplitude=lambda lam, x, y: np.ones(len(y)),
        box=tuple((-1.0, 1.0) for _ in range(4 * n)),
        base_y=tuple(crit),
        name=f"flat-composed-phase(d={d},n={n})",
    )


def prop32_hessian_check(d: int, n: int, numeric: bool = True) -> HessianCheck:
    """Determinant and signature of the (w, z, eta, zeta) Hessian at its critical point.

    With ``numeric`` the Hessian is rebuilt by central differences of the
    gradient rather than taken from the closed form.
    """
    prob = composed_phase(d, n)
    crit = np.asarray(prob.base_y)
    if numeric:
        prob = OscillatoryProblem(
            inner_dim=prob.inner_dim,
            phase=prob.phase,
            gradient=prob.gradient,
            amplitude=prob.amplitude,
            box=prob.box,
            base_y=prob.base_y,
            name=prob.name,
        )
    H = prob.hess(None, crit)
    sig, _ = signature_of(H)
    residual = float(np.linalg.norm(prob.grad(None, crit[None])[0]))
    return HessianCheck(d, n, float(np.linalg.det(H)), sig, H, residual)


def band_phase_check(d: int, n: int, y_prime=None) -> HessianCheck:
    """Hessian of the flat band phase at (0, y', 0, 1), by differences of the exact gradient."""
    prob = build_paper_phase(d, n)
    yp = np.full(d, 0.1) if y_prime is None else np.asarray(y_prime, dtype=float)
    crit = band_phase_critical_point(d, yp)
    numeric = OscillatoryProblem(
        inner_dim=prob.inner_dim,
        outer_dim=prob.outer_dim,
        phase=prob.phase,
        gradient=prob.gradient,
        amplitude=prob.amplitude,
        box=prob.box,
        name=prob.name,
    )
    H = numeric.hess(yp, crit)
    sig, _ = signature_of(H)
    residual = float(np.linalg.norm(prob.grad(yp, crit[None])[0]))
    return HessianCheck(d, n, float(np.linalg.det(H)), sig, H, residual)
