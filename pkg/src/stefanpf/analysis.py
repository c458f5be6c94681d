"""Diagnostics: phase volume, interface position and width, enthalpy,
square-root growth fits and the one-phase Neumann growth coefficient."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.ndimage import map_coordinates
from scipy.optimize import bisect

from .errors import InterfaceDetectionError, UsageError
from .grid import Field

SOLID_MINUS_ONE = "solid_minus_one"
SOLID_ONE = "solid_one"
UNIT_INTERVAL = "unit_interval"
CONVENTIONS = (SOLID_MINUS_ONE, SOLID_ONE, UNIT_INTERVAL)


@dataclass(frozen=True)
class TimeSeriesRecord:
    step: int
    time: float
    volume: float
    interface_pos: Optional[float] = None
    interface_width: Optional[float] = None
    enthalpy: Optional[float] = None


@dataclass(frozen=True)
class SqrtFit:
    """Fit of ``s(t)**2 = beta**2 * (t - t0)``; ``beta`` is NaN when degenerate."""

    beta: float
    t0: float
    r_squared: float
    degenerate: bool = False


def phase_volume(phi: Field, convention: str = SOLID_MINUS_ONE) -> float:
    """Area occupied by the tracked phase, using the linear phase fraction.

    ``solid_minus_one`` counts ``(1 - phi)/2``, ``solid_one`` counts
    ``(1 + phi)/2`` and ``unit_interval`` counts ``phi``.
    """
    f = phi.interior
    if convention == SOLID_MINUS_ONE:
        frac = 0.5 * (1.0 - f)
    elif convention == SOLID_ONE:
        frac = 0.5 * (1.0 + f)
    elif convention == UNIT_INTERVAL:
        frac = f
    else:
        raise UsageError(f"unknown phase convention {convention!r}; expected one of {CONVENTIONS}")
    return float(frac.sum() * phi.spec.cell_area)


def level_crossings(values: np.ndarray, coords: np.ndarray, level: float) -> np.ndarray:
    """Linearly interpolated locations where a sampled profile crosses ``level``.

    Samples exactly on the level count as above it, so a profile touching
    the level at one sample yields exactly one crossing located there.
    """
    values = np.asarray(values, dtype=float)
    coords = np.asarray(coords, dtype=float)
    s = values - level
    above = s >= 0
    idx = np.nonzero(above[:-1] != above[1:])[0]
    a, b = s[idx], s[idx + 1]
    frac = a / (a - b)
    return coords[idx] + frac * (coords[idx + 1] - coords[idx])


def _single_crossing(values, coords, level) -> float:
    xs = level_crossings(values, coords, level)
    if len(xs) != 1:
        raise InterfaceDetectionError(
            f"expected exactly one crossing of level {level}, found {len(xs)}", crossings=len(xs))
    return float(xs[0])


def _profile(phi: Field) -> tuple[np.ndarray, np.ndarray]:
    if not phi.spec.is_1d:
        raise UsageError("expected a 1D field; pass a slice through profile_width for 2D data")
    return phi.interior[:, 0], phi.spec.x_centers()


def interface_position_1d(phi: Field, level: float = 0.0) -> float:
    values, x = _profile(phi)
    return _single_crossing(values, x, level)


def profile_width(values: np.ndarray, coords: np.ndarray, lo: Optional[float] = None,
                  hi: Optional[float] = None) -> float:
    """Distance between the ``lo`` and ``hi`` crossings of a monotone profile.

    Levels default to 10% and 90% of the profile's own value range.
    """
    values = np.asarray(values, dtype=float)
    vmin, vmax = float(values.min()), float(values.max())
    if (lo is None or hi is None) and vmin == vmax:
        raise InterfaceDetectionError("flat profile has no interface", crossings=0)
    lo = vmin + 0.1 * (vmax - vmin) if lo is None else lo
    hi = vmin + 0.9 * (vmax - vmin) if hi is None else hi
    if not lo < hi:
        raise UsageError(f"need lo < hi, got lo={lo}, hi={hi}")
    return abs(_single_crossing(values, coords, hi) - _single_crossing(values, coords, lo))


def interface_width(phi: Field, lo: Optional[float] = None, hi: Optional[float] = None) -> float:
    values, x = _profile(phi)
    return profile_width(values, x, lo, hi)


def total_enthalpy(u: Field, phi: Field, latent_heat: float) -> float:
    if u.spec != phi.spec:
        raise UsageError("u and phi live on different grids")
    return float((u.interior + 0.5 * latent_heat * phi.interior).sum() * phi.spec.cell_area)


def fit_sqrt_growth(times: Sequence[float], positions: Sequence[float], window: float = 0.5) -> SqrtFit:
    """Least-squares fit of ``s**2`` against ``t`` over the trailing ``window`` fraction of samples."""
    t = np.asarray(times, dtype=float)
    s = np.asarray(positions, dtype=float)
    if t.shape != s.shape or t.ndim != 1:
        raise UsageError("times and positions must be 1D sequences of equal length")
    if len(t) < 3:
        raise UsageError(f"need at least 3 samples, got {len(t)}")
    if np.any(np.diff(t) <= 0):
        raise UsageError("times must be strictly increasing")
    if np.any(s < 0):
        raise UsageError("positions must be non-negative")
    if not 0 < window <= 1:
        raise UsageError(f"window must be in (0, 1], got {window}")
    n = max(3, int(math.ceil(window * len(t))))
    t, y = t[-n:], s[-n:] ** 2
    tm, ym = t.mean(), y.mean()
    sxx = ((t - tm) ** 2).sum()
    sxy = ((t - tm) * (y - ym)).sum()
    syy = ((y - ym) ** 2).sum()
    slope = sxy / sxx
    intercept = ym - slope * tm
    r2 = 1.0 if syy == 0 else min(1.0, max(0.0, sxy * sxy / (sxx * syy)))
    if not slope > 0:
        return SqrtFit(math.nan, math.nan, r2, degenerate=True)
    return SqrtFit(math.sqrt(slope), -intercept / slope, r2)


def neumann_relation(beta: float) -> float:
    """Left side of the one-phase relation sqrt(pi) * l * exp(l^2) * erf(l), l = beta/2."""
    lam = 0.5 * beta
    return math.sqrt(math.pi) * lam * math.exp(lam * lam) * math.erf(lam)


def neumann_beta(stefan_number: float) -> float:
    """Growth coefficient of the one-phase Stefan problem, ``s = beta * sqrt(t)`` at unit diffusivity."""
    if not stefan_number > 0:
        raise UsageError(f"Stefan number must be positive, got {stefan_number}")
    lo, hi = 1e-6, 10.0
    if not neumann_relation(lo) < stefan_number < neumann_relation(hi):
        raise UsageError(f"Stefan number {stefan_number} outside the bracket [{lo}, {hi}] for beta")
    return bisect(lambda b: neumann_relation(b) - stefan_number, lo, hi, xtol=1e-10, maxiter=200)


def caginalp_stefan_mapping(latent_heat: float, u_wall: float) -> tuple[float, float]:
    """Effective ``(stefan_number, diffusivity)`` of a Caginalp melting run.

    Away from the front phi sits at its shifted well ``+-1 + 2u``, so the
    enthalpy ``u + latent_heat/2 * phi`` behaves like ``(1 + latent_heat) u``
    plus a constant: the bulk heat capacity is ``1 + latent_heat`` at unit
    conductivity.  A wall held at ``u_wall`` above the melting value 0 then
    gives ``St = (1 + latent_heat) u_wall / latent_heat`` and diffusivity
    ``1 / (1 + latent_heat)``, so the front follows
    ``neumann_beta(St) * sqrt(diffusivity * t)``.
    """
    if not latent_heat > 0:
        raise UsageError("latent_heat must be positive")
    cap = 1.0 + latent_heat
    return cap * u_wall / latent_heat, 1.0 / cap


# -- radial measures --------------------------------------------------------

RAY_DIRECTIONS = tuple(
    (dx_, dy_) for dx_, dy_ in (
        (1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0),
        (1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0),
    )
)


def ray_profile(phi: Field, direction: tuple[float, float], cx: Optional[float] = None,
                cy: Optional[float] = None, step: Optional[float] = None) -> tuple[np.ndarray, np.ndarray]:
    """Bilinear samples of ``phi`` along a ray from the centre; returns ``(distance, values)``."""
    spec = phi.spec
    if spec.is_1d:
        raise UsageError("ray sampling needs a 2D field")
    cx = 0.5 * spec.lx if cx is None else cx
    cy = 0.5 * spec.ly if cy is None else cy
    h = min(spec.dx, spec.dy)
    step = 0.25 * h if step is None else step
    ux, uy = direction
    norm = math.hypot(ux, uy)
    ux, uy = ux / norm, uy / norm
    # stay inside the hull of cell centres
    limits = []
    for c, u, n, d in ((cx, ux, spec.nx, spec.dx), (cy, uy, spec.ny, spec.dy)):
        if u > 0:
            limits.append(((n - 0.5) * d - c) / u)
        elif u < 0:
            limits.append((0.5 * d - c) / u)
    tmax = min(limits)
    t = np.arange(0.0, tmax + 1e-12 * h, step)
    ix = (cx + t * ux) / spec.dx - 0.5
    iy = (cy + t * uy) / spec.dy - 0.5
    vals = map_coordinates(phi.interior, [ix, iy], order=1, mode="nearest")
    return t, vals


def ray_radii(phi: Field, level: float, cx: Optional[float] = None, cy: Optional[float] = None) -> np.ndarray:
    """Distance from the centre to the first ``level`` crossing along the 4 axis and 4 diagonal rays."""
    radii = []
    for d in RAY_DIRECTIONS:
        t, vals = ray_profile(phi, d, cx, cy)
        xs = level_crossings(vals, t, level)
        if len(xs) == 0:
            raise InterfaceDetectionError(f"no crossing of level {level} along ray {d}", crossings=0)
        radii.append(xs[0])
    return np.array(radii)


def radial_asymmetry(phi: Field, level: float = 0.0, cx: Optional[float] = None,
                     cy: Optional[float] = None) -> float:
    """(max - min) / mean of the eight ray radii of the ``level`` contour."""
    r = ray_radii(phi, level, cx, cy)
    return float((r.max() - r.min()) / r.mean())


def mean_radius(phi: Field, level: float = 0.0, cx: Optional[float] = None, cy: Optional[float] = None) -> float:
    return float(ray_radii(phi, level, cx, cy).mean())


def radial_width(phi: Field, cx: Optional[float] = None, cy: Optional[float] = None,
                 lo: Optional[float] = None, hi: Optional[float] = None) -> float:
    """10-90% width of the profile along the +x ray from the centre."""
    t, vals = ray_profile(phi, RAY_DIRECTIONS[0], cx, cy)
    return profile_width(vals, t, lo, hi)
