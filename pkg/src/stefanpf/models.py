"""Explicit time steppers for the four phase-field systems and the
moving-frame steady solver.

Phase conventions: ``phi`` lives on [-1, 1] for the Caginalp, Karma-Rappel
and dissolution models and on [0, 1] for the modified Allen-Cahn model.

Coupled systems update ``phi`` first and feed its discrete increment
``phi_new - phi_old`` wherever the continuous equations contain
``d(phi)/dt``.  For the Caginalp system this makes the discrete enthalpy
``sum(u + latent_heat/2 * phi)`` an exact invariant under zero-flux walls.

Every stepper applies the boundary condition to its inputs before
evaluating stencils and to its outputs before returning, and refuses a
``dt`` above the forward-Euler bound of its stiffest diffusion term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import ConfigurationError, StabilityError, UsageError
from .grid import Boundary, BoundaryCondition, Field, GridSpec, apply_boundary, new_field, seed_front_1d
from .stencils import (
    DEFAULT_EPS_GRAD,
    _d1x,
    _d2x,
    cfl_max_dt,
    curvature_arr,
    grad_magnitude_arr,
    laplacian_arr,
)


def _positive(name, value):
    if not (value > 0 and math.isfinite(value)):
        raise ConfigurationError(f"{name} must be positive, got {value}", key=f"params.{name}")


@dataclass(frozen=True)
class CaginalpParams:
    latent_heat: float = 1.0

    def __post_init__(self):
        _positive("latent_heat", self.latent_heat)


@dataclass(frozen=True)
class AllenCahnParams:
    mobility: float = 1.0
    beta: float = 0.0
    g_const: float = 1.0

    def __post_init__(self):
        _positive("mobility", self.mobility)
        _positive("g_const", self.g_const)
        if not abs(self.beta) < 0.5:
            raise ConfigurationError(f"|beta| must be < 0.5, got {self.beta}", key="params.beta")


@dataclass(frozen=True)
class KarmaRappelParams:
    tau: float = 1.0
    width: float = 1.0
    lam: float = 1.0
    diffusivity: float = 1.0

    def __post_init__(self):
        for name in ("tau", "width", "diffusivity"):
            _positive(name, getattr(self, name))
        # lam = 0 decouples the phase equation from u
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise ConfigurationError(f"lam must be >= 0, got {self.lam}", key="params.lam")


@dataclass(frozen=True)
class MovingFrameParams:
    base: KarmaRappelParams
    velocity: float = 0.0
    u_far: float = 0.0

    def __post_init__(self):
        if not isinstance(self.base, KarmaRappelParams):
            raise ConfigurationError("moving-frame params need KarmaRappelParams as base")


@dataclass(frozen=True)
class DissolutionParams:
    peclet: float = 1.0
    lam: float = 1.0
    alpha: float = 0.0
    damkohler: float = 1.0
    eps_grad: float = DEFAULT_EPS_GRAD

    def __post_init__(self):
        for name in ("peclet", "damkohler", "eps_grad"):
            _positive(name, getattr(self, name))


def max_stable_dt(params, spec: GridSpec) -> float:
    """Forward-Euler bound for the stiffest diffusion term of the model."""
    if isinstance(params, CaginalpParams):
        return cfl_max_dt(1.0, spec)
    if isinstance(params, AllenCahnParams):
        return cfl_max_dt(params.mobility, spec)
    if isinstance(params, KarmaRappelParams):
        return min(cfl_max_dt(params.width ** 2 / params.tau, spec), cfl_max_dt(params.diffusivity, spec))
    if isinstance(params, MovingFrameParams):
        return max_stable_dt(params.base, spec)
    if isinstance(params, DissolutionParams):
        return min(cfl_max_dt(1.0 / params.peclet, spec), cfl_max_dt(1.0, spec))
    raise UsageError(f"unknown parameter type {type(params).__name__}")


def _check_dt(dt, params, spec, what):
    bound = max_stable_dt(params, spec)
    if not dt > 0:
        raise UsageError(f"dt must be positive, got {dt}")
    if dt > bound:
        raise StabilityError(dt, bound, what)


def _same_grid(a: Field, b: Field):
    if a.spec != b.spec:
        raise UsageError("fields live on different grids")


def _new(like: Field, interior: np.ndarray, bc: Boundary) -> Field:
    return apply_boundary(like.with_interior(interior), bc)


def caginalp_step(u: Field, phi: Field, p: CaginalpParams, dt: float, bc: Boundary,
                  bc_u: Optional[Boundary] = None) -> tuple[Field, Field]:
    """One step of the Caginalp system; returns ``(u, phi)``.

    ``bc`` applies to ``phi`` and, unless ``bc_u`` is given, to ``u`` too.
    """
    _same_grid(u, phi)
    spec = phi.spec
    _check_dt(dt, p, spec, "caginalp")
    bc_u = bc if bc_u is None else bc_u
    phi = apply_boundary(phi, bc)
    u = apply_boundary(u, bc_u)
    f, w = phi.interior, u.interior
    dphi = dt * (laplacian_arr(phi.values, spec) + 0.5 * (f - f ** 3) + 2.0 * w)
    w_new = w + dt * laplacian_arr(u.values, spec) - 0.5 * p.latent_heat * dphi
    return _new(u, w_new, bc_u), _new(phi, f + dphi, bc)


def allen_cahn_step(phi: Field, p: AllenCahnParams, dt: float, bc: Boundary) -> Field:
    """One step of the modified Allen-Cahn equation on the [0, 1] convention."""
    spec = phi.spec
    _check_dt(dt, p, spec, "allen_cahn")
    phi = apply_boundary(phi, bc)
    f = phi.interior
    drive = 4.0 * p.g_const * f * (1.0 - f) * (f - 0.5 + p.beta)
    rhs = p.mobility * (laplacian_arr(phi.values, spec) + drive)
    return _new(phi, f + dt * rhs, bc)


def _kr_reaction(f, w, lam):
    s = 1.0 - f * f
    return (f - lam * w * s) * s


def karma_rappel_step(phi: Field, u: Field, p: KarmaRappelParams, dt: float, bc: Boundary,
                      bc_u: Optional[Boundary] = None) -> tuple[Field, Field]:
    """One step of the 1D solidification system; returns ``(phi, u)``."""
    _same_grid(u, phi)
    spec = phi.spec
    if not spec.is_1d:
        raise UsageError("karma_rappel_step needs a 1D grid (ny = 1)")
    _check_dt(dt, p, spec, "karma_rappel")
    bc_u = bc if bc_u is None else bc_u
    phi = apply_boundary(phi, bc)
    u = apply_boundary(u, bc_u)
    f, w = phi.interior, u.interior
    dphi = (dt / p.tau) * (p.width ** 2 * _d2x(phi.values, spec.dx) + _kr_reaction(f, w, p.lam))
    w_new = w + dt * p.diffusivity * _d2x(u.values, spec.dx) + 0.5 * dphi
    return _new(phi, f + dphi, bc), _new(u, w_new, bc_u)


def dissolution_step(phi: Field, c: Field, p: DissolutionParams, dt: float, bc: Boundary,
                     bc_c: Optional[Boundary] = None) -> tuple[Field, Field]:
    """One step of the dissolution/precipitation system; returns ``(phi, c)``.

    The interface-reaction correction in the ``c`` equation divides by
    ``|grad phi|`` and is set to zero wherever that falls below
    ``p.eps_grad``; the curvature uses the same threshold.
    """
    _same_grid(c, phi)
    spec = phi.spec
    if spec.is_1d:
        raise UsageError("dissolution_step needs a 2D grid")
    _check_dt(dt, p, spec, "dissolution")
    bc_c = bc if bc_c is None else bc_c
    phi = apply_boundary(phi, bc)
    c = apply_boundary(c, bc_c)
    f, w = phi.interior, c.interior
    lap_phi = laplacian_arr(phi.values, spec)
    grad = grad_magnitude_arr(phi.values, spec)
    kappa = curvature_arr(phi.values, spec, p.eps_grad)
    rhs_phi = (lap_phi + (1.0 - f * f) * (f - p.lam * w) - kappa * grad) / p.peclet
    f_new = f + dt * rhs_phi
    phi_t = (f_new - f) / dt
    corr = np.zeros_like(f)
    ok = grad >= p.eps_grad
    corr[ok] = (lap_phi[ok] - phi_t[ok]) * (p.alpha * phi_t[ok]) / (p.damkohler * grad[ok])
    w_new = w + dt * (laplacian_arr(c.values, spec) + p.alpha * phi_t + corr)
    return _new(phi, f_new, bc), _new(c, w_new, bc_c)


# -- moving frame ---------------------------------------------------------

def moving_frame_boundaries(p: MovingFrameParams) -> tuple[dict, dict]:
    """Far-field conditions: solid (phi=-1, u=0) on the left, liquid (phi=+1, u=u_far) on the right."""
    bc_phi = {"left": BoundaryCondition("dirichlet", -1.0), "right": BoundaryCondition("dirichlet", 1.0)}
    bc_u = {"left": BoundaryCondition("dirichlet", 0.0), "right": BoundaryCondition("dirichlet", p.u_far)}
    return bc_phi, bc_u


def _d1x_central4(v: np.ndarray, dx: float) -> np.ndarray:
    # fourth-order centred first derivative; second-order in the cell next to each wall
    out = _d1x(v, dx)
    a = v[:, 1]
    out[1:-1, 0] = ((a[:-4] - a[4:]) + 8.0 * (a[3:-1] - a[1:-3])) / (12.0 * dx)
    return out


def _mf_residual_arr(fv: np.ndarray, wv: np.ndarray, p: MovingFrameParams, dx: float):
    b, V = p.base, p.velocity
    f, w = fv[1:-1, 1:-1], wv[1:-1, 1:-1]
    fx = _d1x_central4(fv, dx)
    r_phi = b.tau * V * fx + b.width ** 2 * _d2x(fv, dx) + _kr_reaction(f, w, b.lam)
    r_u = V * _d1x_central4(wv, dx) + b.diffusivity * _d2x(wv, dx) - 0.5 * V * fx
    return r_phi, r_u


def moving_frame_residual(phi: Field, u: Field, p: MovingFrameParams) -> tuple[Field, Field]:
    """Pointwise residuals of the co-moving steady system (ghosts must be consistent)."""
    _same_grid(u, phi)
    if not phi.spec.is_1d:
        raise UsageError("moving_frame_residual needs a 1D grid")
    r_phi, r_u = _mf_residual_arr(phi.values, u.values, p, phi.spec.dx)
    return phi.with_interior(r_phi), u.with_interior(r_u)


class RelaxResult(NamedTuple):
    phi: Field
    u: Field
    residual: float
    converged: bool
    iterations: int


CFL_ADV = 0.9


def pseudo_dt(p: MovingFrameParams, spec: GridSpec) -> float:
    """Pseudo-time step: half the diffusive bound, also respecting central-advection stability."""
    b = p.base
    dt = max_stable_dt(b, spec)
    V = abs(p.velocity)
    if V > 0:
        # forward Euler with centred advection needs dt <= 2 * diffusivity / speed^2
        dt = min(dt, CFL_ADV * 2.0 * b.diffusivity / V ** 2, CFL_ADV * 2.0 * b.width ** 2 / (b.tau * V ** 2))
    return 0.5 * dt


def moving_frame_initial(p: MovingFrameParams, spec: GridSpec, x0: Optional[float] = None) -> tuple[Field, Field]:
    """Initial guess: equilibrium tanh front at ``x0`` (domain centre by default), u stepped to u_far."""
    x0 = 0.5 * spec.lx if x0 is None else x0
    w = p.base.width * math.sqrt(2.0)
    phi = seed_front_1d(new_field(spec), x0, -1.0, 1.0, w)
    u = seed_front_1d(new_field(spec), x0, 0.0, p.u_far, w)
    return phi, u


def moving_frame_relax(p: MovingFrameParams, spec: GridSpec, tol: float, max_iters: int,
                       phi0: Optional[Field] = None, u0: Optional[Field] = None,
                       dt_pseudo: Optional[float] = None, check_every: int = 20,
                       pin: bool = True) -> RelaxResult:
    """Solve the co-moving steady system by pseudo-time relaxation.

    Iterates ``phi += dt * R_phi / tau`` and ``u += dt * R_u`` under the
    far-field Dirichlet conditions of :func:`moving_frame_boundaries` until
    ``max(|R_phi|, |R_u|) <= tol``.  Running out of iterations is reported
    through ``converged=False``, not raised.

    With ``pin`` (the default) the cell nearest the domain centre keeps its
    initial ``phi`` value.  This removes the translation mode: at a wrong
    ``V`` the front cannot drift into a wall and fake convergence, and the
    residual at the pinned cell stays of order ``tau * |V - V*| * phi_x``.
    """
    if not spec.is_1d:
        raise UsageError("moving_frame_relax needs a 1D grid")
    if not tol > 0:
        raise UsageError(f"tol must be positive, got {tol}")
    if max_iters < 1:
        raise UsageError(f"max_iters must be >= 1, got {max_iters}")
    if (phi0 is None) != (u0 is None):
        raise UsageError("give both phi0 and u0 or neither")
    if phi0 is None:
        phi0, u0 = moving_frame_initial(p, spec)
    dt = pseudo_dt(p, spec) if dt_pseudo is None else dt_pseudo
    bc_phi, bc_u = moving_frame_boundaries(p)
    phi = apply_boundary(phi0, bc_phi)
    u = apply_boundary(u0, bc_u)
    step_phi = dt / p.base.tau
    ipin = spec.nx // 2
    pinned = phi.interior[ipin, 0]
    res = math.inf
    it = 0
    while True:
        r_phi, r_u = _mf_residual_arr(phi.values, u.values, p, spec.dx)
        if it % check_every == 0 or it == max_iters:
            res = float(max(np.abs(r_phi).max(), np.abs(r_u).max()))
            if res <= tol or not math.isfinite(res) or it == max_iters:
                break
        f = phi.interior + step_phi * r_phi
        if pin:
            f[ipin, 0] = pinned
        phi = _new(phi, f, bc_phi)
        u = _new(u, u.interior + dt * r_u, bc_u)
        it += 1
    return RelaxResult(phi, u, res, res <= tol, it)
