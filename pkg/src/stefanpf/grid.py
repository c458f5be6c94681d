"""Grid geometry, ghost-layered fields, boundary conditions and initial data.

Fields are cell-centred: interior cell ``(i, j)`` (1-based, ghosts at 0 and
n+1) sits at ``((i - 1/2) dx, (j - 1/2) dy)``.  Arrays are indexed
``values[i, j]`` with ``i`` along x.  A grid with ``ny == 1`` is 1D and its
y ghosts only mirror the interior row.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from .errors import ConfigurationError, UsageError

ZERO_FLUX = "zero_flux"
PERIODIC = "periodic"
DIRICHLET = "dirichlet"
BC_KINDS = (ZERO_FLUX, PERIODIC, DIRICHLET)
SIDES = ("left", "right", "bottom", "top")


@dataclass(frozen=True)
class GridSpec:
    nx: int
    ny: int = 1
    dx: float = 1.0
    dy: float = 1.0

    def __post_init__(self):
        if int(self.nx) != self.nx or self.nx < 3:
            raise ConfigurationError(f"nx must be an integer >= 3, got {self.nx}", key="grid.nx")
        if int(self.ny) != self.ny or not (self.ny == 1 or self.ny >= 3):
            raise ConfigurationError(f"ny must be 1 or an integer >= 3, got {self.ny}", key="grid.ny")
        if not (self.dx > 0 and np.isfinite(self.dx)):
            raise ConfigurationError(f"dx must be positive, got {self.dx}", key="grid.dx")
        if not (self.dy > 0 and np.isfinite(self.dy)):
            raise ConfigurationError(f"dy must be positive, got {self.dy}", key="grid.dy")

    @property
    def is_1d(self) -> bool:
        return self.ny == 1

    @property
    def ndim(self) -> int:
        return 1 if self.is_1d else 2

    @property
    def shape(self) -> tuple[int, int]:
        """Array shape including the ghost layer."""
        return (self.nx + 2, self.ny + 2)

    @property
    def cell_area(self) -> float:
        # a 1D grid still carries unit-height cells of size dy
        return self.dx * self.dy

    @property
    def lx(self) -> float:
        return self.nx * self.dx

    @property
    def ly(self) -> float:
        return self.ny * self.dy

    def x_centers(self) -> np.ndarray:
        return (np.arange(1, self.nx + 1) - 0.5) * self.dx

    def y_centers(self) -> np.ndarray:
        return (np.arange(1, self.ny + 1) - 0.5) * self.dy

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Interior cell-centre coordinates as two (nx, ny) arrays."""
        return np.meshgrid(self.x_centers(), self.y_centers(), indexing="ij")


@dataclass
class Field:
    """A scalar unknown on a grid, stored with a one-cell ghost layer."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.spec.shape:
            raise UsageError(f"values shape {self.values.shape} does not match grid {self.spec.shape}")

    @property
    def interior(self) -> np.ndarray:
        """View of the interior cells, shape (nx, ny)."""
        return self.values[1:-1, 1:-1]

    def copy(self) -> "Field":
        return Field(self.spec, self.values.copy())

    def with_interior(self, interior: np.ndarray) -> "Field":
        """New field with the given interior and a zeroed ghost layer."""
        out = np.zeros(self.spec.shape)
        out[1:-1, 1:-1] = interior
        return Field(self.spec, out)

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.interior).all())


@dataclass(frozen=True)
class BoundaryCondition:
    kind: str = ZERO_FLUX
    value: float = 0.0

    def __post_init__(self):
        if self.kind not in BC_KINDS:
            raise ConfigurationError(f"unknown boundary kind {self.kind!r}; expected one of {BC_KINDS}", key="bc.kind")


# Either one condition on every side or a per-side mapping (missing sides are zero-flux).
Boundary = Union[BoundaryCondition, Mapping[str, BoundaryCondition]]


def _per_side(bc: Boundary) -> dict[str, BoundaryCondition]:
    if isinstance(bc, BoundaryCondition):
        return {side: bc for side in SIDES}
    unknown = set(bc) - set(SIDES)
    if unknown:
        raise UsageError(f"unknown boundary side(s): {sorted(unknown)}")
    sides = {side: bc.get(side, BoundaryCondition()) for side in SIDES}
    for a, b in (("left", "right"), ("bottom", "top")):
        if (sides[a].kind == PERIODIC) != (sides[b].kind == PERIODIC):
            raise UsageError(f"periodic boundary on {a!r} requires periodic on {b!r} too")
    return sides


def new_field(spec: GridSpec, fill: float = 0.0) -> Field:
    if not isinstance(spec, GridSpec):
        raise ConfigurationError("new_field needs a GridSpec")
    return Field(spec, np.full(spec.shape, float(fill)))


def _fill_ghost(v: np.ndarray, axis: int, bc_lo: BoundaryCondition, bc_hi: BoundaryCondition) -> None:
    # v is the full array; fills index 0 and -1 along axis from the adjacent interior
    lo = [slice(None)] * 2
    hi = [slice(None)] * 2
    lo_in = [slice(None)] * 2
    hi_in = [slice(None)] * 2
    lo[axis], hi[axis], lo_in[axis], hi_in[axis] = 0, -1, 1, -2
    if axis == 0:
        # x ghosts only on interior rows; corners are completed by the y pass
        lo[1] = hi[1] = lo_in[1] = hi_in[1] = slice(1, -1)
    lo, hi, lo_in, hi_in = map(tuple, (lo, hi, lo_in, hi_in))
    if bc_lo.kind == PERIODIC:
        v[lo] = v[hi_in]
        v[hi] = v[lo_in]
        return
    for ghost, inner, bc in ((lo, lo_in, bc_lo), (hi, hi_in, bc_hi)):
        if bc.kind == ZERO_FLUX:
            v[ghost] = v[inner]
        else:
            v[ghost] = 2.0 * bc.value - v[inner]


def apply_boundary(field: Field, bc: Boundary) -> Field:
    """Return a copy of ``field`` whose ghost layer satisfies ``bc``."""
    sides = _per_side(bc)
    v = field.values.copy()
    _fill_ghost(v, 0, sides["left"], sides["right"])
    if field.spec.is_1d:
        v[:, 0] = v[:, 1]
        v[:, -1] = v[:, 1]
    else:
        _fill_ghost(v, 1, sides["bottom"], sides["top"])
    return Field(field.spec, v)


def _blend(dist: np.ndarray, lo_value: float, hi_value: float, width: float) -> np.ndarray:
    # lo_value where dist << 0, hi_value where dist >> 0, midpoint at dist == 0
    mid = 0.5 * (lo_value + hi_value)
    half = 0.5 * (hi_value - lo_value)
    if width > 0:
        return mid + half * np.tanh(dist / width)
    return mid + half * np.sign(dist)


def _offsets(n: int, h: float, c: float) -> np.ndarray:
    # cell-centre minus c, written so a centred c gives exactly antisymmetric offsets
    k = 2.0 * np.arange(1, n + 1) - 1.0 - n
    return k * h / 2.0 + (n * h / 2.0 - c)


def seed_disk(field: Field, cx: float, cy: float, radius: float, inside: float, outside: float,
              smooth_width: float = 0.0) -> Field:
    """Circular inclusion centred at (cx, cy); ghost layer is left zero."""
    if radius <= 0:
        raise UsageError(f"radius must be positive, got {radius}")
    if smooth_width < 0:
        raise UsageError(f"smooth_width must be >= 0, got {smooth_width}")
    spec = field.spec
    if radius > np.hypot(spec.lx, spec.ly):
        warnings.warn(f"disk radius {radius} exceeds the domain diagonal", stacklevel=2)
    ox = _offsets(spec.nx, spec.dx, cx)
    oy = _offsets(spec.ny, spec.dy, cy)
    r = np.hypot(ox[:, None], oy[None, :])
    return field.with_interior(_blend(r - radius, inside, outside, smooth_width))


def seed_front_1d(field: Field, x0: float, left: float, right: float, width: float = 0.0) -> Field:
    """Planar front normal to x: ``left`` for x < x0, ``right`` for x > x0."""
    if width < 0:
        raise UsageError(f"width must be >= 0, got {width}")
    x, _ = field.spec.mesh()
    return field.with_interior(_blend(x - x0, left, right, width))
