"""Run configuration: a line-oriented ``key = value`` format.

Example::

    model = caginalp
    grid.nx = 200
    grid.ny = 1
    grid.dx = 0.2
    params.latent_heat = 1.0
    nsteps = 1000
    seed.kind = front_1d
    seed.x0 = 20
    seed.width = 2

``#`` starts a comment.  Boundary conditions default to zero flux and can
be set for every field (``bc.kind``/``bc.value``), per field
(``bc.u.kind``) or per field and side (``bc.u.left.kind``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

from .analysis import CONVENTIONS, SOLID_MINUS_ONE, UNIT_INTERVAL
from .errors import ConfigurationError
from .grid import BC_KINDS, SIDES, BoundaryCondition, GridSpec
from .models import (
    AllenCahnParams,
    CaginalpParams,
    DissolutionParams,
    KarmaRappelParams,
    MovingFrameParams,
)

MODELS = ("caginalp", "allen_cahn", "karma_rappel_1d", "moving_frame_1d", "dissolution")

# model -> (phase field, second field or None)
FIELDS = {
    "caginalp": ("phi", "u"),
    "allen_cahn": ("phi", None),
    "karma_rappel_1d": ("phi", "u"),
    "moving_frame_1d": ("phi", "u"),
    "dissolution": ("phi", "c"),
}

# model -> {param: default}; None marks a required key
PARAMS = {
    "caginalp": {"latent_heat": None},
    "allen_cahn": {"mobility": 1.0, "beta": None, "g_const": 1.0},
    "karma_rappel_1d": {"tau": 1.0, "width": 1.0, "lam": 1.0, "diffusivity": 1.0},
    "moving_frame_1d": {"tau": 1.0, "width": 1.0, "lam": 1.0, "diffusivity": 1.0,
                        "velocity": None, "u_far": None},
    "dissolution": {"peclet": 1.0, "lam": 1.0, "alpha": 0.0, "damkohler": 1.0, "eps_grad": 1e-8},
}

SEED_KINDS = ("disk", "front_1d")


def phase_range(model: str) -> tuple[float, float]:
    return (0.0, 1.0) if model == "allen_cahn" else (-1.0, 1.0)


@dataclass(frozen=True)
class SeedSpec:
    """Initial data.  ``lo``/``hi`` are the phase values inside/outside a
    disk or left/right of a front; ``aux_lo``/``aux_hi`` the same for the
    second field (u or c)."""

    kind: str
    radius: float = 0.0
    cx: Optional[float] = None
    cy: Optional[float] = None
    x0: float = 0.0
    width: float = 0.0
    lo: float = -1.0
    hi: float = 1.0
    aux_lo: float = 0.0
    aux_hi: float = 0.0


@dataclass
class RunConfig:
    model: str
    grid: GridSpec
    params: object
    nsteps: int
    seed: Optional[SeedSpec]
    bc: dict = field(default_factory=dict)  # field name -> Boundary
    dt: Union[float, str] = "auto"
    output_every: int = 0
    outdir: str = "out"
    snapshots: bool = True
    convention: str = SOLID_MINUS_ONE
    tol: float = 1e-6

    def __post_init__(self):
        if self.output_every == 0:
            self.output_every = self.nsteps


def _parse_lines(text: str) -> dict[str, tuple[str, int]]:
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key or not value:
            raise ConfigurationError(f"line {lineno}: empty key or value", line=lineno)
        if key in entries:
            raise ConfigurationError(f"line {lineno}: duplicate key {key!r}", key=key, line=lineno)
        entries[key] = (value, lineno)
    return entries


class _Reader:
    """Typed access to parsed entries; remembers which keys were consumed."""

    def __init__(self, entries):
        self.entries = entries
        self.used: set[str] = set()

    def has(self, key):
        return key in self.entries

    def raw(self, key, default=None, required=False):
        if key not in self.entries:
            if required:
                raise ConfigurationError(f"missing required key {key!r}", key=key)
            return default
        self.used.add(key)
        return self.entries[key][0]

    def _convert(self, key, conv, what, **kw):
        value = self.raw(key, **kw)
        if value is None or not isinstance(value, str):
            return value
        try:
            out = conv(value)
        except ValueError:
            line = self.entries[key][1]
            raise ConfigurationError(f"line {line}: {key} must be {what}, got {value!r}", key=key, line=line) from None
        if isinstance(out, float) and not math.isfinite(out):
            raise ConfigurationError(f"{key} must be finite", key=key)
        return out

    def float(self, key, default=None, required=False):
        return self._convert(key, float, "a number", default=default, required=required)

    def int(self, key, default=None, required=False):
        return self._convert(key, int, "an integer", default=default, required=required)

    def choice(self, key, options, default=None, required=False):
        value = self.raw(key, default=default, required=required)
        if value is not None and value not in options:
            raise ConfigurationError(f"{key} must be one of {options}, got {value!r}", key=key)
        return value

    def bool(self, key, default=None):
        value = self.choice(key, ("true", "false", True, False), default=default)
        return value in ("true", True)


def _with_key(exc: ConfigurationError, key: str, r: Optional[_Reader] = None) -> ConfigurationError:
    line = exc.line
    if line is None and r is not None and key in r.entries:
        line = r.entries[key][1]
    return ConfigurationError(str(exc), key=key, line=line)


def _read_grid(r: _Reader) -> GridSpec:
    nx = r.int("grid.nx", required=True)
    ny = r.int("grid.ny", default=1)
    dx = r.float("grid.dx", required=True)
    dy = r.float("grid.dy", default=dx)
    return GridSpec(nx, ny, dx, dy)


def _read_bc(r: _Reader, fields: tuple[str, ...]) -> dict:
    base = BoundaryCondition(r.choice("bc.kind", BC_KINDS, default="zero_flux"), r.float("bc.value", default=0.0))
    out = {}
    for name in fields:
        fbase = BoundaryCondition(
            r.choice(f"bc.{name}.kind", BC_KINDS, default=base.kind),
            r.float(f"bc.{name}.value", default=base.value))
        sides = {}
        for side in SIDES:
            kind = r.choice(f"bc.{name}.{side}.kind", BC_KINDS, default=fbase.kind)
            value = r.float(f"bc.{name}.{side}.value", default=fbase.value)
            sides[side] = BoundaryCondition(kind, value)
        for a, b in (("left", "right"), ("bottom", "top")):
            if (sides[a].kind == "periodic") != (sides[b].kind == "periodic"):
                raise ConfigurationError(f"bc.{name}: periodic {a} requires periodic {b}", key=f"bc.{name}.{a}.kind")
        out[name] = sides
    return out


def _read_params(r: _Reader, model: str):
    values = {}
    for name, default in PARAMS[model].items():
        values[name] = r.float(f"params.{name}", default=default, required=default is None)
    try:
        if model == "caginalp":
            return CaginalpParams(**values)
        if model == "allen_cahn":
            return AllenCahnParams(**values)
        if model == "karma_rappel_1d":
            return KarmaRappelParams(**values)
        if model == "moving_frame_1d":
            v, uf = values.pop("velocity"), values.pop("u_far")
            return MovingFrameParams(KarmaRappelParams(**values), v, uf)
        return DissolutionParams(**values)
    except ConfigurationError as exc:
        raise _with_key(exc, exc.key or "params", r) from None


def _read_seed(r: _Reader, model: str, grid: GridSpec) -> Optional[SeedSpec]:
    required = model != "moving_frame_1d"
    kind = r.choice("seed.kind", SEED_KINDS, required=required)
    if kind is None:
        return None
    lo_default, hi_default = phase_range(model)
    aux = FIELDS[model][1] or "aux"
    if kind == "disk":
        names = ("inside", "outside")
        geo = dict(radius=r.float("seed.radius", required=True),
                   cx=r.float("seed.cx", default=0.5 * grid.lx),
                   cy=r.float("seed.cy", default=0.5 * grid.ly))
        if not geo["radius"] > 0:
            raise ConfigurationError("seed.radius must be positive", key="seed.radius")
    else:
        names = ("left", "right")
        geo = dict(x0=r.float("seed.x0", required=True))
    width = r.float("seed.width", default=0.0)
    if width < 0:
        raise ConfigurationError("seed.width must be >= 0", key="seed.width")
    return SeedSpec(
        kind=kind, width=width, **geo,
        lo=r.float(f"seed.{names[0]}", default=lo_default),
        hi=r.float(f"seed.{names[1]}", default=hi_default),
        aux_lo=r.float(f"seed.{aux}_{names[0]}", default=0.0),
        aux_hi=r.float(f"seed.{aux}_{names[1]}", default=0.0),
    )


def parse_config(text: str) -> RunConfig:
    """Parse and validate a run configuration.

    Raises :class:`ConfigurationError` carrying ``line`` for syntax errors
    and ``key`` for validation errors (unknown, missing or invalid keys).
    """
    r = _Reader(_parse_lines(text))
    model = r.choice("model", MODELS, required=True)
    try:
        grid = _read_grid(r)
    except ConfigurationError as exc:
        raise _with_key(exc, exc.key or "grid", r) from None
    if model in ("karma_rappel_1d", "moving_frame_1d") and not grid.is_1d:
        raise ConfigurationError(f"model {model} needs grid.ny = 1", key="grid.ny")
    if model == "dissolution" and grid.is_1d:
        raise ConfigurationError("model dissolution needs a 2D grid (grid.ny >= 3)", key="grid.ny")
    fields = tuple(f for f in FIELDS[model] if f)
    params = _read_params(r, model)
    bc = _read_bc(r, fields)
    seed = _read_seed(r, model, grid)

    dt_raw = r.raw("dt", default="auto")
    if dt_raw == "auto":
        dt: Union[float, str] = "auto"
    else:
        dt = r.float("dt")
        if not dt > 0:
            raise ConfigurationError("dt must be positive or 'auto'", key="dt")
    nsteps = r.int("nsteps", required=True)
    if nsteps < 1:
        raise ConfigurationError("nsteps must be >= 1", key="nsteps")
    output_every = r.int("output_every", default=nsteps)
    if not 1 <= output_every <= nsteps:
        raise ConfigurationError("output_every must be in [1, nsteps]", key="output_every")
    default_conv = UNIT_INTERVAL if model == "allen_cahn" else SOLID_MINUS_ONE
    convention = r.choice("volume.convention", CONVENTIONS, default=default_conv)
    tol = r.float("relax.tol", default=1e-6) if model == "moving_frame_1d" else 1e-6
    if not tol > 0:
        raise ConfigurationError("relax.tol must be positive", key="relax.tol")
    cfg = RunConfig(
        model=model, grid=grid, params=params, nsteps=nsteps, seed=seed, bc=bc, dt=dt,
        output_every=output_every, outdir=r.raw("outdir", default="out"),
        snapshots=r.bool("output.snapshots", default="true"), convention=convention, tol=tol,
    )
    unknown = sorted(set(r.entries) - r.used)
    if unknown:
        key = unknown[0]
        raise ConfigurationError(f"line {r.entries[key][1]}: unknown key {key!r} for model {model}", key=key,
                                 line=r.entries[key][1])
    return cfg


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
