"""Run driver and on-disk outputs (time-series and snapshot CSV files)."""

from __future__ import annotations

import csv
import math
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .analysis import (
    TimeSeriesRecord,
    interface_position_1d,
    interface_width,
    level_crossings,
    mean_radius,
    phase_volume,
    profile_width,
    radial_width,
    total_enthalpy,
)
from .config import FIELDS, RunConfig, phase_range
from .errors import InterfaceDetectionError, NonConvergence, SimulationAborted, StabilityError, UsageError
from .grid import Field, apply_boundary, new_field, seed_disk, seed_front_1d
from .models import (
    allen_cahn_step,
    caginalp_step,
    dissolution_step,
    karma_rappel_step,
    max_stable_dt,
    moving_frame_initial,
    moving_frame_relax,
    pseudo_dt,
)

TIMESERIES_COLUMNS = ("step", "time", "volume", "interface_pos", "interface_width", "enthalpy")
TIMESERIES_NAME = "timeseries.csv"


def _fmt(value) -> str:
    if value is None:
        return ""
    return format(float(value), ".12g")


# -- writers and readers ----------------------------------------------------

def write_timeseries_csv(records: Sequence[TimeSeriesRecord], path) -> None:
    if not records:
        raise UsageError("write_timeseries_csv needs at least one record")
    lines = [",".join(TIMESERIES_COLUMNS)]
    for r in records:
        lines.append(",".join([str(int(r.step))] + [_fmt(getattr(r, c)) for c in TIMESERIES_COLUMNS[1:]]))
    _write_text(path, "\n".join(lines) + "\n")


def read_timeseries_csv(path) -> list[TimeSeriesRecord]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != TIMESERIES_COLUMNS:
            raise UsageError(f"{path}: unexpected header {reader.fieldnames}")
        for row in reader:
            vals = {c: (float(row[c]) if row[c] != "" else None) for c in TIMESERIES_COLUMNS[1:]}
            out.append(TimeSeriesRecord(step=int(row["step"]), **vals))
    return out


def snapshot_path(outdir, name: str, step: int) -> Path:
    return Path(outdir) / f"{name}_{int(step):06d}.csv"


def write_snapshot(field: Field, name: str, step: int, outdir) -> Path:
    """Write the interior cells as ``x,y,value`` rows, y outer and x inner."""
    spec = field.spec
    x, y = spec.x_centers(), spec.y_centers()
    vals = field.interior
    lines = ["x,y,value"]
    for j in range(spec.ny):
        yj = _fmt(y[j])
        lines.extend(f"{_fmt(x[i])},{yj},{_fmt(vals[i, j])}" for i in range(spec.nx))
    path = snapshot_path(outdir, name, step)
    _write_text(path, "\n".join(lines) + "\n")
    return path


def read_snapshot(path) -> np.ndarray:
    """Rows of a snapshot file as an ``(n, 3)`` array of ``x, y, value``."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "x,y,value":
            raise UsageError(f"{path}: unexpected header {header!r}")
        return np.loadtxt(fh, delimiter=",", ndmin=2)


def _write_text(path, text: str) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


# -- seeding ------------------------------------------------------------------

def _seed(cfg: RunConfig, lo: float, hi: float) -> Field:
    s = cfg.seed
    f = new_field(cfg.grid)
    if s.kind == "disk":
        return seed_disk(f, s.cx, s.cy, s.radius, lo, hi, s.width)
    return seed_front_1d(f, s.x0, lo, hi, s.width)


def initial_fields(cfg: RunConfig) -> tuple[Field, Optional[Field]]:
    """Seeded phase field and second field (None for single-field models)."""
    phi = _seed(cfg, cfg.seed.lo, cfg.seed.hi)
    aux = None
    if FIELDS[cfg.model][1] is not None:
        aux = _seed(cfg, cfg.seed.aux_lo, cfg.seed.aux_hi)
    return phi, aux


def resolve_dt(cfg: RunConfig) -> float:
    bound = max_stable_dt(cfg.params, cfg.grid)
    if cfg.dt == "auto":
        return 0.5 * bound
    if cfg.dt > bound:
        raise StabilityError(cfg.dt, bound, cfg.model)
    return float(cfg.dt)


# -- diagnostics --------------------------------------------------------------

def _safe(fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except InterfaceDetectionError:
        return None


def _record(cfg: RunConfig, step: int, time: float, phi: Field, aux: Optional[Field]) -> TimeSeriesRecord:
    spec = cfg.grid
    lo, hi = phase_range(cfg.model)
    level = 0.5 * (lo + hi)
    pos = width = None
    if spec.is_1d:
        pos = _safe(interface_position_1d, phi, level)
        width = _safe(interface_width, phi)
    elif cfg.seed is not None and cfg.seed.kind == "disk":
        pos = _safe(mean_radius, phi, level, cfg.seed.cx, cfg.seed.cy)
        width = _safe(radial_width, phi, cfg.seed.cx, cfg.seed.cy)
    else:
        # planar front on a 2D grid: use the middle row
        row = phi.interior[:, spec.ny // 2]
        xs = spec.x_centers()
        hits = level_crossings(row, xs, level)
        pos = float(hits[0]) if len(hits) == 1 else None
        width = _safe(profile_width, row, xs)
    enthalpy = None
    if cfg.model == "caginalp":
        enthalpy = total_enthalpy(aux, phi, cfg.params.latent_heat)
    return TimeSeriesRecord(step, time, phase_volume(phi, cfg.convention), pos, width, enthalpy)


# -- driver -------------------------------------------------------------------

def _stepper(cfg: RunConfig, dt: float):
    p, bc = cfg.params, cfg.bc
    if cfg.model == "caginalp":
        return lambda phi, u: caginalp_step(u, phi, p, dt, bc["phi"], bc["u"])[::-1]
    if cfg.model == "allen_cahn":
        return lambda phi, _: (allen_cahn_step(phi, p, dt, bc["phi"]), None)
    if cfg.model == "karma_rappel_1d":
        return lambda phi, u: karma_rappel_step(phi, u, p, dt, bc["phi"], bc["u"])
    if cfg.model == "dissolution":
        return lambda phi, c: dissolution_step(phi, c, p, dt, bc["phi"], bc["c"])
    raise UsageError(f"model {cfg.model} has no time stepper")


def _emit(cfg: RunConfig, step: int, phi: Field, aux: Optional[Field], write: bool) -> None:
    if not (write and cfg.snapshots):
        return
    write_snapshot(phi, "phi", step, cfg.outdir)
    if aux is not None:
        write_snapshot(aux, FIELDS[cfg.model][1], step, cfg.outdir)


def _due(step: int, cfg: RunConfig) -> bool:
    return step % cfg.output_every == 0 or step == cfg.nsteps


def run_simulation(cfg: RunConfig, write: bool = True) -> list[TimeSeriesRecord]:
    """Seed, step ``cfg.nsteps`` times and record diagnostics.

    Records are taken at step 0, every ``output_every`` steps and at the
    last step.  With ``write`` the time series and field snapshots go to
    ``cfg.outdir``.  An explicit ``dt`` above the stability bound raises
    :class:`StabilityError` before any step; non-finite values raise
    :class:`SimulationAborted` naming the step that produced them.
    """
    if cfg.model == "moving_frame_1d":
        return _run_moving_frame(cfg, write)
    dt = resolve_dt(cfg)
    phi, aux = initial_fields(cfg)
    bc = cfg.bc
    phi = apply_boundary(phi, bc["phi"])
    if aux is not None:
        aux = apply_boundary(aux, bc[FIELDS[cfg.model][1]])
    step_fn = _stepper(cfg, dt)
    records = [_record(cfg, 0, 0.0, phi, aux)]
    _emit(cfg, 0, phi, aux, write)
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, cfg.nsteps + 1):
            phi, aux = step_fn(phi, aux)
            if not (phi.is_finite() and (aux is None or aux.is_finite())):
                raise SimulationAborted(n)
            if _due(n, cfg):
                records.append(_record(cfg, n, n * dt, phi, aux))
                _emit(cfg, n, phi, aux, write)
    if write:
        write_timeseries_csv(records, Path(cfg.outdir) / TIMESERIES_NAME)
    return records


def _run_moving_frame(cfg: RunConfig, write: bool) -> list[TimeSeriesRecord]:
    # iterations play the role of steps; time is pseudo-time
    p, spec = cfg.params, cfg.grid
    if cfg.seed is not None:
        phi, u = initial_fields(cfg)
    else:
        phi, u = moving_frame_initial(p, spec)
    dt = pseudo_dt(p, spec) if cfg.dt == "auto" else resolve_dt(cfg)
    records = [_record(cfg, 0, 0.0, phi, u)]
    _emit(cfg, 0, phi, u, write)
    done = 0
    res = None
    while done < cfg.nsteps:
        chunk = min(cfg.output_every, cfg.nsteps - done)
        res = moving_frame_relax(p, spec, cfg.tol, chunk, phi0=phi, u0=u, dt_pseudo=dt)
        phi, u = res.phi, res.u
        if not math.isfinite(res.residual):
            raise SimulationAborted(done + res.iterations)
        done += res.iterations
        records.append(_record(cfg, done, done * dt, phi, u))
        _emit(cfg, done, phi, u, write)
        if res.converged:
            break
    if write:
        write_timeseries_csv(records, Path(cfg.outdir) / TIMESERIES_NAME)
    if not res.converged:
        raise NonConvergence(res.residual, done)
    return records


def scan_velocity(cfg: RunConfig, velocities: Sequence[float]):
    """Relax the co-moving system at each velocity; yields ``(V, RelaxResult)``."""
    if cfg.model != "moving_frame_1d":
        raise UsageError("scan-velocity needs a moving_frame_1d config")
    for v in velocities:
        p = replace(cfg.params, velocity=float(v))
        yield float(v), moving_frame_relax(p, cfg.grid, cfg.tol, cfg.nsteps)

