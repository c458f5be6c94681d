"""Explicit finite-difference phase-field solvers for Stefan-type
moving-boundary problems, with diagnostics and a small run driver."""

from .analysis import (
    SqrtFit,
    TimeSeriesRecord,
    caginalp_stefan_mapping,
    fit_sqrt_growth,
    interface_position_1d,
    interface_width,
    mean_radius,
    neumann_beta,
    phase_volume,
    radial_asymmetry,
    total_enthalpy,
)
from .config import RunConfig, SeedSpec, load_config, parse_config
from .driver import read_snapshot, read_timeseries_csv, run_simulation, write_snapshot, write_timeseries_csv
from .errors import (
    ConfigurationError,
    InterfaceDetectionError,
    NonConvergence,
    SimulationAborted,
    StabilityError,
    UsageError,
)
from .grid import BoundaryCondition, Field, GridSpec, apply_boundary, new_field, seed_disk, seed_front_1d
from .models import (
    AllenCahnParams,
    CaginalpParams,
    DissolutionParams,
    KarmaRappelParams,
    MovingFrameParams,
    allen_cahn_step,
    caginalp_step,
    dissolution_step,
    karma_rappel_step,
    max_stable_dt,
    moving_frame_relax,
    moving_frame_residual,
)
from .stencils import cfl_max_dt, curvature, euler_step, grad_magnitude, laplacian_5pt, second_derivative

__version__ = "0.1.0"
