"""Pseudospectral ground states of the fractional Choquard equation.

    (-Delta)^s u + mu u = (I_alpha * F(u)) f(u)   on a periodic box in R^N.

The oracle and testing modules hold slow reference code and test-field
generators; import them explicitly.
"""

from . import errors
from .functionals import EnergyReport, Workspace, dilate, energy, energy_report, gradient, pohozaev
from .grid import Field, GridSpec, make_grid
from .ground_state import (
    SolveOptions,
    SolveResult,
    center,
    dilation_path,
    find_seed,
    fixed_point_resolvent,
    minimize_pohozaev,
    mountain_pass_upper_bound,
    project_pohozaev,
)
from .io import load_snapshot, save_snapshot
from .nonlinearity import DoublePower, PurePower, Saturable, check_growth, default_model, parse_model
from .spectral import FracParams, bessel_resolvent, frac_laplacian, gagliardo_seminorm_sq, riesz_potential
from .verify import decay_fit, pohozaev_residual, qualitative_report, verification_report

__version__ = "0.1.0"

__all__ = [
    "errors",
    "GridSpec",
    "Field",
    "make_grid",
    "FracParams",
    "frac_laplacian",
    "gagliardo_seminorm_sq",
    "riesz_potential",
    "bessel_resolvent",
    "PurePower",
    "DoublePower",
    "Saturable",
    "check_growth",
    "parse_model",
    "default_model",
    "Workspace",
    "EnergyReport",
    "energy",
    "pohozaev",
    "gradient",
    "energy_report",
    "dilate",
    "SolveOptions",
    "SolveResult",
    "find_seed",
    "project_pohozaev",
    "minimize_pohozaev",
    "fixed_point_resolvent",
    "mountain_pass_upper_bound",
    "dilation_path",
    "center",
    "pohozaev_residual",
    "qualitative_report",
    "decay_fit",
    "verification_report",
    "save_snapshot",
    "load_snapshot",
]
