"""Open-system dynamics and quantum Fisher information of a two-level
Unruh-DeWitt detector on relativistic worldlines."""

from .errors import (BranchAmbiguity, ConfigInvalid, DerivativeUnstable,
                     DetectorError, FormulaDomainError, NonConvergence,
                     NonPhysicalDensity, StepTooLarge, UnknownFigure,
                     WindowTooSmall)
from .trajectory import Kind, Trajectory, wightman, wightman_nonrel_expansion
from .rates import (DetectorParams, QuadratureSpec, RateCoefficients,
                    drift_coefficient, rates_for, rates_inertial,
                    rates_nonrel, rates_numeric, rates_ultrarel,
                    xcoth_minus_two)
from .dynamics import (BlochState, InitialState, bloch_vector,
                       evolve_closed_form, evolve_ode, integrate_bloch,
                       propagate)
from .qfi import (EstimationParameter, QfiResult, bloch_dbeta, compute_qfi,
                  decay_factor, decay_factor_dbeta, density_matrix,
                  qfi_beta, qfi_bloch, qfi_phi_closed, qfi_sld,
                  qfi_theta_closed, qfi_ultrarel)
from .sweep import (FIGURES, Axis, SweepConfig, SweepRecord, figure_config,
                    format_table, run_figure, run_grid, write_table)
from .verify import SUITES, CheckResult, run_check, run_suites

__version__ = "0.1.0"

__all__ = [
    "BranchAmbiguity", "ConfigInvalid", "DerivativeUnstable", "DetectorError",
    "FormulaDomainError", "NonConvergence", "NonPhysicalDensity", "StepTooLarge",
    "UnknownFigure", "WindowTooSmall",
    "Kind", "Trajectory", "wightman", "wightman_nonrel_expansion",
    "DetectorParams", "QuadratureSpec", "RateCoefficients", "drift_coefficient",
    "rates_for", "rates_inertial", "rates_nonrel", "rates_numeric",
    "rates_ultrarel", "xcoth_minus_two",
    "BlochState", "InitialState", "bloch_vector", "evolve_closed_form",
    "evolve_ode", "integrate_bloch", "propagate",
    "EstimationParameter", "QfiResult", "bloch_dbeta", "compute_qfi",
    "decay_factor", "decay_factor_dbeta", "density_matrix", "qfi_beta",
    "qfi_bloch", "qfi_phi_closed", "qfi_sld", "qfi_theta_closed", "qfi_ultrarel",
    "FIGURES", "Axis", "SweepConfig", "SweepRecord", "figure_config",
    "format_table", "run_figure", "run_grid", "write_table",
    "SUITES", "CheckResult", "run_check", "run_suites",
]
