"""Exclusion limits on an axion-mediated monopole-dipole coupling from a
single-spin sensor next to a vibrating half-ball source mass.

Layered bottom-up: point-nucleon interaction (``core``), half-ball shape
factor and effective field (``geometry``), synchronized pulse sequences and
photon-counting readout (``sensor``), cosine phase extraction (``fitting``),
nuisance-minimized coupling bounds (``limits``), run configuration
(``config``) and the command line (``cli``).
"""

from .constants import CODATA2014, PhysicalConstants
from .core import (Displacement, alp_mass_to_lambda, effective_field_point,
                   lambda_to_alp_mass, potential_monopole_dipole)
from .geometry import (ConvergenceError, ShapeFactorResult, SourceMass,
                       VerificationReport, compare_closed_form_to_quadrature,
                       effective_field_mass, shape_factor_closed_form,
                       shape_factor_quadrature, transverse_field_monte_carlo)
from .sensor import (NV_AXIS_ANGLE, PulseSequence, ReadoutModel,
                     SimulatedReadout, VibrationProfile, distance_at,
                     phase_cpmg, phase_ramsey_static, phase_spin_echo,
                     population_ground, simulate_readout)
from .fitting import (CosineFitError, FitResult, PhaseMeasurement,
                      difference_phase, fit_cosine, phase_upper_bound,
                      wrap_phase)
from .limits import (DEFAULT_THETA_UNCERTAINTY, ExclusionCurve,
                     ExperimentConfig, NuisanceBox, bound_at_lambda,
                     default_experiment, default_lambda_grid, exclusion_curve,
                     projected_scenario, sensitivity_h)
from .config import (ConfigError, RunConfig, dump_config, load_config,
                     parse_config, projected_defaults)

__version__ = "0.1.0"

__all__ = [
    "CODATA2014", "PhysicalConstants",
    "Displacement", "potential_monopole_dipole", "effective_field_point",
    "lambda_to_alp_mass", "alp_mass_to_lambda",
    "SourceMass", "ShapeFactorResult", "ConvergenceError",
    "shape_factor_closed_form", "shape_factor_quadrature",
    "effective_field_mass", "compare_closed_form_to_quadrature",
    "VerificationReport", "transverse_field_monte_carlo",
    "NV_AXIS_ANGLE", "VibrationProfile", "PulseSequence", "distance_at",
    "phase_spin_echo", "phase_cpmg", "phase_ramsey_static",
    "population_ground", "ReadoutModel", "SimulatedReadout", "simulate_readout",
    "wrap_phase", "FitResult", "PhaseMeasurement", "CosineFitError",
    "fit_cosine", "difference_phase", "phase_upper_bound",
    "NuisanceBox", "ExperimentConfig", "ExclusionCurve", "sensitivity_h",
    "bound_at_lambda", "exclusion_curve", "default_experiment",
    "projected_scenario", "default_lambda_grid", "DEFAULT_THETA_UNCERTAINTY",
    "RunConfig", "ConfigError", "parse_config", "load_config", "dump_config",
    "projected_defaults",
    "__version__",
]
