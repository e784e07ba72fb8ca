"""Four-channel neuroendocrine feedback model with distributed delays.

The package covers the full analysis path for a closed-loop hormone
cascade with receptor-mediated positive feedback: steady-state location,
delay-free stability, critical delays for oscillation onset under two
kernel families, and direct time-domain integration with long-run
classification.  A command line front end writes deterministic CSV
reports and optional SVG figures.
"""

__version__ = "0.1.0"

from .feedbacks import InhibitoryHill, StimulatoryHill, numeric_inverse
from .model import (
    DelayedInputs,
    DerivedConstants,
    FeedbackSet,
    ModelParams,
    calibrate,
    preset,
    preset_names,
    rhs,
)
from .equilibria import (
    Equilibrium,
    EquilibriumSet,
    ExistenceError,
    FeasibilityError,
    drift,
    feasible_domain,
    find_equilibria,
    residual,
)
from .spectral import (
    HopfHypothesisError,
    HopfResult,
    NoCrossingError,
    StabilityReport,
    dirac_critical_delays,
    gamma_critical_theta,
    nondelayed_eigenvalues,
    nondelayed_jacobian,
    omega0_solve,
    q_function,
    q_modulus,
    stability_report,
)
from .kernels import PATHWAYS, KernelSpec, check_composition, composite_delays
from .simulate import InvariantEvent, Scenario, Trajectory, gamma_chain_response, simulate
from .cycles import CycleReport, detect_cycle
from .config import ConfigError, RunConfig, SimSettings, Tolerances, load_config, scenario_preset_names

__all__ = [
    "__version__",
    "InhibitoryHill",
    "StimulatoryHill",
    "numeric_inverse",
    "DelayedInputs",
    "DerivedConstants",
    "FeedbackSet",
    "ModelParams",
    "calibrate",
    "preset",
    "preset_names",
    "rhs",
    "Equilibrium",
    "EquilibriumSet",
    "ExistenceError",
    "FeasibilityError",
    "drift",
    "feasible_domain",
    "find_equilibria",
    "residual",
    "HopfHypothesisError",
    "HopfResult",
    "NoCrossingError",
    "StabilityReport",
    "dirac_critical_delays",
    "gamma_critical_theta",
    "nondelayed_eigenvalues",
    "nondelayed_jacobian",
    "omega0_solve",
    "q_function",
    "q_modulus",
    "stability_report",
    "PATHWAYS",
    "KernelSpec",
    "check_composition",
    "composite_delays",
    "InvariantEvent",
    "Scenario",
    "Trajectory",
    "gamma_chain_response",
    "simulate",
    "CycleReport",
    "detect_cycle",
    "ConfigError",
    "RunConfig",
    "SimSettings",
    "Tolerances",
    "load_config",
    "scenario_preset_names",
]
