"""Steady-state probe spectra of a spinning optomechanical ring resonator
coupled to a two-level emitter.

Public surface: parameter handling (params), rotation-induced mode
splitting (sagnac), the pump-driven fixed point (steady_state), the
linearized sideband response (fluctuations), observables and sweeps
(spectra), the time-domain verification path (oracle), and the command
line (cli).
"""

from .constants import C_VACUUM, HBAR
from .errors import (ConvergenceError, OmitRingError, ShapeError,
                     SingularSystemError, SolverError, StepInstabilityError,
                     UnsettledTrajectoryError, ValidationError)
from .params import (DerivedRates, JMode, PhysicalParams, derive_rates,
                     drive_amplitude, format_params, parse_params_text)
from .sagnac import SagnacShift, SagnacSplit, effective_detunings, sagnac_shift
from .spectra import (DeltaPConvention, OmitMetrics, SpectrumPoint, SweepGrid,
                      delay_scan, delay_spectrum, ef_scan, enhancement_factor,
                      group_delay, isolation, omit_metrics, point_response,
                      sweep_spectrum, transmission_reflection)
from .steady_state import (FixedPointOptions, SteadyState, solve_fixed_point,
                           solve_no_qubit_cubic)

__version__ = "1.0.0"

__all__ = [
    "C_VACUUM", "HBAR",
    "OmitRingError", "ValidationError", "SolverError", "SingularSystemError",
    "ConvergenceError", "StepInstabilityError", "ShapeError",
    "UnsettledTrajectoryError",
    "PhysicalParams", "DerivedRates", "JMode", "derive_rates",
    "drive_amplitude", "parse_params_text", "format_params",
    "SagnacSplit", "SagnacShift", "sagnac_shift", "effective_detunings",
    "SteadyState", "FixedPointOptions", "solve_fixed_point",
    "solve_no_qubit_cubic",
    "DeltaPConvention", "SpectrumPoint", "SweepGrid", "OmitMetrics",
    "sweep_spectrum", "point_response", "isolation", "enhancement_factor",
    "group_delay", "delay_spectrum", "ef_scan", "delay_scan", "omit_metrics",
    "transmission_reflection",
    "__version__",
]
