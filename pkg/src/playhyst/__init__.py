"""Play-type hysteresis functionals with calibration and time stepping."""
from .calibration import (GeneralizedTrapezoid, HysteresisGraph, ScanningData, boundary_error,
                          calibrate_generalized, calibrate_hierarchical, calibrate_linear_play,
                          calibrate_preisach, calibrate_trapezoid, langmuir_pair,
                          partition_range, rational_approx, trapezoid_rows)
from .core import ConstraintInterval, Truncation, generalized_resolvent, linear_play_resolvent
from .curves import (AffineShift, IdentityCurve, LangmuirCurve, PiecewiseLinearCurve,
                     named_curve)
from .errors import *  # noqa: F401,F403
from .kernels import BACKEND
from .model import (CurvePair, Hysteron, Model, ModelState, PeakSequence, PlayPair, Trace,
                    evaluate, init_state, preisach_signature, response, scan, step,
                    sweep_trace)
from .modelio import load_model, save_model
from .ode import OdeProblem, balance_check, convergence_study
from .ode import integrate as integrate_ode
from .pde import PdeProblem, cfl_check, pde_convergence, pde_step
from .pde import integrate as integrate_pde
from .roots import SolverConfig

__version__ = "0.1.0"
