"""Steady-state LQG feedback control of continuously monitored Gaussian systems.

Specialized to a two-mode parametric oscillator: measurement unravellings,
conditional Riccati steady states, Markovian feedback schemes, and the
resulting entanglement (log-negativity) and purity (entropy) of the
stationary state. All logarithmic quantities are in bits (base 2).
"""

from .errors import (EntlqgError, InvalidUnravellingError, NoStableSolutionError,
                     NotPositiveSemidefiniteError, NumericalError,
                     OptimalityViolationError, RecoveryError, StabilityError,
                     TrajectoryDivergenceError, UnphysicalStateError)
from .gaussian import (CovarianceMatrix, SymplecticSpectrum, TwoModeBlocks,
                       determinant_symplectic_eigenvalues, epr_variance, is_physical,
                       log_negativity, partial_transpose, symplectic_eigenvalues,
                       symplectic_form, two_mode_blocks, von_neumann_entropy)
from .dynamics import (DriftDiffusion, PlantModel, diffusion_matrix, drift_diffusion,
                       drift_matrix, integrate_moments, is_hurwitz, lyapunov_steady)
from .unravelling import (HETERODYNE, HOMODYNE_Q, LmiReport, MeasurementModel,
                          Unravelling, cbar, lmi_feasible, measurement_model,
                          psd_sqrt, recover_unravelling, riccati_rhs, riccati_steady,
                          s_matrix, u_matrix)
from .feedback import (ClosedLoop, FeedbackGain, closed_loop, heterodyne_gain,
                       heterodyne_stable, homodyne_gain, homodyne_stable,
                       optimal_gain)
from .nopo import (CHI_MAX, CURVE_SCHEMES, NonlocalOptimumReport, NopoParams,
                   SchemeId, SchemeResult, build_plant, closed_loop_for_scheme,
                   cost_matrix, heterodyne_closed_form_V, heterodyne_optimal_mu,
                   homodyne_closed_form_V, open_loop_V, optimal_nonlocal,
                   optimal_nonlocal_alpha_beta, optimize_scheme, scheme_curves,
                   scheme_realization, symmetric_family_W, verify_nonlocal_optimum)
from .trajectories import (SimConfig, TrajectoryStats, regulation_cost,
                           regulation_cost_sem, simulate_conditional)

__version__ = "0.1.0"

__all__ = [
    "CHI_MAX", "CURVE_SCHEMES", "ClosedLoop", "CovarianceMatrix", "DriftDiffusion",
    "EntlqgError", "FeedbackGain", "HETERODYNE", "HOMODYNE_Q",
    "InvalidUnravellingError", "LmiReport", "MeasurementModel",
    "NoStableSolutionError", "NonlocalOptimumReport", "NopoParams",
    "NotPositiveSemidefiniteError", "NumericalError", "OptimalityViolationError",
    "PlantModel", "RecoveryError", "SchemeId", "SchemeResult", "SimConfig",
    "StabilityError", "SymplecticSpectrum", "TrajectoryDivergenceError",
    "TrajectoryStats", "TwoModeBlocks", "Unravelling", "UnphysicalStateError",
    "build_plant", "cbar", "closed_loop", "closed_loop_for_scheme", "cost_matrix",
    "determinant_symplectic_eigenvalues", "diffusion_matrix", "drift_diffusion",
    "drift_matrix", "epr_variance", "heterodyne_closed_form_V", "heterodyne_gain",
    "heterodyne_optimal_mu", "heterodyne_stable", "homodyne_closed_form_V",
    "homodyne_gain", "homodyne_stable", "integrate_moments", "is_hurwitz",
    "is_physical", "lmi_feasible", "log_negativity", "lyapunov_steady",
    "measurement_model", "open_loop_V", "optimal_gain", "optimal_nonlocal",
    "optimal_nonlocal_alpha_beta", "optimize_scheme", "partial_transpose",
    "psd_sqrt", "recover_unravelling", "regulation_cost", "regulation_cost_sem",
    "riccati_rhs", "riccati_steady", "s_matrix", "scheme_curves",
    "scheme_realization", "simulate_conditional", "symmetric_family_W",
    "symplectic_eigenvalues", "symplectic_form", "two_mode_blocks", "u_matrix",
    "verify_nonlocal_optimum", "von_neumann_entropy",
]
