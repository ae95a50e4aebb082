"""Fractional Dirichlet minimizers on 1D/2D domains and numerical checks of their shape derivatives."""

__version__ = "0.1.0"

from .constants import (FracParams, a_const, b_const, ball_torsion_lambda, ball_torsion_psi,
                        ell_s, gamma, kappa_exact, torsion_l1_norm_interval)
from .geometry import (Ball, BallMinusBall, BoundaryQuad, Deformation, Dilation, Domain,
                       Interval, NormalField, Translation)
from .kappa import CUTOFFS, Cutoff, KappaResult, kappa_numeric
from .operator import (Grid, GridField, OperatorMatrix, apply_truncated, assemble, interaction,
                       pullback_deriv0, pullback_value, seminorm_sq)
from .report import Check, Report
from .shape import (DerivReport, FDResult, annulus_domain, annulus_sweep, ball_stationarity,
                    boundary_derivative, closed_form_derivative, fd_one_sided, hadamard_report)
from .solver import (ConvergenceError, MinimizerResult, el_residual, solve, solve_eigen,
                     solve_general_p, solve_torsion)
from .trace import TraceResult, extract_psi

__all__ = [
    "FracParams", "a_const", "b_const", "ball_torsion_lambda", "ball_torsion_psi", "ell_s",
    "gamma", "kappa_exact", "torsion_l1_norm_interval",
    "Ball", "BallMinusBall", "BoundaryQuad", "Deformation", "Dilation", "Domain", "Interval",
    "NormalField", "Translation",
    "CUTOFFS", "Cutoff", "KappaResult", "kappa_numeric",
    "Grid", "GridField", "OperatorMatrix", "apply_truncated", "assemble", "interaction",
    "pullback_deriv0", "pullback_value", "seminorm_sq",
    "Check", "Report",
    "DerivReport", "FDResult", "annulus_domain", "annulus_sweep", "ball_stationarity",
    "boundary_derivative", "closed_form_derivative", "fd_one_sided", "hadamard_report",
    "ConvergenceError", "MinimizerResult", "el_residual", "solve", "solve_eigen",
    "solve_general_p", "solve_torsion",
    "TraceResult", "extract_psi",
]
