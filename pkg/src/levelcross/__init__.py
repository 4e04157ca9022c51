"""Nonadiabatic transition probabilities for two-state level crossings.

Numerical side: half-axis propagation in superadiabatic bases with
symmetry reconstruction of the full evolution.  Analytic side: the
Dykhne-Davis-Pechukas formula and its coherent generalization over
multiple complex transition points, with the closed forms for linear,
perturbatively nonlinear, and essentially nonlinear crossing models.
"""

from .ddp import (DdpBranch, DdpResult, aeh_exact, analytic_probability,
                  ddp_coherent, ddp_single, essential_closed_form,
                  gamma_factor, p_lz, perturbative_deviation,
                  sublinear_probability, superlinear_closed_form,
                  superlinear_small_xi_expansion, xi_parameter)
from .integrator import (IntegratorConfig, ParityClass, PropagationResult,
                         SaFrame, build_sa_frame, integrate_direct,
                         measure_tail_exponent, propagate_half_axis,
                         reconstruct_full, sa_tail_exponent, solve)
from .jets import Jet
from .models import (ModelKind, ModelSpec, TransitionPoint, eval_coupling,
                     eval_detuning, quasienergy, singularities,
                     transition_points)
from .specfun import (QuadratureResult, hyp2f1, integrate_real,
                      integrate_segment, nu_constant)
from .sweep import SweepConfig, SweepRow, compare_report, run_preset, run_sweep

__version__ = "0.1.0"

__all__ = [
    "DdpBranch", "DdpResult", "IntegratorConfig", "Jet", "ModelKind",
    "ModelSpec", "ParityClass", "PropagationResult", "QuadratureResult",
    "SaFrame", "SweepConfig", "SweepRow", "TransitionPoint", "aeh_exact",
    "analytic_probability", "build_sa_frame", "compare_report",
    "ddp_coherent", "ddp_single", "essential_closed_form", "eval_coupling",
    "eval_detuning", "gamma_factor", "hyp2f1", "integrate_direct",
    "integrate_real", "integrate_segment", "measure_tail_exponent",
    "nu_constant", "p_lz", "perturbative_deviation", "propagate_half_axis",
    "quasienergy", "reconstruct_full", "run_preset", "run_sweep",
    "sa_tail_exponent", "singularities", "solve", "sublinear_probability",
    "superlinear_closed_form", "superlinear_small_xi_expansion",
    "transition_points", "xi_parameter",
]
