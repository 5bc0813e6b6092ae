"""1D scattering, spectral densities, and bound-state counting.

Solves the time-independent Schrodinger equation on the line (units
hbar = 2m = 1, E = k^2) for short-range potentials, assembles the
2x2 S-matrix and continuous phase curves, computes the relative
spectral density by several independent routes, and checks that the
swing of the transmission phase counts bound states.
"""

from .backend import COMPILED
from .errors import (AccuracyError, AmbiguousClassificationError, DomainError,
                     InvalidParameterError, LevdensError, MatchingError,
                     NearThresholdWarning, ResolutionError, UnwrapError)
from .levinson import (LevinsonReport, classify_b0, count_bound_states_oracle,
                       levinson_verdict, sum_rule_integral)
from .potentials import (Composite, Delta, Gaussian, PoschlTeller, Potential,
                         Sampled, SechWell, SquareWell, closed_form_amplitudes,
                         from_spec, load_spec_file, make_composite, make_delta,
                         make_free, make_gaussian, make_poschl_teller,
                         make_sampled, make_sech_well, make_square_well,
                         moment_integrals)
from .smatrix import (PhaseCurve, SMatrix, assemble, build_phase_curve,
                      default_k_grid, det_winding)
from .solver import (Grid, ScatteringSolution, build_grid, solve_both,
                     solve_direct, solve_wavefunction, solve_zurdo,
                     wronskian_residual)
from .spectral import (SpectralDensity, box_density, density_from_phase,
                       finite_L_identity_residual, reflection_tail_integral)

__version__ = "0.1.0"

__all__ = [
    "COMPILED", "__version__",
    "LevdensError", "InvalidParameterError", "DomainError", "AccuracyError",
    "MatchingError", "UnwrapError", "AmbiguousClassificationError",
    "ResolutionError", "NearThresholdWarning",
    "Potential", "PoschlTeller", "SechWell", "Delta", "SquareWell", "Gaussian",
    "Composite", "Sampled", "make_poschl_teller", "make_sech_well",
    "make_delta", "make_square_well", "make_gaussian", "make_composite",
    "make_free", "make_sampled", "closed_form_amplitudes", "moment_integrals",
    "from_spec", "load_spec_file",
    "Grid", "ScatteringSolution", "build_grid", "solve_direct", "solve_zurdo",
    "solve_both", "solve_wavefunction", "wronskian_residual",
    "SMatrix", "PhaseCurve", "assemble", "build_phase_curve", "det_winding",
    "default_k_grid",
    "SpectralDensity", "box_density", "density_from_phase",
    "finite_L_identity_residual", "reflection_tail_integral",
    "LevinsonReport", "classify_b0", "count_bound_states_oracle",
    "levinson_verdict", "sum_rule_integral",
]
