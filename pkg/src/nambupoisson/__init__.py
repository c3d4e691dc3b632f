"""Maximally degenerate Poisson brackets of super-integrable systems.

Builds the ``2n-1`` rank-2 Poisson tensors of a system with ``2n-1`` first
integrals, the clock operator fields derived from them, and residual checks
for every structural identity, with the 2D harmonic oscillator as the
reference system.
"""

from .errors import (
    ClockUndefinedError,
    DomainError,
    ExprNameError,
    ExprSyntaxError,
    InconsistentRatioError,
    NambuError,
    NonDifferentiableError,
    SingularEvaluationError,
    SingularPointError,
    SystemFileError,
    TooManySingularPointsError,
    UnwrapError,
)
from .expr import eval_jet, parse, to_source
from .files import dumps_report, load_system, loads_report, resolve_system, system_from_dict
from .flow import Trajectory, clock_winding, conservation_drift, integrate_orbit, write_csv
from .jets import Jet1, Jet2, jet_arith, jet_const, jet_func, jet_var
from .nambu import (
    PoissonMatrix,
    degenerate_bracket,
    degenerate_tensor,
    frame,
    gradient_matrix,
    nambu_form_velocity,
    nambu_velocity,
    poisson_tensor,
    raw_cross_product,
    volume_density,
)
from .oscillator import (
    OscillatorParams,
    build_oscillator,
    free_particle_limit,
    golden_brackets,
    golden_operators,
    hietarinta_field,
    privileged_metric,
)
from .phase import ScalarField, SystemDefinition, canonical_tensor, canonical_velocity, gradient, phase_point
from .quantum import (
    EigenState,
    OperatorField,
    commutation_residual,
    eigen_residual,
    eigenfunction_value,
    lie_bracket_field,
    operator_field,
    self_operator_field,
)
from .verify import (
    VerificationReport,
    VerifyConfig,
    casimir_residual,
    degeneracy_report,
    heisenberg_matrix,
    jacobi_residual,
    pfaffian,
    symplectic_pfaffian,
    run_verification,
)

__version__ = "0.1.0"
