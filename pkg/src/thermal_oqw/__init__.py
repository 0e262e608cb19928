"""Open quantum walks of a two-level atom over the Fock ladder of a thermal, detuned cavity."""

from .linalg import (
    annihilation,
    hermitian_eigenvalues_2x2,
    lindblad_term,
    matrix_exponential,
    pauli,
)
from .observables import (
    ObservableRecord,
    birth_death_oracle,
    first_moment,
    gaussian_fit_residual,
    make_record,
    mean_and_variance,
    occupation_distribution,
    tv_distance,
)
from .ode import OdeProblem, integrate
from .thermal import (
    ModelParams,
    build_completed_site_operators,
    build_site_operators,
    build_transition_set,
    local_hamiltonian,
    ode_rhs,
    thermal_occupation,
)
from .walk import (
    LeakExceeded,
    PositivityBreach,
    StepPolicy,
    TransitionSet,
    WalkerState,
    dilate_global,
    evolve,
    step,
    verify_normalization,
)

__version__ = "0.1.0"

__all__ = [
    "annihilation",
    "hermitian_eigenvalues_2x2",
    "lindblad_term",
    "matrix_exponential",
    "pauli",
    "ObservableRecord",
    "birth_death_oracle",
    "first_moment",
    "gaussian_fit_residual",
    "make_record",
    "mean_and_variance",
    "occupation_distribution",
    "tv_distance",
    "OdeProblem",
    "integrate",
    "ModelParams",
    "build_completed_site_operators",
    "build_site_operators",
    "build_transition_set",
    "local_hamiltonian",
    "ode_rhs",
    "thermal_occupation",
    "LeakExceeded",
    "PositivityBreach",
    "StepPolicy",
    "TransitionSet",
    "WalkerState",
    "dilate_global",
    "evolve",
    "step",
    "verify_normalization",
]
