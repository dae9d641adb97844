"""Duality quantum computing with subwave projections."""

from .analysis import (
    OrderSearchResult,
    TimingModel,
    closed_form_step_probs,
    mean_time_final,
    mean_time_swp,
    order_search,
    speedup_sweep,
)
from .errors import DqcError
from .gtc import (
    GroundStateProblem,
    GtcPlan,
    build_gtc_program,
    choose_iteration_counts,
    prepare_ground_state,
    shift_hamiltonian,
    verify_projector_convergence,
)
from .lcu import (
    build_divider_combiner,
    chebyshev_T,
    chebyshev_U,
    chebyshev_weights,
    decompose_contraction,
    dilate_contraction,
    power_approx_error,
    walk_operator,
)
from .linalg import hermitian_eig, matrix_sqrt_psd, operator_norm, polar_decompose
from .simulator import (
    LcuProgram,
    RegisterLayout,
    RunTrace,
    run_final_projection,
    run_swp_exact,
    run_swp_montecarlo,
)

__version__ = "0.1.0"
