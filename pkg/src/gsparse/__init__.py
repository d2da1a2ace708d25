"""gsparse: generalized-sparsity inference for underdetermined linear systems.

Regularizers induced by Laplace scale-mixture priors, the generalized IRLS
solver, generalized sparsity measures, weak null space property estimation,
and brute-force oracles that validate all of it at desk scale.
"""

from .backend import HAVE_EXTENSION, USING_EXTENSION, backend_name
from .distributions import (
    DiscreteMixing,
    Laplace,
    MonteCarloReport,
    Normal,
    Rayleigh,
    pdf,
    sample,
    verify_cl_in_cg,
    verify_laplace_identity,
)
from .linalg import kernel_basis, solve_spd
from .nsp import (
    NspQuery,
    NspReport,
    NspSampling,
    check_nsp,
    estimate_frontier,
    worst_support,
)
from .problems import ProblemSpec, generate_problem
from .regularizers import (
    CLDiscreteRegularizer,
    CLQuadratureRegularizer,
    ConvexityReport,
    L1Regularizer,
    MixingDensity,
    PropertyReport,
    QuadratureConfig,
    Regularizer,
    SampleSpec,
    check_convexity_h,
    check_properties,
    rayleigh_mixing,
    uniform_bump,
)
from .solvers import (
    EpsilonBoundReport,
    GirlsConfig,
    GirlsResult,
    OracleResult,
    SensingProblem,
    Termination,
    TraceEntry,
    bruteforce_min_R_over_Gy,
    epsilon_bound_check,
    g_irls,
    girls_loss,
    map_objective,
    wls_step,
)
from .sparsity import (
    SparsityReport,
    analyze,
    is_generalized_sparse,
    near_minimizer_check,
    rearranged_value,
    sigma_bracket,
    sigma_bruteforce,
    tail_value,
    top_k_indices,
)
from .sweep import SweepConfig, SweepRow, run_sweep, trial_seed

__version__ = "0.1.0"
