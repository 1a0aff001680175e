"""Riemannian generalized conditional gradient methods for composite problems."""
from .kernels import inv_sqrt_spd, soft_threshold, solve_matrix_eq, spectral_norm_sym
from .manifold import GapResult, InverseRetractionError, Manifold, TransportError
from .objectives import CompositeObjective, SparsePCAInstance, eval_F, make_sparse_pca, riem_grad
from .solvers import (
    AcceleratedState,
    IterationRecord,
    SolverConfig,
    SolverReport,
    accelerated_solve,
    check_stop,
    compute_gap,
    rgcg_solve,
    solve,
)
from .sphere import Sphere, SphereSubproblemConfig
from .stepsize import Adaptive, Armijo, Diminishing, adaptive_step, armijo_search, diminishing_step
from .stiefel import Stiefel, StiefelSubproblemConfig

__version__ = "0.1.0"
