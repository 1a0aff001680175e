"""
Several sparse components on the Stiefel manifold
=================================================

Three orthonormal loadings at once. The solver keeps the columns
orthonormal to machine precision, which we check on the way out.
"""

import numpy as np

from rgcg import SolverConfig, Stiefel, make_sparse_pca, rgcg_solve
from rgcg.harness import generate_instance
from rgcg.stepsize import Armijo

M = Stiefel(p=3, n=40)
inst, start = generate_instance(seed=1, manifold=M, lam=0.1)
obj = make_sparse_pca(inst.A, inst.lam, M)

report = rgcg_solve(start(0), obj, SolverConfig(strategy=Armijo(), max_iters=500))
X = report.final_point

# %%
# Orthonormality drift and the objective split into its two parts.
print("status", report.status, "after", report.iterations, "iterations")
print("||X^T X - I|| =", np.linalg.norm(X.T @ X - np.eye(3)))
print("f = %.4f, g = %.4f" % (report.final.f, report.final.g))

# %%
# Loadings per component; small entries are shrunk by the L1 term.
print(np.round(X[:10], 3))
