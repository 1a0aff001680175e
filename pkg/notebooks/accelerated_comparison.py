"""
Momentum variant against the plain method
=========================================

Fifty iterations of each method from the same start, with stopping rules
switched off so that every trace has the same length.
"""

from rgcg import SolverConfig, Sphere, accelerated_solve, make_sparse_pca, rgcg_solve
from rgcg.harness import generate_instance
from rgcg.stepsize import Adaptive, Armijo, Diminishing

M = Sphere(100)
inst, start = generate_instance(seed=0, manifold=M, lam=0.1)
obj = make_sparse_pca(inst.A, inst.lam, M)
x0 = start(0)
kw = dict(max_iters=50, tol_theta=1e-300, tol_fstall=1e-300)

for strategy in (Armijo(), Adaptive(), Diminishing()):
    plain = rgcg_solve(x0, obj, SolverConfig(strategy=strategy, **kw))
    fast = accelerated_solve(x0, obj, SolverConfig(strategy=strategy, **kw))
    print(f"{strategy.name:12s} plain F {plain.final.F:10.3f}   accelerated F {fast.final.F:10.3f}")
