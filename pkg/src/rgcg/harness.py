"""Seeded sparse PCA experiments: instance generation, batches and CSV output."""
import argparse
import csv
import hashlib
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .objectives import SparsePCAInstance, make_sparse_pca
from .solvers import ERROR, F_STALLED, THETA_CONVERGED, SolverConfig, solve
from .sphere import Sphere
from .stepsize import Adaptive, Armijo, Diminishing
from .stiefel import Stiefel, polar_factor

logger = logging.getLogger(__name__)

STRATEGIES = ("armijo", "adaptive", "diminishing")
SOLVER_NAMES = ("rgcg", "accelerated")
STANDARDIZATIONS = ("variance", "norm")
_PURPOSE = {"matrix": 0, "x0": 1}

TRACE_HEADER = ["run", "iter", "time_s", "F", "f", "g", "theta", "lambda"]
SUMMARY_HEADER = [
    "manifold", "n", "p", "lambda", "solver", "strategy",
    "mean_time_s", "mean_iters", "converged_runs",
]


@dataclass(frozen=True)
class ExperimentConfig:
    manifold: str = "sphere"
    n: int = 10
    p: int = 1
    lam: float = 0.1
    strategies: tuple = STRATEGIES
    solvers: tuple = ("rgcg",)
    runs: int = 10
    seed: int = 0
    max_iters: int = 2000
    tol_theta: float = 1e-4
    tol_fstall: float = 1e-4
    fstall_window: int = 5
    zeta: float = 0.1
    omega1: float = 0.05
    omega2: float = 0.95
    standardize: str = "variance"
    matrix_csv: Optional[str] = None
    output_dir: Optional[str] = None
    workers: int = 1
    subproblem: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.manifold not in ("sphere", "stiefel"):
            raise ValueError(f"unknown manifold {self.manifold!r}")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.n < 2:
            raise ValueError("n must be >= 2")
        p = 1 if self.manifold == "sphere" else self.p
        if not 1 <= p <= self.n:
            raise ValueError("need 1 <= p <= n")
        for s in self.strategies:
            if s not in STRATEGIES:
                raise ValueError(f"unknown strategy {s!r}")
        for s in self.solvers:
            if s not in SOLVER_NAMES:
                raise ValueError(f"unknown solver {s!r}")
        if self.standardize not in STANDARDIZATIONS:
            raise ValueError(f"standardize must be one of {STANDARDIZATIONS}")

    @property
    def p_eff(self):
        return 1 if self.manifold == "sphere" else self.p

    def make_manifold(self):
        if self.manifold == "sphere":
            return Sphere(self.n)
        return Stiefel(self.p, self.n)

    def strategy(self, name):
        if name == "armijo":
            return Armijo(zeta=self.zeta, omega1=self.omega1, omega2=self.omega2)
        if name == "adaptive":
            return Adaptive()
        return Diminishing()

    def solver_config(self, strategy_name):
        return SolverConfig(
            strategy=self.strategy(strategy_name),
            max_iters=self.max_iters,
            tol_theta=self.tol_theta,
            fstall_window=self.fstall_window,
            tol_fstall=self.tol_fstall,
            subproblem=dict(self.subproblem),
        )

    def digest(self):
        """Short hash of every setting that affects the numbers."""
        d = asdict(self)
        for key in ("output_dir", "workers"):
            d.pop(key)
        d["strategies"] = list(self.strategies)
        d["solvers"] = list(self.solvers)
        if self.matrix_csv is not None:
            d["matrix_csv"] = hashlib.sha256(Path(self.matrix_csv).read_bytes()).hexdigest()
        blob = json.dumps(d, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:10]


@dataclass
class RunResult:
    run: int
    time: float
    iters: int
    final_F: float
    final_theta: float
    status: str


@dataclass
class RunSummary:
    strategy: str
    solver: str
    n: int
    p: int
    lam: float
    runs: list

    @property
    def mean_time(self):
        return float(np.mean([r.time for r in self.runs]))

    @property
    def mean_iters(self):
        return float(np.mean([r.iters for r in self.runs]))

    @property
    def converged_runs(self):
        return sum(r.status in (THETA_CONVERGED, F_STALLED) for r in self.runs)


def make_rng(seed, run, purpose):
    """Counter-based generator keyed by (seed, run, purpose)."""
    ss = np.random.SeedSequence([seed, run, _PURPOSE[purpose]])
    return np.random.Generator(np.random.Philox(ss))


def standardize_columns(A, how="variance"):
    """Center the columns, then scale to unit sample variance or unit norm."""
    A = A - A.mean(axis=0)
    if how == "variance":
        scale = A.std(axis=0, ddof=1)
    else:
        scale = np.linalg.norm(A, axis=0)
    return A / np.where(scale > 0, scale, 1.0)


def load_matrix_csv(path):
    """Read a dense comma-separated matrix, one row per line, no header."""
    A = np.loadtxt(path, delimiter=",", ndmin=2)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"{path}: expected a square matrix, got {A.shape}")
    return A


def generate_instance(seed, manifold, lam, standardize="variance"):
    """Random standardized sparse PCA instance and its initial-point generator.

    Parameters
    ----------
    seed : int
    manifold : Sphere or Stiefel
    lam : float
    standardize : {"variance", "norm"}

    Returns
    -------
    instance : SparsePCAInstance
    initial_point : callable
        ``initial_point(run)`` gives the deterministic start of run ``run``.
    """
    n = manifold.shape[0]
    A = make_rng(seed, 0, "matrix").standard_normal((n, n))
    A = standardize_columns(A, standardize)
    if isinstance(manifold, Stiefel):
        A = 0.5 * (A + A.T)
    p = manifold.shape[1] if len(manifold.shape) == 2 else 1
    inst = SparsePCAInstance.from_matrix(A, lam, p=p)
    return inst, initial_point_generator(seed, manifold)


def initial_point_generator(seed, manifold):
    def initial_point(run):
        rng = make_rng(seed, run, "x0")
        z = rng.standard_normal(manifold.shape)
        if isinstance(manifold, Sphere):
            return z / np.linalg.norm(z)
        return polar_factor(z)

    return initial_point


def _summarize(reports):
    out = []
    for r, rep in enumerate(reports):
        out.append(RunResult(r, rep.total_time, rep.iterations, rep.final.F, rep.final.theta, rep.status))
    return out


def run_batch(cfg):
    """Run every (solver, strategy) pair ``cfg.runs`` times on one instance.

    Returns
    -------
    summaries : list of RunSummary
    reports : dict
        ``(solver, strategy) -> list of SolverReport`` in run order.
    """
    M = cfg.make_manifold()
    if cfg.matrix_csv is not None:
        A = load_matrix_csv(cfg.matrix_csv)
        if A.shape[0] != cfg.n:
            raise ValueError(f"matrix is {A.shape[0]} x {A.shape[0]} but n = {cfg.n}")
        inst = SparsePCAInstance.from_matrix(A, cfg.lam, p=cfg.p_eff)
        start = initial_point_generator(cfg.seed, M)
    else:
        inst, start = generate_instance(cfg.seed, M, cfg.lam, cfg.standardize)
    obj = make_sparse_pca(inst.A, cfg.lam, M)
    x0s = [start(r) for r in range(cfg.runs)]

    summaries, reports = [], {}
    for solver_name in cfg.solvers:
        for strat in cfg.strategies:
            scfg = cfg.solver_config(strat)

            def one(x0, scfg=scfg, solver_name=solver_name):
                return solve(x0, obj, scfg, solver=solver_name)

            if cfg.workers > 1:
                with ThreadPoolExecutor(cfg.workers) as pool:
                    reps = list(pool.map(one, x0s))
            else:
                reps = [one(x0) for x0 in x0s]
            for r, rep in enumerate(reps):
                if rep.status == ERROR:
                    logger.warning("%s/%s run %d failed: %s", solver_name, strat, r, rep.error)
            reports[(solver_name, strat)] = reps
            summaries.append(RunSummary(strat, solver_name, cfg.n, cfg.p_eff, cfg.lam, _summarize(reps)))
    return summaries, reports


def output_paths(cfg):
    base = Path(cfg.output_dir)
    stem = f"{cfg.manifold}_n{cfg.n}_p{cfg.p_eff}_{cfg.digest()}"
    traces = {
        (solver, strat): base / f"{stem}_{solver}_{strat}_trace.csv"
        for solver in cfg.solvers
        for strat in cfg.strategies
    }
    return base / f"{stem}_summary.csv", traces


def preflight(cfg):
    """Fail before any solve if the output directory is not writable."""
    base = Path(cfg.output_dir)
    base.mkdir(parents=True, exist_ok=True)
    if not os.access(base, os.W_OK):
        raise PermissionError(f"output directory {base} is not writable")


def write_outputs(summaries, reports, cfg):
    """Write one trace CSV per (solver, strategy) and a summary CSV."""
    if not summaries:
        raise ValueError("nothing to write")
    summary_path, trace_paths = output_paths(cfg)
    for key, reps in reports.items():
        with open(trace_paths[key], "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(TRACE_HEADER)
            for run, rep in enumerate(reps):
                for rec in rep.records:
                    w.writerow([run, rec.k, rec.wall_time, rec.F, rec.f, rec.g, rec.theta, rec.lambda_k])
    with open(summary_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SUMMARY_HEADER)
        for s in summaries:
            w.writerow([
                cfg.manifold, s.n, s.p, s.lam, s.solver, s.strategy,
                s.mean_time, s.mean_iters, s.converged_runs,
            ])
    return summary_path, trace_paths


def build_parser():
    ap = argparse.ArgumentParser(
        prog="rgcg",
        description="Sparse PCA benchmarks for Riemannian conditional gradient methods.",
    )
    ap.add_argument("--manifold", choices=("sphere", "stiefel"), default="sphere")
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--p", type=int, default=1)
    ap.add_argument("--lambda", dest="lam", type=float, default=0.1)
    ap.add_argument("--strategy", choices=STRATEGIES + ("all",), default="all")
    ap.add_argument("--solver", choices=SOLVER_NAMES + ("both",), default="rgcg")
    ap.add_argument("--runs", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-iters", type=int, default=2000)
    ap.add_argument("--tol-theta", type=float, default=1e-4)
    ap.add_argument("--tol-fstall", type=float, default=1e-4)
    ap.add_argument("--zeta", type=float, default=0.1)
    ap.add_argument("--omega1", type=float, default=0.05)
    ap.add_argument("--omega2", type=float, default=0.95)
    ap.add_argument("--standardize", choices=STANDARDIZATIONS, default="variance",
                    help="column scaling of the generated matrix")
    ap.add_argument("--matrix-csv", metavar="PATH")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results")
    return ap


def config_from_args(args):
    strategies = STRATEGIES if args.strategy == "all" else (args.strategy,)
    solvers = SOLVER_NAMES if args.solver == "both" else (args.solver,)
    return ExperimentConfig(
        manifold=args.manifold, n=args.n, p=args.p, lam=args.lam,
        strategies=strategies, solvers=solvers, runs=args.runs, seed=args.seed,
        max_iters=args.max_iters, tol_theta=args.tol_theta, tol_fstall=args.tol_fstall,
        zeta=args.zeta, omega1=args.omega1, omega2=args.omega2,
        standardize=args.standardize, matrix_csv=args.matrix_csv,
        output_dir=args.out, workers=args.workers,
    )


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
        preflight(cfg)
    except (ValueError, OSError) as exc:
        print(f"rgcg: {exc}", file=sys.stderr)
        return 2
    try:
        summaries, reports = run_batch(cfg)
    except (ValueError, OSError) as exc:
        print(f"rgcg: {exc}", file=sys.stderr)
        return 2
    summary_path, _ = write_outputs(summaries, reports, cfg)
    for s in summaries:
        print(f"{s.solver:12s} {s.strategy:12s} time {s.mean_time:9.4f}s  "
              f"iters {s.mean_iters:8.2f}  converged {s.converged_runs}/{len(s.runs)}")
    print(f"summary written to {summary_path}")
    failed = any(r.status == ERROR for s in summaries for r in s.runs)
    return 1 if failed else 0
