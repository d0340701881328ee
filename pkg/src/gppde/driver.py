"""Run orchestration: bootstrap, stepping loop, error norms, convergence.

A run starts from noisy initial observations, fits one plain GP per field
(giving the first drift predictor and warm-start hyperparameters), then
repeats train / propagate over the step kernel until the final time.  Step
counts snap to the horizon, ``dt_eff = T / round(T / dt)``, so sweeps always
land exactly on ``T``.
"""

from __future__ import annotations

import math
import time as _time
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import UndefinedNormError
from .gp import (
    BlockKernel,
    EntryTerm,
    GaussianState,
    TrainingSet,
    predictor,
    propagate,
    train,
)
from .operators import DiffOp
from .problems import (
    ProblemSpec,
    StepModel,
    analytic_solution,
    artificial_points,
    base_spec,
    error_grid,
    initial_data,
    make_step_model,
)


def relative_l2_error(approx, exact) -> float:
    """||approx - exact|| / ||exact||; a zero reference norm is undefined."""
    approx = np.asarray(approx, dtype=float)
    exact = np.asarray(exact, dtype=float)
    denom = float(np.linalg.norm(exact))
    if denom == 0.0:
        raise UndefinedNormError("reference values have zero norm on this grid")
    return float(np.linalg.norm(approx - exact) / denom)


def snap_dt(T: float, dt: float):
    """Effective step size landing exactly on the horizon: (dt_eff, n_steps)."""
    if T <= 0.0 or dt <= 0.0:
        raise ValueError("horizon and step size must be positive")
    n = max(1, round(T / dt))
    return T / n, n


@dataclass
class RunConfig:
    problem: ProblemSpec
    dt: float = None
    T: float = None
    seed: int = 0
    n_starts_bootstrap: int = 3
    maxiter_bootstrap: int = 200
    n_starts_first: int = 5
    maxiter_first: int = 300
    maxiter: int = 60
    compute_errors: bool = True


@dataclass
class StepResult:
    state: GaussianState
    theta: np.ndarray
    nlml: float
    rel_l2_error: float
    wall_time: float
    predictors: Mapping


@dataclass
class RunResult:
    problem: ProblemSpec
    dt: float
    n_steps: int
    seed: int
    steps: list = field(default_factory=list)

    @property
    def final_error(self) -> float:
        return self.steps[-1].rel_l2_error


def bootstrap(problem: ProblemSpec, seed: int, n_starts: int = 3, maxiter: int = 200):
    """Initial state at the data points plus per-field plain GP fits.

    Returns ``(state, predictors, prior_thetas)``: the Gaussian state holding
    the noisy observations with covariance ``sigma0^2 I``, posterior-mean
    closures per field, and the fitted kernel log-parameters per field for
    warm-starting the step kernels.
    """
    data = initial_data(problem, seed)
    locations = {f: data[f][0] for f in problem.fields}
    mean = np.concatenate([np.asarray(data[f][1], dtype=float) for f in problem.fields])
    n = mean.shape[0]
    cov = (problem.sigma0**2) * np.eye(n) if problem.sigma0 > 0.0 else np.zeros((n, n))
    state = GaussianState(locations=locations, mean=mean, cov=cov)

    ident = DiffOp.identity(problem.ndim)
    predictors = {}
    prior_thetas = {}
    for f in problem.fields:
        spec = base_spec(problem, f)
        bk = BlockKernel(
            labels=("u0",),
            entries={("u0", "u0"): (EntryTerm("g", ident, ident),)},
            priors={"g": spec},
            noise={"u0": "s0" if problem.sigma0 > 0.0 else 1e-8},
        )
        ts = TrainingSet(blocks={"u0": data[f]})
        tr = train(bk, ts, n_starts=n_starts, seed=seed, maxiter=maxiter)
        pred = predictor(bk, ts, tr.theta)
        predictors[f] = lambda x, _p=pred: _p("u0", x)
        prior_thetas[f] = tuple(tr.theta[: len(spec.theta)])
    return state, predictors, prior_thetas


def initial_theta(bk: BlockKernel, prior_fields: Mapping, prior_thetas: Mapping,
                  noise_var: float = 1e-2) -> np.ndarray:
    """Warm-start vector for a step kernel from per-field bootstrap fits."""
    vals = []
    for key in bk.priors:
        vals.extend(prior_thetas[prior_fields[key]])
    n_noise = len(bk.param_names) - len(vals)
    vals.extend([math.log(noise_var)] * n_noise)
    return np.asarray(vals, dtype=float)


def step(
    problem: ProblemSpec,
    model: StepModel,
    prev: GaussianState,
    dt: float,
    t_next: float,
    theta_init,
    predictors: Mapping,
    x_new: Mapping,
    maxiter: int = 60,
    n_starts: int = 1,
    seed: int = 0,
    compute_errors: bool = True,
) -> StepResult:
    """One train / propagate step from the previous state onto ``x_new``."""
    t0 = _time.perf_counter()
    bk = model.kernel(dt, predictors)
    data = model.training_set(prev)
    tr = train(bk, data, init=theta_init, n_starts=n_starts, seed=seed, maxiter=maxiter)
    state = propagate(bk, data, tr.theta, model.targets(x_new), prev, time=t_next)
    pred = predictor(bk, data, tr.theta, prev)
    new_predictors = {
        f: (lambda x, _p=pred, _l=lbl: _p(_l, x))
        for f, lbl in model.target_labels.items()
    }
    rel = math.nan
    if compute_errors:
        grid = error_grid(problem)
        f0 = problem.fields[0]
        exact = analytic_solution(problem, grid, t_next)[f0]
        rel = relative_l2_error(new_predictors[f0](grid), exact)
    wall = _time.perf_counter() - t0
    return StepResult(state, tr.theta, tr.nlml, rel, wall, new_predictors)


def run(config: RunConfig) -> RunResult:
    """Full propagation from the initial data to the horizon."""
    problem = config.problem
    dt_eff, n_steps = snap_dt(
        config.T if config.T is not None else problem.T,
        config.dt if config.dt is not None else problem.dt,
    )
    model = make_step_model(problem)
    state, predictors, prior_thetas = bootstrap(
        problem, config.seed, config.n_starts_bootstrap, config.maxiter_bootstrap
    )
    theta = initial_theta(
        model.kernel(dt_eff, predictors), model.prior_fields, prior_thetas
    )
    result = RunResult(problem, dt_eff, n_steps, config.seed)
    for k in range(n_steps):
        # the first step starts cold: the bootstrap fit is a poor likelihood
        # point for the coupled step kernel, so search harder there
        res = step(
            problem,
            model,
            state,
            dt_eff,
            (k + 1) * dt_eff,
            theta,
            predictors,
            artificial_points(problem, config.seed, step=k + 1),
            maxiter=config.maxiter_first if k == 0 else config.maxiter,
            n_starts=config.n_starts_first if k == 0 else 1,
            seed=config.seed,
            compute_errors=config.compute_errors,
        )
        state, theta, predictors = res.state, res.theta, res.predictors
        result.steps.append(res)
    return result


def fit_convergence(dts, errors, min_improve: float = 0.25):
    """Least-squares order on a log-log error curve, floor-aware.

    Points are walked from the largest step down; once the error stops
    improving by at least ``min_improve`` per halving (the spatial
    approximation floor), that point and everything after it are dropped.
    Returns ``(slope, n_used)``.
    """
    dts = np.asarray(dts, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if dts.shape != errors.shape or dts.size < 2:
        raise ValueError("need matching dt/error arrays with at least two points")
    order = np.argsort(dts)[::-1]
    d, e = dts[order], errors[order]
    keep = 1
    for i in range(1, len(d)):
        halvings = math.log2(d[i - 1] / d[i])
        if e[i] <= e[i - 1] * (1.0 - min_improve) ** halvings:
            keep = i + 1
        else:
            break
    if keep < 2:
        keep = len(d)
    slope = float(np.polyfit(np.log(d[:keep]), np.log(e[:keep]), 1)[0])
    return slope, keep


@dataclass
class ConvergenceResult:
    dts: np.ndarray
    errors: np.ndarray
    slope: float
    n_used: int


def convergence_sweep(problem: ProblemSpec, dts, T: float = None, seed: int = 0,
                      **config_kwargs) -> ConvergenceResult:
    """Final-time error across step sizes, with a fitted order."""
    horizon = T if T is not None else problem.T
    eff, errs = [], []
    for dt in dts:
        cfg = RunConfig(problem=problem, dt=dt, T=horizon, seed=seed, **config_kwargs)
        res = run(cfg)
        eff.append(res.dt)
        errs.append(res.final_error)
    eff = np.asarray(eff)
    errs = np.asarray(errs)
    slope, n_used = fit_convergence(eff, errs)
    return ConvergenceResult(eff, errs, slope, n_used)
