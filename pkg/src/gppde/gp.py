"""Multi-output GP machinery: block covariances, training, propagation.

A :class:`BlockKernel` describes the joint covariance of a family of labeled
outputs, each a linear differential operator applied to one of a set of
independent base-kernel priors.  Cross-covariances between labels follow from
bilinearity, so an entry is stored as a list of (prior, left op, right op)
terms.  Labels may also be linear functionals of another label frozen at
fixed points (used for periodic boundary constraints).

The step update is :func:`propagate`: a GP posterior at new points where the
training targets of the previous state are replaced by its mean and the
posterior covariance picks up a correction that marginalizes over the
previous state's covariance.  Replicated observations of the same state rows
(several labels feeding from one field) are handled through the training-row
to state-index map carried by the :class:`TrainingSet`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Union

import numpy as np
import scipy.linalg
import scipy.optimize

from .errors import (
    FactorizationError,
    StateMismatchError,
    TrainingError,
    UnknownLabelError,
)
from .kernels import FAMILY_PARAMS, KernelSpec, operator_pair_matrix
from .operators import DiffOp

NoiseSpec = Union[float, str]


@dataclass(frozen=True)
class EntryTerm:
    """One bilinear contribution ``left_x right_x' k_prior`` to a block entry."""

    prior: str
    left: DiffOp
    right: DiffOp


@dataclass(frozen=True)
class Functional:
    """A one-row label: weighted point evaluations of a pointwise label."""

    base: str
    points: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True)
class BlockKernel:
    """Joint covariance structure over a set of labeled outputs.

    Parameters
    ----------
    labels : ordered label names; assembly and display follow this order.
    entries : mapping (label, label) -> tuple of :class:`EntryTerm`.
        Only one orientation of each pair needs to be present; the transpose
        is derived.  Missing pairs are zero blocks.
    priors : mapping prior name -> :class:`KernelSpec` (initial values).
    noise : mapping label -> observation noise variance.  A float is a fixed
        value; a string names a trainable log-variance hyperparameter (the
        same name on several labels shares one parameter).
    functionals : mapping label -> :class:`Functional` for constraint rows.
    """

    labels: tuple
    entries: Mapping
    priors: Mapping
    noise: Mapping = field(default_factory=dict)
    functionals: Mapping = field(default_factory=dict)

    def __post_init__(self):
        for a, b in self.entries:
            if a not in self.labels or b not in self.labels:
                raise UnknownLabelError(f"entry ({a}, {b}) uses labels not declared")
        for lbl in self.functionals:
            if lbl not in self.labels:
                raise UnknownLabelError(f"functional label {lbl} not declared")

    @property
    def ndim(self) -> int:
        return next(iter(self.priors.values())).ndim

    @property
    def param_names(self) -> tuple:
        names = []
        for key, spec in self.priors.items():
            names.extend(f"{key}.{p}" for p in FAMILY_PARAMS[spec.family])
        seen = []
        for v in self.noise.values():
            if isinstance(v, str) and v not in seen:
                seen.append(v)
        return tuple(names + sorted(seen))

    def theta0(self, noise_var: float = 1e-2) -> np.ndarray:
        """Initial hyperparameter vector (log-space)."""
        vals = []
        for spec in self.priors.values():
            vals.extend(spec.theta)
        n_noise = len(self.param_names) - len(vals)
        vals.extend([math.log(noise_var)] * n_noise)
        return np.asarray(vals, dtype=float)

    def unpack(self, theta):
        """Split a hyperparameter vector into prior specs and noise values."""
        names = self.param_names
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (len(names),):
            raise ValueError(f"theta has shape {theta.shape}, want ({len(names)},)")
        pos = {n: i for i, n in enumerate(names)}
        priors = {}
        i = 0
        for key, spec in self.priors.items():
            k = len(FAMILY_PARAMS[spec.family])
            priors[key] = spec.with_theta(theta[i : i + k])
            i += k
        noise = {}
        for lbl, v in self.noise.items():
            noise[lbl] = math.exp(theta[pos[v]]) if isinstance(v, str) else float(v)
        return priors, noise

    def with_noise(self, noise: Mapping) -> "BlockKernel":
        return replace(self, noise=dict(noise))

    def block(self, a: str, b: str, xa, xb, priors: Mapping) -> np.ndarray:
        """Evaluate the (a, b) cross-covariance block at the given points."""
        for lbl in (a, b):
            if lbl not in self.labels:
                raise UnknownLabelError(f"unknown label {lbl!r}")
        fa = self.functionals.get(a)
        if fa is not None:
            xa = np.asarray(xa)
            if xa.shape[0] != 1:
                raise StateMismatchError(f"functional label {a} carries one row")
            rows = [
                w * self.block(fa.base, b, fa.points[k : k + 1], xb, priors)
                for k, w in enumerate(fa.weights)
            ]
            return np.sum(rows, axis=0)
        fb = self.functionals.get(b)
        if fb is not None:
            return self.block(b, a, xb, xa, priors).T
        terms = self.entries.get((a, b))
        if terms is None:
            rev = self.entries.get((b, a))
            if rev is None:
                na = np.asarray(xa).shape[0]
                nb = np.asarray(xb).shape[0]
                return np.zeros((na, nb))
            return self.block(b, a, xb, xa, priors).T
        out = None
        for t in terms:
            v = operator_pair_matrix(t.left, t.right, priors[t.prior], xa, xb)
            out = v if out is None else out + v
        return out


@dataclass
class TrainingSet:
    """Observed values per label, plus the row-to-state map for propagation.

    ``blocks`` maps label -> (locations, values).  ``from_state`` maps the
    labels that replicate a previous Gaussian state to the index array of
    that state's entries (several labels may point at the same indices).
    """

    blocks: Mapping
    from_state: Mapping = field(default_factory=dict)

    def labels_in(self, bk: BlockKernel):
        for lbl in self.blocks:
            if lbl not in bk.labels:
                raise UnknownLabelError(f"training label {lbl!r} not in block kernel")
        return [lbl for lbl in bk.labels if lbl in self.blocks]

    def stacked_values(self, order) -> np.ndarray:
        return np.concatenate(
            [np.asarray(self.blocks[lbl][1], dtype=float).ravel() for lbl in order]
        ) if order else np.zeros(0)


@dataclass
class GaussianState:
    """Gaussian belief over field values at a set of points.

    ``locations`` maps field name -> points; ``mean`` and ``cov`` stack the
    fields in mapping order.
    """

    locations: Mapping
    mean: np.ndarray
    cov: np.ndarray
    step_index: int = 0
    time: float = 0.0

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float)
        self.cov = np.asarray(self.cov, dtype=float)
        n = sum(np.asarray(x).shape[0] for x in self.locations.values())
        if self.mean.shape != (n,) or self.cov.shape != (n, n):
            raise StateMismatchError(
                f"state has {n} points but mean {self.mean.shape}, cov {self.cov.shape}"
            )
        if n:
            scale = 1.0 + float(np.max(np.abs(self.cov)))
            if float(np.max(np.abs(self.cov - self.cov.T))) > 1e-8 * scale:
                raise StateMismatchError("state covariance is not symmetric")
            tr = float(np.trace(self.cov))
            lo = float(np.linalg.eigvalsh(self.cov)[0])
            if lo < -1e-8 * max(tr, 0.0) - 1e-12:
                raise StateMismatchError(
                    f"state covariance indefinite: min eig {lo}, trace {tr}"
                )

    @property
    def n(self) -> int:
        return self.mean.shape[0]

    def field_index(self, name: str) -> np.ndarray:
        off = 0
        for f, x in self.locations.items():
            m = np.asarray(x).shape[0]
            if f == name:
                return np.arange(off, off + m)
            off += m
        raise UnknownLabelError(f"state has no field {name!r}")

    def field_mean(self, name: str) -> np.ndarray:
        return self.mean[self.field_index(name)]


def row_slices(bk: BlockKernel, data: TrainingSet):
    """Contiguous row ranges per training label, in block-kernel order."""
    out = {}
    off = 0
    for lbl in data.labels_in(bk):
        n = np.asarray(data.blocks[lbl][0]).shape[0]
        out[lbl] = slice(off, off + n)
        off += n
    return out


def assemble(bk: BlockKernel, data: TrainingSet, theta=None) -> np.ndarray:
    """Dense observation covariance: kernel blocks plus per-label noise."""
    if theta is None:
        theta = bk.theta0()
    priors, noise = bk.unpack(theta)
    order = data.labels_in(bk)
    slices = row_slices(bk, data)
    n = sum(s.stop - s.start for s in slices.values())
    K = np.zeros((n, n))
    for i, a in enumerate(order):
        xa = data.blocks[a][0]
        for b in order[i:]:
            xb = data.blocks[b][0]
            B = bk.block(a, b, xa, xb, priors)
            K[slices[a], slices[b]] = B
            if a != b:
                K[slices[b], slices[a]] = B.T
    for lbl, var in noise.items():
        if lbl in slices:
            s = slices[lbl]
            K[s, s] += var * np.eye(s.stop - s.start)
    return K


def chol(K: np.ndarray):
    """Lower Cholesky factor with escalating jitter.

    Tries the matrix as given, then jitter from 1e-8 to 1e-2 times the mean
    diagonal in factors of ten.  Returns (L, jitter used) or raises
    :class:`FactorizationError` carrying the largest jitter attempted.
    """
    K = np.asarray(K, dtype=float)
    n = K.shape[0]
    d = float(np.mean(np.diag(K))) if n else 0.0
    if d <= 0.0:
        d = 1.0
    jitters = [0.0] + [d * 10.0**e for e in range(-8, -1)]
    for jit in jitters:
        try:
            L = np.linalg.cholesky(K + jit * np.eye(n) if jit else K)
            return L, jit
        except np.linalg.LinAlgError:
            continue
    raise FactorizationError(
        f"Cholesky failed up to jitter {jitters[-1]:.3e}", jitter=jitters[-1]
    )


def _nlml_factored(L: np.ndarray, y: np.ndarray) -> float:
    alpha = scipy.linalg.cho_solve((L, True), y)
    return float(
        0.5 * y @ alpha
        + np.sum(np.log(np.diag(L)))
        + 0.5 * len(y) * math.log(2.0 * math.pi)
    )


def nlml(bk: BlockKernel, data: TrainingSet, theta) -> float:
    """Negative log marginal likelihood of the training set."""
    K = assemble(bk, data, theta)
    L, _ = chol(K)
    y = data.stacked_values(data.labels_in(bk))
    return _nlml_factored(L, y)


@dataclass
class TrainResult:
    theta: np.ndarray
    nlml: float
    converged: bool
    n_iter: int


_FAIL_VALUE = 1e12
_LOG_LIMIT = 20.0


def default_bounds(bk: BlockKernel, data: TrainingSet) -> list:
    """Optimizer box per log-parameter, tied to the training data scales.

    Variance-like parameters stay within four decades of the observed value
    variance; inverse-squared-lengthscale parameters keep the lengthscale
    between the typical point spacing and ten domain extents.  Without these
    limits the likelihood admits degenerate interpolants (one prior's
    variance collapses while another's lengthscale shrinks to thread every
    row), which defeat the step entirely.
    """
    y = data.stacked_values(data.labels_in(bk))
    v = float(np.var(y)) if y.size else 1.0
    if not np.isfinite(v) or v <= 0.0:
        v = 1.0
    nd = bk.ndim
    ext = np.zeros(nd)
    h = np.full(nd, np.inf)
    for lbl, (x, _) in data.blocks.items():
        if lbl in bk.functionals:
            continue
        x = np.asarray(x, dtype=float)
        x = x[:, None] if x.ndim == 1 else x
        for d in range(nd):
            col = x[:, d]
            if col.shape[0] < 2:
                continue
            span = float(col.max() - col.min())
            if span > 0.0:
                ext[d] = max(ext[d], span)
                h[d] = min(h[d], span / (col.shape[0] - 1))

    def clipped(lo, hi):
        lo = max(lo, -_LOG_LIMIT)
        hi = min(hi, _LOG_LIMIT)
        return (lo, hi) if lo < hi else (-_LOG_LIMIT, _LOG_LIMIT)

    def w_bounds(d):
        if ext[d] <= 0.0 or not np.isfinite(h[d]):
            return (-_LOG_LIMIT, _LOG_LIMIT)
        return clipped(math.log(0.01 / ext[d] ** 2), math.log(1.0 / h[d] ** 2))

    kinds = {"gamma2": "var", "w": 0, "w1": 0, "w2": 1}
    out = []
    for key, spec in bk.priors.items():
        for name in FAMILY_PARAMS[spec.family]:
            kind = kinds.get(name)
            if kind == "var":
                out.append(clipped(math.log(v * 1e-4), math.log(v * 1e4)))
            elif isinstance(kind, int):
                out.append(w_bounds(kind))
            else:
                out.append((-_LOG_LIMIT, _LOG_LIMIT))
    n_noise = len(bk.param_names) - len(out)
    out.extend([clipped(math.log(1e-12), math.log(10.0 * max(v, 1e-8)))] * n_noise)
    return out


def train(
    bk: BlockKernel,
    data: TrainingSet,
    init=None,
    n_starts: int = 1,
    seed: int = 0,
    maxiter: int = 200,
    bounds=None,
) -> TrainResult:
    """Minimize the NLML over log-hyperparameters with L-BFGS-B.

    Gradients are central finite differences in log-space (step 1e-6).
    Additional starts perturb ``init`` with a seeded normal draw; the best
    final iterate wins and is never worse than ``init`` itself.  ``bounds``
    defaults to :func:`default_bounds`; the initial point is clipped into
    the box.
    """
    if init is None:
        init = bk.theta0()
    if bounds is None:
        bounds = default_bounds(bk, data)
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    init = np.clip(np.asarray(init, dtype=float), lo, hi)

    def objective(theta):
        try:
            return nlml(bk, data, theta)
        except FactorizationError:
            return _FAIL_VALUE

    def gradient(theta):
        h = 1e-6
        g = np.zeros_like(theta)
        for i in range(len(theta)):
            up = theta.copy()
            dn = theta.copy()
            up[i] += h
            dn[i] -= h
            g[i] = (objective(up) - objective(dn)) / (2.0 * h)
        return g

    f0 = objective(init)
    if f0 >= _FAIL_VALUE:
        raise TrainingError("NLML undefined at the initial hyperparameters")

    rng = np.random.default_rng(seed)
    starts = [init] + [
        init + rng.normal(0.0, 1.0, size=init.shape) for _ in range(n_starts - 1)
    ]
    best_theta, best_val = init, f0
    converged = False
    n_iter = 0
    for x0 in starts:
        res = scipy.optimize.minimize(
            objective,
            np.clip(x0, lo, hi),
            jac=gradient,
            method="L-BFGS-B",
            bounds=bounds,
            options={"maxiter": maxiter, "ftol": 1e-9, "gtol": 1e-8},
        )
        if res.fun < best_val:
            best_theta, best_val = res.x, float(res.fun)
            converged = bool(res.success)
            n_iter = int(res.nit)
    if best_val >= _FAIL_VALUE:
        raise TrainingError("no optimizer iterate produced a valid factorization")
    return TrainResult(np.asarray(best_theta, dtype=float), best_val, converged, n_iter)


class _Fit:
    """A block kernel conditioned on a training set at fixed hyperparameters."""

    def __init__(self, bk: BlockKernel, data: TrainingSet, theta):
        self.bk = bk
        self.data = data
        self.priors, self.noise = bk.unpack(theta)
        self.order = data.labels_in(bk)
        self.slices = row_slices(bk, data)
        K = assemble(bk, data, theta)
        self.L, self.jitter = chol(K)
        self.n = K.shape[0]

    def cross(self, targets) -> np.ndarray:
        """(n_train, n_target) covariance between rows and target points."""
        cols = sum(np.asarray(x).shape[0] for _, x in targets)
        q = np.zeros((self.n, cols))
        off = 0
        for lbl, x in targets:
            m = np.asarray(x).shape[0]
            for a in self.order:
                q[self.slices[a], off : off + m] = self.bk.block(
                    a, lbl, self.data.blocks[a][0], x, self.priors
                )
            off += m
        return q

    def prior_block(self, targets) -> np.ndarray:
        cols = sum(np.asarray(x).shape[0] for _, x in targets)
        kss = np.zeros((cols, cols))
        offs = []
        off = 0
        for lbl, x in targets:
            offs.append((lbl, x, off))
            off += np.asarray(x).shape[0]
        for i, (la, xa, oa) in enumerate(offs):
            na = np.asarray(xa).shape[0]
            for lb, xb, ob in offs[i:]:
                nb = np.asarray(xb).shape[0]
                B = self.bk.block(la, lb, xa, xb, self.priors)
                kss[oa : oa + na, ob : ob + nb] = B
                if ob != oa:
                    kss[ob : ob + nb, oa : oa + na] = B.T
        return kss

    def solve(self, rhs) -> np.ndarray:
        return scipy.linalg.cho_solve((self.L, True), rhs)

    def values(self) -> np.ndarray:
        return self.data.stacked_values(self.order)


def posterior(bk: BlockKernel, data: TrainingSet, theta, targets):
    """Posterior mean and covariance at labeled target points.

    ``targets`` is a sequence of (label, points).
    """
    fit = _Fit(bk, data, theta)
    q = fit.cross(targets)
    y = fit.values()
    mean = q.T @ fit.solve(y)
    cov = fit.prior_block(targets) - q.T @ fit.solve(q)
    return mean, cov


def posterior_mean(bk: BlockKernel, data: TrainingSet, theta, targets, y=None):
    fit = _Fit(bk, data, theta)
    if y is None:
        y = fit.values()
    return fit.cross(targets).T @ fit.solve(y)


def _substituted_values(fit: "_Fit", data: TrainingSet, prev: "GaussianState"):
    """Training targets with state-fed rows replaced by the previous mean."""
    y = fit.values().copy()
    for lbl, idx in data.from_state.items():
        idx = np.asarray(idx, dtype=int)
        if lbl not in fit.slices:
            raise StateMismatchError(f"state-fed label {lbl!r} has no training rows")
        s = fit.slices[lbl]
        if idx.shape[0] != s.stop - s.start:
            raise StateMismatchError(
                f"label {lbl!r} has {s.stop - s.start} rows but {idx.shape[0]} state indices"
            )
        if idx.size and (idx.min() < 0 or idx.max() >= prev.n):
            raise StateMismatchError("state indices out of range")
        y[s] = prev.mean[idx]
    return y


def predictor(bk: BlockKernel, data: TrainingSet, theta, prev: "GaussianState" = None):
    """Posterior-mean closure ``f(label, x)`` at fixed hyperparameters.

    With ``prev`` given, state-fed training rows take their targets from the
    previous state's mean, matching what :func:`propagate` conditions on.
    """
    fit = _Fit(bk, data, theta)
    y = fit.values() if prev is None else _substituted_values(fit, data, prev)
    alpha = fit.solve(y)

    def f(label: str, x) -> np.ndarray:
        return fit.cross([(label, x)]).T @ alpha

    return f


def _floor_psd(cov: np.ndarray) -> np.ndarray:
    cov = 0.5 * (cov + cov.T)
    vals, vecs = np.linalg.eigh(cov)
    if vals.size and vals[0] < 0.0:
        cov = (vecs * np.clip(vals, 0.0, None)) @ vecs.T
        cov = 0.5 * (cov + cov.T)
    return cov


def propagate(
    bk: BlockKernel,
    data: TrainingSet,
    theta,
    targets,
    prev: GaussianState,
    time: float = None,
) -> GaussianState:
    """One uncertainty-propagating step: condition, then marginalize.

    ``targets`` is a sequence of (field, label, points) triples describing
    the new state.  Rows of ``data`` whose labels appear in
    ``data.from_state`` take their targets from ``prev.mean``, and the
    posterior covariance gains ``W^T S W`` where ``S`` places ``prev.cov``
    on those rows and ``W = K^{-1} q``.
    """
    fit = _Fit(bk, data, theta)
    y = _substituted_values(fit, data, prev)

    pairs = [(lbl, x) for _, lbl, x in targets]
    q = fit.cross(pairs)
    W = fit.solve(q)
    mean = q.T @ fit.solve(y)
    cov = fit.prior_block(pairs) - q.T @ W

    S = np.zeros((fit.n, fit.n))
    items = list(data.from_state.items())
    for la, ia in items:
        for lb, ib in items:
            S[fit.slices[la], fit.slices[lb]] = prev.cov[np.ix_(np.asarray(ia), np.asarray(ib))]
    cov = cov + W.T @ S @ W
    cov = _floor_psd(cov)

    locations = {f: np.asarray(x, dtype=float) for f, _, x in targets}
    return GaussianState(
        locations=locations,
        mean=mean,
        cov=cov,
        step_index=prev.step_index + 1,
        time=prev.time if time is None else float(time),
    )
