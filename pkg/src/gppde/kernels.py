"""Covariance kernels and their derivatives up to second order per argument.

Three families are provided: the 1-D squared exponential, the 1-D arcsine
(neural-network) kernel, and an anisotropic 2-D squared exponential.  Every
family evaluates mixed partial derivatives up to order two in each argument
and each dimension, which is what the time-stepping scheme builders need.
Closed forms are validated against composed central finite differences of the
plain kernel; :func:`validate_derivatives` runs that check suite.

Hyperparameters are stored in log-space so that optimizers can work
unconstrained; constructors and ``params()`` speak in natural units.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _nn_forms
from .errors import KernelDomainError, OrderError
from .operators import DiffOp, coeff_values


class KernelFamily(str, Enum):
    SE1D = "se1d"
    NN1D = "nn1d"
    SE2D = "se2d"


FAMILY_PARAMS = {
    KernelFamily.SE1D: ("gamma2", "w"),
    KernelFamily.NN1D: ("sigma0_sq", "sigma_sq"),
    KernelFamily.SE2D: ("gamma2", "w1", "w2"),
}

FAMILY_NDIM = {
    KernelFamily.SE1D: 1,
    KernelFamily.NN1D: 1,
    KernelFamily.SE2D: 2,
}


@dataclass(frozen=True)
class KernelSpec:
    """A kernel family plus its hyperparameters, stored in log-space."""

    family: KernelFamily
    theta: tuple

    def __post_init__(self):
        want = len(FAMILY_PARAMS[self.family])
        if len(self.theta) != want:
            raise ValueError(
                f"{self.family.value} takes {want} hyperparameters, got {len(self.theta)}"
            )

    @staticmethod
    def se1d(gamma2: float = 1.0, w: float = 1.0) -> "KernelSpec":
        return KernelSpec(KernelFamily.SE1D, (math.log(gamma2), math.log(w)))

    @staticmethod
    def nn1d(sigma0_sq: float = 1.0, sigma_sq: float = 1.0) -> "KernelSpec":
        return KernelSpec(KernelFamily.NN1D, (math.log(sigma0_sq), math.log(sigma_sq)))

    @staticmethod
    def se2d(gamma2: float = 1.0, w1: float = 1.0, w2: float = 1.0) -> "KernelSpec":
        return KernelSpec(
            KernelFamily.SE2D, (math.log(gamma2), math.log(w1), math.log(w2))
        )

    @property
    def ndim(self) -> int:
        return FAMILY_NDIM[self.family]

    def params(self) -> dict:
        """Hyperparameters in natural (positive) units."""
        names = FAMILY_PARAMS[self.family]
        return {n: math.exp(t) for n, t in zip(names, self.theta)}

    def with_theta(self, theta) -> "KernelSpec":
        return KernelSpec(self.family, tuple(float(t) for t in theta))


@dataclass(frozen=True)
class DerivOrder:
    """Mixed partial derivative orders for the two kernel arguments.

    ``left`` and ``right`` hold one order per space dimension.  Orders above
    two per argument and dimension have no closed form here and raise
    :class:`OrderError`.
    """

    left: tuple
    right: tuple

    def __post_init__(self):
        if len(self.left) != len(self.right):
            raise OrderError("left/right order tuples differ in dimension")
        for o in self.left + self.right:
            if not isinstance(o, (int, np.integer)) or o < 0 or o > 2:
                raise OrderError(f"derivative order {o!r} outside 0..2")

    @staticmethod
    def of(a, b) -> "DerivOrder":
        """Build from ints (1-D) or per-dimension tuples."""
        if isinstance(a, (int, np.integer)):
            a = (int(a),)
        if isinstance(b, (int, np.integer)):
            b = (int(b),)
        return DerivOrder(tuple(a), tuple(b))

    @property
    def total(self) -> int:
        return sum(self.left) + sum(self.right)


def _as_order(order, ndim: int) -> DerivOrder:
    if isinstance(order, DerivOrder):
        o = order
    else:
        o = DerivOrder.of(*order)
    if len(o.left) != ndim:
        raise OrderError(f"order has {len(o.left)} dimensions, kernel has {ndim}")
    return o


# d^m/dr^m exp(-w r^2 / 2) = _se_poly(m, w, r) * exp(-w r^2 / 2)
def _se_poly(m: int, w: float, r):
    if m == 0:
        return np.ones_like(r) if isinstance(r, np.ndarray) else 1.0
    if m == 1:
        return -w * r
    if m == 2:
        return w * (w * r * r - 1.0)
    if m == 3:
        return -(w * w) * r * (w * r * r - 3.0)
    if m == 4:
        r2 = r * r
        return w * w * (w * w * r2 * r2 - 6.0 * w * r2 + 3.0)
    raise OrderError(f"unsupported total derivative order {m}")


def _nn_base(x, xp, s0: float, s2: float):
    """Arcsine kernel value with a domain clamp for round-off overshoot."""
    arg = 2.0 * (s0 + s2 * x * xp)
    arg = arg / np.sqrt(
        (1.0 + 2.0 * (s0 + s2 * x * x)) * (1.0 + 2.0 * (s0 + s2 * xp * xp))
    )
    over = np.max(np.abs(arg)) if np.size(arg) else 0.0
    if over > 1.0 + 1e-12:
        raise KernelDomainError(f"arcsine argument {over!r} outside [-1, 1]")
    return (2.0 / np.pi) * np.arcsin(np.clip(arg, -1.0, 1.0))


def eval_se1d(x, xp, spec: KernelSpec, order) -> np.ndarray:
    """Squared-exponential kernel derivative, broadcasting elementwise."""
    o = _as_order(order, 1)
    p = spec.params()
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    r = x - xp
    sign = -1.0 if o.right[0] % 2 else 1.0
    val = (
        p["gamma2"]
        * np.exp(-0.5 * p["w"] * r * r)
        * sign
        * _se_poly(o.left[0] + o.right[0], p["w"], r)
    )
    return val


def eval_nn1d(x, xp, spec: KernelSpec, order) -> np.ndarray:
    """Arcsine kernel derivative, broadcasting elementwise."""
    o = _as_order(order, 1)
    p = spec.params()
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    ab = (o.left[0], o.right[0])
    if ab == (0, 0):
        return _nn_base(x, xp, p["sigma0_sq"], p["sigma_sq"])
    return _nn_forms.DERIVS[ab](x, xp, p["sigma0_sq"], p["sigma_sq"])


def eval_se2d(x, xp, spec: KernelSpec, order) -> np.ndarray:
    """Anisotropic 2-D squared-exponential derivative.

    Points carry their two coordinates in the trailing axis; leading axes
    broadcast.  Separability makes the mixed partial a product of 1-D
    factors sharing one exponential.
    """
    o = _as_order(order, 2)
    p = spec.params()
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    r1 = x[..., 0] - xp[..., 0]
    r2 = x[..., 1] - xp[..., 1]
    sign = -1.0 if (o.right[0] + o.right[1]) % 2 else 1.0
    val = (
        p["gamma2"]
        * np.exp(-0.5 * (p["w1"] * r1 * r1 + p["w2"] * r2 * r2))
        * sign
        * _se_poly(o.left[0] + o.right[0], p["w1"], r1)
        * _se_poly(o.left[1] + o.right[1], p["w2"], r2)
    )
    return val


_EVALS = {
    KernelFamily.SE1D: eval_se1d,
    KernelFamily.NN1D: eval_nn1d,
    KernelFamily.SE2D: eval_se2d,
}


def kernel_value(spec: KernelSpec, x, xp, order) -> np.ndarray:
    """Evaluate any kernel family elementwise at the given derivative order."""
    return _EVALS[spec.family](x, xp, spec, order)


def _pairwise_args(xa, xb, ndim):
    xa = np.asarray(xa, dtype=float)
    xb = np.asarray(xb, dtype=float)
    if ndim == 1:
        if xa.ndim != 1 or xb.ndim != 1:
            raise ValueError("1-D kernels take flat point arrays")
        return xa[:, None], xb[None, :]
    if xa.ndim != 2 or xa.shape[1] != 2 or xb.ndim != 2 or xb.shape[1] != 2:
        raise ValueError("2-D kernels take (n, 2) point arrays")
    return xa[:, None, :], xb[None, :, :]


def operator_pair_matrix(left: DiffOp, right: DiffOp, spec: KernelSpec, xa, xb):
    """Cross-covariance matrix of ``left`` and ``right`` applied to a kernel.

    Returns the (len(xa), len(xb)) matrix with entries
    ``sum_ij cL_i(x) cR_j(x') d^{oL_i}_x d^{oR_j}_{x'} k(x, x')``.  For the
    squared-exponential families the shared exponential is computed once.
    """
    nd = spec.ndim
    if left.ndim != nd or right.ndim != nd:
        raise OrderError("operator dimension does not match kernel dimension")
    for op in (left, right):
        for _, orders in op.terms:
            for o in orders:
                if o < 0 or o > 2:
                    raise OrderError(f"operator order {o} outside 0..2")
    xa = np.asarray(xa, dtype=float)
    xb = np.asarray(xb, dtype=float)
    n = xa.shape[0]
    m = xb.shape[0]
    if n == 0 or m == 0:
        return np.zeros((n, m))
    Xa, Xb = _pairwise_args(xa, xb, nd)
    p = spec.params()

    def cpair(cl, cr):
        cl = coeff_values(cl, xa)
        cr = coeff_values(cr, xb)
        if isinstance(cl, np.ndarray):
            cl = cl[:, None]
        if isinstance(cr, np.ndarray):
            cr = cr[None, :]
        return cl * cr

    if spec.family == KernelFamily.SE1D:
        w = p["w"]
        r = Xa - Xb
        acc = np.zeros((n, m))
        for cl, ol in left.terms:
            for cr, orr in right.terms:
                sign = -1.0 if orr[0] % 2 else 1.0
                acc += cpair(cl, cr) * sign * _se_poly(ol[0] + orr[0], w, r)
        return p["gamma2"] * np.exp(-0.5 * w * r * r) * acc

    if spec.family == KernelFamily.SE2D:
        w1, w2 = p["w1"], p["w2"]
        r1 = Xa[..., 0] - Xb[..., 0]
        r2 = Xa[..., 1] - Xb[..., 1]
        acc = np.zeros((n, m))
        for cl, ol in left.terms:
            for cr, orr in right.terms:
                sign = -1.0 if (orr[0] + orr[1]) % 2 else 1.0
                acc += (
                    cpair(cl, cr)
                    * sign
                    * _se_poly(ol[0] + orr[0], w1, r1)
                    * _se_poly(ol[1] + orr[1], w2, r2)
                )
        return p["gamma2"] * np.exp(-0.5 * (w1 * r1 * r1 + w2 * r2 * r2)) * acc

    if spec.family == KernelFamily.NN1D:
        s0, s2 = p["sigma0_sq"], p["sigma_sq"]
        acc = np.zeros((n, m))
        for cl, ol in left.terms:
            for cr, orr in right.terms:
                ab = (ol[0], orr[0])
                if ab == (0, 0):
                    val = _nn_base(Xa, Xb, s0, s2)
                else:
                    val = _nn_forms.DERIVS[ab](Xa, Xb, s0, s2)
                acc += cpair(cl, cr) * val
        return acc

    raise ValueError(f"unknown kernel family {spec.family!r}")


def apply_operator_pair(left: DiffOp, right: DiffOp, base: KernelSpec):
    """Return ``f(x, x')`` evaluating ``L_x L'_{x'} k`` as a pairwise matrix."""

    def f(xa, xb):
        return operator_pair_matrix(left, right, base, xa, xb)

    return f


# ---------------------------------------------------------------------------
# Finite-difference validation of the closed forms.

# Richardson-extrapolated central differences; base steps chosen so that
# truncation and round-off stay well below the advertised tolerances.
_FD_STEP = {0: 0.0, 1: 1e-3, 2: 1e-3, 3: 1e-2, 4: 2e-2}
_FD_TOL = {1: 1e-5, 2: 1e-5, 3: 1e-5, 4: 1e-4}

_STENCILS = {
    1: ((-1.0, -0.5), (1.0, 0.5)),
    2: ((-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)),
}


def _fd_once(spec: KernelSpec, x, xp, order: DerivOrder, h: float):
    nd = spec.ndim
    axes = []
    for side in (0, 1):
        orders = order.left if side == 0 else order.right
        for dim in range(nd):
            o = orders[dim]
            if o == 0:
                continue
            axes.append((side, dim, _STENCILS[o], o))
    if not axes:
        return float(kernel_value(spec, x, xp, order))
    total = 0.0
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    zero = DerivOrder.of((0,) * nd, (0,) * nd)
    for combo in itertools.product(*[st for _, _, st, _ in axes]):
        weight = 1.0
        xs = x.copy() if x.ndim else float(x)
        xps = xp.copy() if xp.ndim else float(xp)
        for (side, dim, _, o), (off, wgt) in zip(axes, combo):
            weight *= wgt
            delta = off * h
            if side == 0:
                if nd == 1:
                    xs = xs + delta
                else:
                    xs = xs.copy()
                    xs[dim] += delta
            else:
                if nd == 1:
                    xps = xps + delta
                else:
                    xps = xps.copy()
                    xps[dim] += delta
        total += weight * float(kernel_value(spec, xs, xps, zero))
    scale = 1.0
    for _, _, _, o in axes:
        scale *= h**o
    return total / scale


def fd_kernel_value(spec: KernelSpec, x, xp, order, step: float = None) -> float:
    """Finite-difference estimate of a kernel mixed partial.

    Uses only the plain (0, 0) closed form, so it is an independent oracle
    for the derivative formulas.  Two-level Richardson extrapolation removes
    the leading truncation term.
    """
    o = _as_order(order, FAMILY_NDIM[spec.family])
    if o.total == 0:
        return float(kernel_value(spec, x, xp, o))
    h = step if step is not None else _FD_STEP[o.total]
    d1 = _fd_once(spec, x, xp, o, h)
    d2 = _fd_once(spec, x, xp, o, h / 2.0)
    return (4.0 * d2 - d1) / 3.0


@dataclass(frozen=True)
class DerivativeCheck:
    family: KernelFamily
    order: DerivOrder
    max_rel_err: float
    tol: float
    passed: bool


@dataclass(frozen=True)
class DerivativeReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]


_ORDERS_1D = [
    DerivOrder.of(a, b) for a in range(3) for b in range(3) if a + b > 0
]
_ORDERS_2D = [
    DerivOrder.of(*ab)
    for ab in [
        ((1, 0), (0, 0)),
        ((0, 1), (0, 0)),
        ((2, 0), (0, 0)),
        ((0, 2), (0, 0)),
        ((0, 1), (0, 1)),
        ((0, 1), (2, 0)),
        ((0, 1), (0, 2)),
        ((2, 0), (2, 0)),
        ((2, 0), (0, 2)),
        ((0, 2), (0, 2)),
        ((1, 1), (1, 1)),
    ]
]


def _sample_spec(family: KernelFamily, rng):
    if family == KernelFamily.SE1D:
        return KernelSpec.se1d(
            gamma2=rng.uniform(0.25, 4.0), w=rng.uniform(0.25, 8.0)
        )
    if family == KernelFamily.NN1D:
        return KernelSpec.nn1d(
            sigma0_sq=rng.uniform(0.2, 3.0), sigma_sq=rng.uniform(0.2, 3.0)
        )
    return KernelSpec.se2d(
        gamma2=rng.uniform(0.25, 4.0),
        w1=rng.uniform(0.25, 8.0),
        w2=rng.uniform(0.25, 8.0),
    )


def _sample_points(family: KernelFamily, rng):
    if family == KernelFamily.SE2D:
        return rng.uniform(0.0, 1.2, size=2), rng.uniform(0.0, 1.2, size=2)
    return rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)


def validate_derivatives(n_samples: int = 100, seed: int = 0, evaluator=None) -> DerivativeReport:
    """Check every closed-form derivative against the finite-difference oracle.

    ``evaluator`` defaults to :func:`kernel_value`; test fixtures may inject
    an intentionally corrupted one to verify the reporting path.
    """
    if evaluator is None:
        evaluator = kernel_value
    rng = np.random.default_rng(seed)
    checks = []
    for family in KernelFamily:
        orders = _ORDERS_2D if family == KernelFamily.SE2D else _ORDERS_1D
        for order in orders:
            pairs = []
            for _ in range(n_samples):
                spec = _sample_spec(family, rng)
                x, xp = _sample_points(family, rng)
                closed = float(evaluator(spec, x, xp, order))
                est = fd_kernel_value(spec, x, xp, order)
                pairs.append((closed, est))
            # near roots of the derivative surface a pointwise quotient is
            # ill-posed, so floor the denominator at 2% of the check's scale
            scale = max(max(abs(a), abs(b)) for a, b in pairs)
            floor = max(0.02 * scale, 1e-10)
            worst = max(
                abs(a - b) / max(abs(a), abs(b), floor) for a, b in pairs
            )
            tol = _FD_TOL[order.total]
            checks.append(
                DerivativeCheck(family, order, worst, tol, worst <= tol)
            )
    return DerivativeReport(tuple(checks))
