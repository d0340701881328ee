"""Time-stepping schemes encoded as structured block covariances.

Each builder writes the discrete time levels (and, for Runge-Kutta, the
stage values) as linear differential-operator combinations of a small set of
independent GP priors.  The joint covariance of any two labels then follows
by bilinearity, which is all a :class:`~gppde.gp.BlockKernel` needs.  The
:class:`LatentModel` container holds that output map so problem definitions
can append derived labels (boundary derivative rows, periodic-difference
functionals) before freezing the kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from .errors import TableauError
from .gp import BlockKernel, EntryTerm, Functional
from .kernels import KernelSpec
from .operators import DiffOp


@dataclass(frozen=True)
class LmmScheme:
    """Linear multistep scheme u^n = sum_i alpha_i u^{n-i} + dt sum_i beta_i L u^{n-i}.

    ``beta`` has m+1 entries (beta_0 multiplies the implicit level).  ``tau``
    records where the scheme's latent lives inside the step (0 explicit, 1
    implicit, 1/2 midpoint); it is metadata, the block structure below is
    what realizes it.
    """

    m: int
    alpha: tuple
    beta: tuple
    tau: float

    def __post_init__(self):
        if len(self.alpha) != self.m or len(self.beta) != self.m + 1:
            raise ValueError("coefficient lengths inconsistent with step count")

    @staticmethod
    def forward_euler() -> "LmmScheme":
        return LmmScheme(1, (1.0,), (0.0, 1.0), 0.0)

    @staticmethod
    def backward_euler() -> "LmmScheme":
        return LmmScheme(1, (1.0,), (1.0, 0.0), 1.0)

    @staticmethod
    def trapezoidal() -> "LmmScheme":
        return LmmScheme(1, (1.0,), (0.5, 0.5), 0.5)


@dataclass(frozen=True)
class ButcherTableau:
    """Implicit Runge-Kutta tableau (a, b, tau); only q = 2 is supported."""

    q: int
    a: tuple
    b: tuple
    tau: tuple

    def __post_init__(self):
        if len(self.a) != self.q or any(len(row) != self.q for row in self.a):
            raise TableauError("tableau matrix shape inconsistent with q")
        if len(self.b) != self.q or len(self.tau) != self.q:
            raise TableauError("tableau weights inconsistent with q")

    @staticmethod
    def gauss_legendre_2() -> "ButcherTableau":
        s = math.sqrt(3.0) / 6.0
        return ButcherTableau(
            q=2,
            a=((0.25, 0.25 - s), (0.25 + s, 0.25)),
            b=(0.5, 0.5),
            tau=(0.5 - s, 0.5 + s),
        )

    @staticmethod
    def trapezoidal_rk() -> "ButcherTableau":
        return ButcherTableau(
            q=2, a=((0.0, 0.0), (0.5, 0.5)), b=(0.5, 0.5), tau=(0.0, 1.0)
        )


@dataclass(frozen=True)
class LatentModel:
    """Labels expressed as operator combinations of independent priors.

    ``outputs`` maps label -> {prior key -> DiffOp}; ``functionals`` holds
    one-row constraint labels.  ``order`` fixes assembly/display order.
    """

    priors: Mapping
    outputs: Mapping
    order: tuple
    functionals: Mapping = field(default_factory=dict)

    def add_output(self, label: str, opmap: Mapping) -> "LatentModel":
        outputs = dict(self.outputs)
        outputs[label] = dict(opmap)
        return replace(self, outputs=outputs, order=self.order + (label,))

    def add_functional(self, label: str, base: str, points, weights) -> "LatentModel":
        functionals = dict(self.functionals)
        functionals[label] = Functional(
            base, np.asarray(points, dtype=float), np.asarray(weights, dtype=float)
        )
        return replace(self, functionals=functionals, order=self.order + (label,))

    def reordered(self, order) -> "LatentModel":
        if set(order) != set(self.order):
            raise ValueError("reordering must keep the same labels")
        return replace(self, order=tuple(order))

    def kernel(self, noise: Mapping = None) -> BlockKernel:
        """Freeze into a block kernel; cross-entries follow by bilinearity."""
        entries = {}
        pointwise = [lbl for lbl in self.order if lbl in self.outputs]
        for i, a in enumerate(pointwise):
            for b in pointwise[i:]:
                terms = tuple(
                    EntryTerm(key, self.outputs[a][key], self.outputs[b][key])
                    for key in self.outputs[a]
                    if key in self.outputs[b]
                )
                if terms:
                    entries[(a, b)] = terms
        return BlockKernel(
            labels=tuple(self.order),
            entries=entries,
            priors=dict(self.priors),
            noise=dict(noise or {}),
            functionals=dict(self.functionals),
        )


def _merge(opmap: dict, key: str, op: DiffOp):
    opmap[key] = (opmap[key] + op) if key in opmap else op.pruned()


def lmm_model(scheme: LmmScheme, L: DiffOp, priors, dt: float) -> LatentModel:
    """Latent model for a linear multistep step of u_t = L u.

    One independent prior per history level i = 1..m, placed on the scheme's
    shifted latent; the observable levels are

        u^n     = sum_i (alpha_i I + dt beta_i L) g_i
        u^{n-i} = (I - dt beta_0 L) g_i
    """
    priors = list(priors)
    if len(priors) != scheme.m:
        raise ValueError(f"need {scheme.m} priors, got {len(priors)}")
    nd = L.ndim
    ident = DiffOp.identity(nd)
    P = (ident + L.scale(-dt * scheme.beta[0])).pruned()
    outputs = {"u_n": {}}
    keys = [f"g{i}" for i in range(1, scheme.m + 1)]
    order = ["u_n"]
    for i, key in enumerate(keys, start=1):
        Q = (ident.scale(scheme.alpha[i - 1]) + L.scale(dt * scheme.beta[i])).pruned()
        _merge(outputs["u_n"], key, Q)
        lbl = f"u_nm{i}"
        outputs[lbl] = {key: P}
        order.append(lbl)
    return LatentModel(
        priors=dict(zip(keys, priors)), outputs=outputs, order=tuple(order)
    )


def lmm_blocks(scheme: LmmScheme, L: DiffOp, priors, dt: float) -> BlockKernel:
    return lmm_model(scheme, L, priors, dt).kernel()


def burgers_backward_euler_model(mu_prev, nu: float, dt: float, base: KernelSpec) -> LatentModel:
    """Backward-Euler step of u_t + u u_x = nu u_xx, advection linearized
    at the previous mean: u^{n-1} = (I + dt mu(x) d/dx - nu dt d2/dx2) u^n.
    """
    ident = DiffOp.identity()
    if callable(mu_prev):
        # the optimizer evaluates the kernel thousands of times at the same
        # fixed training inputs, so memoize the drift on the argument array
        cache: dict = {}

        def drift(x, _f=mu_prev, _dt=dt, _cache=cache):
            x = np.asarray(x, dtype=float)
            key = x.tobytes()
            got = _cache.get(key)
            if got is None:
                got = _dt * np.asarray(_f(x), dtype=float)
                _cache[key] = got
            return got

    else:
        drift = dt * float(mu_prev)
    P = DiffOp(((1.0, (0,)), (drift, (1,)), (-nu * dt, (2,))))
    return LatentModel(
        priors={"g": base},
        outputs={"u_n": {"g": ident}, "u_nm1": {"g": P}},
        order=("u_n", "u_nm1"),
    )


def burgers_backward_euler_blocks(mu_prev, nu: float, dt: float, base: KernelSpec) -> BlockKernel:
    return burgers_backward_euler_model(mu_prev, nu, dt, base).kernel()


def rk_model(tableau: ButcherTableau, L: DiffOp, priors: Mapping, dt: float) -> LatentModel:
    """Latent model for one implicit Runge-Kutta step of u_t = L u.

    Stage latents get keys ``s1``, ``s2``; the step endpoint gets ``f``.  A
    stage with abscissa 1 coincides with the endpoint and aliases its prior,
    so ``priors`` must supply exactly the distinct keys.  Labels:

        u_np1          endpoint value
        u_tau2, u_tau1 stage values
        u3             endpoint minus dt * sum_i b_i L (stage i)
        u2, u1         stage i minus dt * sum_j a_ij L (stage j)

    u3, u2, u1 all equal u^n in the scheme; their distinct covariance
    structure is what couples the stages during training.
    """
    if tableau.q != 2:
        raise TableauError(f"only two-stage tableaus are supported, got q={tableau.q}")
    keys = []
    for i, tau in enumerate(tableau.tau, start=1):
        keys.append("f" if abs(tau - 1.0) < 1e-12 else f"s{i}")
    want = sorted(set(keys + ["f"]))
    if sorted(priors.keys()) != want:
        raise ValueError(f"priors must have keys {want}, got {sorted(priors.keys())}")
    nd = L.ndim
    ident = DiffOp.identity(nd)
    outputs = {
        "u_np1": {"f": ident},
        "u_tau2": {keys[1]: ident},
        "u_tau1": {keys[0]: ident},
    }
    u3 = {"f": ident}
    for i, key in enumerate(keys):
        _merge(u3, key, L.scale(-dt * tableau.b[i]))
    outputs["u3"] = u3
    for i in (1, 0):
        ui = {keys[i]: ident}
        for j, key in enumerate(keys):
            _merge(ui, key, L.scale(-dt * tableau.a[i][j]))
        outputs[f"u{i + 1}"] = ui
    order = ("u_np1", "u_tau2", "u_tau1", "u3", "u2", "u1")
    return LatentModel(priors=dict(priors), outputs=outputs, order=order)


def rk_blocks(tableau: ButcherTableau, L: DiffOp, priors: Mapping, dt: float) -> BlockKernel:
    return rk_model(tableau, L, priors, dt).kernel()


def wave_trapezoidal_model(dt: float, ku: KernelSpec, kv: KernelSpec) -> LatentModel:
    """Trapezoidal step of the first-order system u_t = v, v_t = u_xx.

    Midpoint latents g_u, g_v carry the priors; both time levels are

        u^{n or n-1} = g_u +/- dt/2 g_v
        v^{n or n-1} = g_v +/- dt/2 d2/dx2 g_u
    """
    ident = DiffOp.identity()
    d2 = DiffOp.partial(2)
    half = 0.5 * dt
    outputs = {
        "u_n": {"gu": ident, "gv": ident.scale(half)},
        "v_n": {"gu": d2.scale(half), "gv": ident},
        "u_nm1": {"gu": ident, "gv": ident.scale(-half)},
        "v_nm1": {"gu": d2.scale(-half), "gv": ident},
    }
    return LatentModel(
        priors={"gu": ku, "gv": kv},
        outputs=outputs,
        order=("u_n", "v_n", "u_nm1", "v_nm1"),
    )


def wave_trapezoidal_blocks(dt: float, ku: KernelSpec, kv: KernelSpec) -> BlockKernel:
    return wave_trapezoidal_model(dt, ku, kv).kernel()
