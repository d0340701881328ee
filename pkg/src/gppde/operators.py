"""Linear differential operators with constant or space-varying coefficients.

A :class:`DiffOp` is a sum of terms ``coeff * d^orders``, where ``orders``
gives the derivative order along each space dimension and ``coeff`` is either
a float or a callable evaluated at the points of the argument the operator
acts on.  Operators of this form are what the time-stepping schemes apply to
the left and right arguments of a covariance kernel.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

Coefficient = Union[float, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class DiffOp:
    """Sum of differential terms acting on one argument of a kernel.

    Parameters
    ----------
    terms : tuple of (coefficient, orders)
        ``orders`` is a tuple with one derivative order per space dimension.
        Float coefficients are constants; callables receive the evaluation
        points of the argument the operator is applied to.
    """

    terms: tuple

    def __post_init__(self):
        if not self.terms:
            raise ValueError("operator needs at least one term")
        ndim = len(self.terms[0][1])
        for _, orders in self.terms:
            if len(orders) != ndim:
                raise ValueError("inconsistent term dimensions")

    @property
    def ndim(self) -> int:
        return len(self.terms[0][1])

    @staticmethod
    def identity(ndim: int = 1) -> "DiffOp":
        return DiffOp(((1.0, (0,) * ndim),))

    @staticmethod
    def partial(orders, coeff: Coefficient = 1.0) -> "DiffOp":
        """Single term ``coeff * d^orders``; ``orders`` may be an int in 1-D."""
        if isinstance(orders, int):
            orders = (orders,)
        return DiffOp(((coeff, tuple(orders)),))

    def scale(self, c: float) -> "DiffOp":
        if c == 0.0:
            return DiffOp(((0.0, (0,) * self.ndim),))
        out = []
        for coeff, orders in self.terms:
            if callable(coeff):
                out.append(((lambda f: lambda x: c * np.asarray(f(x)))(coeff), orders))
            else:
                out.append((c * coeff, orders))
        return DiffOp(tuple(out))

    def __add__(self, other: "DiffOp") -> "DiffOp":
        if self.ndim != other.ndim:
            raise ValueError("operator dimensions differ")
        return DiffOp(self.terms + other.terms).pruned()

    def compose(self, inner: "DiffOp") -> "DiffOp":
        """Composition ``self(inner(.))`` for constant-coefficient operators.

        Variable coefficients would require product-rule expansion, which no
        scheme here needs, so they are rejected.
        """
        if self.ndim != inner.ndim:
            raise ValueError("operator dimensions differ")
        out = []
        for c1, o1 in self.terms:
            for c2, o2 in inner.terms:
                if callable(c1) or callable(c2):
                    raise ValueError("cannot compose variable-coefficient operators")
                out.append((c1 * c2, tuple(a + b for a, b in zip(o1, o2))))
        return DiffOp(tuple(out)).pruned()

    def pruned(self) -> "DiffOp":
        """Merge constant terms with equal orders and drop exact zeros."""
        merged = {}
        order = []
        for coeff, orders in self.terms:
            if callable(coeff):
                key = (id(coeff), orders)
            else:
                key = orders
            if key in merged and not callable(coeff):
                merged[key] = (merged[key][0] + coeff, orders)
            else:
                merged[key] = (coeff, orders)
                order.append(key)
        out = tuple(
            merged[k]
            for k in order
            if callable(merged[k][0]) or merged[k][0] != 0.0
        )
        if not out:
            out = ((0.0, (0,) * self.ndim),)
        return DiffOp(out)


def coeff_values(coeff: Coefficient, x: np.ndarray):
    """Evaluate a term coefficient at points ``x`` (floats pass through)."""
    if callable(coeff):
        return np.asarray(coeff(x), dtype=float)
    return coeff
