"""Sparse multivariate polynomials with exact rational-free arithmetic.

Coefficients are floats keyed by exponent tuples.  Only the handful of
operations needed by the closed-form derivative recursion for powers of
the norm are provided: addition, scaling, multiplication by a coordinate
or by the squared norm, partial derivatives, and vectorized evaluation.
"""

from __future__ import annotations

import numpy as np


class MultiPoly:
    """Polynomial sum_e c_e x^e on R^d, stored as {exponent tuple: c_e}."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: dict | None = None):
        self.dim = int(dim)
        self.terms: dict[tuple, float] = {}
        if terms:
            for expo, coeff in terms.items():
                if coeff != 0.0:
                    self.terms[tuple(expo)] = float(coeff)

    @classmethod
    def constant(cls, dim: int, value: float) -> "MultiPoly":
        return cls(dim, {(0,) * dim: value})

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        out = dict(self.terms)
        for expo, coeff in other.terms.items():
            acc = out.get(expo, 0.0) + coeff
            if acc == 0.0:
                out.pop(expo, None)
            else:
                out[expo] = acc
        return MultiPoly(self.dim, out)

    def scale(self, factor: float) -> "MultiPoly":
        if factor == 0.0:
            return MultiPoly(self.dim)
        return MultiPoly(self.dim, {e: c * factor for e, c in self.terms.items()})

    def mul_coord(self, i: int) -> "MultiPoly":
        """Multiply by x_i."""
        out = {}
        for expo, coeff in self.terms.items():
            lifted = list(expo)
            lifted[i] += 1
            out[tuple(lifted)] = coeff
        return MultiPoly(self.dim, out)

    def mul_norm_sq(self) -> "MultiPoly":
        """Multiply by x_1^2 + ... + x_d^2."""
        acc = MultiPoly(self.dim)
        for i in range(self.dim):
            acc = acc + self.mul_coord(i).mul_coord(i)
        return acc

    def partial(self, i: int) -> "MultiPoly":
        out = {}
        for expo, coeff in self.terms.items():
            if expo[i] == 0:
                continue
            lowered = list(expo)
            lowered[i] -= 1
            out[tuple(lowered)] = out.get(tuple(lowered), 0.0) + coeff * expo[i]
        return MultiPoly(self.dim, out)

    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def evaluate(self, x) -> np.ndarray:
        """Evaluate at points of shape (..., dim); returns shape (...)."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.dim:
            raise ValueError(f"points must have last axis {self.dim}")
        out = np.zeros(x.shape[:-1], dtype=np.float64)
        for expo, coeff in self.terms.items():
            term = np.full(x.shape[:-1], coeff)
            for i, p in enumerate(expo):
                if p:
                    term = term * x[..., i] ** p
            out = out + term
        return out

    def __repr__(self):
        body = " + ".join(f"{c:g}*x^{e}" for e, c in sorted(self.terms.items()))
        return f"MultiPoly({body or '0'})"


def monomial_exponents(dim: int, max_degree: int) -> list[tuple]:
    """All exponent tuples with total degree <= max_degree, graded order."""
    out = [(0,) * dim]
    frontier = {(0,) * dim}
    for _ in range(max_degree):
        nxt = set()
        for expo in frontier:
            for i in range(dim):
                lifted = list(expo)
                lifted[i] += 1
                nxt.add(tuple(lifted))
        frontier = nxt
        out.extend(sorted(nxt, reverse=True))
    return out


def multi_factorial(expo: tuple) -> float:
    acc = 1.0
    for p in expo:
        for q in range(2, p + 1):
            acc *= q
    return acc
