"""Functions on C^M that are examined one coordinate at a time."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .poly import ComplexPoly
from .product import CanonicalProductSpec, partial_product


class MultiPoly:
    """Sparse polynomial on C^M: ``{(e_1, ..., e_M): coefficient}``."""

    def __init__(self, terms: Mapping[tuple, complex], M: int | None = None):
        clean: dict[tuple, complex] = {}
        for exps, c in terms.items():
            exps = tuple(int(e) for e in exps)
            if any(e < 0 for e in exps):
                raise ValueError("negative exponent")
            c = complex(c)
            if c != 0:
                clean[exps] = clean.get(exps, 0j) + c
        clean = {k: v for k, v in clean.items() if v != 0}
        if M is None:
            if not terms:
                raise ValueError("M is required for the zero polynomial")
            M = len(next(iter(terms)))
        if any(len(k) != M for k in clean):
            raise ValueError("exponent tuples of mixed length")
        self.M = M
        self.terms = clean

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __call__(self, z: Sequence[complex]) -> complex:
        z = [complex(v) for v in z]
        total = 0j
        for exps, c in self.terms.items():
            t = c
            for zi, e in zip(z, exps):
                t *= zi ** e
            total += t
        return total

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        out: dict[tuple, complex] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                k = tuple(a + b for a, b in zip(e1, e2))
                out[k] = out.get(k, 0j) + c1 * c2
        return MultiPoly(out, self.M)

    def partial(self, m: int) -> "MultiPoly":
        """d/dz_m with m 1-based."""
        j = m - 1
        out = {}
        for exps, c in self.terms.items():
            if exps[j] > 0:
                k = list(exps)
                k[j] -= 1
                out[tuple(k)] = c * exps[j]
        return MultiPoly(out, self.M)

    def section(self, m: int, fixed: Sequence[complex]) -> ComplexPoly:
        """Univariate polynomial in w = z_m with the other coordinates fixed."""
        j = m - 1
        fixed = [complex(v) for v in fixed]
        if len(fixed) != self.M - 1:
            raise ValueError(f"section of C^{self.M} needs {self.M - 1} fixed values")
        others = fixed[:j] + [1.0] + fixed[j:]
        deg = max((e[j] for e in self.terms), default=0)
        coef = np.zeros(deg + 1, dtype=complex)
        for exps, c in self.terms.items():
            t = c
            for i, e in enumerate(exps):
                if i != j:
                    t *= others[i] ** e
            coef[exps[j]] += t
        return ComplexPoly(coef)

    def __repr__(self):
        return f"MultiPoly({self.terms!r}, M={self.M})"


def affine_product(forms: Sequence[Sequence[complex]]) -> MultiPoly:
    """Product of affine forms c_0 + c_1 z_1 + ... + c_M z_M."""
    if not forms:
        raise ValueError("need at least one form")
    M = len(forms[0]) - 1
    out = MultiPoly({(0,) * M: 1.0}, M)
    for f in forms:
        if len(f) != M + 1:
            raise ValueError("affine forms of mixed dimension")
        terms = {(0,) * M: f[0]}
        for i in range(M):
            e = [0] * M
            e[i] = 1
            terms[tuple(e)] = f[i + 1]
        out = out * MultiPoly(terms, M)
    return out


@dataclass(frozen=True)
class MultivariateSpec:
    """Either a polynomial on C^M or a coordinatewise canonical product.

    In the second case f(z) = prod_m F_m(z_m), one canonical product per
    coordinate; a section in coordinate m is F_m times a constant.
    """

    M: int
    poly: MultiPoly | None = None
    factors: tuple = field(default=())
    truncation: int = 200

    def __post_init__(self):
        if (self.poly is None) == (not self.factors):
            raise ValueError("give exactly one of poly or factors")
        if self.poly is not None and self.poly.M != self.M:
            raise ValueError("poly dimension does not match M")
        if self.factors and len(self.factors) != self.M:
            raise ValueError("need one canonical factor per coordinate")

    @property
    def kind(self) -> str:
        return "polynomial" if self.poly is not None else "canonical"

    def section_constant(self, m: int, fixed: Sequence[complex]) -> complex:
        """For canonical specs: prod_{j != m} F_j(z_j) at the fixed values."""
        c = 1 + 0j
        others = [f for j, f in enumerate(self.factors) if j != m - 1]
        for f, z in zip(others, fixed):
            N = min(self.truncation, f.available)
            c *= complex(partial_product(f, N, z))
        return c

    def factor(self, m: int) -> CanonicalProductSpec:
        return self.factors[m - 1]
