"""Truncated canonical products and their power-sum corrections.

For roots delta_1, delta_2, ... taken in a fixed order::

    f_N(z) = z^q prod_{n<=N} (1 - z/delta_n)
    V_N(r) = sum_{n<=N} delta_n^-r
    h_N(z) = sum_{r<=p} V_N(r) z^r / r
    g_N(z) = f_N(z) exp(h_N(z))
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .roots import RootSequenceFamily, estimate_genus

OVERFLOW_CAP = 1e150


class LogValue(NamedTuple):
    """A complex number stored as (log|w|, arg w), for values past the overflow cap."""

    log_abs: float
    arg: float

    def __complex__(self):
        return cmath.rect(math.exp(self.log_abs), self.arg)


@dataclass(frozen=True)
class CanonicalProductSpec:
    q: int = 0
    p: int | None = None
    family: RootSequenceFamily = field(
        default_factory=lambda: RootSequenceFamily.explicit(()))
    ordering: object = None  # a RearrangementPlan, or None for the family's own order

    def __post_init__(self):
        if self.q < 0:
            raise ValueError("q must be >= 0")
        if self.p is None:
            object.__setattr__(self, "p", estimate_genus(self.family).p)
        elif self.p < 0:
            raise ValueError("p must be >= 0")

    @property
    def available(self) -> int:
        if self.ordering is not None:
            return len(self.ordering.permutation_prefix)
        return self.family.size

    def roots(self, N: int) -> np.ndarray:
        """delta_1..delta_N in the declared order.

        Explicit lists are finite products, so N past their end means the
        whole list.
        """
        if self.ordering is not None:
            idx = np.asarray(self.ordering.permutation_prefix[:N], dtype=int)
            if N > len(self.ordering.permutation_prefix):
                raise IndexError(f"plan covers {len(idx)} roots, asked for {N}")
            return self.family.roots(int(idx.max(initial=0)))[idx - 1]
        if self.family.kind == "explicit-list":
            N = min(N, self.family.size)
        return self.family.roots(N)


@dataclass(frozen=True)
class PowerSumLedger:
    p: int
    N: int = 0
    V: tuple = ()
    checkpoints: tuple = ()

    def __post_init__(self):
        if not self.V:
            object.__setattr__(self, "V", (0j,) * self.p)

    def append(self, delta: complex) -> "PowerSumLedger":
        inv = 1.0 / complex(delta)
        V = tuple(v + inv ** (r + 1) for r, v in enumerate(self.V))
        return PowerSumLedger(self.p, self.N + 1, V, self.checkpoints)

    def extend(self, deltas: Sequence[complex], every: int = 0) -> "PowerSumLedger":
        led = self
        cps = list(self.checkpoints)
        for d in deltas:
            led = led.append(d)
            if every and led.N % every == 0:
                cps.append((led.N, led.max_abs()))
        return PowerSumLedger(led.p, led.N, led.V, tuple(cps))

    def max_abs(self) -> float:
        return max((abs(v) for v in self.V), default=0.0)

    @classmethod
    def from_roots(cls, roots: Sequence[complex], p: int) -> "PowerSumLedger":
        """Recompute V_N from scratch (vectorised)."""
        roots = np.asarray(roots, dtype=complex)
        inv = 1.0 / roots
        V = tuple(complex(np.sum(inv ** r)) for r in range(1, p + 1))
        return cls(p, len(roots), V)


def _gaussian_mul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _exact_partial_product(roots, z, q):
    # Gaussian-rational arithmetic; roots and z must be exactly representable
    zr = (Fraction(z.real), Fraction(z.imag))
    acc = (Fraction(1), Fraction(0))
    for _ in range(q):
        acc = _gaussian_mul(acc, zr)
    for d in roots:
        dr = (Fraction(d.real), Fraction(d.imag))
        den = dr[0] ** 2 + dr[1] ** 2
        # z / d = z * conj(d) / |d|^2
        ratio = _gaussian_mul(zr, (dr[0] / den, -dr[1] / den))
        acc = _gaussian_mul(acc, (1 - ratio[0], -ratio[1]))
    return acc


def _product(roots: np.ndarray, z: complex, q: int, log_shift: float = 0.0,
             arg_shift: float = 0.0):
    """Left-to-right product with rescaling past OVERFLOW_CAP."""
    acc = complex(1.0)
    scale_log = 0.0
    for d in np.asarray(roots, dtype=complex).tolist():
        acc *= 1.0 - z / d
        if acc == 0:
            return 0j
        a = abs(acc)
        if a > OVERFLOW_CAP or a < 1.0 / OVERFLOW_CAP:
            scale_log += math.log(a)
            # componentwise: dividing by a subnormal via its reciprocal overflows
            acc = complex(acc.real / a, acc.imag / a)
    if q:
        if z == 0:
            return 0j
        scale_log += q * math.log(abs(z))
        acc *= cmath.exp(1j * q * cmath.phase(z))
    total = scale_log + log_shift
    if total == 0.0 and arg_shift == 0.0:
        return acc
    if abs(total) < math.log(OVERFLOW_CAP):
        return acc * cmath.exp(complex(total, arg_shift))
    return LogValue(total + math.log(abs(acc)), cmath.phase(acc) + arg_shift)


def partial_product(spec: CanonicalProductSpec, N: int, z: complex,
                    exact: bool = False):
    """z^q prod_{n<=N}(1 - z/delta_n), multiplied in the declared order.

    Returns a ``LogValue`` when the magnitude leaves [1e-150, 1e150].
    ``exact=True``
    evaluates in Gaussian rationals and returns a pair of Fractions.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    roots = spec.roots(N) if N else np.zeros(0, complex)
    z = complex(z)
    if exact:
        return _exact_partial_product(roots, z, spec.q)
    return _product(roots, z, spec.q)


def h_N(spec: CanonicalProductSpec, ledger: PowerSumLedger, z: complex) -> complex:
    z = complex(z)
    return sum((ledger.V[r - 1] * z ** r / r for r in range(1, spec.p + 1)), 0j)


def corrected_partial_product(spec: CanonicalProductSpec, N: int, z: complex):
    """f_N(z) exp(h_N(z)); the exponential factor is applied in log form."""
    roots = spec.roots(N) if N else np.zeros(0, complex)
    h = h_N(spec, PowerSumLedger.from_roots(roots, spec.p), z)
    return _product(roots, complex(z), spec.q, log_shift=h.real, arg_shift=h.imag)


def convergence_probe(spec: CanonicalProductSpec, z: complex,
                      schedule: Sequence[int], corrected: bool = False) -> list[float]:
    """|F_N(z) - F_2N(z)| for each N in ``schedule``.

    F is f_N, or g_N when ``corrected``. Nothing here certifies a rate;
    the deltas are empirical evidence only.
    """
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("schedule must be increasing")
    ev = corrected_partial_product if corrected else partial_product
    out = []
    for N in schedule:
        out.append(abs(complex(ev(spec, N, z)) - complex(ev(spec, 2 * N, z))))
    return out
