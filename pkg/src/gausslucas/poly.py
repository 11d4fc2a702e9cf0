"""Univariate complex polynomials and simultaneous-iteration root finding."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

DEFAULT_TOL = 1e-10
MAX_ITER = 800


class ComplexPoly:
    """Polynomial with complex coefficients in ascending degree order.

    Trailing zero coefficients are stripped on construction, so the last
    stored coefficient is the leading one. The zero polynomial keeps a
    single ``0`` coefficient and has ``degree == -1``.
    """

    __slots__ = ("coef",)

    def __init__(self, coefficients: Sequence[complex]):
        c = np.atleast_1d(np.asarray(coefficients, dtype=complex)).copy()
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else np.zeros(1, dtype=complex)
        self.coef = c

    @property
    def degree(self) -> int:
        return -1 if self.is_zero else len(self.coef) - 1

    @property
    def is_zero(self) -> bool:
        return len(self.coef) == 1 and self.coef[0] == 0

    @property
    def leading(self) -> complex:
        return complex(self.coef[-1])

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        acc = np.zeros_like(z) + self.coef[-1]
        for c in self.coef[-2::-1]:
            acc = acc * z + c
        return acc if acc.ndim else complex(acc)

    def scale(self, z):
        """Sum |c_k| |z|^k, the natural size of a rounding residual at z."""
        r = np.abs(np.asarray(z, dtype=complex))
        acc = np.zeros_like(r) + abs(self.coef[-1])
        for c in self.coef[-2::-1]:
            acc = acc * r + abs(c)
        return acc

    def __mul__(self, other: "ComplexPoly") -> "ComplexPoly":
        return ComplexPoly(np.convolve(self.coef, other.coef))

    def __eq__(self, other):
        return isinstance(other, ComplexPoly) and np.array_equal(self.coef, other.coef)

    def __repr__(self):
        return f"ComplexPoly({self.coef.tolist()!r})"


def poly_from_roots(roots: Sequence[complex], leading: complex = 1.0) -> ComplexPoly:
    if leading == 0:
        raise ValueError("leading coefficient must be non-zero")
    c = np.array([leading], dtype=complex)
    for r in roots:
        # multiply by (z - r)
        c = np.concatenate(([0], c)) - np.concatenate((r * c, [0]))
    return ComplexPoly(c)


def derivative(p: ComplexPoly) -> ComplexPoly:
    if p.degree <= 0:
        return ComplexPoly([0])
    k = np.arange(1, len(p.coef))
    return ComplexPoly(k * p.coef[1:])


@dataclass
class RootInfo:
    converged: bool
    iterations: int
    residuals: np.ndarray
    flags: np.ndarray  # True where the residual contract fails


def _initial_guesses(n: int, radius: float, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    offset = rng.uniform(0.0, 2.0 * np.pi / n)
    ang = offset + 2.0 * np.pi * np.arange(n) / n
    return radius * np.exp(1j * ang)


def _aberth(ratio: Callable[[np.ndarray], np.ndarray], x: np.ndarray,
            max_iter: int, tight: float = 1e-14, loose: float = 1e-9,
            ) -> tuple[np.ndarray, int, bool]:
    n = len(x)
    best = np.inf
    stale = 0
    for it in range(1, max_iter + 1):
        rho = ratio(x)
        if n > 1:
            d = x[:, None] - x[None, :]
            np.fill_diagonal(d, np.inf)
            s = (1.0 / d).sum(axis=1)
            w = rho / (1.0 - rho * s)
        else:
            w = rho
        bad = ~np.isfinite(w)
        if bad.any():
            # iterate sat exactly on a pole of the ratio; nudge it
            w[bad] = 1e-8 * (1.0 + np.abs(x[bad]))
        x = x - w
        step = float(np.max(np.abs(w) / (1.0 + np.abs(x))))
        if step <= tight:
            return x, it, True
        # stagnation at rounding level also counts as converged
        if step < 0.5 * best:
            best, stale = step, 0
        else:
            stale += 1
        if stale >= 8 and step <= loose:
            return x, it, True
    return x, max_iter, False


def _polish(p: ComplexPoly, dp: ComplexPoly, x: np.ndarray, steps: int = 3) -> np.ndarray:
    """Refinement steps kept only where they lower the backward error.

    Two candidates per step: Newton, and r = -c_0 / (c_1 + c_2 r + ...),
    which keeps relative accuracy for roots far below 1 in modulus.
    """
    tiny = np.finfo(float).tiny
    tail = ComplexPoly(p.coef[1:])

    def err(z):
        return np.abs(p(z)) / np.maximum(p.scale(z), tiny)

    best = err(x)
    for _ in range(steps):
        improved = False
        with np.errstate(all="ignore"):
            cands = (x - p(x) / dp(x), -p.coef[0] / tail(x))
        for y in cands:
            e = np.full_like(best, np.inf)
            ok = np.isfinite(y)
            e[ok] = err(y[ok])
            better = e < best
            if better.any():
                x = np.where(better, y, x)
                best = np.where(better, e, best)
                improved = True
        if not improved:
            break
    return x


def fujiwara_bound(p: ComplexPoly) -> float:
    a = p.coef
    n = p.degree
    ratios = [abs(a[n - k] / a[n]) ** (1.0 / k) for k in range(1, n)]
    ratios.append(abs(a[0] / (2 * a[n])) ** (1.0 / n))
    return 2.0 * max(ratios) if ratios else 1.0


def find_roots(p: ComplexPoly, tol: float = DEFAULT_TOL, seed: int = 0,
               max_iter: int = MAX_ITER, full_output: bool = False):
    """All roots of ``p`` (with multiplicity) by Aberth-Ehrlich iteration.

    Starting points sit on a circle whose radius bounds every root modulus,
    rotated by an angle drawn from ``seed``. A root passes the residual
    contract when ``|p(r)| <= tol * sum_k |c_k||r|^k``. Non-convergence emits
    a ``RuntimeWarning``; pass ``full_output=True`` to get a ``RootInfo``.
    """
    n = p.degree
    if n < 1:
        raise ValueError("find_roots needs a polynomial of degree >= 1")
    k = int(np.flatnonzero(p.coef)[0])
    if k:
        # exact roots at 0; relative residuals are meaningless there
        zeros = np.zeros(k, dtype=complex)
        if n == k:
            info = RootInfo(True, 0, np.zeros(k), np.zeros(k, dtype=bool))
            return (zeros, info) if full_output else zeros
        rest, info = find_roots(ComplexPoly(p.coef[k:]), tol, seed, max_iter, full_output=True)
        x = np.concatenate([zeros, rest])
        info = RootInfo(info.converged, info.iterations, np.concatenate([np.zeros(k), info.residuals]),
                        np.concatenate([np.zeros(k, dtype=bool), info.flags]))
        return (x, info) if full_output else x
    if n == 1:
        x = np.array([-p.coef[0] / p.coef[1]])
        it, conv = 0, True
    else:
        dp = derivative(p)

        def ratio(z):
            return p(z) / dp(z)

        x, it, conv = _aberth(ratio, _initial_guesses(n, fujiwara_bound(p), seed), max_iter)
        x = _polish(p, dp, x)
    res = np.abs(p(x)) / np.maximum(p.scale(x), np.finfo(float).tiny)
    flags = res > tol
    if not conv and not flags.any():
        # out of iterations but every residual is fine; accept unless two
        # estimates sit on one simple root, which would break the Vieta sum
        vieta = abs(x.sum() + p.coef[-2] / p.coef[-1])
        conv = vieta <= 1e-8 * (1.0 + np.abs(x).sum())
    if flags.any():
        warnings.warn(f"find_roots: {int(flags.sum())} roots fail the residual "
                      f"contract (max {res.max():.3g})", RuntimeWarning, stacklevel=2)
        conv = False
    elif not conv:
        warnings.warn("find_roots: iteration limit reached", RuntimeWarning, stacklevel=2)
    if full_output:
        return x, RootInfo(conv, it, res, flags)
    return x


def critical_points_of_product(roots: Sequence[complex], q: int = 0, seed: int = 0,
                               max_iter: int = MAX_ITER, full_output: bool = False):
    """Zeros of d/dz [z^q prod (1 - z/roots)] without expanding coefficients.

    Expanded coefficients of long products lose their roots to rounding,
    so the Aberth ratio is formed from logarithmic derivatives over the
    distinct roots instead. Repeated roots of multiplicity k contribute
    k - 1 copies directly, and ``q >= 2`` contributes ``q - 1`` zeros.
    """
    roots = np.asarray(roots, dtype=complex)
    u, k = np.unique(roots, return_counts=True)
    fixed = [complex(0)] * max(q - 1, 0)
    for ui, ki in zip(u, k):
        fixed.extend([complex(ui)] * (int(ki) - 1))
    n = len(u) if q > 0 else len(u) - 1
    if n <= 0:
        out = np.array(fixed, dtype=complex)
        info = RootInfo(True, 0, np.zeros(len(out)), np.zeros(len(out), bool))
        return (out, info) if full_output else out
    kf = k.astype(float)

    def ratio(z):
        inv = 1.0 / (z[:, None] - u[None, :])
        l1 = inv.sum(axis=1)
        lk = (kf * inv).sum(axis=1)
        dlk = -(kf * inv * inv).sum(axis=1)
        if q > 0:
            a = q + z * lk
            da = lk + z * dlk
        else:
            a, da = lk, dlk
        return a / (l1 * a + da)

    radius = max(float(np.abs(u).max()), 1e-300)
    x0 = _initial_guesses(n, radius, seed)
    x, it, conv = _aberth(ratio, x0, max_iter)
    rel = np.abs(ratio(x)) / (1.0 + np.abs(x))
    flags = ~np.isfinite(rel) | (rel > 1e-9)
    rel = np.where(np.isfinite(rel), rel, 0.0)
    if not conv:
        warnings.warn("critical_points_of_product: Aberth iteration hit max_iter",
                      RuntimeWarning, stacklevel=2)
    out = np.concatenate([np.array(fixed, dtype=complex), x])
    res = np.concatenate([np.zeros(len(fixed)), rel])
    fl = np.concatenate([np.zeros(len(fixed), bool), flags])
    if full_output:
        return out, RootInfo(conv and not fl.any(), it, res, fl)
    return out
