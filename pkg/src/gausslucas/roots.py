"""Non-zero root sequences of canonical products.

A family is either an explicit finite list or a parametric rule
``|gamma_n| = c * m**alpha`` with a repeating unit-modulus phase cycle.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

PHASE_TOL = 1e-12
GENUS_REL_TOL = 1e-6


class IndexOutOfRange(IndexError):
    pass


class NoGenusFound(ValueError):
    pass


@dataclass(frozen=True)
class RootSequenceFamily:
    """Generator of the roots gamma_1, gamma_2, ...

    ``shell`` controls how the modulus index is derived for parametric
    families: ``"cycle"`` uses ``m = ceil(n / k)`` with ``k`` the phase-cycle
    length, so each modulus shell carries one full phase cycle; ``"index"``
    uses ``m = n``.
    """

    kind: str = "parametric"
    terms: tuple = ()
    alpha: float = 1.0
    c: float = 1.0
    phases: tuple = (1.0 + 0j,)
    count_limit: int = 1000
    shell: str = "cycle"

    def __post_init__(self):
        if self.kind not in ("explicit-list", "parametric"):
            raise ValueError(f"unknown family kind {self.kind!r}")
        object.__setattr__(self, "terms", tuple(complex(t) for t in self.terms))
        object.__setattr__(self, "phases", tuple(complex(t) for t in self.phases))
        if self.kind == "explicit-list":
            if any(t == 0 for t in self.terms):
                raise ValueError("roots of the canonical factor must be non-zero")
            return
        if self.c <= 0:
            raise ValueError("modulus scale c must be positive")
        if self.alpha <= 0:
            raise ValueError("modulus exponent alpha must be positive (|gamma_n| -> inf)")
        if not self.phases:
            raise ValueError("phase cycle must be non-empty")
        for ph in self.phases:
            if abs(abs(ph) - 1.0) > PHASE_TOL:
                raise ValueError(f"phase {ph!r} is not unit modulus")
        if self.shell not in ("cycle", "index"):
            raise ValueError(f"unknown shell convention {self.shell!r}")
        if self.count_limit < 1:
            raise ValueError("count_limit must be positive")

    @classmethod
    def explicit(cls, terms: Sequence[complex]) -> "RootSequenceFamily":
        terms = tuple(terms)
        return cls(kind="explicit-list", terms=terms, count_limit=max(len(terms), 1))

    @property
    def size(self) -> int:
        """Number of enumerable roots."""
        if self.kind == "explicit-list":
            return len(self.terms)
        return self.count_limit

    def modulus_index(self, n: int) -> int:
        if self.shell == "index":
            return n
        return -(-n // len(self.phases))

    def roots(self, n: int | None = None) -> np.ndarray:
        """Vector of gamma_1..gamma_n (all enumerable roots when ``n`` is None)."""
        size = self.size
        n = size if n is None else n
        if n > size:
            raise IndexOutOfRange(f"family enumerates {size} roots, asked for {n}")
        if self.kind == "explicit-list":
            return np.array(self.terms[:n], dtype=complex)
        idx = np.arange(1, n + 1)
        if self.shell == "index":
            m = idx
        else:
            m = -(-idx // len(self.phases))
        ph = np.array(self.phases, dtype=complex)[(idx - 1) % len(self.phases)]
        return self.c * m.astype(float) ** self.alpha * ph


def nth_root(family: RootSequenceFamily, n: int) -> complex:
    """Return gamma_n (1-based)."""
    if n < 1 or n > family.size:
        raise IndexOutOfRange(f"index {n} outside 1..{family.size}")
    if family.kind == "explicit-list":
        return family.terms[n - 1]
    # same numpy arithmetic as the vectorised path, so both agree bit for bit
    m = np.array([family.modulus_index(n)], dtype=float)
    ph = np.array([family.phases[(n - 1) % len(family.phases)]], dtype=complex)
    return complex((family.c * m ** family.alpha * ph)[0])


def signed_blocks(n_max: int, block: int) -> RootSequenceFamily:
    """Roots +-1..+-n_max listed positives-first in blocks.

    With block=50: 1..50, -1..-50, 51..100, -51..-100, ...
    """
    if block < 1 or n_max < 1:
        raise ValueError("block and n_max must be positive")
    out: list[complex] = []
    for start in range(1, n_max + 1, block):
        stop = min(start + block, n_max + 1)
        out.extend(complex(k) for k in range(start, stop))
        out.extend(complex(-k) for k in range(start, stop))
    return RootSequenceFamily.explicit(out)


def paired(n_max: int) -> RootSequenceFamily:
    """The zeros of sin(pi z)/(pi z): 1, -1, 2, -2, ..., n_max, -n_max."""
    return RootSequenceFamily(
        kind="parametric", alpha=1.0, c=1.0, phases=(1, -1), count_limit=2 * n_max
    )


@dataclass(frozen=True)
class GenusEstimate:
    p: int
    method: str
    tail_evidence: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.method == "declared-exponent"


def _declared_genus(alpha: float) -> int:
    # smallest integer p >= 0 with (1 + p) * alpha > 1
    p = 0
    while (1 + p) * alpha <= 1:
        p += 1
    return p


def _doubling_accepts(moduli: np.ndarray, p: int, n0: int) -> tuple[bool, list]:
    partial = np.cumsum(moduli ** (-(1.0 + p)))
    evidence = []
    run = 0
    n = n0
    while 2 * n <= len(partial):
        s_n, s_2n = float(partial[n - 1]), float(partial[2 * n - 1])
        evidence.append((n, s_n))
        run = run + 1 if s_2n - s_n < GENUS_REL_TOL * (1.0 + s_n) else 0
        if run >= 2:
            evidence.append((2 * n, s_2n))
            return True, evidence
        n *= 2
    return False, evidence


def estimate_genus(
    family: RootSequenceFamily, p_max: int = 8, method: str = "auto"
) -> GenusEstimate:
    """Smallest p with sum |gamma_n|^-(1+p) finite.

    Parametric families use the closed-form p-series threshold unless
    ``method="numeric"``; explicit lists (and forced numeric runs) use the
    doubling heuristic, whose answer is an estimate only.
    """
    if p_max < 0:
        raise ValueError("p_max must be >= 0")
    if family.kind == "parametric" and method in ("auto", "declared"):
        p = _declared_genus(family.alpha)
        if p > p_max:
            raise NoGenusFound(f"declared exponent forces p={p} > p_max={p_max}")
        return GenusEstimate(p=p, method="declared-exponent",
                             tail_evidence={"alpha": family.alpha})
    moduli = np.abs(family.roots())
    if family.kind == "explicit-list":
        # finite list: every tail beyond the end is exactly zero
        ev = {0: [(len(moduli), float(np.sum(moduli ** -1.0)) if len(moduli) else 0.0)]}
        return GenusEstimate(p=0, method="numeric-heuristic", tail_evidence=ev)
    evidence = {}
    for p in range(p_max + 1):
        ok, ev = _doubling_accepts(moduli, p, n0=16)
        evidence[p] = ev
        if ok:
            return GenusEstimate(p=p, method="numeric-heuristic", tail_evidence=evidence)
    raise NoGenusFound(f"no p <= {p_max} passes the doubling heuristic")


@dataclass(frozen=True)
class ProjectionRow:
    r: int
    projection: str
    nonneg_sum: float
    nonneg_increment: float
    diverging: bool | None
    terms_to_zero: bool


@dataclass(frozen=True)
class RearrangeabilityDiagnostic:
    p: int
    n_probe: int
    rows: tuple
    verdict: str
    # literal reading of the divergence hypothesis: one projection vs all
    divergence_any: bool
    divergence_all: bool
    notes: tuple = ()


_DIVERGE_INC = 1e-2
_CONVERGE_INC = 1e-6


def _classify(inc: float, total: float) -> bool | None:
    if inc >= _DIVERGE_INC:
        return True
    if inc <= _CONVERGE_INC * (1.0 + total):
        return False
    return None


def rearrangeability_diagnostic(
    family: RootSequenceFamily, p: int, n_probe: int = 1000
) -> RearrangeabilityDiagnostic:
    """Empirical check that each gamma_n^-r (r=1..p) can be reordered to sum to 0.

    Each real series Re and Im of gamma_n^-r is judged separately: both
    signed parts diverging, or both converging with total ~ 0, counts as
    rearrangeable to zero. This is a diagnostic, not a proof.
    """
    if p == 0:
        return RearrangeabilityDiagnostic(
            p=0, n_probe=n_probe, rows=(), verdict="likely-rearrangeable",
            divergence_any=False, divergence_all=False,
            notes=("genus zero: condition is vacuous",),
        )
    n_probe = min(n_probe, family.size)
    half = max(n_probe // 2, 1)
    inv = 1.0 / family.roots(n_probe)
    rows = []
    series_ok = []
    any_bad = False
    for r in range(1, p + 1):
        w = inv ** r
        for part_name, x in (("Re", w.real), ("Im", w.imag)):
            parts = {}
            for sign, label in ((1.0, part_name), (-1.0, "-" + part_name)):
                y = np.maximum(sign * x, 0.0)
                total = float(np.sum(y))
                inc = total - float(np.sum(y[:half]))
                head_max = float(np.abs(x[:half]).max(initial=0.0))
                tail_max = float(np.abs(x[half:]).max(initial=0.0))
                to_zero = tail_max <= 0.5 * head_max or head_max == 0.0
                div = _classify(inc, total)
                rows.append(ProjectionRow(r, label, total, inc, div, to_zero))
                parts[label] = (div, total, to_zero)
            (d_pos, s_pos, z_pos), (d_neg, s_neg, _) = parts.values()
            if not z_pos:
                any_bad = True
                series_ok.append(False)
            elif d_pos is True and d_neg is True:
                series_ok.append(True)
            elif d_pos is False and d_neg is False:
                ok = abs(s_pos - s_neg) <= 1e-9 * (1.0 + s_pos + s_neg)
                series_ok.append(ok)
                any_bad |= not ok
            elif (d_pos is True and d_neg is False) or (d_pos is False and d_neg is True):
                series_ok.append(False)
                any_bad = True
            else:
                series_ok.append(None)
    if any_bad:
        verdict = "likely-not"
    elif all(s is True for s in series_ok):
        verdict = "likely-rearrangeable"
    else:
        verdict = "inconclusive"
    divs = [row.diverging is True for row in rows]
    return RearrangeabilityDiagnostic(
        p=p, n_probe=n_probe, rows=tuple(rows), verdict=verdict,
        divergence_any=any(divs), divergence_all=all(divs),
        notes=("operative criterion: each gamma^-r reorderable to sum 0; "
               "whether divergence is needed for one or all projections is unresolved",),
    )
