"""Greedy reordering of roots so that every power sum V_N(r) tends to zero."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .roots import IndexOutOfRange, RootSequenceFamily, nth_root

DEFAULT_WINDOW = 200
DEFAULT_TARGET = 0.05
FAIRNESS_FACTOR = 10


@dataclass(frozen=True)
class RearrangementPlan:
    permutation_prefix: tuple
    checkpoints: tuple = ()
    window: int = DEFAULT_WINDOW
    status: str = "converging"
    p: int = 0
    n_target: int = 0
    target: float = DEFAULT_TARGET
    forced: int = 0  # picks made by the fairness rule
    notes: tuple = field(default=(), compare=False)

    @classmethod
    def identity(cls, n: int, p: int = 0) -> "RearrangementPlan":
        return cls(tuple(range(1, n + 1)), p=p, n_target=n)


def term_vector(gamma: complex, p: int) -> np.ndarray:
    """(Re g^-1, ..., Re g^-p, Im g^-1, ..., Im g^-p) for g = gamma."""
    gamma = complex(gamma)
    if gamma == 0:
        raise ValueError("term_vector of a zero root")
    w = np.array([gamma ** -r for r in range(1, p + 1)], dtype=complex)
    return np.concatenate([w.real, w.imag])


def _term_matrix(roots: np.ndarray, p: int) -> np.ndarray:
    inv = 1.0 / roots
    w = np.stack([inv ** r for r in range(1, p + 1)], axis=1) if p else np.zeros((len(roots), 0))
    return np.concatenate([w.real, w.imag], axis=1)


def _vmax(S: np.ndarray, p: int) -> float:
    return float(np.max(np.hypot(S[:p], S[p:]))) if p else 0.0


def rearrange_to_zero(family: RootSequenceFamily, p: int, n_target: int,
                      window: int = DEFAULT_WINDOW, target: float = DEFAULT_TARGET,
                      n_checkpoints: int = 20) -> RearrangementPlan:
    """Order the first roots of ``family`` so every V_N(r) is driven to 0.

    The candidate pool is the ``window`` lowest-index unused roots. Each
    step takes the lowest-index candidate whose term vector strictly
    shrinks the running sum S; when none does, it takes the candidate
    minimising ||S + x|| (smallest index on ties). Norms weight the r-th
    block by the pool's median |gamma|^r so that higher powers are not
    swamped by the r=1 terms. A root that has sat in the pool for more
    than ``10 * window`` steps is taken unconditionally.
    """
    if p < 0:
        raise ValueError("p must be >= 0")
    if window < 1:
        raise ValueError("window must be >= 1")
    if p == 0:
        n = min(n_target, family.size)
        return RearrangementPlan.identity(n)
    n_target = min(n_target, family.size)
    if n_target < 1:
        raise ValueError("nothing to rearrange")
    roots = family.roots()
    X = _term_matrix(roots, p)
    mod = np.abs(roots)
    total = len(X)
    stride = max(1, n_target // n_checkpoints)
    powers = np.arange(1, p + 1)

    pool = list(range(min(window, total)))  # 0-based, kept sorted
    entered = {i: 0 for i in pool}
    next_idx = len(pool)
    S = np.zeros(2 * p)
    order: list[int] = []
    checkpoints: list[tuple[int, float]] = []
    forced = 0
    limit = FAIRNESS_FACTOR * window
    for step in range(1, n_target + 1):
        if step - entered[pool[0]] > limit:
            k = 0
            forced += 1
        elif not S.any():
            k = 0
        else:
            wr = np.median(mod[pool]) ** powers
            w = np.concatenate([wr, wr])
            after = np.linalg.norm((S + X[pool]) * w, axis=1)
            shrink = np.flatnonzero(after < np.linalg.norm(S * w))
            k = int(shrink[0]) if shrink.size else int(np.argmin(after))
        pick = pool.pop(k)
        del entered[pick]
        S = S + X[pick]
        order.append(pick + 1)
        if next_idx < total:
            pool.append(next_idx)
            entered[next_idx] = step
            next_idx += 1
        if step % stride == 0 or step == n_target:
            if not checkpoints or checkpoints[-1][0] != step:
                checkpoints.append((step, _vmax(S, p)))

    status, notes = _status(checkpoints, target)
    return RearrangementPlan(
        permutation_prefix=tuple(order), checkpoints=tuple(checkpoints),
        window=window, status=status, p=p, n_target=n_target, target=target,
        forced=forced, notes=notes,
    )


def _status(checkpoints, target) -> tuple[str, tuple]:
    vals = [v for _, v in checkpoints]
    notes = []
    # three consecutive checkpoints without a decrease
    for i in range(len(vals) - 2):
        if 0 < vals[i] <= vals[i + 1] <= vals[i + 2]:
            notes.append(f"no decrease over checkpoints {checkpoints[i][0]}.."
                         f"{checkpoints[i + 2][0]}")
    last = vals[-3:]
    converging = (all(b <= a for a, b in zip(last, last[1:]))
                  and bool(last) and last[-1] <= target)
    if converging:
        return "converging", tuple(notes)
    return "stalled", tuple(notes)


def apply_plan(family: RootSequenceFamily, plan: RearrangementPlan, n: int) -> complex:
    """The n-th root in plan order, gamma_{pi(n)}."""
    if n < 1 or n > len(plan.permutation_prefix):
        raise IndexOutOfRange(f"plan covers 1..{len(plan.permutation_prefix)}, asked {n}")
    return nth_root(family, plan.permutation_prefix[n - 1])


def power_sums_along(family: RootSequenceFamily, plan: RearrangementPlan,
                     N: int) -> np.ndarray:
    """Complex V_N(r), r=1..p, for the first N roots in plan order."""
    idx = np.asarray(plan.permutation_prefix[:N]) - 1
    roots = family.roots(int(idx.max(initial=-1)) + 1)[idx]
    return np.array([np.sum(roots ** -r) for r in range(1, plan.p + 1)])


def dump_plan(plan: RearrangementPlan) -> str:
    lines = [
        "# rearrangement-plan",
        f"p = {plan.p}",
        f"window = {plan.window}",
        f"n_target = {plan.n_target}",
        f"status = {plan.status}",
        f"target = {plan.target!r}",
    ]
    lines += [str(i) for i in plan.permutation_prefix]
    lines += [f"# checkpoint {n} {v!r}" for n, v in plan.checkpoints]
    return "\n".join(lines) + "\n"


def load_plan(text: str) -> RearrangementPlan:
    head: dict[str, str] = {}
    order: list[int] = []
    cps: list[tuple[int, float]] = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("# checkpoint"):
            _, _, n, v = line.split()
            cps.append((int(n), float(v)))
        elif line.startswith("#"):
            continue
        elif "=" in line:
            k, _, v = line.partition("=")
            head[k.strip()] = v.strip()
        else:
            order.append(int(line))
    if len(set(order)) != len(order):
        raise ValueError("plan repeats an index")
    return RearrangementPlan(
        permutation_prefix=tuple(order), checkpoints=tuple(cps),
        window=int(head.get("window", DEFAULT_WINDOW)), status=head.get("status", "converging"),
        p=int(head.get("p", 0)), n_target=int(head.get("n_target", len(order))),
        target=float(head.get("target", DEFAULT_TARGET)),
    )
