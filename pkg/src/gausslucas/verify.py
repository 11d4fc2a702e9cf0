"""Gauss-Lucas and stability checks built from the lower-level engines."""
from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .geometry import clip_to_box, hull2d, sep_hull_contains, sep_hull_grid, signed_distance
from .multivariate import MultiPoly, MultivariateSpec
from .poly import ComplexPoly, critical_points_of_product, derivative, find_roots, poly_from_roots
from .product import CanonicalProductSpec, PowerSumLedger

EPS_POLY = 1e-7
EPS_ENTIRE = 1e-3
BOUNDARY_TOL = 1e-9
DEGREE_CAP = 2000

PASS, FAIL, UNCERTAIN = "pass", "fail", "uncertain"


@dataclass
class Check:
    name: str
    verdict: str
    stats: dict = field(default_factory=dict)
    witness: tuple | None = None  # (point, distance) for failures
    notes: list = field(default_factory=list)
    points: dict = field(default_factory=dict)  # label -> array, for CSV output


@dataclass
class VerificationReport:
    scenario: str
    checks: list = field(default_factory=list)
    artifacts: list = field(default_factory=list)

    @property
    def verdict(self) -> str:
        vs = {c.verdict for c in self.checks}
        if FAIL in vs:
            return FAIL
        if UNCERTAIN in vs:
            return UNCERTAIN
        return PASS

    @property
    def verdicts(self) -> dict:
        return {c.name: c.verdict for c in self.checks}


@dataclass(frozen=True)
class StabilityCone:
    """A(theta) = {z : Im(exp(i theta_m) z_m) > 0 for all m}."""

    theta: tuple

    def __post_init__(self):
        th = tuple(float(t) for t in np.atleast_1d(self.theta))
        # normalise to (-pi, pi]
        th = tuple(t - 2 * math.pi * math.ceil((t - math.pi) / (2 * math.pi)) for t in th)
        object.__setattr__(self, "theta", th)

    @property
    def M(self) -> int:
        return len(self.theta)

    def rotated_imag(self, z: Sequence[complex]) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return (np.exp(1j * np.asarray(self.theta)) * z).imag


def _distances(hull, pts: np.ndarray, noise: float) -> np.ndarray:
    if len(pts) == 0:
        return np.zeros(0)
    d = np.maximum(np.asarray(signed_distance(hull, pts), dtype=float), 0.0)
    d[d <= noise] = 0.0
    return d


def verify_gl_polynomial(p: ComplexPoly, eps: float = EPS_POLY, seed: int = 0,
                         name: str = "gl-poly") -> VerificationReport:
    """Every critical point of ``p`` lies within ``eps`` of the hull of its roots."""
    report = VerificationReport(scenario=name)
    if p.degree < 1:
        raise ValueError("Gauss-Lucas check needs a non-constant polynomial")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        roots, info = find_roots(p, seed=seed, full_output=True)
        if p.degree >= 2:
            crit, cinfo = find_roots(derivative(p), seed=seed, full_output=True)
        else:
            crit, cinfo = np.zeros(0, complex), None
    hull = hull2d(roots)
    d = _distances(hull, crit, 0.0)
    stats = {
        "degree": p.degree,
        "critical_points": len(crit),
        "max_distance": float(d.max(initial=0.0)),
        "root_residual": float(info.residuals.max()),
        "critical_residual": float(cinfo.residuals.max()) if cinfo else 0.0,
    }
    check = Check("gl-poly", PASS, stats,
                  points={"roots": roots, "critical_points": crit,
                          "hull": hull.as_array()})
    if len(crit) == 0:
        check.notes.append("degree 1: no critical points, vacuous pass")
    if not info.converged or (cinfo is not None and not cinfo.converged):
        check.verdict = UNCERTAIN
        check.notes.append("root finder did not meet the residual contract")
    if d.size and d.max() > eps:
        k = int(np.argmax(d))
        if check.verdict != UNCERTAIN:
            check.verdict = FAIL
        check.witness = (complex(crit[k]), float(d[k]))
    report.checks.append(check)
    return report


def verify_gl_entire(spec: CanonicalProductSpec, plan=None, schedule: Sequence[int] = (20, 40, 80),
                     eps: float = EPS_ENTIRE, bbox: Sequence[float] | None = None,
                     degree_cap: int = DEGREE_CAP, seed: int = 0,
                     name: str = "gl-entire") -> VerificationReport:
    """Critical points of the truncations f_N against the hull of all consumed roots.

    The closure of the infinite root hull is stood in for by the hull of
    delta_1..delta_Nmax (plus 0 when q > 0), clipped to ``bbox`` when one
    is given; critical points outside ``bbox`` are not tested. Passes
    when the final maximum distance is at most ``eps`` and the maxima do
    not increase along the schedule.
    """
    report = VerificationReport(scenario=name)
    schedule = [int(n) for n in schedule]
    if not schedule or any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("schedule must be a non-empty increasing sequence")
    if plan is not None:
        spec = dataclasses.replace(spec, ordering=plan)
    check = Check("gl-entire", PASS)
    if spec.p > 0 and spec.ordering is not None and spec.ordering.status != "converging":
        check.notes.append(f"plan status is {spec.ordering.status}; power sums may not vanish")
    avail = spec.available
    n_max = min(schedule[-1], avail, degree_cap)
    if degree_cap < min(schedule[-1], avail):
        check.notes.append(f"truncation capped at N={n_max}")
        warnings.warn(f"verify_gl_entire: truncation capped at {n_max}", RuntimeWarning,
                      stacklevel=2)
    schedule = sorted({min(n, n_max) for n in schedule})
    roots_all = spec.roots(n_max) if n_max else np.zeros(0, complex)
    zero_set = np.concatenate([roots_all, [0j]]) if spec.q > 0 else roots_all
    if len(zero_set) == 0:
        check.notes.append("no zeros: f is constant")
        check.stats = {"schedule": schedule, "max_distance": [0.0] * len(schedule)}
        report.checks.append(check)
        return report
    hull = hull2d(zero_set)
    if bbox is not None:
        clipped = clip_to_box(hull, bbox)
        if clipped is None:
            raise ValueError("bbox does not meet the root hull")
        hull = clipped
    noise = 64 * np.finfo(float).eps * (1.0 + float(np.abs(zero_set).max()))

    maxima, skipped, resid = [], [], []
    crit = np.zeros(0, complex)
    converged = True
    for N in schedule:
        roots = roots_all[:N]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            crit, info = critical_points_of_product(roots, spec.q, seed=seed, full_output=True)
        converged &= info.converged
        resid.append(float(info.residuals.max(initial=0.0)))
        pts = crit
        if bbox is not None:
            xmin, xmax, ymin, ymax = bbox
            keep = (crit.real >= xmin) & (crit.real <= xmax) & (crit.imag >= ymin) & (crit.imag <= ymax)
            skipped.append(int((~keep).sum()))
            pts = crit[keep]
        d = _distances(hull, pts, noise)
        maxima.append(float(d.max(initial=0.0)))
        if d.size and d.max() > eps and check.witness is None:
            k = int(np.argmax(d))
            check.witness = (complex(pts[k]), float(d[k]))

    led = PowerSumLedger.from_roots(roots_all, spec.p)
    check.stats = {
        "schedule": schedule,
        "max_distance": maxima,
        "critical_residual": resid,
        "skipped_outside_bbox": skipped,
        "final_power_sum_max": led.max_abs(),
        "max_abs_imag_final": float(np.abs(crit.imag).max(initial=0.0)),
    }
    check.points = {"roots": roots_all, "critical_points": crit, "hull": hull.as_array()}
    monotone = all(b <= a for a, b in zip(maxima, maxima[1:]))
    if not converged:
        check.verdict = UNCERTAIN
        check.notes.append("critical-point iteration did not converge")
    elif maxima[-1] > eps or not monotone:
        check.verdict = FAIL
        if check.witness is None:
            check.witness = (None, maxima[-1])
        if not monotone:
            check.notes.append("hull distances increased along the schedule")
    report.checks.append(check)
    return report


def verify_gl_sections(mv: MultivariateSpec, m: int, samples: Sequence[Sequence[complex]],
                       eps: float | None = None, schedule: Sequence[int] = (20, 40, 80),
                       seed: int = 0, grid_check: bool = False, resolution: int = 16,
                       name: str = "gl-sections") -> VerificationReport:
    """Gauss-Lucas on the sections w -> f(..., w, ...) in coordinate ``m`` (1-based).

    Sampling covers only the listed assignments of the other coordinates;
    the report records how many. With ``grid_check`` (M = 2 polynomials)
    the critical points are also tested against the grid separately convex
    hull of all section roots; grid answers are at best uncertain near
    cell boundaries.
    """
    if not 1 <= m <= mv.M:
        raise ValueError(f"coordinate index {m} outside 1..{mv.M}")
    report = VerificationReport(scenario=name)
    if mv.kind == "polynomial":
        if mv.poly.partial(m).is_zero:
            raise ValueError(f"partial derivative in z_{m} vanishes identically")
        eps = EPS_POLY if eps is None else eps
    else:
        eps = EPS_ENTIRE if eps is None else eps

    verdicts, dists = [], []
    skipped = 0
    roots_pts, crit_pts = [], []
    witness = None
    entire_cache = None
    for s in samples:
        s = [complex(v) for v in s]
        if mv.kind == "polynomial":
            g = mv.poly.section(m, s)
            if g.degree <= 0:
                skipped += 1
                continue
            sub = verify_gl_polynomial(g, eps, seed=seed)
        else:
            if mv.section_constant(m, s) == 0:
                skipped += 1
                continue
            if entire_cache is None:
                entire_cache = verify_gl_entire(mv.factor(m), schedule=schedule, eps=eps,
                                                seed=seed)
            sub = entire_cache
        c = sub.checks[0]
        verdicts.append(c.verdict)
        md = c.stats["max_distance"]
        dists.append(md[-1] if isinstance(md, list) else md)
        if c.verdict == FAIL and witness is None:
            witness = (tuple(s), c.witness)
        if mv.M == 2 and mv.kind == "polynomial":
            for r in c.points["roots"]:
                roots_pts.append(_embed(r, s, m))
            for w in c.points["critical_points"]:
                crit_pts.append(_embed(w, s, m))

    if not verdicts:
        verdict = UNCERTAIN
    elif FAIL in verdicts:
        verdict = FAIL
    elif UNCERTAIN in verdicts:
        verdict = UNCERTAIN
    else:
        verdict = PASS
    check = Check("gl-sections", verdict, {
        "coordinate": m,
        "samples": len(samples),
        "tested": len(verdicts),
        "skipped_constant": skipped,
        "max_distance": float(max(dists, default=0.0)),
    }, witness=witness)
    if not verdicts:
        check.notes.append("every sampled section was constant")
    if mv.M > 1:
        check.notes.append(f"coverage: {len(samples)} sampled assignments of the other "
                           "coordinates, not all of C^(M-1)")
    if roots_pts:
        check.points = {"section_roots": np.array(roots_pts),
                        "section_critical_points": np.array(crit_pts)}
    report.checks.append(check)

    if grid_check and roots_pts and crit_pts:
        report.checks.append(_grid_check(np.array(roots_pts), np.array(crit_pts), resolution))
    return report


def _embed(w: complex, fixed: Sequence[complex], m: int) -> list:
    z = list(fixed)
    z.insert(m - 1, complex(w))
    return z


def _grid_check(roots: np.ndarray, crit: np.ndarray, resolution: int) -> Check:
    allpts = np.vstack([roots, crit])
    bbox = []
    for j in range(allpts.shape[1]):
        col = allpts[:, j]
        pad = 0.1 * (1.0 + np.ptp(col.real) + np.ptp(col.imag))
        bbox.append((col.real.min() - pad, col.real.max() + pad,
                     col.imag.min() - pad, col.imag.max() + pad))
    grid = sep_hull_grid(roots, bbox, resolution=resolution)
    answers = [sep_hull_contains(grid, z) for z in crit]
    counts = {k: answers.count(k) for k in ("inside", "outside", "uncertain")}
    verdict = PASS if counts["inside"] == len(answers) else UNCERTAIN
    check = Check("gl-sections-grid", verdict, {"resolution": resolution,
                                                 "converged": grid.converged, **counts})
    if counts["outside"]:
        check.notes.append("grid reports points outside; rasterisation of sampled roots "
                           "is not an outer bound, so this is not a failure")
    return check


@dataclass
class StabilityResult:
    stable: bool
    witness: tuple | None = None
    low_confidence: bool = False
    samples: int = 0
    notes: list = field(default_factory=list)

    @property
    def label(self) -> str:
        return "stable-evidence" if self.stable else "unstable"


def _univariate_roots(f) -> tuple[np.ndarray, bool]:
    if isinstance(f, ComplexPoly):
        if f.degree < 1:
            return np.zeros(0, complex), True
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            r, info = find_roots(f, full_output=True)
        return r, info.converged
    return np.asarray(f, dtype=complex).ravel(), True


def is_theta_stable(f, theta, budget: int = 200, seed: int = 0, tol: float = BOUNDARY_TOL,
                    box: float = 4.0) -> StabilityResult:
    """Look for zeros of ``f`` in the open cone A(theta).

    ``f`` may be a root list, a ``ComplexPoly`` or a ``MultiPoly``. Roots on
    the boundary (|Im(e^{i theta} z)| <= tol) count as outside the open
    cone. Multivariate input is falsified by sampling: ``budget`` sections
    with the other coordinates drawn inside A(theta); a clean run is only
    evidence.
    """
    cone = theta if isinstance(theta, StabilityCone) else StabilityCone(theta)
    if isinstance(f, MultiPoly):
        return _stable_multivariate(f, cone, budget, seed, tol, box)
    if isinstance(f, ComplexPoly) and f.is_zero:
        return StabilityResult(False, witness=(complex(np.exp(-1j * cone.theta[0]) * 1j),))
    roots, ok = _univariate_roots(f)
    im = (np.exp(1j * cone.theta[0]) * roots).imag
    bad = np.flatnonzero(im > tol)
    if bad.size:
        k = bad[np.argmax(im[bad])]
        return StabilityResult(False, witness=(complex(roots[k]),), samples=len(roots))
    res = StabilityResult(True, samples=len(roots), low_confidence=not ok)
    if not ok:
        res.notes.append("root finder missed its residual contract")
    return res


def _stable_multivariate(f: MultiPoly, cone: StabilityCone, budget: int, seed: int,
                         tol: float, box: float) -> StabilityResult:
    if cone.M != f.M:
        raise ValueError(f"theta has {cone.M} angles, f lives on C^{f.M}")
    if f.is_zero:
        z = tuple(complex(np.exp(-1j * t) * 1j) for t in cone.theta)
        return StabilityResult(False, witness=z)
    rng = np.random.default_rng(seed)
    rot = np.exp(-1j * np.asarray(cone.theta))
    shaky = 0
    for s in range(budget):
        m = s % f.M + 1
        x = rng.uniform(-box, box, f.M)
        # log-spread heights reach towards the boundary of the cone
        y = box * 10.0 ** (-3.0 * rng.uniform(0.0, 1.0, f.M))
        z = rot * (x + 1j * y)
        fixed = [z[j] for j in range(f.M) if j != m - 1]
        g = f.section(m, fixed)
        if g.is_zero:
            return StabilityResult(False, witness=tuple(complex(v) for v in z), samples=s + 1,
                                   notes=["section vanishes identically inside the cone"])
        if g.degree < 1:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            roots, info = find_roots(g, seed=seed, full_output=True)
        shaky += not info.converged
        im = (np.exp(1j * cone.theta[m - 1]) * roots).imag
        bad = np.flatnonzero(im > tol)
        if bad.size:
            k = bad[np.argmax(im[bad])]
            w = _embed(roots[k], fixed, m)
            return StabilityResult(False, witness=tuple(complex(v) for v in w), samples=s + 1)
    res = StabilityResult(True, low_confidence=True, samples=budget)
    res.notes.append(f"sampling only: {budget} sections in |Re|, |Im| <= {box}")
    if shaky:
        res.notes.append(f"{shaky} section root solves missed the residual contract")
    return res


def verify_corollary_stability(f, theta, m: int = 1, budget: int = 200, seed: int = 0,
                               name: str = "corollary") -> VerificationReport:
    """A theta-stable f should have theta-stable non-null partial derivatives."""
    report = VerificationReport(scenario=name)
    cone = theta if isinstance(theta, StabilityCone) else StabilityCone(theta)
    base = is_theta_stable(f, cone, budget=budget, seed=seed)
    check = Check("corollary", PASS, {"f": base.label, "samples": base.samples})
    if not base.stable:
        check.verdict = UNCERTAIN
        check.notes.append("f itself is not theta-stable; the statement does not apply")
        check.stats["f_witness"] = base.witness
        report.checks.append(check)
        return report
    if isinstance(f, MultiPoly):
        df = f.partial(m)
    else:
        p = f if isinstance(f, ComplexPoly) else poly_from_roots(np.asarray(f, complex))
        df = derivative(p)
    if df.is_zero:
        raise ValueError("partial derivative vanishes identically")
    der = is_theta_stable(df, cone, budget=budget, seed=seed + 1)
    check.stats.update({"derivative": der.label, "derivative_samples": der.samples,
                        "low_confidence": base.low_confidence or der.low_confidence})
    if isinstance(df, ComplexPoly) and df.degree >= 1:
        r, _ = _univariate_roots(df)
        check.points = {"derivative_roots": r}
        check.stats["max_rotated_imag"] = float(
            (np.exp(1j * cone.theta[0]) * r).imag.max(initial=-np.inf))
    if not der.stable:
        check.verdict = FAIL
        check.witness = (der.witness, 0.0)
        check.notes.append("numerical anomaly: derivative has a zero in the open cone")
    report.checks.append(check)
    return report
