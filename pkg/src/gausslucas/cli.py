"""Command line front end: run a scenario file and write its artifacts."""
from __future__ import annotations

import argparse
import datetime as _dt
import os
import sys
import traceback
from pathlib import Path

import numpy as np

from .config import ConfigError, ScenarioConfig, parse_config
from .estimators import SeparatelyConvexHull
from .geometry import dump_mask
from .multivariate import MultiPoly, MultivariateSpec, affine_product
from .poly import ComplexPoly, poly_from_roots
from .product import CanonicalProductSpec
from .rearrange import dump_plan, rearrange_to_zero
from .roots import RootSequenceFamily, estimate_genus, paired, rearrangeability_diagnostic, signed_blocks
from .verify import (EPS_ENTIRE, EPS_POLY, FAIL, PASS, UNCERTAIN, Check, VerificationReport,
                     is_theta_stable, verify_corollary_stability, verify_gl_entire,
                     verify_gl_polynomial, verify_gl_sections)

ENV_OUT = "GAUSSLUCAS_OUT"
DEFAULT_OUT = "gausslucas-out"
EXIT_CODES = {PASS: 0, FAIL: 1, UNCERTAIN: 2}
EXIT_ERROR = 3

SUBCOMMAND_MODES = {
    "rearrange": ("rearrange",),
    "sep-hull": ("sep-hull",),
    "stability": ("stability", "corollary"),
}


# ---------------------------------------------------------------------------
# building domain objects from a config

def build_family(cfg: ScenarioConfig) -> RootSequenceFamily:
    g = lambda k: cfg.get("family", k)  # noqa: E731
    if g("generator") == "signed-blocks":
        return signed_blocks(g("n_max"), g("block"))
    if g("generator") == "paired":
        return paired(g("n_max"))
    if g("kind") == "explicit-list":
        return RootSequenceFamily.explicit(g("terms"))
    return RootSequenceFamily(alpha=g("alpha"), c=g("c"), phases=g("phases"),
                              count_limit=g("count_limit"), shell=g("shell"))


def _genus(cfg: ScenarioConfig, family: RootSequenceFamily) -> int:
    p = cfg.get("product", "p")
    return estimate_genus(family).p if p < 0 else p


def build_polynomial(cfg: ScenarioConfig) -> ComplexPoly:
    coef, roots = cfg.get("polynomial", "coefficients"), cfg.get("polynomial", "roots")
    if bool(coef) == bool(roots):
        raise ValueError("[polynomial] needs exactly one of coefficients or roots")
    if coef:
        return ComplexPoly(coef)
    return poly_from_roots(roots, leading=cfg.get("polynomial", "leading")[0])


def build_multipoly(cfg: ScenarioConfig) -> MultiPoly:
    M = cfg.get("multivariate", "M")
    terms, forms = cfg.get("multivariate", "terms"), cfg.get("multivariate", "forms")
    if bool(terms) == bool(forms):
        raise ValueError("[multivariate] needs exactly one of terms or forms")
    if forms:
        f = affine_product(forms)
        if f.M != M:
            raise ValueError(f"forms describe C^{f.M}, but M = {M}")
        return f
    if any(len(e) != M for e, _ in terms):
        raise ValueError(f"every exponent tuple needs {M} entries")
    merged: dict = {}
    for e, c in terms:
        merged[e] = merged.get(e, 0j) + c
    return MultiPoly(merged, M)


def _stability_target(cfg: ScenarioConfig):
    if cfg.has("multivariate"):
        return build_multipoly(cfg)
    return build_polynomial(cfg)


def _theta(cfg: ScenarioConfig, M: int) -> tuple:
    th = cfg.get("numeric", "theta")
    if len(th) == 1:
        th = th * M
    if len(th) != M:
        raise ValueError(f"theta needs 1 or {M} angles")
    return th


# ---------------------------------------------------------------------------
# scenario dispatch

def _eps(cfg, default):
    e = cfg.get("numeric", "epsilon")
    return default if e < 0 else e


def _run_rearrange(cfg: ScenarioConfig, seed: int) -> tuple[VerificationReport, dict]:
    fam = build_family(cfg)
    p = _genus(cfg, fam)
    n = min(cfg.get("numeric", "n_target"), fam.size)
    plan = rearrange_to_zero(fam, p, n, window=cfg.get("numeric", "window"),
                             target=cfg.get("numeric", "target"))
    cps = plan.checkpoints
    stats = {"p": p, "n_target": n, "status": plan.status, "forced_picks": plan.forced,
             "final_checkpoint": cps[-1][1] if cps else 0.0}
    check = Check("rearrange", PASS if plan.status == "converging" else UNCERTAIN, stats,
                  notes=list(plan.notes))
    if p >= 1:
        diag = rearrangeability_diagnostic(fam, p, n_probe=min(1000, fam.size))
        check.stats["diagnostic"] = diag.verdict
    if cps:
        check.points = {"checkpoints": np.array([complex(N, v) for N, v in cps])}
    if plan.status != "converging":
        check.notes.append("greedy run stalled; this is not evidence against rearrangeability")
    return VerificationReport(cfg.scenario_id, [check]), {"plan.txt": dump_plan(plan)}


def _run_sep_hull(cfg: ScenarioConfig, seed: int) -> tuple[VerificationReport, dict]:
    pts = cfg.get("points", "points")
    if not pts:
        raise ValueError("[points] lists no points")
    M = len(pts[0])
    if any(len(p) != M for p in pts):
        raise ValueError("points of mixed dimension")
    bb = cfg.get("numeric", "bbox")
    bbox = tuple(tuple(bb[4 * m:4 * m + 4]) for m in range(len(bb) // 4)) if bb else None
    if bbox is not None and len(bbox) != M:
        raise ValueError(f"bbox describes C^{len(bbox)}, points live in C^{M}")
    est = SeparatelyConvexHull(resolution=cfg.get("numeric", "resolution"), bbox=bbox,
                               iteration_cap=cfg.get("numeric", "iteration_cap"))
    est.fit(np.array(pts, dtype=complex))
    grid = est.grid_
    check = Check("sep-hull", PASS if grid.converged else UNCERTAIN,
                  {"M": M, "resolution": grid.resolution, "passes": grid.passes,
                   "converged": grid.converged, "occupied_cells": int(grid.mask.sum()),
                   "input_points": len(pts)},
                  points={"input": np.array(pts, dtype=complex),
                          "occupied_centers": grid.occupied_centers()})
    if not grid.converged:
        check.notes.append("iteration cap reached before a fixed point")
    return VerificationReport(cfg.scenario_id, [check]), {"mask.txt": dump_mask(grid)}


def _run_stability(cfg: ScenarioConfig, seed: int) -> tuple[VerificationReport, dict]:
    f = _stability_target(cfg)
    M = f.M if isinstance(f, MultiPoly) else 1
    res = is_theta_stable(f, _theta(cfg, M), budget=cfg.get("numeric", "budget"), seed=seed)
    check = Check("stability", PASS if res.stable else FAIL,
                  {"result": res.label, "samples": res.samples,
                   "low_confidence": res.low_confidence}, notes=list(res.notes))
    if res.witness is not None:
        check.witness = (res.witness, 0.0)
        check.points = {"witness": np.atleast_2d(np.asarray(res.witness, dtype=complex))}
    return VerificationReport(cfg.scenario_id, [check]), {}


def _run_corollary(cfg: ScenarioConfig, seed: int) -> tuple[VerificationReport, dict]:
    f = _stability_target(cfg)
    M = f.M if isinstance(f, MultiPoly) else 1
    rep = verify_corollary_stability(f, _theta(cfg, M), m=cfg.get("multivariate", "m"),
                                     budget=cfg.get("numeric", "budget"), seed=seed,
                                     name=cfg.scenario_id)
    return rep, {}


def _run_gl_poly(cfg: ScenarioConfig, seed: int):
    return verify_gl_polynomial(build_polynomial(cfg), eps=_eps(cfg, EPS_POLY), seed=seed,
                                name=cfg.scenario_id), {}


def _run_gl_entire(cfg: ScenarioConfig, seed: int):
    fam = build_family(cfg)
    p = _genus(cfg, fam)
    sched = cfg.get("numeric", "n_schedule")
    plan, extra = None, {}
    if cfg.get("product", "ordering") == "greedy" and p >= 1:
        plan = rearrange_to_zero(fam, p, min(max(sched), fam.size),
                                 window=cfg.get("numeric", "window"),
                                 target=cfg.get("numeric", "target"))
        extra["plan.txt"] = dump_plan(plan)
    spec = CanonicalProductSpec(q=cfg.get("product", "q"), p=p, family=fam, ordering=plan)
    bb = cfg.get("numeric", "bbox")
    rep = verify_gl_entire(spec, plan=plan, schedule=sched, eps=_eps(cfg, EPS_ENTIRE),
                           bbox=tuple(bb[:4]) if bb else None,
                           degree_cap=cfg.get("numeric", "degree_cap"), seed=seed,
                           name=cfg.scenario_id)
    return rep, extra


def _run_gl_sections(cfg: ScenarioConfig, seed: int):
    f = build_multipoly(cfg)
    m = cfg.get("multivariate", "m")
    rng = np.random.default_rng(seed)
    box = cfg.get("numeric", "sample_box")
    k = cfg.get("numeric", "samples")
    fixed = rng.uniform(-box, box, (k, f.M - 1)) + 1j * rng.uniform(-box, box, (k, f.M - 1))
    eps = cfg.get("numeric", "epsilon")
    rep = verify_gl_sections(MultivariateSpec(f.M, poly=f), m, [tuple(r) for r in fixed],
                             eps=None if eps < 0 else eps,
                             schedule=cfg.get("numeric", "n_schedule"), seed=seed,
                             grid_check=cfg.get("numeric", "grid_check"),
                             resolution=cfg.get("numeric", "resolution"),
                             name=cfg.scenario_id)
    return rep, {}


RUNNERS = {
    "gl-poly": _run_gl_poly,
    "gl-entire": _run_gl_entire,
    "gl-sections": _run_gl_sections,
    "rearrange": _run_rearrange,
    "stability": _run_stability,
    "corollary": _run_corollary,
    "sep-hull": _run_sep_hull,
}


# ---------------------------------------------------------------------------
# artifacts

def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (complex, np.complexfloating)):
        return repr(complex(v))
    if isinstance(v, np.ndarray):
        return "[" + ", ".join(_fmt(x) for x in v.ravel()) + "]"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def format_csv(check: str, label: str, pts) -> str:
    """One point per line as ``re,im[,re2,im2,...]`` under a one-line header."""
    arr = np.asarray(pts, dtype=complex)
    if arr.ndim == 1:
        arr = arr[:, None]
    k = arr.shape[1] if arr.size else (arr.shape[1] if arr.ndim == 2 else 1)
    lines = [f"# check={check} points={label} coords={k}"]
    for row in arr:
        lines.append(",".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row))
    return "\n".join(lines) + "\n"


def format_report(report: VerificationReport, cfg: ScenarioConfig, seed: int,
                  timestamp: str | None = None) -> str:
    """Plain text report; only the first line carries a timestamp."""
    ts = timestamp or _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    lines = [f"# generated {ts}",
             f"scenario: {cfg.scenario_id}",
             f"mode: {cfg.mode}",
             f"seed: {seed}",
             f"verdict: {report.verdict}",
             f"exit_code: {EXIT_CODES[report.verdict]}"]
    for c in report.checks:
        lines += ["", f"[check {c.name}]", f"verdict: {c.verdict}"]
        for key in sorted(c.stats):
            lines.append(f"{key}: {_fmt(c.stats[key])}")
        if c.witness is not None:
            lines.append(f"witness: {_fmt(c.witness[0])} distance {_fmt(c.witness[1])}")
        for n in c.notes:
            lines.append(f"note: {n}")
    return "\n".join(lines) + "\n"


class _Writer:
    """Single writer for an output directory; keeps the MANIFEST in step."""

    def __init__(self, out: Path, scenario: str):
        self.out = out
        self.scenario = scenario
        self.files: list[str] = []
        out.mkdir(parents=True, exist_ok=True)

    def write(self, name: str, text: str):
        (self.out / name).write_text(text, encoding="utf-8")
        self.files.append(name)

    def manifest(self, status: str, verdict: str):
        body = [f"# manifest scenario={self.scenario} status={status} verdict={verdict}"]
        body += self.files
        (self.out / "MANIFEST").write_text("\n".join(body) + "\n", encoding="utf-8")


def _safe(name: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in name)


def run_scenario(cfg: ScenarioConfig, out: str | os.PathLike | None = None,
                 seed: int | None = None, timestamp: str | None = None) -> tuple[int, VerificationReport | None]:
    """Run ``cfg`` and write its artifacts; returns (exit code, report).

    Exit codes: 0 all pass, 1 any fail, 2 any uncertain and no fail,
    3 configuration or runtime error (artifacts written so far are kept
    and the MANIFEST is marked partial).
    """
    seed = cfg.get("numeric", "seed") if seed is None else seed
    out_dir = Path(out or cfg.out or os.environ.get(ENV_OUT) or DEFAULT_OUT)
    writer = _Writer(out_dir, cfg.scenario_id)
    report = None
    try:
        report, extra = RUNNERS[cfg.mode](cfg, seed)
        for c in report.checks:
            for label in sorted(c.points):
                name = f"{_safe(c.name)}_{_safe(label)}.csv"
                writer.write(name, format_csv(c.name, label, c.points[label]))
        for name in sorted(extra):
            writer.write(name, extra[name])
        writer.write("report.txt", format_report(report, cfg, seed, timestamp))
    except Exception as exc:  # noqa: BLE001 - mapped onto the exit-code contract
        msg = f"{type(exc).__name__}: {exc}"
        writer.write("error.txt", msg + "\n" + traceback.format_exc())
        writer.manifest("partial", "error")
        return EXIT_ERROR, report
    writer.manifest("complete", report.verdict)
    return EXIT_CODES[report.verdict], report


# ---------------------------------------------------------------------------
# argparse

def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gausslucas",
                                 description="Numerical Gauss-Lucas checks for polynomials "
                                             "and entire functions.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (("run", "run any scenario"),
                        ("rearrange", "build a rearrangement plan"),
                        ("sep-hull", "grid separately convex hull"),
                        ("stability", "theta-stability and derivative checks")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", required=True, type=Path, help="scenario file")
        sp.add_argument("--out", type=Path, help=f"output directory (default ${ENV_OUT} "
                                                 f"or ./{DEFAULT_OUT})")
        sp.add_argument("--seed", type=int, help="override the scenario seed (u64)")
        sp.add_argument("--quiet", action="store_true", help="suppress the summary line")
    rp = sub.add_parser("report", help="print the report of a finished run")
    rp.add_argument("--out", type=Path, help="output directory of the run")
    rp.add_argument("--quiet", action="store_true")
    return ap


def _report_cmd(args) -> int:
    out = Path(args.out or os.environ.get(ENV_OUT) or DEFAULT_OUT)
    try:
        manifest = (out / "MANIFEST").read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    head = dict(tok.split("=", 1) for tok in manifest[0].split()[2:])
    if not args.quiet:
        rep = out / "report.txt"
        print(rep.read_text(encoding="utf-8") if rep.exists() else "\n".join(manifest), end="")
    return EXIT_CODES.get(head.get("verdict"), EXIT_ERROR)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "report":
        return _report_cmd(args)
    if args.seed is not None and not 0 <= args.seed < 2 ** 64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_ERROR
    try:
        cfg = parse_config(args.config.read_text(encoding="utf-8"))
    except ConfigError as exc:
        for d in exc.diagnostics:
            print(f"{args.config}:{d.line}:{d.column}: {d.message}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    allowed = SUBCOMMAND_MODES.get(args.command)
    if allowed and cfg.mode not in allowed:
        print(f"error: '{args.command}' runs modes {', '.join(allowed)}, config has {cfg.mode}",
              file=sys.stderr)
        return EXIT_ERROR
    code, report = run_scenario(cfg, out=args.out, seed=args.seed)
    if not args.quiet:
        verdict = report.verdict if report is not None and code != EXIT_ERROR else "error"
        print(f"{cfg.scenario_id}: {verdict} (exit {code})")
    return code


if __name__ == "__main__":
    sys.exit(main())
