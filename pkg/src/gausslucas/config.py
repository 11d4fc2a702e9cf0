"""Scenario files: ``[section]`` headers and ``key = value`` lines.

Complex numbers are written ``(re,im)``, as a plain real, or in Python
literal form (``1-2j``). Lists are whitespace separated; lists of lists
(points, affine forms, monomials) use ``;`` between groups. ``#`` starts
a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Callable

MODES = ("gl-poly", "gl-entire", "gl-sections", "rearrange", "stability", "corollary", "sep-hull")


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    message: str

    def __str__(self):
        return f"line {self.line}, col {self.column}: {self.message}"


class ConfigError(ValueError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(str(d) for d in diagnostics))


# ---------------------------------------------------------------------------
# value codecs

_CPAIR = re.compile(r"^\(\s*([^,()]+)\s*,\s*([^,()]+)\s*\)$")


def parse_complex(tok: str) -> complex:
    tok = tok.strip()
    m = _CPAIR.match(tok)
    if m:
        return complex(float(m.group(1)), float(m.group(2)))
    return complex(tok.replace(" ", ""))


def fmt_complex(z: complex) -> str:
    z = complex(z)
    return f"({z.real!r},{z.imag!r})"


def _split_tokens(text: str) -> list[str]:
    # whitespace separated, but keep "(a, b)" together
    return re.findall(r"\([^()]*\)|[^\s()]+", text)


def _clist(text: str) -> tuple:
    return tuple(parse_complex(t) for t in _split_tokens(text))


def _groups(text: str) -> tuple:
    return tuple(_clist(g) for g in text.split(";") if g.strip())


def _monomials(text: str) -> tuple:
    out = []
    for g in text.split(";"):
        if not g.strip():
            continue
        exps, _, coef = g.partition(":")
        if not coef:
            raise ValueError(f"monomial {g.strip()!r} needs 'e1,e2,...:coefficient'")
        out.append((tuple(int(e) for e in exps.split(",")), parse_complex(coef)))
    return tuple(out)


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass(frozen=True)
class Field:
    parse: Callable[[str], Any]
    fmt: Callable[[Any], str]
    default: Any = None
    check: Callable[[Any], bool] | None = None
    requirement: str = ""


def _enum(*choices):
    def parse(s):
        s = s.strip()
        if s not in choices:
            raise ValueError(f"expected one of {', '.join(choices)}")
        return s
    return parse


_int = (lambda s: int(s.strip()), str)
_float = (lambda s: float(s.strip()), repr)
_str = (str.strip, str)
_ints = (lambda s: tuple(int(t) for t in s.split()), lambda v: " ".join(map(str, v)))
_floats = (lambda s: tuple(float(t) for t in s.split()), lambda v: " ".join(map(repr, v)))
_cl = (_clist, lambda v: " ".join(map(fmt_complex, v)))
_gr = (_groups, lambda v: " ; ".join(" ".join(map(fmt_complex, g)) for g in v))
_mono = (_monomials, lambda v: " ; ".join(
    ",".join(map(str, e)) + ":" + fmt_complex(c) for e, c in v))
_bl = (_bool, lambda v: "true" if v else "false")


def F(codec, default=None, check=None, requirement=""):
    return Field(codec[0], codec[1], default, check, requirement)


SCHEMA: dict[str, dict[str, Field]] = {
    "scenario": {
        "id": F(_str, None),
        "mode": Field(_enum(*MODES), str, None),
        "out": F(_str, ""),
    },
    "family": {
        "kind": Field(_enum("parametric", "explicit-list"), str, "parametric"),
        "generator": Field(_enum("none", "signed-blocks", "paired"), str, "none"),
        "terms": F(_cl, ()),
        "alpha": F(_float, 1.0, lambda v: v > 0, "alpha > 0 required"),
        "c": F(_float, 1.0, lambda v: v > 0, "c > 0 required"),
        "phases": F(_cl, (1 + 0j,), lambda v: len(v) > 0 and all(abs(abs(p) - 1) <= 1e-12 for p in v),
                    "phases must be non-empty and unit modulus"),
        "shell": Field(_enum("cycle", "index"), str, "cycle"),
        "count_limit": F(_int, 1000, lambda v: v >= 1, "count_limit >= 1 required"),
        "block": F(_int, 50, lambda v: v >= 1, "block >= 1 required"),
        "n_max": F(_int, 1000, lambda v: v >= 1, "n_max >= 1 required"),
    },
    "product": {
        "q": F(_int, 0, lambda v: v >= 0, "q >= 0 required"),
        "p": F(_int, -1, lambda v: v >= -1, "p >= 0 required (-1 = estimate)"),
        "ordering": Field(_enum("identity", "greedy"), str, "identity"),
    },
    "polynomial": {
        "coefficients": F(_cl, ()),
        "roots": F(_cl, ()),
        "leading": F(_cl, (1 + 0j,), lambda v: len(v) == 1 and v[0] != 0,
                     "leading must be one non-zero value"),
    },
    "multivariate": {
        "M": F(_int, 2, lambda v: v >= 1, "M >= 1 required"),
        "terms": F(_mono, ()),
        "forms": F(_gr, ()),
        "m": F(_int, 1, lambda v: v >= 1, "m >= 1 required"),
    },
    "points": {
        "points": F(_gr, ()),
    },
    "numeric": {
        "n_schedule": F(_ints, (20, 40, 80),
                        lambda v: len(v) > 0 and all(a < b for a, b in zip(v, v[1:])) and v[0] >= 1,
                        "n_schedule must be positive and increasing"),
        "epsilon": F(_float, -1.0, lambda v: v > 0 or v == -1.0, "epsilon > 0 required"),
        "window": F(_int, 200, lambda v: v >= 1, "window >= 1 required"),
        "n_target": F(_int, 2000, lambda v: v >= 1, "n_target >= 1 required"),
        "target": F(_float, 0.05, lambda v: v > 0, "target > 0 required"),
        "resolution": F(_int, 32, lambda v: v >= 4, "resolution ≥ 4 required"),
        "bbox": F(_floats, (), lambda v: len(v) % 4 == 0, "bbox takes 4 numbers per coordinate"),
        "seed": F(_int, 0, lambda v: 0 <= v < 2 ** 64, "seed must be an unsigned 64-bit integer"),
        "budget": F(_int, 200, lambda v: v >= 1, "budget >= 1 required"),
        "theta": F(_floats, (0.0,)),
        "iteration_cap": F(_int, 50, lambda v: v >= 1, "iteration_cap >= 1 required"),
        "samples": F(_int, 20, lambda v: v >= 1, "samples >= 1 required"),
        "sample_box": F(_float, 2.0, lambda v: v > 0, "sample_box > 0 required"),
        "grid_check": F(_bl, False),
        "degree_cap": F(_int, 2000, lambda v: v >= 1, "degree_cap >= 1 required"),
    },
}

REQUIRED = {
    "gl-poly": ("polynomial",),
    "gl-entire": ("family",),
    "gl-sections": ("multivariate",),
    "rearrange": ("family",),
    "stability": (),
    "corollary": (),
    "sep-hull": ("points",),
}


@dataclass
class ScenarioConfig:
    scenario_id: str
    mode: str
    out: str = ""
    sections: dict = field(default_factory=dict)

    def get(self, section: str, key: str):
        if section in self.sections:
            return self.sections[section][key]
        return SCHEMA[section][key].default

    def has(self, section: str) -> bool:
        return section in self.sections


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a scenario; raises ``ConfigError`` listing every problem."""
    diags: list[Diagnostic] = []
    raw: dict[str, dict[str, tuple[int, int, str]]] = {}
    section_line: dict[str, int] = {}
    current = None
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].rstrip()
        if not stripped.strip():
            continue
        col = len(stripped) - len(stripped.lstrip()) + 1
        s = stripped.strip()
        if s.startswith("["):
            if not s.endswith("]"):
                diags.append(Diagnostic(lineno, col, "unterminated section header"))
                current = None
                continue
            name = s[1:-1].strip()
            if name not in SCHEMA:
                diags.append(Diagnostic(lineno, col + 1, f"unknown section [{name}]"))
                current = None
                continue
            if name in raw:
                diags.append(Diagnostic(lineno, col, f"duplicate section [{name}]"))
            raw.setdefault(name, {})
            section_line[name] = lineno
            current = name
            continue
        if "=" not in s:
            diags.append(Diagnostic(lineno, col, "expected 'key = value'"))
            continue
        if current is None:
            diags.append(Diagnostic(lineno, col, "key outside a known section"))
            continue
        key, _, value = s.partition("=")
        key = key.strip()
        vcol = stripped.index("=") + 2 + (len(value) - len(value.lstrip()))
        if key not in SCHEMA[current]:
            diags.append(Diagnostic(lineno, col, f"unknown key '{key}' in [{current}]"))
            continue
        if key in raw[current]:
            diags.append(Diagnostic(lineno, col, f"duplicate key '{key}'"))
        raw[current][key] = (lineno, vcol, value.strip())

    sections: dict[str, dict[str, Any]] = {}
    for name, entries in raw.items():
        vals = {}
        for key, fld in SCHEMA[name].items():
            if key not in entries:
                vals[key] = fld.default
                continue
            lineno, vcol, value = entries[key]
            try:
                v = fld.parse(value)
            except (ValueError, TypeError) as exc:
                diags.append(Diagnostic(lineno, vcol, f"bad value for '{key}': {exc}"))
                continue
            if fld.check is not None and not fld.check(v):
                diags.append(Diagnostic(lineno, vcol, fld.requirement or f"'{key}' out of range"))
                continue
            vals[key] = v
        sections[name] = vals

    scen = sections.get("scenario")
    if scen is None:
        diags.append(Diagnostic(1, 1, "missing required section [scenario]"))
        raise ConfigError(diags)
    for key in ("id", "mode"):
        if scen.get(key) is None and not any(f"'{key}'" in d.message for d in diags):
            diags.append(Diagnostic(section_line["scenario"], 1,
                                    f"[scenario] needs '{key}'"))
    mode = scen.get("mode")
    if mode in REQUIRED:
        for need in REQUIRED[mode]:
            if need not in sections:
                diags.append(Diagnostic(section_line["scenario"], 1,
                                        f"mode {mode} needs a [{need}] section"))
        if mode in ("stability", "corollary") and not (
                "polynomial" in sections or "multivariate" in sections):
            diags.append(Diagnostic(section_line["scenario"], 1,
                                    f"mode {mode} needs [polynomial] or [multivariate]"))
    if diags:
        raise ConfigError(diags)
    body = {k: v for k, v in sections.items() if k != "scenario"}
    body.setdefault("numeric", {k: f.default for k, f in SCHEMA["numeric"].items()})
    return ScenarioConfig(scenario_id=scen["id"], mode=mode, out=scen["out"], sections=body)


def serialize(cfg: ScenarioConfig) -> str:
    lines = ["[scenario]", f"id = {cfg.scenario_id}", f"mode = {cfg.mode}"]
    if cfg.out:
        lines.append(f"out = {cfg.out}")
    for name, fields in SCHEMA.items():
        if name == "scenario" or name not in cfg.sections:
            continue
        lines += ["", f"[{name}]"]
        for key, fld in fields.items():
            lines.append(f"{key} = {fld.fmt(cfg.sections[name][key])}")
    return "\n".join(lines) + "\n"
