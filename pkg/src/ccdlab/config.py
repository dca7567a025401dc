"""Flat key-value experiment configuration.

Format: UTF-8 text, one ``section.key = value`` per line, ``#`` starts a
comment (full-line or trailing). Parsing validates every line and reports
*all* problems at once, each with its line number.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field, replace

CHECK_NAMES = (
    "cyclic-descent",
    "step-telescope",
    "grad-vs-step",
    "stationarity-rate",
    "pl-envelope",
    "vr-descent",
    "vr-grad-vs-step",
    "vr-rate",
    "vr-potential",
    "vr-pl-rate",
    "work-accounting",
)

ALGORITHMS = ("pccd", "vrccd", "vroccd", "sccd", "prox_gd", "page", "sgd")
FAMILIES = ("quadratic", "sigmoid", "streaming")
LAMBDA_MODES = ("exact_quadratic", "backtracking", "explicit", "sigmoid_bound")
SCHEDULES = ("finite_sum",)


class ConfigError(ValueError):
    """All config problems at once; ``errors`` is a list of (line, message)."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(f"line {ln}: {msg}" for ln, msg in self.errors))


@dataclass
class ProblemSpec:
    family: str = "quadratic"
    n: float = 32  # int, or math.inf for streaming
    d: int = 16
    m: int = 4
    condition_number: float = 10.0
    convex: bool = True
    identical_curvature: bool = False
    margin: float = 0.5
    reg: tuple = ("zero",)
    streaming_family: str = "quadratic"
    lin_scale: float = 1.0
    sigma_sq: float | None = None


@dataclass
class AlgorithmSpec:
    name: str = "pccd"
    cycles: int = 50
    eta: float | str = "auto"
    eta_scale: float = 1.0
    p: float | None = None
    b: int | None = None
    bprime: int | None = None
    sample_sharing: str | None = None
    schedule: str | None = None
    eta_override: bool = False


@dataclass
class LambdaSpec:
    mode: str | None = None  # default chosen per family/algorithm
    values: tuple | None = None  # per-block scales for mode "explicit"
    lip_trailing: float | None = None
    lip_leading: float | None = None


@dataclass
class SeedSpec:
    base: int = 0
    count: int = 1


@dataclass
class DiagSpec:
    record_u: bool = False
    checks: tuple = ()
    s_surrogate_samples: int = 100_000


@dataclass
class OutputSpec:
    trace_path: str = "traces"
    report_path: str = "report"
    record_wall: bool = False


@dataclass
class ExperimentConfig:
    problem: ProblemSpec = field(default_factory=ProblemSpec)
    algorithm: AlgorithmSpec = field(default_factory=AlgorithmSpec)
    lam: LambdaSpec = field(default_factory=LambdaSpec)
    seeds: SeedSpec = field(default_factory=SeedSpec)
    diagnostics: DiagSpec = field(default_factory=DiagSpec)
    output: OutputSpec = field(default_factory=OutputSpec)

    def with_override(self, path: str, value) -> "ExperimentConfig":
        """Copy with one dotted field replaced (used by sweeps and CLI flags)."""
        section, key = _split_path(path)
        attr = _SECTION_ATTRS[section]
        sub = getattr(self, attr)
        if not hasattr(sub, key):
            raise KeyError(f"unknown config field {path!r}")
        return replace(self, **{attr: replace(sub, **{key: value})})


_SECTION_ATTRS = {
    "problem": "problem",
    "algorithm": "algorithm",
    "lambda": "lam",
    "seeds": "seeds",
    "diagnostics": "diagnostics",
    "output": "output",
}

_KEY_CANON = {"K": "cycles"}


def _split_path(path: str) -> tuple[str, str]:
    if "." not in path:
        raise KeyError(f"config field {path!r} needs a section prefix")
    section, key = path.split(".", 1)
    if section not in _SECTION_ATTRS:
        raise KeyError(f"unknown config section {section!r}")
    return section, _KEY_CANON.get(key, key)


def _parse_bool(tok: str) -> bool:
    low = tok.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ValueError(f"expected a boolean, got {tok!r}")


def _parse_int(tok: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ValueError(f"expected an integer, got {tok!r}") from None


def _parse_count(tok: str) -> float:
    if tok.lower() in ("inf", "infinite"):
        return math.inf
    return _parse_int(tok)


def _parse_float(tok: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ValueError(f"expected a number, got {tok!r}") from None


def _parse_eta(tok: str):
    if tok.lower() == "auto":
        return "auto"
    val = _parse_float(tok)
    if val <= 0:
        raise ValueError(f"eta must be positive, got {tok!r}")
    return val


def _parse_reg(tok: str) -> tuple:
    low = tok.lower().replace(" ", "")
    if low == "zero":
        return ("zero",)
    if low.startswith("l1(") and low.endswith(")"):
        return ("l1", _parse_float(low[3:-1]))
    if low.startswith("box(") and low.endswith(")"):
        parts = low[4:-1].split(",")
        if len(parts) != 2:
            raise ValueError(f"box regularizer needs two bounds, got {tok!r}")
        return ("box", _parse_float(parts[0]), _parse_float(parts[1]))
    raise ValueError(f"unknown regularizer {tok!r}; expected zero, l1(w), or box(lo,hi)")


def _parse_checks(tok: str) -> tuple:
    names = tuple(t.strip() for t in tok.split(",") if t.strip())
    for name in names:
        if name not in CHECK_NAMES:
            raise ValueError(f"unknown check {name!r}; known: {', '.join(CHECK_NAMES)}")
    return names


def _parse_values(tok: str) -> tuple:
    return tuple(_parse_float(t) for t in tok.split(",") if t.strip())


def _choice(options):
    def parse(tok: str) -> str:
        if tok not in options:
            raise ValueError(f"expected one of {', '.join(options)}; got {tok!r}")
        return tok

    return parse


_PARSERS = {
    "problem.family": _choice(FAMILIES),
    "problem.n": _parse_count,
    "problem.d": _parse_int,
    "problem.m": _parse_int,
    "problem.condition_number": _parse_float,
    "problem.convex": _parse_bool,
    "problem.identical_curvature": _parse_bool,
    "problem.margin": _parse_float,
    "problem.reg": _parse_reg,
    "problem.streaming_family": _choice(("quadratic", "sigmoid")),
    "problem.lin_scale": _parse_float,
    "problem.sigma_sq": _parse_float,
    "algorithm.name": _choice(ALGORITHMS),
    "algorithm.K": _parse_int,
    "algorithm.eta": _parse_eta,
    "algorithm.eta_scale": _parse_float,
    "algorithm.p": _parse_float,
    "algorithm.b": _parse_int,
    "algorithm.bprime": _parse_int,
    "algorithm.sample_sharing": _choice(("fresh_per_block", "shared_per_cycle")),
    "algorithm.schedule": _choice(SCHEDULES),
    "algorithm.eta_override": _parse_bool,
    "lambda.mode": _choice(LAMBDA_MODES),
    "lambda.values": _parse_values,
    "lambda.lip_trailing": _parse_float,
    "lambda.lip_leading": _parse_float,
    "seeds.base": _parse_int,
    "seeds.count": _parse_int,
    "diagnostics.record_u": _parse_bool,
    "diagnostics.checks": _parse_checks,
    "diagnostics.s_surrogate_samples": _parse_int,
    "output.trace_path": str,
    "output.report_path": str,
    "output.record_wall": _parse_bool,
}


def parse_config(text: str) -> ExperimentConfig:
    """Parse and fully validate; raises ConfigError listing every problem."""
    cfg = ExperimentConfig()
    errors: list[tuple[int, str]] = []
    key_lines: dict[str, int] = {}
    seen: set[str] = set()

    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append((ln, f"expected 'section.key = value', got {raw.strip()!r}"))
            continue
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _PARSERS:
            errors.append((ln, f"unknown key {key!r}"))
            continue
        if key in seen:
            errors.append((ln, f"duplicate key {key!r}"))
            continue
        seen.add(key)
        key_lines[key] = ln
        try:
            parsed = _PARSERS[key](value)
        except ValueError as exc:
            errors.append((ln, f"{key}: {exc}"))
            continue
        section, attr = _split_path(key)
        setattr(getattr(cfg, _SECTION_ATTRS[section]), attr, parsed)

    errors.extend(validate(cfg, key_lines))
    if errors:
        raise ConfigError(sorted(errors))
    return cfg


def _line(key_lines, key) -> int:
    return key_lines.get(key, 0)


def validate(cfg: ExperimentConfig, key_lines=None) -> list[tuple[int, str]]:
    """Cross-field constraints; returns (line, message) pairs (line 0 when
    the offending value is a default)."""
    key_lines = key_lines or {}
    errs: list[tuple[int, str]] = []
    p_spec, a = cfg.problem, cfg.algorithm

    streaming = p_spec.family == "streaming"
    if not streaming and p_spec.n == math.inf:
        errs.append((_line(key_lines, "problem.n"), "problem.n = inf requires family streaming"))
    if not streaming and (p_spec.n != math.inf) and int(p_spec.n) < 1:
        errs.append((_line(key_lines, "problem.n"), "problem.n must be >= 1"))
    if p_spec.d < 1:
        errs.append((_line(key_lines, "problem.d"), "problem.d must be >= 1"))
    if not 1 <= p_spec.m <= p_spec.d:
        errs.append((_line(key_lines, "problem.m"), "need 1 <= m <= d"))
    if p_spec.condition_number < 1:
        errs.append(
            (_line(key_lines, "problem.condition_number"), "condition_number must be >= 1")
        )
    if p_spec.reg[0] == "box" and not p_spec.reg[1] < p_spec.reg[2]:
        errs.append((_line(key_lines, "problem.reg"), "box bounds need lo < hi"))
    if p_spec.reg[0] == "l1" and p_spec.reg[1] < 0:
        errs.append((_line(key_lines, "problem.reg"), "l1 weight must be nonnegative"))

    if a.cycles < 1:
        errs.append((_line(key_lines, "algorithm.K"), "algorithm.K must be >= 1"))
    if a.eta_scale <= 0:
        errs.append((_line(key_lines, "algorithm.eta_scale"), "eta_scale must be positive"))

    stochastic = a.name in ("vrccd", "vroccd", "sccd", "page", "sgd")
    vr_like = a.name in ("vrccd", "vroccd", "sccd", "page")
    if a.name == "sccd" and a.p is not None and a.p != 1.0:
        errs.append((_line(key_lines, "algorithm.p"), "sccd forces p = 1"))
    if a.name == "vroccd" and a.sample_sharing == "fresh_per_block":
        errs.append(
            (_line(key_lines, "algorithm.sample_sharing"), "vroccd means shared_per_cycle")
        )
    if a.p is not None and not 0.0 < a.p <= 1.0:
        errs.append(
            (_line(key_lines, "algorithm.p"), f"p must lie in (0, 1], got {a.p}")
        )
    if vr_like and a.name != "sccd" and a.schedule is None and a.p is None:
        errs.append(
            (_line(key_lines, "algorithm.name"), f"{a.name} needs algorithm.p or a schedule")
        )
    if stochastic and a.schedule is None and a.b is None:
        errs.append((_line(key_lines, "algorithm.name"), f"{a.name} needs algorithm.b or a schedule"))
    if a.b is not None and a.b < 1:
        errs.append((_line(key_lines, "algorithm.b"), "b must be >= 1"))
    if a.bprime is not None and a.bprime < 1:
        errs.append((_line(key_lines, "algorithm.bprime"), "bprime must be >= 1"))
    if a.b is not None and a.bprime is not None and a.bprime > a.b:
        errs.append((_line(key_lines, "algorithm.bprime"), "need bprime <= b"))
    if not streaming and a.b is not None and p_spec.n != math.inf and a.b > int(p_spec.n):
        errs.append((_line(key_lines, "algorithm.b"), "need b <= n"))
    if streaming and a.name in ("pccd", "prox_gd"):
        errs.append(
            (_line(key_lines, "algorithm.name"), f"{a.name} needs exact gradients (finite n)")
        )
    if a.schedule is not None and streaming:
        errs.append(
            (_line(key_lines, "algorithm.schedule"), "finite_sum schedule needs finite n")
        )

    mode = cfg.lam.mode
    if mode == "explicit" and cfg.lam.values is None:
        errs.append((_line(key_lines, "lambda.mode"), "explicit mode needs lambda.values"))
    if cfg.lam.values is not None:
        if len(cfg.lam.values) != p_spec.m:
            errs.append((_line(key_lines, "lambda.values"), "need one scale per block"))
        elif any(v <= 0 for v in cfg.lam.values):
            errs.append((_line(key_lines, "lambda.values"), "scales must be positive"))
    if mode == "backtracking" and a.name != "pccd":
        errs.append(
            (
                _line(key_lines, "lambda.mode"),
                "backtracking calibration is only wired into pccd; give an exact or "
                "explicit metric for stochastic runs",
            )
        )
    if mode == "exact_quadratic" and p_spec.family == "sigmoid":
        errs.append(
            (_line(key_lines, "lambda.mode"), "exact_quadratic needs a quadratic family")
        )
    if mode == "sigmoid_bound" and p_spec.family != "sigmoid":
        errs.append((_line(key_lines, "lambda.mode"), "sigmoid_bound needs the sigmoid family"))
    if a.eta == "auto" and vr_like:
        can_auto = (
            (p_spec.family == "quadratic")
            or (p_spec.family == "streaming" and p_spec.streaming_family == "quadratic")
            or (cfg.lam.lip_trailing is not None and cfg.lam.lip_leading is not None)
        )
        if not can_auto:
            errs.append(
                (
                    _line(key_lines, "algorithm.eta"),
                    "eta = auto needs computable coupling constants (quadratic family) "
                    "or supplied lambda.lip_trailing / lambda.lip_leading",
                )
            )

    if cfg.seeds.count < 1:
        errs.append((_line(key_lines, "seeds.count"), "seeds.count must be >= 1"))
    if cfg.diagnostics.s_surrogate_samples < 0:
        errs.append(
            (_line(key_lines, "diagnostics.s_surrogate_samples"), "surrogate samples must be >= 0")
        )
    if cfg.diagnostics.record_u and streaming:
        errs.append(
            (_line(key_lines, "diagnostics.record_u"), "record_u needs exact gradients (finite n)")
        )
    for name in cfg.diagnostics.checks:
        if name in ("vr-descent", "vr-grad-vs-step", "vr-potential") and not cfg.diagnostics.record_u:
            errs.append(
                (_line(key_lines, "diagnostics.checks"), f"check {name} needs diagnostics.record_u")
            )
        if name in ("pl-envelope", "vr-pl-rate") and not (
            p_spec.family == "quadratic" and p_spec.convex and p_spec.reg[0] == "zero"
        ):
            errs.append(
                (
                    _line(key_lines, "diagnostics.checks"),
                    f"check {name} needs a convex quadratic with reg = zero (known mu and gap)",
                )
            )
    return errs


def config_to_dict(cfg: ExperimentConfig) -> dict:
    """Flat dotted-key view (for echoing resolved parameters into outputs)."""
    out = {}
    for section, attr in _SECTION_ATTRS.items():
        sub = getattr(cfg, attr)
        for f in dataclasses.fields(sub):
            out[f"{section}.{f.name}"] = getattr(sub, f.name)
    return out
