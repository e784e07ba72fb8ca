"""Run configuration: INI-style files, named presets, and tolerances.

A configuration has up to four kinds of sections:

    [model]        preset and/or explicit parameter values
    [equilibria]   root-scan resolution (optional)
    [simulation]   horizon, step, stride, transient fraction, initial state
    [kernel.h1] .. [kernel.h34]   one lag kernel per pathway

Analysis commands need only [model]; simulation commands need all of
[simulation] and the five kernel sections. Unknown sections or keys are
hard errors so that a mistyped delay name cannot silently fall back to
a default. Every value parsed here is echoed verbatim into output
manifests.
"""

from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .kernels import PATHWAYS, KernelSpec
from .model import ModelParams, preset, preset_names

__all__ = [
    "ConfigError",
    "Tolerances",
    "RunConfig",
    "SimSettings",
    "load_config",
    "scenario_preset_names",
]

_MODEL_KEYS = (
    "k1", "k2", "k3", "k4", "w1", "w2", "w3", "w4", "xi",
    "eta", "mu", "alpha1", "alpha2", "alpha3", "c1", "c2", "c3",
)
_SIM_KEYS = ("t_end", "step", "stride", "transient_fraction", "initial")
_KERNEL_KEYS = ("family", "tau", "order", "theta")


class ConfigError(ValueError):
    """Invalid configuration; ``problems`` lists (field, message) pairs."""

    def __init__(self, problems: list[tuple[str, str]]):
        self.problems = tuple(problems)
        lines = "; ".join(f"{field}: {msg}" for field, msg in problems)
        super().__init__(lines)


@dataclass(frozen=True)
class Tolerances:
    """Numeric knobs honored across commands, overridable from the CLI.

    root_xtol_rel: relative bisection tolerance for all scalar roots.
    hopf_residual: acceptance bound on characteristic-equation defects.
    omega_scan_points: grid density of the downward crossing scan.
    eigen_agreement: margin inside which an eigenvalue real part is
        treated as zero when cross-checking the Hurwitz verdict.
    positivity / box_slack: trajectory invariant-monitoring bounds.
    noise_floor_factor, peak_cv_max, decay_trend_ratio: cycle-detection
        thresholds (see detect_cycle).
    """

    root_xtol_rel: float = 1e-12
    hopf_residual: float = 1e-7
    omega_scan_points: int = 10_000
    eigen_agreement: float = 1e-8
    positivity: float = 1e-9
    box_slack: float = 1e-6
    noise_floor_factor: float = 1e-4
    peak_cv_max: float = 0.05
    decay_trend_ratio: float = 1.4

    def apply_overrides(self, pairs: list[str]) -> "Tolerances":
        """New instance with ``name=value`` strings applied."""
        problems = []
        values = {}
        fields = {f.name: f for f in dataclasses.fields(self)}
        for pair in pairs:
            name, sep, raw = pair.partition("=")
            name = name.strip()
            if not sep:
                problems.append(("tolerance", f"expected name=value, got {pair!r}"))
                continue
            if name not in fields:
                known = ", ".join(sorted(fields))
                problems.append((f"tolerance.{name}", f"unknown (known: {known})"))
                continue
            try:
                typ = fields[name].type
                if typ == "int" or isinstance(getattr(self, name), int):
                    values[name] = int(raw)
                else:
                    values[name] = float(raw)
            except ValueError:
                problems.append((f"tolerance.{name}", f"not a number: {raw!r}"))
        if problems:
            raise ConfigError(problems)
        return dataclasses.replace(self, **values)

    def items(self) -> list[tuple[str, object]]:
        return [(f.name, getattr(self, f.name)) for f in dataclasses.fields(self)]


@dataclass(frozen=True)
class SimSettings:
    t_end: float
    step: float = 0.05
    stride: float = 0.5
    transient_fraction: float = 0.5
    # either ("label", name, factor) or ("point", (x1, x2, x3, x4))
    initial: tuple = ("label", "E1", 1.01)


@dataclass(frozen=True)
class RunConfig:
    """A parsed and validated configuration.

    ``sim`` and ``kernels`` are None when the file does not configure
    simulation. ``items`` preserves every resolved key-value pair in
    file order for manifest echoing.
    """

    params: ModelParams
    grid_points: int
    sim: SimSettings | None
    kernels: dict[str, KernelSpec] | None
    items: tuple[tuple[str, str], ...]
    source: str


def scenario_preset_names() -> tuple[str, ...]:
    """Names of configuration files shipped inside the package."""
    root = resources.files("hpaxis.presets")
    return tuple(
        sorted(p.name[: -len(".cfg")] for p in root.iterdir() if p.name.endswith(".cfg"))
    )


def _resolve_source(name_or_path: str):
    """Map a preset name or filesystem path to readable text."""
    path = Path(name_or_path)
    if path.suffix == "" and not path.exists():
        candidate = resources.files("hpaxis.presets").joinpath(name_or_path + ".cfg")
        if candidate.is_file():
            return candidate.read_text(encoding="utf-8"), f"preset:{name_or_path}"
        raise ConfigError(
            [
                (
                    "config",
                    f"{name_or_path!r} is neither a file nor a known preset "
                    f"(presets: {', '.join(scenario_preset_names())})",
                )
            ]
        )
    if not path.is_file():
        raise ConfigError([("config", f"no such file: {name_or_path}")])
    return path.read_text(encoding="utf-8"), str(path)


def _parse_float(section, key, problems, minimum=None, exclusive=True):
    raw = section[key]
    try:
        value = float(raw)
    except ValueError:
        problems.append((f"{section.name}.{key}", f"not a number: {raw!r}"))
        return None
    if not math.isfinite(value):
        problems.append((f"{section.name}.{key}", f"not finite: {raw!r}"))
        return None
    if minimum is not None:
        if exclusive and value <= minimum:
            problems.append((f"{section.name}.{key}", f"must be > {minimum}, got {raw}"))
            return None
        if not exclusive and value < minimum:
            problems.append((f"{section.name}.{key}", f"must be >= {minimum}, got {raw}"))
            return None
    return value


def _parse_initial(raw: str, problems) -> tuple | None:
    text = raw.strip()
    if text.upper().startswith("E"):
        name, _, factor_text = text.partition("*")
        name = name.strip().upper()
        if not name[1:].isdigit():
            problems.append(("simulation.initial", f"bad equilibrium label {name!r}"))
            return None
        factor = 1.0
        if factor_text.strip():
            try:
                factor = float(factor_text)
            except ValueError:
                problems.append(
                    ("simulation.initial", f"bad perturbation factor {factor_text.strip()!r}")
                )
                return None
        return ("label", name, factor)
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        problems.append(
            ("simulation.initial", f"expected an E-label or 4 comma-separated values, got {raw!r}")
        )
        return None
    try:
        values = tuple(float(p) for p in parts)
    except ValueError:
        problems.append(("simulation.initial", f"non-numeric component in {raw!r}"))
        return None
    if min(values) < 0.0:
        problems.append(("simulation.initial", f"components must be nonnegative: {raw!r}"))
        return None
    return ("point", values)


def parse_initial(raw: str) -> tuple:
    """Parse an initial-state spec: 'E2', 'E1*1.01', or four comma values."""
    problems: list[tuple[str, str]] = []
    spec = _parse_initial(raw, problems)
    if problems:
        raise ConfigError(problems)
    return spec


def load_config(name_or_path: str) -> RunConfig:
    """Parse, validate, and resolve a configuration.

    Accepts a filesystem path or the bare name of a shipped preset
    configuration. All problems are collected and reported together.
    """
    text, source = _resolve_source(name_or_path)
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";")
    )
    parser.optionxform = str  # keep keys as written; schema is lowercase
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([("config", f"parse error: {exc}")]) from None

    problems: list[tuple[str, str]] = []
    items: list[tuple[str, str]] = []
    known_sections = {"model", "equilibria", "simulation"} | {
        f"kernel.{p}" for p in PATHWAYS
    }
    for sec in parser.sections():
        if sec not in known_sections:
            problems.append((sec, "unknown section"))

    # ---- [model]
    model_values: dict[str, float] = {}
    base: ModelParams | None = None
    preset_given = False
    if parser.has_section("model"):
        sec = parser["model"]
        for key in sec:
            if key == "preset":
                preset_given = True
                name = sec[key].strip()
                try:
                    base = preset(name)
                except KeyError:
                    problems.append(
                        ("model.preset", f"unknown preset {name!r} (known: {', '.join(preset_names())})")
                    )
                items.append(("model.preset", name))
            elif key in _MODEL_KEYS:
                value = _parse_float(sec, key, problems, minimum=0.0)
                if value is not None:
                    model_values[key] = value
                    items.append((f"model.{key}", sec[key].strip()))
            else:
                problems.append((f"model.{key}", "unknown key"))
    if not preset_given and not model_values:
        problems.append(("model", "section must set a preset or explicit parameters"))
        raise ConfigError(problems)
    params: ModelParams | None = None
    if not problems:
        try:
            if base is not None:
                params = dataclasses.replace(base, **model_values)
            else:
                missing = [k for k in _MODEL_KEYS[:9] if k not in model_values]
                if missing:
                    problems.append(
                        ("model", f"no preset given and required keys missing: {', '.join(missing)}")
                    )
                else:
                    params = ModelParams(**model_values)
        except ValueError as exc:
            problems.append(("model", str(exc)))

    # ---- [equilibria]
    grid_points = 10_000
    if parser.has_section("equilibria"):
        sec = parser["equilibria"]
        for key in sec:
            if key == "grid_points":
                try:
                    grid_points = int(sec[key])
                except ValueError:
                    problems.append(("equilibria.grid_points", f"not an integer: {sec[key]!r}"))
                    continue
                if grid_points < 100:
                    problems.append(("equilibria.grid_points", f"must be >= 100, got {grid_points}"))
                items.append(("equilibria.grid_points", sec[key].strip()))
            else:
                problems.append((f"equilibria.{key}", "unknown key"))

    # ---- [simulation]
    sim: SimSettings | None = None
    if parser.has_section("simulation"):
        sec = parser["simulation"]
        values: dict[str, object] = {}
        for key in sec:
            if key not in _SIM_KEYS:
                problems.append((f"simulation.{key}", "unknown key"))
                continue
            if key == "initial":
                parsed = _parse_initial(sec[key], problems)
                if parsed is not None:
                    values["initial"] = parsed
                    items.append(("simulation.initial", sec[key].strip()))
            elif key == "transient_fraction":
                value = _parse_float(sec, key, problems, minimum=0.0, exclusive=False)
                if value is not None:
                    if value >= 1.0:
                        problems.append((f"simulation.{key}", f"must be < 1, got {value}"))
                    else:
                        values[key] = value
                        items.append((f"simulation.{key}", sec[key].strip()))
            else:
                value = _parse_float(sec, key, problems, minimum=0.0)
                if value is not None:
                    values[key] = value
                    items.append((f"simulation.{key}", sec[key].strip()))
        if "t_end" not in values and not any(
            f.startswith("simulation.t_end") for f, _ in problems
        ):
            problems.append(("simulation.t_end", "required"))
        if not problems:
            sim = SimSettings(**values)

    # ---- [kernel.*]
    kernels: dict[str, KernelSpec] | None = None
    kernel_sections = [s for s in parser.sections() if s.startswith("kernel.")]
    if kernel_sections:
        specs: dict[str, KernelSpec] = {}
        for pathway in PATHWAYS:
            sec_name = f"kernel.{pathway}"
            if not parser.has_section(sec_name):
                problems.append((sec_name, "section missing (all five pathways need one)"))
                continue
            sec = parser[sec_name]
            for key in sec:
                if key not in _KERNEL_KEYS:
                    problems.append((f"{sec_name}.{key}", "unknown key"))
            family = sec.get("family", "").strip()
            if family not in ("dirac", "gamma"):
                problems.append(
                    (f"{sec_name}.family", f"must be dirac or gamma, got {family!r}")
                )
                continue
            try:
                if family == "dirac":
                    if "order" in sec or "theta" in sec:
                        problems.append((sec_name, "dirac kernels take only tau"))
                        continue
                    if "tau" not in sec:
                        problems.append((f"{sec_name}.tau", "required for dirac kernels"))
                        continue
                    tau = _parse_float(sec, "tau", problems, minimum=0.0, exclusive=False)
                    if tau is None:
                        continue
                    spec = KernelSpec.dirac(tau)
                else:
                    if "tau" in sec:
                        problems.append((sec_name, "gamma kernels take order and theta, not tau"))
                        continue
                    if "order" not in sec:
                        problems.append((f"{sec_name}.order", "required for gamma kernels"))
                        continue
                    try:
                        order = int(sec["order"])
                    except ValueError:
                        problems.append((f"{sec_name}.order", f"not an integer: {sec['order']!r}"))
                        continue
                    theta = 0.0
                    if order > 0:
                        theta = _parse_float(sec, "theta", problems, minimum=0.0) if "theta" in sec else None
                        if theta is None:
                            if not any(f == f"{sec_name}.theta" for f, _ in problems):
                                problems.append((f"{sec_name}.theta", "required when order > 0"))
                            continue
                    elif "theta" in sec and sec["theta"].strip() not in ("0", "0.0"):
                        problems.append(
                            (f"{sec_name}.theta", "must be 0 (or absent) when order = 0")
                        )
                        continue
                    spec = KernelSpec.gamma(order, theta)
            except ValueError as exc:
                problems.append((sec_name, str(exc)))
                continue
            specs[pathway] = spec
            for key in _KERNEL_KEYS:
                if key in sec:
                    items.append((f"{sec_name}.{key}", sec[key].strip()))
        if len(specs) == len(PATHWAYS) and not problems:
            kernels = specs

    if problems:
        raise ConfigError(problems)
    assert params is not None
    return RunConfig(
        params=params,
        grid_points=grid_points,
        sim=sim,
        kernels=kernels,
        items=tuple(items),
        source=source,
    )
