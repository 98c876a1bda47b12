"""Flat key=value run configuration.

One assignment per line, ``#`` comments, no sections, no environment
variables. Numeric values accept SI unit suffixes appropriate to the key::

    R = 250um
    rho = 1.33e30/m3
    d0 = 0.5um
    omega_m = 1.18Mrad/s
    theta = 54.7356deg

Bare numbers are base SI (metres, radians, rad/s, 1/m^3). Every violation
in a file is reported at once, with line numbers where they apply.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .limits import DEFAULT_THETA_UNCERTAINTY, ExperimentConfig, NuisanceBox
from .geometry import SourceMass
from .sensor import NV_AXIS_ANGLE, PulseSequence, ReadoutModel, VibrationProfile

__all__ = ["ConfigError", "RunConfig", "parse_config", "load_config", "dump_config",
           "projected_defaults"]


class ConfigError(ValueError):
    """Invalid configuration. ``problems`` lists every violation found."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.problems))


_SEQUENCES = ("spin_echo", "cpmg", "ramsey")
_LAMBDA_SCALES = ("log", "linear")
_LAMBDA_RANGE = (10e-9, 0.1)

# unit families; bare numbers ("" suffix) are always base SI
_UNITS = {
    "length": {"": 1.0, "m": 1.0, "mm": 1e-3, "um": 1e-6, "µm": 1e-6, "nm": 1e-9},
    "angle": {"": 1.0, "rad": 1.0, "mrad": 1e-3, "deg": math.pi / 180.0},
    "density": {"": 1.0, "/m3": 1.0, "/cm3": 1e6, "/mm3": 1e9},
    "angular_frequency": {"": 1.0, "rad/s": 1.0, "krad/s": 1e3, "Mrad/s": 1e6},
    "bare": {"": 1.0},
}

# file key -> (dataclass field, value kind); kind is a unit family, "int"
# or "str"
_KEYS: dict[str, tuple[str, str]] = {
    "R": ("radius", "length"),
    "R_uncertainty": ("radius_uncertainty", "length"),
    "rho": ("rho", "density"),
    "d0": ("d0", "length"),
    "d0_uncertainty": ("d0_uncertainty", "length"),
    "A": ("amplitude", "length"),
    "A_uncertainty": ("amplitude_uncertainty", "length"),
    "omega_m": ("omega_m", "angular_frequency"),
    "theta": ("theta", "angle"),
    "theta_uncertainty": ("theta_uncertainty", "angle"),
    "sequence": ("sequence", "str"),
    "pi_pulses": ("pi_pulses", "int"),
    "phase_bound": ("phase_bound", "angle"),
    "lambda_min": ("lambda_min", "length"),
    "lambda_max": ("lambda_max", "length"),
    "lambda_points": ("lambda_points", "int"),
    "lambda_scale": ("lambda_scale", "str"),
    "rel_tol": ("rel_tol", "bare"),
    "seed": ("seed", "int"),
    "threads": ("threads", "int"),
    "output": ("output", "str"),
    "photons_per_shot": ("photons_per_shot", "bare"),
    "contrast": ("contrast", "bare"),
    "baseline": ("baseline", "bare"),
    "shots": ("shots", "int"),
    "phi_mw_points": ("phi_mw_points", "int"),
    "label": ("label", "str"),
}
_FIELD_TO_KEY = {f: k for k, (f, _) in _KEYS.items()}


@dataclass(frozen=True)
class RunConfig:
    """Every knob of a run, defaulting to the measured-run values."""

    radius: float = 250e-6
    radius_uncertainty: float = 2.5e-6
    rho: float = 1.33e30
    d0: float = 0.5e-6
    d0_uncertainty: float = 0.1e-6
    amplitude: float = 41.1e-9
    amplitude_uncertainty: float = 0.1e-9
    omega_m: float = 1.18e6
    theta: float = NV_AXIS_ANGLE
    theta_uncertainty: float = DEFAULT_THETA_UNCERTAINTY
    sequence: str = "spin_echo"
    pi_pulses: int | None = None
    phase_bound: float = 0.036
    lambda_min: float = 0.05e-6
    lambda_max: float = 50e-6
    lambda_points: int = 60
    lambda_scale: str = "log"
    rel_tol: float = 1e-9
    seed: int = 0
    threads: int = 1
    output: str | None = None
    photons_per_shot: float = 0.02
    contrast: float = 0.30
    baseline: float = 0.0
    shots: int = 650_000
    phi_mw_points: int = 12
    label: str = "current"

    def problems(self) -> list[str]:
        """All consistency violations, empty when the config is usable."""
        out = []

        def positive(name, value):
            if not (math.isfinite(value) and value > 0.0):
                out.append(f"{_FIELD_TO_KEY[name]} must be positive, got {value!r}")

        def uncertainty(name, value, centre):
            if not (math.isfinite(value) and 0.0 <= value):
                out.append(f"{_FIELD_TO_KEY[name]} must be non-negative, got {value!r}")
            elif value >= centre:
                out.append(f"{_FIELD_TO_KEY[name]} must be smaller than the "
                           f"central value {centre!r}, got {value!r}")

        positive("radius", self.radius)
        positive("rho", self.rho)
        positive("d0", self.d0)
        positive("amplitude", self.amplitude)
        positive("omega_m", self.omega_m)
        uncertainty("radius_uncertainty", self.radius_uncertainty, self.radius)
        uncertainty("d0_uncertainty", self.d0_uncertainty, self.d0)
        uncertainty("amplitude_uncertainty", self.amplitude_uncertainty, self.amplitude)
        if not (math.isfinite(self.theta) and 0.0 <= self.theta <= math.pi / 2.0):
            out.append(f"theta must lie in [0, pi/2], got {self.theta!r}")
        if not (math.isfinite(self.theta_uncertainty) and self.theta_uncertainty >= 0.0):
            out.append(f"theta_uncertainty must be non-negative, got {self.theta_uncertainty!r}")
        if self.sequence not in _SEQUENCES:
            out.append(f"sequence must be one of {_SEQUENCES}, got {self.sequence!r}")
        if self.sequence == "cpmg":
            if self.pi_pulses is None or self.pi_pulses < 1:
                out.append("pi_pulses must be a positive integer for a cpmg sequence")
        elif self.pi_pulses is not None:
            out.append(f"pi_pulses only applies to cpmg, not {self.sequence!r}")
        if not (math.isfinite(self.phase_bound) and self.phase_bound >= 0.0):
            out.append(f"phase_bound must be non-negative, got {self.phase_bound!r}")
        lo, hi = _LAMBDA_RANGE
        if not (math.isfinite(self.lambda_min) and lo <= self.lambda_min):
            out.append(f"lambda_min must be at least {lo:g} m, got {self.lambda_min!r}")
        if not (math.isfinite(self.lambda_max) and self.lambda_max <= hi):
            out.append(f"lambda_max must be at most {hi:g} m, got {self.lambda_max!r}")
        if math.isfinite(self.lambda_min) and math.isfinite(self.lambda_max):
            if self.lambda_min > self.lambda_max:
                out.append("lambda_min must not exceed lambda_max")
            elif self.lambda_min == self.lambda_max and self.lambda_points > 1:
                out.append("lambda_points must be 1 when lambda_min == lambda_max")
        if self.lambda_points < 1:
            out.append(f"lambda_points must be >= 1, got {self.lambda_points!r}")
        if self.lambda_scale not in _LAMBDA_SCALES:
            out.append(f"lambda_scale must be one of {_LAMBDA_SCALES}, got {self.lambda_scale!r}")
        if not (math.isfinite(self.rel_tol) and 1e-12 <= self.rel_tol <= 1e-3):
            out.append(f"rel_tol must lie in [1e-12, 1e-3], got {self.rel_tol!r}")
        if self.seed < 0:
            out.append(f"seed must be non-negative, got {self.seed!r}")
        if self.threads < 1:
            out.append(f"threads must be >= 1, got {self.threads!r}")
        positive("photons_per_shot", self.photons_per_shot)
        if not (math.isfinite(self.contrast) and 0.0 <= self.contrast <= 1.0):
            out.append(f"contrast must lie in [0, 1], got {self.contrast!r}")
        if not (math.isfinite(self.baseline) and self.baseline >= 0.0):
            out.append(f"baseline must be non-negative, got {self.baseline!r}")
        if self.shots < 1:
            out.append(f"shots must be >= 1, got {self.shots!r}")
        if self.phi_mw_points < 3:
            out.append(f"phi_mw_points must be >= 3 to fit a cosine, got {self.phi_mw_points!r}")
        return out

    def require_valid(self) -> "RunConfig":
        problems = self.problems()
        if problems:
            raise ConfigError(problems)
        return self

    # conversions to the working objects

    def source(self) -> SourceMass:
        return SourceMass(radius=self.radius, radius_uncertainty=self.radius_uncertainty,
                          nucleon_density=self.rho, label=self.label)

    def vibration(self) -> VibrationProfile:
        return VibrationProfile(d0=self.d0, d0_uncertainty=self.d0_uncertainty,
                                amplitude=self.amplitude,
                                amplitude_uncertainty=self.amplitude_uncertainty,
                                omega_m=self.omega_m)

    def pulse_sequence(self) -> PulseSequence:
        if self.sequence == "cpmg":
            return PulseSequence.cpmg(self.pi_pulses, theta=self.theta)
        if self.sequence == "ramsey":
            return PulseSequence.ramsey(theta=self.theta)
        return PulseSequence.spin_echo(theta=self.theta)

    def experiment(self) -> ExperimentConfig:
        source = self.source()
        vib = self.vibration()
        seq = self.pulse_sequence()
        nuisance = NuisanceBox.from_central(source, vib, seq.theta,
                                            theta_uncertainty=self.theta_uncertainty)
        return ExperimentConfig(source=source, vib=vib, seq=seq,
                                phase_bound=self.phase_bound,
                                nuisance=nuisance, label=self.label)

    def lambda_grid(self) -> np.ndarray:
        if self.lambda_points == 1:
            return np.array([self.lambda_min])
        if self.lambda_scale == "linear":
            return np.linspace(self.lambda_min, self.lambda_max, self.lambda_points)
        return np.geomspace(self.lambda_min, self.lambda_max, self.lambda_points)

    def readout_model(self, seed: int | None = None) -> ReadoutModel:
        return ReadoutModel(photons_per_shot=self.photons_per_shot,
                            contrast=self.contrast, baseline=self.baseline,
                            shots=self.shots,
                            seed=self.seed if seed is None else seed)

    def phi_mw_grid(self) -> np.ndarray:
        # open grid: endpoint 2*pi would duplicate 0 mod 2*pi
        return np.linspace(0.0, 2.0 * math.pi, self.phi_mw_points, endpoint=False)


_NUMBER_RE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*(\S*)$")


def _parse_number(raw: str, family: str):
    """Value with an optional unit suffix from the key's family, in base SI.
    Returns (value, error_message)."""
    units = _UNITS[family]
    match = _NUMBER_RE.match(raw.strip())
    if match is None:
        return None, f"not a number: {raw.strip()!r}"
    number, suffix = match.groups()
    if suffix not in units:
        known = ", ".join(repr(u) for u in units if u)
        return None, (f"unit {suffix!r} is not valid here"
                      + (f" (accepts {known} or a bare SI number)" if known else ""))
    value = float(number)
    if not math.isfinite(value):
        return None, f"value must be finite, got {raw.strip()!r}"
    return value * units[suffix], None


def projected_defaults() -> RunConfig:
    """Projected-improvement defaults: BGO source on a faster fork, CPMG-1024,
    phase bound shrunk by sqrt(17), uncertainties collapsed."""
    return RunConfig(
        radius_uncertainty=0.0,
        rho=4.29e30,
        d0=100e-9,
        d0_uncertainty=0.0,
        amplitude=400e-9,
        amplitude_uncertainty=0.0,
        omega_m=2.51e6,
        theta_uncertainty=0.0,
        sequence="cpmg",
        pi_pulses=1024,
        phase_bound=0.036 / math.sqrt(17.0),
        label="projected",
    )


def _parse_int(raw: str):
    try:
        return int(raw.strip()), None
    except ValueError:
        return None, f"not an integer: {raw.strip()!r}"


def _parse_str(raw: str):
    text = raw.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "'\"":
        text = text[1:-1]
    return text, None


def parse_config(text: str, defaults: RunConfig | None = None) -> RunConfig:
    """RunConfig from key=value text, overriding ``defaults``.

    Collects every problem (syntax, unknown or duplicate keys, bad values,
    consistency violations) into one ConfigError.
    """
    values: dict[str, object] = {}
    problems: list[str] = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            problems.append(f"line {lineno}: expected 'key = value', got {stripped!r}")
            continue
        key, raw = stripped.split("=", 1)
        key = key.strip()
        if key not in _KEYS:
            problems.append(f"line {lineno}: unknown key {key!r}")
            continue
        if key in seen:
            problems.append(f"line {lineno}: duplicate key {key!r}")
            continue
        seen.add(key)
        field_name, kind = _KEYS[key]
        if kind == "int":
            value, err = _parse_int(raw)
        elif kind == "str":
            value, err = _parse_str(raw)
        else:
            value, err = _parse_number(raw, kind)
        if err is not None:
            problems.append(f"line {lineno}: {key}: {err}")
            continue
        values[field_name] = value
    config = replace(defaults if defaults is not None else RunConfig(), **values)
    problems.extend(config.problems())
    if problems:
        raise ConfigError(problems)
    return config


def load_config(path: str | Path, defaults: RunConfig | None = None) -> RunConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"), defaults=defaults)


def dump_config(config: RunConfig) -> str:
    """Canonical key=value text, floats in bare SI units.

    ``parse_config(dump_config(c))`` reproduces ``c`` exactly; repr floats
    round-trip.
    """
    lines = []
    for f in fields(config):
        value = getattr(config, f.name)
        if value is None:
            continue
        key = _FIELD_TO_KEY[f.name]
        if isinstance(value, bool):  # bool is an int subclass; none expected
            raise TypeError(f"unexpected bool field {f.name}")
        if isinstance(value, float):
            lines.append(f"{key} = {value!r}")
        else:
            lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
