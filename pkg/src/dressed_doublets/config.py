"""Experiment configuration: a flat ``key = value`` text format.

Blank lines are ignored and ``#`` starts a comment. ``D`` and ``ratio`` are
required; every other key has a default:

=================  ========  ==============================================
key                default   meaning
=================  ========  ==============================================
D                  --        barrier parameter of the double well
ratio              --        target ``|rabi_12| / omega``
basis_size         80        harmonic basis functions
basis_frequency    auto      basis frequency, or ``auto`` to optimize it
n_levels           20        eigenstates kept in the propagation
periods            3         run length in 1'<->4' Rabi periods
steps_per_period   2048      RK4 steps per drive period
initial            ground    ``ground``, a level index, or amplitudes
outputs            out       output directory
threshold          0.1       validity threshold for the regime report
max_steps          20000000  refuse runs longer than this many steps
=================  ========  ==============================================

``initial`` amplitudes are comma separated Python complex literals
(``0.6, 0.8j``), given either for the four model levels or for all
``n_levels`` propagated levels; they are normalized on use.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError

REQUIRED = ("D", "ratio")


@dataclass(frozen=True)
class ExperimentConfig:
    D: float
    ratio: float
    basis_size: int = 80
    basis_frequency: float | None = None
    n_levels: int = 20
    periods: float = 3.0
    steps_per_period: int = 2048
    initial: str = "ground"
    outputs: Path = Path("out")
    threshold: float = 0.1
    max_steps: int = 20_000_000

    def __post_init__(self):
        positive = ("D", "basis_size", "n_levels", "periods", "steps_per_period", "threshold", "max_steps")
        for key in positive:
            v = getattr(self, key)
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"{key} must be positive, got {v!r}")
        if not (math.isfinite(self.ratio) and self.ratio >= 0):
            raise ConfigError(f"ratio must be nonnegative, got {self.ratio!r}")
        if self.basis_frequency is not None and not self.basis_frequency > 0:
            raise ConfigError(f"basis_frequency must be positive, got {self.basis_frequency!r}")
        if self.n_levels < 6:
            raise ConfigError("n_levels must be at least 6 (model uses levels 1, 2, 5, 6)")
        if self.basis_size < self.n_levels + 10:
            raise ConfigError("basis_size must exceed n_levels by at least 10")
        if self.steps_per_period < 64:
            raise ConfigError("steps_per_period must be at least 64")
        object.__setattr__(self, "outputs", Path(self.outputs))
        self.initial_amplitudes()

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def initial_amplitudes(self) -> np.ndarray:
        """Initial state over the propagated levels (normalized)."""
        sel = self.initial.strip()
        c = np.zeros(self.n_levels, dtype=complex)
        if sel == "ground":
            c[0] = 1.0
            return c
        if "," not in sel:
            try:
                level = int(sel)
            except ValueError:
                raise ConfigError(f"initial: expected 'ground', a level index or amplitudes, got {sel!r}")
            if not 1 <= level <= self.n_levels:
                raise ConfigError(f"initial: level {level} outside 1..{self.n_levels}")
            c[level - 1] = 1.0
            return c
        try:
            amps = np.array([complex(a.strip().replace(" ", "")) for a in sel.split(",")])
        except ValueError:
            raise ConfigError(f"initial: cannot parse amplitudes {sel!r}")
        if amps.size == 4:
            c[[0, 1, 4, 5]] = amps
        elif amps.size == self.n_levels:
            c[:] = amps
        else:
            raise ConfigError(f"initial: need 4 or {self.n_levels} amplitudes, got {amps.size}")
        norm = math.sqrt(float(np.vdot(c, c).real))
        if not norm > 0 or not math.isfinite(norm):
            raise ConfigError("initial: amplitudes must have nonzero finite norm")
        return c / norm


def _convert(key: str, raw: str, lineno: int):
    field = ExperimentConfig.__dataclass_fields__[key]
    kind = field.type
    try:
        if key == "basis_frequency":
            return None if raw.lower() == "auto" else float(raw)
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "Path":
            return Path(raw)
        return raw
    except ValueError:
        raise ConfigError(f"line {lineno}: invalid value {raw!r} for {key}")


def parse_config(text: str, **overrides) -> ExperimentConfig:
    """Parse configuration text; keyword ``overrides`` win over file values."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in ExperimentConfig.__dataclass_fields__:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if not raw:
            raise ConfigError(f"line {lineno}: empty value for {key}")
        values[key] = _convert(key, raw, lineno)
    values.update({k: v for k, v in overrides.items() if v is not None})
    missing = [k for k in REQUIRED if k not in values]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")
    return ExperimentConfig(**values)
