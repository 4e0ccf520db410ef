"""Simulation configuration and its flat ``key = value`` file format."""

from __future__ import annotations

import dataclasses
import logging
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

log = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "SQGFRONT_OUTPUT_DIR"


class ConfigError(ValueError):
    """Malformed or inconsistent configuration; the message names the offending key."""


@dataclass
class SimConfig:
    scenario: str = "circle"
    params: dict = field(default_factory=dict)
    n: int = 256
    dt: float = 0.0
    t_end: float = 0.1
    s: float = 0.25
    filter_level: float = 1e-12
    reparam_trigger: float = 1e-3
    f_threshold: float = math.inf
    cfl: float = 0.25
    record_interval: int = 10
    snapshot_interval: int = 0
    max_steps: int = 0
    output_dir: str = ""
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self):
        if int(self.n) != self.n or self.n < 8 or self.n % 2:
            raise ConfigError(f"n: must be an even integer >= 8, got {self.n!r}")
        if not self.t_end > 0:
            raise ConfigError(f"t_end: must be > 0, got {self.t_end!r}")
        if self.dt < 0:
            raise ConfigError(f"dt: must be >= 0 (0 selects the CFL step), got {self.dt!r}")
        if not self.cfl > 0:
            raise ConfigError(f"cfl: must be > 0, got {self.cfl!r}")
        if self.s < 0:
            raise ConfigError(f"s: must be >= 0, got {self.s!r}")
        if not 0 < self.s < 0.5:
            log.warning("s = %g lies outside (0, 1/2); norms are computed anyway", self.s)
        if self.filter_level < 0:
            raise ConfigError(f"filter_level: must be >= 0, got {self.filter_level!r}")
        if not self.reparam_trigger > 0:
            raise ConfigError(f"reparam_trigger: must be > 0, got {self.reparam_trigger!r}")
        for key in ("record_interval", "snapshot_interval", "max_steps", "threads"):
            if getattr(self, key) < 0:
                raise ConfigError(f"{key}: must be >= 0, got {getattr(self, key)!r}")
        if self.record_interval == 0:
            raise ConfigError("record_interval: must be >= 1")

    @property
    def worker_threads(self) -> int:
        return self.threads if self.threads > 0 else (os.cpu_count() or 1)

    def resolved_output_dir(self) -> Path:
        return Path(self.output_dir or os.environ.get(OUTPUT_DIR_ENV, "") or "sqgfront-out")

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)


_FIELDS = {f.name: f for f in dataclasses.fields(SimConfig)}


def _parse_number(text: str):
    t = text.strip()
    if t.lower() in ("inf", "+inf", "infinity"):
        return math.inf
    try:
        return int(t)
    except ValueError:
        return float(t)


def coerce(key: str, text):
    """Convert a textual value for ``key`` into the field's type.

    Keys of the form ``param.<name>`` go to the scenario parameters.
    """
    if key.startswith("param."):
        try:
            return _parse_number(text)
        except ValueError:
            return str(text).strip()
    if key not in _FIELDS:
        raise ConfigError(f"{key}: unknown configuration key")
    kind = type(getattr(SimConfig(), key)) if key != "params" else dict
    if kind is str:
        return str(text).strip()
    try:
        value = _parse_number(str(text))
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}") from None
    if kind is int:
        if value != int(value):
            raise ConfigError(f"{key}: expected an integer, got {text!r}")
        return int(value)
    return float(value)


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines (``#`` starts a comment) into a dict of raw strings."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: missing key")
        out[key.replace("-", "_")] = value
    return out


def build_config(values: dict) -> SimConfig:
    """Assemble a SimConfig from raw key/value pairs (strings or numbers)."""
    kwargs, params = {}, {}
    for key, text in values.items():
        if key.startswith("param."):
            params[key[len("param."):]] = coerce(key, text)
        else:
            kwargs[key] = coerce(key, text)
    if params:
        kwargs["params"] = params
    return SimConfig(**kwargs)


def load_config(path) -> dict:
    return parse_config_text(Path(path).read_text())
