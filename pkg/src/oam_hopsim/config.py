"""Experiment configuration: flat TOML key/value files, overridable per key."""

from __future__ import annotations

import dataclasses
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .channel import SPEED_OF_LIGHT, ChannelGains, NoiseProfile, UcaGeometry, channel_gains, flat_gains

DEFAULT_CARRIER_HZ = 60e9
CHANNEL_KINDS = ("uca", "flat")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    # geometry; radii are not given by the reference setup and default to 5 cm
    n_t: int = 16
    n_r: int | None = None
    r1: float = 0.05
    r2: float = 0.05
    d: float = 3.0
    carrier_hz: float | None = None
    wavelength: float | None = None
    beta_re: float = 1.0
    beta_im: float = 0.0
    phi: float = 0.0
    channel: str = "uca"
    normalize: bool = True
    # sweep
    snr_db: list[float] = field(default_factory=lambda: [-6.0, -2.0, 2.0, 6.0])
    i_values: list[int] = field(default_factory=lambda: [3])
    n_t_values: list[int] = field(default_factory=lambda: [16])
    p0: float = 1.0
    kl_bounds: bool = True
    # monte carlo / hopping
    mc_samples: int = 100_000
    n_hops: int = 16
    seed: int = 0
    threads: int = 1
    output: str | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.carrier_hz is not None and self.wavelength is not None:
            raise ConfigError("give exactly one of carrier_hz and wavelength")
        for name in ("snr_db", "i_values", "n_t_values"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must be non-empty")
        if not all(math.isfinite(s) for s in self.snr_db):
            raise ConfigError("snr_db values must be finite")
        if self.channel not in CHANNEL_KINDS:
            raise ConfigError(f"channel must be one of {CHANNEL_KINDS}, got {self.channel!r}")
        if any(n < 2 for n in [self.n_t, *self.n_t_values]):
            raise ConfigError("element counts must be at least 2")
        if any(i < 1 for i in self.i_values):
            raise ConfigError("hop counts must be at least 1")
        if self.p0 < 0:
            raise ConfigError("p0 must be non-negative")
        if self.mc_samples < 10_000:
            raise ConfigError("mc_samples must be at least 10000")
        if self.n_hops < 1 or self.threads < 1:
            raise ConfigError("n_hops and threads must be positive")
        if self.n_r is not None and self.n_r != self.n_t:
            raise ConfigError("n_r must equal n_t for mode-diagonal decomposition")
        try:
            self.geometry()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def resolved_wavelength(self) -> float:
        if self.wavelength is not None:
            return self.wavelength
        return SPEED_OF_LIGHT / (self.carrier_hz if self.carrier_hz is not None else DEFAULT_CARRIER_HZ)

    def geometry(self, n_t: int | None = None) -> UcaGeometry:
        n_t = n_t or self.n_t
        return UcaGeometry(
            n_t=n_t,
            n_r=n_t,
            r1=self.r1,
            r2=self.r2,
            d=self.d,
            wavelength=self.resolved_wavelength,
            beta=complex(self.beta_re, self.beta_im),
            phi=self.phi,
        )

    def gains(self, n_t: int | None = None, raw: bool = False) -> ChannelGains:
        n_t = n_t or self.n_t
        if self.channel == "flat":
            return flat_gains(n_t)
        return channel_gains(self.geometry(n_t), normalize=self.normalize and not raw)

    def noise(self, n_t: int, snr_db: float) -> NoiseProfile:
        return NoiseProfile.from_snr_db(n_t, snr_db, self.p0)

    def to_dict(self) -> dict:
        return {k: v for k, v in dataclasses.asdict(self).items() if v is not None}

    def dumps(self) -> str:
        return tomli_w.dumps(self.to_dict())

    def replace(self, **changes) -> "ExperimentConfig":
        return from_mapping({**self.to_dict(), **changes})


FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}


def _coerce(name: str, value):
    kind = FIELDS[name].type
    try:
        if kind.startswith("list[float]"):
            return [float(v) for v in (value if isinstance(value, list) else [value])]
        if kind.startswith("list[int]"):
            vals = value if isinstance(value, list) else [value]
            if any(isinstance(v, float) and not v.is_integer() for v in vals):
                raise ValueError
            return [int(v) for v in vals]
        if value is None:
            return None
        if kind.startswith("bool"):
            if not isinstance(value, bool):
                raise ValueError
            return value
        if kind.startswith("int"):
            if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                raise ValueError
            return int(value)
        if kind.startswith("float"):
            return float(value)
        if kind.startswith("str"):
            return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"bad value for {name}: {value!r}") from None
    return value


def from_mapping(data: dict) -> ExperimentConfig:
    unknown = set(data) - set(FIELDS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(**{k: _coerce(k, v) for k, v in data.items()})


def loads(text: str) -> ExperimentConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None
    if any(isinstance(v, dict) for v in data.values()):
        raise ConfigError("config must be flat key = value pairs")
    return from_mapping(data)


def load(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return loads(text)


def parse_value(text: str):
    """Parse a command-line override using TOML value syntax, bare strings allowed."""
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text
