"""Configuration, DAC constellation and desired beampattern.

All objects here are immutable once built.  ``RadarConfig`` instances are
normally produced by :func:`make_config` (keyword defaults) or
:func:`load_config` (flat ``key = value`` text files) and then checked with
:func:`validate_config`.
"""

from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Mapping

import numpy as np

__all__ = [
    "ConfigError",
    "NotPowerOfTwoError",
    "EmptyPassbandError",
    "DampingRangeError",
    "DuplicateDirectionError",
    "TooManyDirectionsError",
    "DirectionRangeError",
    "DacBitsError",
    "RadarConfig",
    "Constellation",
    "DesiredPattern",
    "build_constellation",
    "build_flat_pattern",
    "validate_config",
    "make_config",
    "default_passband",
    "evenly_spaced_directions",
    "parse_config_text",
    "load_config",
    "config_from_mapping",
    "FULL_SCALE_DEFAULTS",
]

MAX_DAC_BITS = 16


class ConfigError(ValueError):
    """Base class for invalid configuration values."""


class NotPowerOfTwoError(ConfigError):
    pass


class EmptyPassbandError(ConfigError):
    pass


class DampingRangeError(ConfigError):
    pass


class DuplicateDirectionError(ConfigError):
    pass


class TooManyDirectionsError(ConfigError):
    pass


class DirectionRangeError(ConfigError):
    pass


class DacBitsError(ConfigError):
    pass


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def default_passband(num_samples: int) -> tuple[int, int]:
    """Half-band ``[-T/4, T/4)``; the full band when ``T < 4``."""
    q = num_samples // 4
    if q == 0:
        lo = -(num_samples // 2)
        return lo, lo + num_samples
    return -q, q


def evenly_spaced_directions(k: int) -> tuple[float, ...]:
    """``k`` angles ``pi * i / (k + 1)``, ``i = 1..k``, strictly inside (0, pi)."""
    return tuple(math.pi * i / (k + 1) for i in range(1, k + 1))


@dataclass(frozen=True)
class RadarConfig:
    """Physical and algorithmic parameters of one synthesis run.

    Frequency indices ``m`` run over ``-(T//2) .. T - T//2 - 1`` and are
    stored at position ``m + T//2``.  ``passband`` is the half-open index
    interval ``[m_lo, m_hi)`` in that same convention.
    """

    num_antennas: int = 128
    num_samples: int = 1024
    center_freq: float = 77e9
    sample_interval: float = 0.5e-9
    dac_bits: int = 2
    directions: tuple[float, ...] = field(default_factory=lambda: evenly_spaced_directions(10))
    damping: float = 0.3
    regularization: float | None = None
    max_iters: int = 200
    rel_tol: float = 1e-4
    passband: tuple[int, int] | None = None
    intensity: float = 1.0
    seed: int = 0

    @property
    def num_directions(self) -> int:
        return len(self.directions)

    @property
    def alpha(self) -> float:
        """Regularization weight, ``K * T`` unless set explicitly."""
        if self.regularization is None:
            return float(self.num_directions * self.num_samples)
        return float(self.regularization)

    @property
    def band(self) -> tuple[int, int]:
        if self.passband is None:
            return default_passband(self.num_samples)
        return self.passband

    @property
    def freq_indices(self) -> np.ndarray:
        t = self.num_samples
        return np.arange(t) - t // 2

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["directions"] = list(self.directions)
        out["passband"] = list(self.band)
        out["regularization"] = self.alpha
        return out


FULL_SCALE_DEFAULTS = RadarConfig()


def validate_config(cfg: RadarConfig) -> RadarConfig:
    """Return ``cfg`` unchanged if every invariant holds, else raise.

    Each violated invariant has its own :class:`ConfigError` subclass.
    """
    if not isinstance(cfg.num_antennas, (int, np.integer)) or cfg.num_antennas < 1:
        raise ConfigError(f"num_antennas must be a positive integer, got {cfg.num_antennas!r}")
    if not isinstance(cfg.num_samples, (int, np.integer)) or not _is_power_of_two(int(cfg.num_samples)):
        raise NotPowerOfTwoError(f"num_samples must be a power of two, got {cfg.num_samples!r}")
    if not isinstance(cfg.dac_bits, (int, np.integer)) or not 1 <= cfg.dac_bits <= MAX_DAC_BITS:
        raise DacBitsError(f"dac_bits must be in [1, {MAX_DAC_BITS}], got {cfg.dac_bits!r}")
    if not (0.0 <= cfg.damping < 1.0):
        raise DampingRangeError(f"damping must satisfy 0 <= mu < 1, got {cfg.damping!r}")
    k = len(cfg.directions)
    if k == 0:
        raise ConfigError("at least one direction is required")
    if k > cfg.num_antennas:
        raise TooManyDirectionsError(f"K={k} directions exceed N={cfg.num_antennas} antennas")
    for phi in cfg.directions:
        if not (0.0 < phi < math.pi):
            raise DirectionRangeError(f"direction {phi!r} rad is outside (0, pi)")
    if len(set(cfg.directions)) != k:
        raise DuplicateDirectionError(f"directions must be distinct, got {list(cfg.directions)}")
    lo, hi = cfg.band
    t = cfg.num_samples
    if not (-(t // 2) <= lo < hi <= t - t // 2):
        raise EmptyPassbandError(f"passband [{lo}, {hi}) is empty or outside [{-(t // 2)}, {t - t // 2})")
    if cfg.regularization is not None and cfg.regularization < 0:
        raise ConfigError(f"regularization must be nonnegative, got {cfg.regularization!r}")
    if not isinstance(cfg.max_iters, (int, np.integer)) or cfg.max_iters < 1:
        raise ConfigError(f"max_iters must be a positive integer, got {cfg.max_iters!r}")
    if not cfg.rel_tol > 0:
        raise ConfigError(f"rel_tol must be positive, got {cfg.rel_tol!r}")
    if not (cfg.center_freq > 0 and cfg.sample_interval > 0):
        raise ConfigError("center_freq and sample_interval must be positive")
    if not cfg.intensity > 0:
        raise ConfigError(f"intensity must be positive, got {cfg.intensity!r}")
    return cfg


def make_config(**kwargs: Any) -> RadarConfig:
    """Build and validate a config.

    Accepts every :class:`RadarConfig` field plus ``num_directions`` (evenly
    spaced angles, used when ``directions`` is not given).
    """
    k = kwargs.pop("num_directions", None)
    if "directions" in kwargs and kwargs["directions"] is not None:
        kwargs["directions"] = tuple(float(p) for p in kwargs["directions"])
    elif k is not None:
        kwargs["directions"] = evenly_spaced_directions(int(k))
    else:
        kwargs.pop("directions", None)
    if kwargs.get("passband") is not None:
        lo, hi = kwargs["passband"]
        kwargs["passband"] = (int(lo), int(hi))
    return validate_config(RadarConfig(**kwargs))


@dataclass(frozen=True)
class Constellation:
    """The ``2**b`` phase-only DAC levels ``exp(j 2 pi (l + 1/2) / 2**b)``."""

    bits: int
    points: np.ndarray

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def step(self) -> float:
        return 2.0 * math.pi / self.size

    def index_of(self, values: np.ndarray) -> np.ndarray:
        """Constellation index of each (already quantized) value."""
        phase = np.mod(np.angle(values), 2.0 * math.pi)
        return np.mod(np.rint(phase / self.step - 0.5).astype(np.int64), self.size)


def build_constellation(b: int) -> Constellation:
    if not isinstance(b, (int, np.integer)) or not 1 <= b <= MAX_DAC_BITS:
        raise DacBitsError(f"dac_bits must be in [1, {MAX_DAC_BITS}], got {b!r}")
    size = 2**b
    points = np.exp(1j * (2.0 * np.pi / size) * (np.arange(size) + 0.5))
    points.setflags(write=False)
    return Constellation(bits=int(b), points=points)


@dataclass(frozen=True)
class DesiredPattern:
    """Nonnegative target intensities, frequency-major: ``values[m + T//2, k]``."""

    values: np.ndarray

    @property
    def num_samples(self) -> int:
        return self.values.shape[0]

    @property
    def num_directions(self) -> int:
        return self.values.shape[1]

    @property
    def d(self) -> np.ndarray:
        """Stacked length ``K*T`` vector ``[d[m_0]; d[m_1]; ...]``."""
        return self.values.reshape(-1)

    def block(self, m: int) -> np.ndarray:
        return self.values[m + self.num_samples // 2]

    @classmethod
    def from_array(cls, values: Any, num_samples: int, num_directions: int) -> "DesiredPattern":
        arr = np.asarray(values, dtype=float)
        if arr.size != num_samples * num_directions:
            raise ValueError(
                f"desired pattern has {arr.size} entries, expected {num_samples}x{num_directions}"
            )
        arr = arr.reshape(num_samples, num_directions).copy()
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ValueError("desired pattern must be finite and nonnegative")
        arr.setflags(write=False)
        return cls(arr)


def build_flat_pattern(cfg: RadarConfig, intensity: float | None = None) -> DesiredPattern:
    """``intensity`` in every passband bin and direction, zero elsewhere."""
    level = cfg.intensity if intensity is None else intensity
    if not level > 0:
        raise ValueError(f"intensity must be positive, got {level!r}")
    lo, hi = cfg.band
    t = cfg.num_samples
    values = np.zeros((t, cfg.num_directions))
    values[lo + t // 2 : hi + t // 2, :] = level
    values.setflags(write=False)
    return DesiredPattern(values)


# --- config files -----------------------------------------------------------

_ALIASES = {
    "n": "num_antennas",
    "t": "num_samples",
    "k": "num_directions",
    "b": "dac_bits",
    "mu": "damping",
    "alpha": "regularization",
    "f_c": "center_freq",
    "fc": "center_freq",
    "t_s": "sample_interval",
    "ts": "sample_interval",
    "directions": "directions_deg",
}

_INT_KEYS = {"num_antennas", "num_samples", "num_directions", "dac_bits", "max_iters", "seed"}
_FLOAT_KEYS = {"center_freq", "sample_interval", "damping", "regularization", "rel_tol", "intensity", "sample_rate"}


def _canonical_key(key: str) -> str:
    k = key.strip()
    return _ALIASES.get(k.lower(), k.lower())


def parse_config_text(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = line.split("=", 1)
        out[_canonical_key(key)] = value.strip()
    return out


def config_from_mapping(raw: Mapping[str, Any]) -> RadarConfig:
    """Build a validated config from string (or already typed) values.

    Angles come in degrees under ``directions_deg``; ``sample_rate`` (Hz) is
    accepted in place of ``sample_interval``.
    """
    kwargs: dict[str, Any] = {}
    for key, value in raw.items():
        key = _canonical_key(key)
        if value is None or (isinstance(value, str) and value.strip().lower() in ("", "none", "auto")):
            continue
        try:
            if key in _INT_KEYS:
                kwargs[key] = int(float(value)) if isinstance(value, str) else int(value)
            elif key in _FLOAT_KEYS:
                kwargs[key] = float(value)
            elif key == "directions_deg":
                vals = value.split(",") if isinstance(value, str) else value
                kwargs["directions"] = tuple(math.radians(float(v)) for v in vals)
            elif key == "directions_rad":
                vals = value.split(",") if isinstance(value, str) else value
                kwargs["directions"] = tuple(float(v) for v in vals)
            elif key == "passband":
                vals = value.split(",") if isinstance(value, str) else value
                lo, hi = (int(float(v)) for v in vals)
                kwargs["passband"] = (lo, hi)
            else:
                raise ConfigError(f"unknown config key {key!r}")
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad value for {key!r}: {value!r}") from exc
    if "sample_rate" in kwargs:
        rate = kwargs.pop("sample_rate")
        kwargs.setdefault("sample_interval", 1.0 / rate)
    return make_config(**kwargs)


def load_config(path: str | os.PathLike[str], overrides: Mapping[str, Any] | None = None) -> RadarConfig:
    """Read a config file, apply ``overrides`` (same keys), validate."""
    with open(path, encoding="utf-8") as fh:
        raw: dict[str, Any] = dict(parse_config_text(fh.read()))
    for key, value in (overrides or {}).items():
        ckey = _canonical_key(key)
        # an explicit K override replaces the direction list
        if ckey == "num_directions":
            raw.pop("directions_deg", None)
            raw.pop("directions_rad", None)
        raw[ckey] = value
    return config_from_mapping(raw)


def with_overrides(cfg: RadarConfig, **changes: Any) -> RadarConfig:
    return validate_config(replace(cfg, **changes))
