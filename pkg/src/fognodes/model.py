"""Network configuration and the quantities derived from an election probability.

All lengths are in km, powers are linear watts and rates are bit/s.
"""
from __future__ import annotations

import dataclasses
import json
import numbers
from dataclasses import dataclass
from os import PathLike
from pathlib import Path
from typing import Any, Mapping

import yaml

SUPPORTED_ALPHAS = (1, 2, 4)

# short names accepted in config documents and on the command line
KEY_ALIASES = {
    "a": "half_side_a",
    "R": "fog_radius_R",
    "n": "total_nodes_n",
}

REQUIRED_KEYS = ("half_side_a", "fog_radius_R", "total_nodes_n", "alpha")


class ConfigError(ValueError):
    """A configuration value is missing or violates a documented bound."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


class OutOfModelError(ValueError):
    """The closed-form optimum falls outside the open interval (0, 1)."""


@dataclass(frozen=True)
class NetworkConfig:
    """Deployment geometry and radio constants of one cloud-fog-thing network.

    The square ``[-a, a]^2`` holds ``n`` ordinary nodes with the cloud at the
    origin. The fog nodes form a circular mesh network of radius ``R``.
    """

    half_side_a: float
    fog_radius_R: float
    total_nodes_n: int
    alpha: int
    tx_power_device_P: float = 1.0
    tx_power_fog_P: float = 1.0
    noise_var_sigma2: float = 1.0
    interference_fog_I: float = 0.0
    interference_cloud_I: float = 0.0
    bandwidth_W: float = 1.0
    packet_bits_M: int = 1000
    processed_bits_K: int | None = None
    channel_inv_mean_c: float = 1.0
    fixed_delays: float = 0.0

    def __post_init__(self):
        if self.processed_bits_K is None:
            object.__setattr__(self, "processed_bits_K", self.packet_bits_M // 2)
        _validate(self)

    @property
    def a(self) -> float:
        return self.half_side_a

    @property
    def R(self) -> float:
        return self.fog_radius_R

    @property
    def n(self) -> int:
        return self.total_nodes_n

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    def replace(self, **changes) -> "NetworkConfig":
        return dataclasses.replace(self, **_canonical_keys(changes))


def _is_int(value) -> bool:
    return isinstance(value, numbers.Integral) and not isinstance(value, bool)


def _validate(cfg: NetworkConfig) -> None:
    if isinstance(cfg.alpha, bool) or cfg.alpha not in SUPPORTED_ALPHAS:
        raise ConfigError("alpha", f"unsupported path-loss exponent {cfg.alpha!r}; expected one of {SUPPORTED_ALPHAS}")
    object.__setattr__(cfg, "alpha", int(cfg.alpha))

    if not cfg.half_side_a > 0:
        raise ConfigError("half_side_a", f"must be > 0, got {cfg.half_side_a}")
    if not cfg.fog_radius_R > 0:
        raise ConfigError("fog_radius_R", f"must be > 0, got {cfg.fog_radius_R}")
    if not cfg.fog_radius_R < cfg.half_side_a:
        raise ConfigError(
            "fog_radius_R",
            f"must be < half_side_a={cfg.half_side_a}, got {cfg.fog_radius_R}",
        )
    if not _is_int(cfg.total_nodes_n) or cfg.total_nodes_n < 2:
        raise ConfigError("total_nodes_n", f"must be an integer >= 2, got {cfg.total_nodes_n!r}")
    if not _is_int(cfg.packet_bits_M) or cfg.packet_bits_M < 1:
        raise ConfigError("packet_bits_M", f"must be a positive integer, got {cfg.packet_bits_M!r}")
    if not _is_int(cfg.processed_bits_K) or not 0 <= cfg.processed_bits_K <= cfg.packet_bits_M:
        raise ConfigError(
            "processed_bits_K",
            f"must be an integer in [0, {cfg.packet_bits_M}], got {cfg.processed_bits_K!r}",
        )
    for key in ("tx_power_device_P", "tx_power_fog_P", "noise_var_sigma2", "bandwidth_W", "channel_inv_mean_c"):
        if not getattr(cfg, key) > 0:
            raise ConfigError(key, f"must be > 0, got {getattr(cfg, key)}")
    for key in ("interference_fog_I", "interference_cloud_I", "fixed_delays"):
        if not getattr(cfg, key) >= 0:
            raise ConfigError(key, f"must be >= 0, got {getattr(cfg, key)}")


_FIELD_NAMES = {f.name for f in dataclasses.fields(NetworkConfig)}


def _canonical_keys(doc: Mapping[str, Any]) -> dict[str, Any]:
    out = {}
    for key, value in doc.items():
        name = KEY_ALIASES.get(key, key)
        if name not in _FIELD_NAMES:
            raise ConfigError(key, "unknown configuration key")
        out[name] = value
    return out


def read_config_document(path: str | PathLike) -> dict[str, Any]:
    """Read a flat key/value document from a JSON or YAML file."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        doc = json.loads(text)
    else:
        doc = yaml.safe_load(text)
    if not isinstance(doc, Mapping):
        raise ConfigError("<document>", f"{path} does not hold a flat key/value mapping")
    return dict(doc)


def load_config(
    source: Mapping[str, Any] | str | PathLike | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> NetworkConfig:
    """Build a validated :class:`NetworkConfig`.

    Parameters
    ----------
    source : mapping or path, optional
        Flat key/value document, or a ``.json``/``.yaml`` file holding one.
        Short keys ``a``, ``R`` and ``n`` are accepted as aliases.
    overrides : mapping, optional
        Values that win over ``source`` (e.g. command-line flags). ``None``
        values are ignored.

    Raises
    ------
    ConfigError
        On a missing required key, an unknown key, or a bound violation.
    """
    if source is None:
        doc: dict[str, Any] = {}
    elif isinstance(source, Mapping):
        doc = dict(source)
    else:
        doc = read_config_document(source)

    merged = _canonical_keys(doc)
    if overrides:
        merged.update(_canonical_keys({k: v for k, v in overrides.items() if v is not None}))

    for key in REQUIRED_KEYS:
        if key not in merged:
            raise ConfigError(key, "missing required key")
    return NetworkConfig(**merged)


def dump_config(cfg: NetworkConfig) -> str:
    """Serialize ``cfg`` as a JSON document accepted by :func:`load_config`."""
    return json.dumps(cfg.to_dict(), indent=2)


def derived_quantities(cfg: NetworkConfig, p: float) -> tuple[float, float, float]:
    """Return ``(n0, n1, devices_per_fog)`` for election probability ``p``.

    Counts are kept fractional.
    """
    if not 0 < p < 1:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    n = cfg.total_nodes_n
    n1 = n * p
    n0 = n - n1
    return n0, n1, n0 / n1


@dataclass(frozen=True)
class OptimizationResult:
    """Optimum election probability and the node counts it implies."""

    alpha: int
    total_nodes_n: int
    p_analytic: float
    p_numeric: float
    fog_count_n1: float
    device_count_n0: float
    devices_per_fog: float
    objective_at_optimum: float

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)
