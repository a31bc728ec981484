"""Scenario configuration and geometry shared by every other module.

Lengths are metres, powers watts, angles radians.  Fields carrying a
``_db``/``_dbm`` suffix are logarithmic and converted once here.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

SPEED_OF_LIGHT = 299_792_458.0


class ConfigError(ValueError):
    """A configuration field is missing, malformed or out of range."""


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    return 10.0 * math.log10(value)


def dbm_to_watt(value_dbm: float) -> float:
    return 10.0 ** ((value_dbm - 30.0) / 10.0)


def noise_power(density_dbm_hz: float, bandwidth_hz: float, noise_figure_db: float = 0.0) -> float:
    """Thermal noise power in watts for a receiver of given bandwidth and noise figure."""
    if bandwidth_hz <= 0:
        raise ConfigError("bandwidth_hz must be positive")
    return dbm_to_watt(density_dbm_hz + 10.0 * math.log10(bandwidth_hz) + noise_figure_db)


@dataclass(frozen=True)
class Environment:
    """Urban morphology (ITU building statistics) plus mean excess path loss."""

    name: str
    rho1: float  # built-up land fraction
    rho2: float  # buildings per km^2
    sigma: float  # Rayleigh scale of building heights, m
    eta_los_db: float
    eta_nlos_db: float

    def __post_init__(self) -> None:
        if not 0.0 < self.rho1 <= 1.0:
            raise ConfigError(f"rho1 must lie in (0, 1], got {self.rho1}")
        if self.rho2 <= 0.0:
            raise ConfigError(f"rho2 must be positive, got {self.rho2}")
        if self.sigma <= 0.0:
            raise ConfigError(f"sigma must be positive, got {self.sigma}")
        if self.eta_los_db < self.eta_nlos_db:
            raise ConfigError("eta_los_db must not be below eta_nlos_db")

    @property
    def eta_los(self) -> float:
        return db_to_linear(self.eta_los_db)

    @property
    def eta_nlos(self) -> float:
        return db_to_linear(self.eta_nlos_db)


ENVIRONMENTS: dict[str, Environment] = {
    "suburban": Environment("suburban", 0.1, 750.0, 8.0, -0.1, -21.0),
    "urban": Environment("urban", 0.3, 500.0, 15.0, -1.0, -20.0),
    "dense_urban": Environment("dense_urban", 0.5, 300.0, 20.0, -1.6, -23.0),
    "highrise_urban": Environment("highrise_urban", 0.5, 300.0, 50.0, -2.3, -34.0),
}


def get_environment(name: str) -> Environment:
    key = name.lower().replace("-", "_").replace(" ", "_")
    try:
        return ENVIRONMENTS[key]
    except KeyError:
        raise ConfigError(
            f"unknown environment {name!r}; choose from {sorted(ENVIRONMENTS)}"
        ) from None


@dataclass(frozen=True)
class NetworkConfig:
    """Every scalar of one scenario.

    Antenna and coding gains are folded into ``ps_eff``/``pj_eff``; noise
    powers default to -174 dBm/Hz over 20 MHz with a 9 dB noise figure.
    """

    environment: Environment = field(default_factory=lambda: ENVIRONMENTS["suburban"])
    ps_w: float = 0.1
    pj_w: float = 0.01
    fc_hz: float = 2.0e9
    alpha: float = 2.0
    beta: float = 3.0
    h_m: float = 500.0
    r1_m: float = 500.0
    n_eves: int = 1
    l_sd_m: float = 100.0
    phi_d: float = 0.0
    l_tj_m: float = 0.0
    phi_jp: float = 0.0
    rt_bps_hz: float = 1.0
    n0_w: float = field(default_factory=lambda: noise_power(-174.0, 20e6, 9.0))
    ne_w: float | None = None  # None -> same as n0_w
    tx_gain_db: float = 0.0
    rx_gain_db: float = 0.0
    coding_gain_db: float = 0.0

    def __post_init__(self) -> None:
        positive = ("ps_w", "fc_hz", "h_m", "r1_m", "l_sd_m")
        for name in positive:
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.pj_w < 0.0:
            raise ConfigError(f"pj_w must be nonnegative, got {self.pj_w}")
        if self.alpha != 2.0:
            raise ConfigError("alpha is fixed at 2 (free-space exponent)")
        if self.beta <= 0.0:
            raise ConfigError(f"beta must be positive, got {self.beta}")
        if int(self.n_eves) != self.n_eves or self.n_eves < 1:
            raise ConfigError(f"n_eves must be an integer >= 1, got {self.n_eves}")
        if self.rt_bps_hz < 0.0:
            raise ConfigError(f"rt_bps_hz must be nonnegative, got {self.rt_bps_hz}")
        if not 0.0 <= self.l_tj_m <= self.r1_m:
            raise ConfigError(f"l_tj_m must lie in [0, r1_m], got {self.l_tj_m}")
        if self.n0_w < 0.0 or (self.ne_w is not None and self.ne_w < 0.0):
            raise ConfigError("noise powers must be nonnegative")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.fc_hz

    @property
    def fspl_gain(self) -> float:
        """(lambda / 4 pi)^2, the free-space factor shared by every link."""
        return (self.wavelength_m / (4.0 * math.pi)) ** 2

    @property
    def _gain(self) -> float:
        return db_to_linear(self.tx_gain_db + self.rx_gain_db + self.coding_gain_db)

    @property
    def ps_eff(self) -> float:
        return self.ps_w * self._gain

    @property
    def pj_eff(self) -> float:
        return self.pj_w * self._gain

    @property
    def ne_eff(self) -> float:
        return self.n0_w if self.ne_w is None else self.ne_w

    def replace(self, **changes: Any) -> "NetworkConfig":
        return dataclasses.replace(self, **changes)


def distance_jd(cfg: NetworkConfig) -> float:
    """3-D jammer-to-receiver distance."""
    dphi = cfg.phi_jp - cfg.phi_d
    horiz2 = cfg.l_tj_m ** 2 + cfg.l_sd_m ** 2 - 2.0 * cfg.l_tj_m * cfg.l_sd_m * math.cos(dphi)
    return math.sqrt(max(horiz2, 0.0) + cfg.h_m ** 2)


def horizontal_jd(cfg: NetworkConfig) -> float:
    """Ground-plane distance between the jammer projection and the receiver."""
    return math.sqrt(max(distance_jd(cfg) ** 2 - cfg.h_m ** 2, 0.0))


# -- JSON config ------------------------------------------------------------

_CONFIG_KEYS = {f.name for f in dataclasses.fields(NetworkConfig)} - {"environment"}


def config_to_dict(cfg: NetworkConfig) -> dict[str, Any]:
    out = dataclasses.asdict(cfg)
    out["environment"] = dataclasses.asdict(cfg.environment)
    return out


def config_from_dict(data: dict[str, Any]) -> NetworkConfig:
    """Build a config from a JSON-like mapping.

    ``environment`` may be a preset name or a full mapping.  Receiver
    position may be given as ``receiver_xy`` and jammer offset as
    ``jammer_xy`` instead of polar fields; noise may be given as
    ``noise_density_dbm_hz``/``bandwidth_hz``/``noise_figure_db``.
    """
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    data = dict(data)
    kwargs: dict[str, Any] = {}

    env = data.pop("environment", "suburban")
    if isinstance(env, str):
        kwargs["environment"] = get_environment(env)
    elif isinstance(env, dict):
        try:
            kwargs["environment"] = Environment(**env)
        except TypeError as exc:
            raise ConfigError(f"environment: {exc}") from None
    else:
        raise ConfigError("environment must be a preset name or an object")

    if "receiver_xy" in data:
        x, y = _pair(data.pop("receiver_xy"), "receiver_xy")
        kwargs["l_sd_m"] = math.hypot(x, y)
        kwargs["phi_d"] = math.atan2(y, x)
    if "jammer_xy" in data:
        x, y = _pair(data.pop("jammer_xy"), "jammer_xy")
        kwargs["l_tj_m"] = math.hypot(x, y)
        kwargs["phi_jp"] = math.atan2(y, x)

    noise_keys = ("noise_density_dbm_hz", "bandwidth_hz", "noise_figure_db")
    if any(k in data for k in noise_keys):
        density = float(data.pop("noise_density_dbm_hz", -174.0))
        bw = float(data.pop("bandwidth_hz", 20e6))
        nf = float(data.pop("noise_figure_db", 9.0))
        if "n0_w" not in data:
            kwargs["n0_w"] = noise_power(density, bw, nf)

    for key, value in data.items():
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config field {key!r}")
        if key == "n_eves":
            kwargs[key] = _number(value, key, integer=True)
        elif key == "ne_w" and value is None:
            kwargs[key] = None
        else:
            kwargs[key] = _number(value, key)
    return NetworkConfig(**kwargs)


def _number(value: Any, key: str, integer: bool = False) -> float | int:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"field {key!r} must be a number, got {value!r}")
    if integer:
        if int(value) != value:
            raise ConfigError(f"field {key!r} must be an integer, got {value!r}")
        return int(value)
    if not math.isfinite(value):
        raise ConfigError(f"field {key!r} must be finite")
    return float(value)


def _pair(value: Any, key: str) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"field {key!r} must be a two-element list")
    return float(_number(value[0], key)), float(_number(value[1], key))


def load_config(path: str | Path) -> NetworkConfig:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return config_from_dict(data)


def save_config(cfg: NetworkConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(cfg), indent=2) + "\n")
