"""Run configuration: JSON file schema, defaults and CLI overrides."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .catalog import FamilyId, FamilyParams


class ConfigError(ValueError):
    """Malformed configuration; the CLI maps it to exit code 2."""


@dataclass
class ParamsConfig:
    b: float = 0.0
    c: float = 1.0
    d: float = 0.0
    sign: int = 1
    m: float = 0.0


@dataclass
class GridConfig:
    # None means: derive from the family domain / the subcommand default
    a: float | None = None
    b: float | None = None
    n: int | None = None


@dataclass
class SpectralConfig:
    k: int = 4
    depth: int = 2


@dataclass
class TolerancesConfig:
    residual: float = 1e-9
    spectral: float = 5e-4


@dataclass
class OutputConfig:
    format: str = "json"
    path: str = "-"


@dataclass
class RunConfig:
    family: str | None = None
    params: ParamsConfig = field(default_factory=ParamsConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    spectral: SpectralConfig = field(default_factory=SpectralConfig)
    tolerances: TolerancesConfig = field(default_factory=TolerancesConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def family_id(self) -> FamilyId:
        if self.family is None:
            raise ConfigError("family: no family given (use --family or the config file)")
        return FamilyId.parse(self.family)

    def family_params(self) -> FamilyParams:
        p = self.params
        return FamilyParams(b=p.b, c=p.c, d=p.d, sign=p.sign, m=p.m)

    def to_dict(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


_SECTIONS = {
    "params": ParamsConfig,
    "grid": GridConfig,
    "spectral": SpectralConfig,
    "tolerances": TolerancesConfig,
    "output": OutputConfig,
}
_INT_FIELDS = {"sign", "n", "k", "depth"}
_STR_FIELDS = {"format", "path"}


def _coerce(where: str, name: str, value):
    if value is None:
        if name in ("a", "b", "n") and where == "grid":
            return None
        raise ConfigError(f"{where}.{name}: null is not allowed")
    if isinstance(value, bool):
        raise ConfigError(f"{where}.{name}: expected a number, got {value!r}")
    if name in _STR_FIELDS:
        if not isinstance(value, str):
            raise ConfigError(f"{where}.{name}: expected a string, got {value!r}")
        return value
    if name in _INT_FIELDS:
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if not isinstance(value, int):
            raise ConfigError(f"{where}.{name}: expected an integer, got {value!r}")
        return value
    if not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{name}: expected a number, got {value!r}")
    return float(value)


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be an object")
    cfg = RunConfig()
    for key, value in data.items():
        if key == "family":
            if value is not None:
                try:
                    value = FamilyId.parse(value).value
                except ValueError as exc:
                    raise ConfigError(f"family: {exc}") from None
            cfg.family = value
            continue
        if key not in _SECTIONS:
            raise ConfigError(f"unknown field {key!r}")
        if not isinstance(value, dict):
            raise ConfigError(f"{key}: expected an object")
        section = getattr(cfg, key)
        known = {f.name for f in fields(section)}
        for name, item in value.items():
            if name not in known:
                raise ConfigError(f"unknown field '{key}.{name}'")
            setattr(section, name, _coerce(key, name, item))
    validate_config(cfg)
    return cfg


def validate_config(cfg: RunConfig) -> None:
    if cfg.params.sign not in (1, -1):
        raise ConfigError("params.sign: must be +1 or -1")
    if cfg.output.format not in ("json", "csv"):
        raise ConfigError(f"output.format: expected 'json' or 'csv', got {cfg.output.format!r}")
    if cfg.grid.n is not None and cfg.grid.n < 1:
        raise ConfigError("grid.n: must be positive")
    if cfg.spectral.k < 1:
        raise ConfigError("spectral.k: must be positive")
    if cfg.spectral.depth < 0:
        raise ConfigError("spectral.depth: must be non-negative")
    for name in ("residual", "spectral"):
        if not getattr(cfg.tolerances, name) > 0:
            raise ConfigError(f"tolerances.{name}: must be positive")


def load_config(path: str | Path) -> RunConfig:
    """Parse a JSON run configuration; missing fields take their defaults.

    Raises:
        ConfigError: with a ``file:line:col`` or ``field`` diagnostic.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    try:
        return config_from_dict(data)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
