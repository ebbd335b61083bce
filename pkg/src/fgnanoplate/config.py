"""Analysis configuration files (YAML) and their validation."""
from __future__ import annotations

from pathlib import Path
from typing import Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import ConfigError


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class Geometry(_Strict):
    a: float = Field(10.0, gt=0, description="length along x, nm")
    b: float = Field(10.0, gt=0, description="length along y, nm")
    h: float = Field(1.0, gt=0, description="thickness, nm")


class Material(_Strict):
    E_c: float = Field(348.43e9, gt=0)
    E_m: float = Field(201.04e9, gt=0)
    nu_c: float = Field(0.3, gt=0, lt=0.5)
    nu_m: float = Field(0.3, gt=0, lt=0.5)
    rho_c: float = Field(2370.0, gt=0)
    rho_m: float = Field(8166.0, gt=0)
    n: float = Field(5.0, ge=0, description="gradient index")
    nu_override: Optional[float] = Field(0.3, gt=0, lt=0.5, description="null uses Mori-Tanaka nu(z)")


class Nonlocal(_Strict):
    mu: float = Field(0.0, ge=0, description="nm^2")


class Discretization(_Strict):
    p: int = Field(3, ge=1)
    n_u: int = Field(13, ge=2)
    n_v: int = Field(13, ge=2)

    @model_validator(mode="after")
    def _enough_control_points(self):
        if min(self.n_u, self.n_v) < self.p + 1:
            raise ValueError(f"control net {self.n_u}x{self.n_v} too small for degree {self.p}")
        return self


class SweepGrid(_Strict):
    """Grid axes; ``b = a / a_b_ratio`` and ``h = a / a_h_ratio`` with ``geometry.a`` fixed."""

    n: Optional[list[float]] = None
    mu: Optional[list[float]] = None
    a_b_ratio: Optional[list[float]] = None
    a_h_ratio: Optional[list[float]] = None
    bc: Optional[list[Literal["SSSS", "CCCC"]]] = None

    @model_validator(mode="after")
    def _check_values(self):
        for name in ("n", "mu", "a_b_ratio", "a_h_ratio", "bc"):
            vals = getattr(self, name)
            if vals is not None and len(vals) == 0:
                raise ValueError(f"sweep axis {name!r} is empty")
        for name, lo_ok in (("n", 0.0), ("mu", 0.0)):
            if any(v < lo_ok for v in getattr(self, name) or []):
                raise ValueError(f"sweep axis {name!r} has negative values")
        for name in ("a_b_ratio", "a_h_ratio"):
            if any(v <= 0 for v in getattr(self, name) or []):
                raise ValueError(f"sweep axis {name!r} must be positive")
        return self


class Convergence(_Strict):
    nets: list[Union[int, tuple[int, int]]] = Field(default_factory=lambda: [5, 9, 13, 17, 21])

    def pairs(self) -> list[tuple[int, int]]:
        return [(n, n) if isinstance(n, int) else tuple(n) for n in self.nets]

    @model_validator(mode="after")
    def _ascending(self):
        sizes = [a * b for a, b in self.pairs()]
        if not sizes or sizes != sorted(sizes) or len(set(sizes)) != len(sizes):
            raise ValueError("convergence nets must be non-empty and strictly ascending")
        return self


class AnalysisConfig(_Strict):
    geometry: Geometry = Geometry()
    material: Material = Material()
    nonlocal_: Nonlocal = Field(Nonlocal(), alias="nonlocal")
    discretization: Discretization = Discretization()
    bc: Literal["SSSS", "CCCC"] = "SSSS"
    modes: int = Field(3, ge=1)
    kappa: float = Field(5.0 / 6.0, gt=0, le=1)
    sweep: Optional[SweepGrid] = None
    convergence: Optional[Convergence] = None

    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    @property
    def mu(self) -> float:
        return self.nonlocal_.mu

    def with_updates(self, **changes) -> "AnalysisConfig":
        """Copy with nested fields replaced, e.g. ``with_updates(mu=1.0, b=5.0)``."""
        data = self.to_dict()
        where = {
            "a": "geometry", "b": "geometry", "h": "geometry",
            "n": "material", "mu": "nonlocal",
            "p": "discretization", "n_u": "discretization", "n_v": "discretization",
        }
        for key, value in changes.items():
            if key in where:
                data[where[key]][key] = value
            else:
                data[key] = value
        return AnalysisConfig.model_validate(data)

    def to_dict(self) -> dict:
        return self.model_dump(mode="json", by_alias=True, exclude_none=True)


def _format_error(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        path = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"{path}: {err['msg']}")
    return "; ".join(lines)


def parse_config(data: dict | None) -> AnalysisConfig:
    try:
        return AnalysisConfig.model_validate(data or {})
    except ValidationError as exc:
        raise ConfigError(f"invalid configuration: {_format_error(exc)}") from exc


def load_config(path: str | Path) -> AnalysisConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML: {exc}") from exc
    if data is not None and not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return parse_config(data)


def dump_config(config: AnalysisConfig) -> str:
    return yaml.safe_dump(config.to_dict(), sort_keys=False)
