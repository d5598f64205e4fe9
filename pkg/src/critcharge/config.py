"""
Constants and run configuration.

Run files are JSON or YAML. Values merge in the order defaults, file, command
line; unknown keys are rejected at every level.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, fields, is_dataclass
from pathlib import Path
from typing import Any, Mapping, Optional

import yaml

from .errors import ConfigError

logger = logging.getLogger(__name__)

CONSTANTS = {
    # Discretization
    "QUADRATURE_POINTS": 10,
    "DEFAULT_ELEMENTS": 200,
    "DEFAULT_R_CUT": 10.0,
    "DEFAULT_ELEMENTS_3D": 15,
    "DEFAULT_R_CUT_3D": 40.0,
    "DEFAULT_GROWTH_3D": 1.3,
    "DEFAULT_ANGULAR_ELEMENTS": 3,
    # Wigner correlation, -a / (b + r_s)
    "WIGNER_A": 0.29,
    "WIGNER_B": 5.1,
    # SCF
    "SCF_MIXING": 0.5,
    "SCF_ENERGY_TOL": 1e-9,
    "SCF_DENSITY_TOL": 1e-8,
    "SCF_MAX_ITER": 200,
    "UNBOUND_RADIUS_FRACTION": 0.9,
    # Shift-invert
    "SHIFT_FACTOR": 1.1,
    "SHIFT_RETRY_FACTOR": 1.3,
    # FSS
    "CROSSING_XTOL": 1e-13,
    "CROSSING_RESIDUAL_TOL": 1e-8,
    "CROSSING_MAX_STEPS": 200,
    "COLLAPSE_WINDOW": 1.0,
    # Exit codes
    "EXIT_OK": 0,
    "EXIT_CONFIG": 2,
    "EXIT_SOLVER": 3,
    "EXIT_ANALYSIS": 4,
}

METHOD_ALIASES = {
    "hf": "hf",
    "hf_wigner": "hf_wigner",
    "hf-wigner": "hf_wigner",
    "total-energy": "hf_wigner",
    "lda": "lda",
    "exact": "exact_direct",
    "exact_direct": "exact_direct",
    "exact-direct": "exact_direct",
    "exact_scaled": "exact_scaled",
    "exact-scaled": "exact_scaled",
    "synthetic": "synthetic",
}

SCF_METHODS = ("hf", "hf_wigner", "lda")
EXACT_METHODS = ("exact_direct", "exact_scaled")


def normalize_method(name: str) -> str:
    try:
        return METHOD_ALIASES[str(name).strip().lower()]
    except KeyError:
        raise ConfigError(
            f"unknown method {name!r}; expected one of {sorted(set(METHOD_ALIASES))}"
        ) from None


def _positive(name: str, value, allow_none: bool = False) -> None:
    if value is None and allow_none:
        return
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0:
        raise ConfigError(f"{name} must be a positive number, got {value!r}")


def _positive_int(name: str, value) -> None:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError(f"{name} must be a positive integer, got {value!r}")


@dataclass(frozen=True)
class MeshSpec:
    """Radial element count (per axis for 3D), cutoff, grading and basis."""

    n_elements: Optional[int] = None
    r_cut: Optional[float] = None
    growth: Optional[float] = None
    n_angular: int = CONSTANTS["DEFAULT_ANGULAR_ELEMENTS"]
    basis: str = "c0"

    def __post_init__(self):
        if self.n_elements is not None:
            _positive_int("mesh.n_elements", self.n_elements)
        _positive("mesh.r_cut", self.r_cut, allow_none=True)
        _positive("mesh.growth", self.growth, allow_none=True)
        if self.growth is not None and self.growth < 1.0:
            raise ConfigError(f"mesh.growth must be >= 1, got {self.growth}")
        _positive_int("mesh.n_angular", self.n_angular)
        if str(self.basis).lower() not in ("c0", "c1"):
            raise ConfigError(f"mesh.basis must be 'c0' or 'c1', got {self.basis!r}")
        object.__setattr__(self, "basis", str(self.basis).lower())

    def resolved(self, three_d: bool) -> "MeshSpec":
        return MeshSpec(
            n_elements=self.n_elements
            or CONSTANTS["DEFAULT_ELEMENTS_3D" if three_d else "DEFAULT_ELEMENTS"],
            r_cut=self.r_cut or CONSTANTS["DEFAULT_R_CUT_3D" if three_d else "DEFAULT_R_CUT"],
            growth=self.growth or (CONSTANTS["DEFAULT_GROWTH_3D"] if three_d else 1.0),
            n_angular=self.n_angular,
            basis=self.basis,
        )


@dataclass(frozen=True)
class ScfSpec:
    mixing: float = CONSTANTS["SCF_MIXING"]
    energy_tol: float = CONSTANTS["SCF_ENERGY_TOL"]
    density_tol: float = CONSTANTS["SCF_DENSITY_TOL"]
    max_iter: int = CONSTANTS["SCF_MAX_ITER"]
    one_electron_energy: str = "analytic"

    def __post_init__(self):
        _positive("scf.mixing", self.mixing)
        if self.mixing > 1.0:
            raise ConfigError(f"scf.mixing must lie in (0, 1], got {self.mixing}")
        _positive("scf.energy_tol", self.energy_tol)
        _positive("scf.density_tol", self.density_tol)
        _positive_int("scf.max_iter", self.max_iter)
        if self.one_electron_energy not in ("analytic", "numeric"):
            raise ConfigError(
                f"scf.one_electron_energy must be 'analytic' or 'numeric', got {self.one_electron_energy!r}"
            )


@dataclass(frozen=True)
class FssSpec:
    n_min: int = 10
    n_max: int = 20
    delta_n: int = 1
    step: Optional[int] = None
    z_min: float = 0.8
    z_max: float = 1.2
    z_points: int = 21
    omega: float = 1.0
    collapse: bool = False
    nu_min: float = 0.6
    nu_max: float = 1.1
    nu_points: int = 51
    collapse_window: float = CONSTANTS["COLLAPSE_WINDOW"]

    def __post_init__(self):
        for name in ("n_min", "n_max", "delta_n", "z_points", "nu_points"):
            _positive_int(f"fss.{name}", getattr(self, name))
        for name in ("z_min", "z_max", "omega", "nu_min", "nu_max", "collapse_window"):
            _positive(f"fss.{name}", getattr(self, name))
        if self.n_min - self.delta_n < 1:
            raise ConfigError("fss.n_min - fss.delta_n must be at least 1")
        if self.step is not None:
            _positive_int("fss.step", self.step)
        if len(self.crossing_levels) < 4:
            raise ConfigError(
                "fss.n_min..fss.n_max must hold at least four crossing sizes N with N + delta_n <= n_max"
            )
        if not self.z_min < self.z_max:
            raise ConfigError(f"fss.z_min ({self.z_min}) must be below fss.z_max ({self.z_max})")
        if self.z_points < 3:
            raise ConfigError("fss.z_points must be at least 3")
        if not self.nu_min < self.nu_max:
            raise ConfigError("fss.nu_min must be below fss.nu_max")

    @property
    def crossing_levels(self) -> list[int]:
        """Sizes N where Gamma(N - d, N) and Gamma(N, N + d) are crossed; spaced by step."""
        return list(range(self.n_min, self.n_max - self.delta_n + 1, self.step or self.delta_n))

    @property
    def gamma_pairs(self) -> list[tuple[int, int]]:
        pairs = set()
        for n in self.crossing_levels:
            pairs.update(((n - self.delta_n, n), (n, n + self.delta_n)))
        return sorted(pairs)

    @property
    def levels(self) -> list[int]:
        return sorted({level for pair in self.gamma_pairs for level in pair})


@dataclass(frozen=True)
class SyntheticSpec:
    z_c: float = 0.91
    alpha: float = 1.0
    nu: float = 0.85

    def __post_init__(self):
        for name in ("z_c", "alpha", "nu"):
            _positive(f"synthetic.{name}", getattr(self, name))


@dataclass(frozen=True)
class RunConfig:
    method: str = "hf"
    charge: float = 2.0
    mesh: MeshSpec = field(default_factory=MeshSpec)
    scf: ScfSpec = field(default_factory=ScfSpec)
    fss: FssSpec = field(default_factory=FssSpec)
    synthetic: SyntheticSpec = field(default_factory=SyntheticSpec)
    cache_dir: str = ".critcharge-cache"
    output_dir: str = "results"
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "method", normalize_method(self.method))
        _positive("charge", self.charge)
        _positive_int("workers", self.workers)
        object.__setattr__(self, "mesh", self.mesh.resolved(self.is_exact))

    @property
    def is_exact(self) -> bool:
        return self.method in EXACT_METHODS

    @property
    def is_scf(self) -> bool:
        return self.method in SCF_METHODS

    def to_dict(self) -> dict:
        return _to_dict(self)


def _to_dict(instance) -> dict:
    out = {}
    for f in fields(instance):
        value = getattr(instance, f.name)
        out[f.name] = _to_dict(value) if is_dataclass(value) else value
    return out


def _build(cls, data: Mapping[str, Any], path: str):
    if not isinstance(data, Mapping):
        raise ConfigError(f"{path or 'config'} must be a mapping, got {type(data).__name__}")
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        where = f" in {path}" if path else ""
        raise ConfigError(f"unknown key(s){where}: {', '.join(unknown)}")
    kwargs = {}
    for name, value in data.items():
        default = known[name].default_factory if callable(known[name].default_factory) else None
        nested = default() if default is not None else None
        if nested is not None and is_dataclass(nested):
            kwargs[name] = _build(type(nested), value, f"{path}.{name}" if path else name)
        else:
            kwargs[name] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _merge(base: dict, update: Mapping[str, Any]) -> dict:
    merged = dict(base)
    for key, value in update.items():
        if value is None:
            continue
        if isinstance(value, Mapping):
            current = merged.get(key)
            merged[key] = _merge(current if isinstance(current, Mapping) else {}, value)
        else:
            merged[key] = value
    return merged


def read_config_file(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    try:
        if path.suffix.lower() in (".yml", ".yaml"):
            data = yaml.safe_load(text)
        elif path.suffix.lower() == ".json":
            data = json.loads(text)
        else:
            raise ConfigError(f"unsupported config format {path.suffix!r} (use .json, .yml or .yaml)")
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must contain a mapping at the top level")
    return data


def load_run_config(path=None, overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """Defaults, then the file at `path`, then `overrides` (None values skipped)."""
    data: dict = {}
    if path is not None:
        data = _merge(data, read_config_file(path))
        logger.debug("Loaded run configuration from %s", path)
    if overrides:
        data = _merge(data, overrides)
    return _build(RunConfig, data, "")
