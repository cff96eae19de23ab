"""Config-file parsing for symbols, potentials, fields, and run descriptions.

JSON is the primary format; TOML files (suffix .toml) are accepted as sugar
and converted to the same dictionaries.  Potential components are stored in
dual-basis units: a constant component a shifts fiber spectra by exactly a.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .magnetic import MagneticField2Form, VectorPotential
from .symbols import PeriodicSymbol, TrigSeries, _num_in

__all__ = [
    "ConfigError",
    "load_document",
    "load_symbol",
    "load_potential",
    "load_field",
    "load_magnetic_input",
    "RunConfig",
]


class ConfigError(ValueError):
    """Malformed or inconsistent configuration (CLI exit code 2)."""


def load_document(path):
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text()
    if path.suffix.lower() == ".toml":
        try:
            import tomllib
        except ImportError:
            import tomli as tomllib
        try:
            return tomllib.loads(text)
        except Exception as exc:
            raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc


def load_symbol(path):
    doc = load_document(path)
    for key in ("dimension", "terms"):
        if key not in doc:
            raise ConfigError(f"symbol config {path} lacks required key {key!r}")
    try:
        return PeriodicSymbol.from_dict(doc)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad symbol config {path}: {exc}") from exc


def _series_from_terms(dimension, terms):
    coeffs = {}
    for t in terms:
        mu = tuple(int(c) for c in t["mu"])
        coeffs[mu] = coeffs.get(mu, 0.0) + _num_in(t["value"])
    return TrigSeries(dimension, coeffs)


def load_potential(path):
    """Potential config: symbol-style terms with 1-based "component" markers."""
    doc = load_document(path)
    if doc.get("kind", "potential") != "potential":
        raise ConfigError(f"{path} is not a potential config (kind={doc.get('kind')!r})")
    try:
        d = int(doc["dimension"])
        per_comp = {j: [] for j in range(1, d + 1)}
        for t in doc["terms"]:
            j = int(t["component"])
            if not 1 <= j <= d:
                raise ConfigError(f"component index {j} out of range 1..{d}")
            per_comp[j].append(t)
        return VectorPotential([_series_from_terms(d, per_comp[j]) for j in range(1, d + 1)])
    except ConfigError:
        raise
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad potential config {path}: {exc}") from exc


def load_field(path):
    """Direct 2-form config: terms carry 1-based face indices "i" < "j"."""
    doc = load_document(path)
    if doc.get("kind") != "field":
        raise ConfigError(f"{path} is not a field config (kind={doc.get('kind')!r})")
    try:
        d = int(doc["dimension"])
        faces = {}
        for t in doc["terms"]:
            i, j = int(t["i"]) - 1, int(t["j"]) - 1
            faces.setdefault((i, j), []).append(t)
        comps = {key: _series_from_terms(d, terms) for key, terms in faces.items()}
        return MagneticField2Form(d, comps)
    except ConfigError:
        raise
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad field config {path}: {exc}") from exc


def load_magnetic_input(path):
    """Either a potential or a direct field config, distinguished by "kind"."""
    doc = load_document(path)
    kind = doc.get("kind", "potential")
    if kind == "potential":
        return "potential", load_potential(path)
    if kind == "field":
        return "field", load_field(path)
    raise ConfigError(f"{path}: unknown kind {kind!r} (expected potential or field)")


TASKS = ("bands", "check-flux", "kernel", "fiber-matrix", "verify", "converge")


@dataclass
class RunConfig:
    """One CLI run: task, inputs, and task parameters with documented defaults."""

    task: str
    symbol_path: str | None = None
    potential_path: str | None = None
    window_radius: int = 8
    grid_n: int = 64
    cutoff_n: int | None = None
    k_keep: int | None = None
    path_waypoints: list = field(default_factory=list)
    samples_per_segment: int = 16
    xi: list = field(default_factory=list)
    output: str | None = None
    json_output: str | None = None
    seed: int = 0
    flux_tol: float = 1e-12
    window_radii: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @classmethod
    def from_file(cls, path, task=None):
        doc = load_document(path)
        t = task or doc.get("task")
        if t not in TASKS:
            raise ConfigError(f"unknown or missing task {t!r} (expected one of {TASKS})")
        known = {f for f in cls.__dataclass_fields__}
        kwargs = {k: v for k, v in doc.items() if k in known and k != "task"}
        extras = {k: v for k, v in doc.items() if k not in known and k != "task"}
        cfg = cls(task=t, **kwargs)
        cfg.extras.update(extras)
        return cfg

    def validate(self):
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}")
        if self.task in ("bands", "kernel", "fiber-matrix", "converge") and not self.symbol_path:
            raise ConfigError(f"task {self.task} requires a symbol config")
        if self.window_radius < 0:
            raise ConfigError("window radius must be >= 0")
        if self.grid_n < 2:
            raise ConfigError("grid n must be >= 2")
        return self
