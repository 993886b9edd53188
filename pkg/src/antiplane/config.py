"""Run configuration: INI sections with typed, validated keys.

Every section and key is declared in :data:`SCHEMA`; anything else is a
usage error. Values from command-line flags override the file.
"""
from __future__ import annotations

import configparser
import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .material import BodyForce, MaterialModel

__all__ = ["ConfigError", "RunConfig", "SCHEMA", "load_config", "jsonable", "dump_json"]


class ConfigError(ValueError):
    """Malformed or inconsistent configuration (a usage error)."""


def _floats(text):
    text = str(text).strip()
    return [] if not text else [float(t) for t in text.replace(";", ",").split(",") if t.strip()]


def _ints(text):
    text = str(text).strip()
    return [] if not text else [int(t) for t in text.split(",") if t.strip()]


def _bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _family(text):
    return BodyForce(str(text).strip().lower()).value


# section -> key -> (parser, default)
SCHEMA: dict[str, dict[str, tuple]] = {
    "model": {"family": (_family, "linear"), "w1": (float, 1.0), "extra": (_floats, [])},
    "numeric": {"tol": (float, 1e-10), "n_quad": (int, 64), "n_steps": (int, 512), "n_spectral": (int, 512)},
    "material": {"q_max": (float, 10.0), "kappa_max": (float, 10.0), "lam_max": (float, 10.0), "n_samples": (int, 201)},
    "conjugate": {"lambdas": (_floats, [0.25, 1.0, 4.0])},
    "period_map": {"lam": (float, 1.0), "c_min": (float, 1e-6), "c_max": (float, 10.0), "n": (int, 20)},
    "spectrum": {"epsilons": (_floats, [0.2, 0.1, 0.05])},
    "front": {
        "epsilon": (float, 0.1),
        "lam": (float, math.nan),
        "L": (float, math.nan),
        "nx": (int, 0),
        "ny": (int, 65),
        "max_iter": (int, 30),
        "bc": (str, "dirichlet"),
        "far_field": (str, "discrete"),
    },
    "branch": {
        "epsilon": (float, 0.05),
        "steps": (int, 40),
        "ds": (float, 0.05),
        "ds_max": (float, 0.25),
        "n_proxy_max": (float, 50.0),
        "lam_max": (float, 10.0),
        "ny": (int, 65),
    },
    "verify": {"only": (_ints, [])},
}


@dataclass
class RunConfig:
    """Resolved configuration; ``values[section][key]`` holds parsed values."""

    values: dict = field(default_factory=dict)
    explicit_model: bool = False

    def __getitem__(self, section):
        return self.values[section]

    def model(self) -> MaterialModel:
        m = self.values["model"]
        try:
            return MaterialModel.quadratic(m["w1"], m["family"], m["extra"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def set(self, section: str, key: str, raw) -> None:
        if section not in SCHEMA or key not in SCHEMA[section]:
            raise ConfigError(f"unknown key [{section}] {key}")
        parser = SCHEMA[section][key][0]
        try:
            self.values[section][key] = raw if not isinstance(raw, str) else parser(raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for [{section}] {key}: {raw!r}") from exc

    def canonical(self) -> dict:
        return jsonable(self.values)

    def digest(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _defaults() -> dict:
    return {sec: {k: (list(d) if isinstance(d, list) else d) for k, (_, d) in keys.items()} for sec, keys in SCHEMA.items()}


def load_config(path=None) -> RunConfig:
    """Parse ``path`` (if given) over the defaults.

    A ``[model]`` section must name ``w1`` explicitly.
    """
    cfg = RunConfig(_defaults())
    if path is None:
        return cfg
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in parser.items(section):
            cfg.set(section, key, raw)
    if parser.has_section("model"):
        if not parser.has_option("model", "w1"):
            raise ConfigError("[model] must define w1")
        cfg.explicit_model = True
    return cfg


def jsonable(obj):
    """Convert numpy scalars/arrays, enums and non-string keys for JSON."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def dump_json(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")
