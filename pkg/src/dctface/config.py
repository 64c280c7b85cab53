"""Pipeline configuration, loadable from a JSON file."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace

from .errors import ConfigError
from .features import DEFAULT_SPECS, REGIONS, RegionSpec, make_specs
from .fusion import FeatureWeights, FusionMethod, default_weights
from .gallery import METRICS

CONFIG_ENV = "DCTFACE_CONFIG"

_KEYS = {"method", "metric", "normalize", "weights", "kept_coefficients", "region_sizes"}


@dataclass(frozen=True)
class PipelineConfig:
    method: FusionMethod = FusionMethod.GLOBAL
    metric: str = "sum-abs"
    normalize: bool = True
    weights: FeatureWeights = field(default_factory=default_weights)
    specs: tuple[RegionSpec, ...] = DEFAULT_SPECS

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ConfigError(f"unknown metric {self.metric!r}; expected one of {METRICS}")

    def override(self, **changes) -> "PipelineConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    @property
    def kept_coefficients(self) -> dict[str, int]:
        return {s.region_id: s.kept_coefficients for s in self.specs}

    def echo(self) -> dict:
        return {
            "method": self.method.name,
            "metric": self.metric,
            "normalize": self.normalize,
            "weights": dict(zip(REGIONS, self.weights.as_tuple())),
            "region_specs": [s.to_dict() for s in self.specs],
        }


def _parse_sizes(raw) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError("region_sizes must be an object keyed by region")
    sizes = {}
    for region, value in raw.items():
        if region not in REGIONS:
            raise ConfigError(f"region_sizes: unknown region {region!r}")
        if isinstance(value, dict):
            value = (value.get("width"), value.get("height"))
        if not (isinstance(value, (list, tuple)) and len(value) == 2 and all(isinstance(v, int) for v in value)):
            raise ConfigError(f"region_sizes.{region} must be [width, height] integers")
        sizes[region] = tuple(value)
    return sizes


def config_from_dict(doc: dict) -> PipelineConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - _KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kwargs = {}
    try:
        if "method" in doc:
            kwargs["method"] = FusionMethod.parse(doc["method"])
        if "metric" in doc:
            kwargs["metric"] = doc["metric"]
        if "normalize" in doc:
            if not isinstance(doc["normalize"], bool):
                raise ConfigError("normalize must be true or false")
            kwargs["normalize"] = doc["normalize"]
        if "weights" in doc:
            w = doc["weights"]
            kwargs["weights"] = FeatureWeights(w) if isinstance(w, dict) else FeatureWeights.from_sequence(w)
        kept = doc.get("kept_coefficients")
        sizes = _parse_sizes(doc["region_sizes"]) if "region_sizes" in doc else None
        if kept is not None or sizes is not None:
            if isinstance(kept, dict) and set(kept) - set(REGIONS):
                raise ConfigError(f"kept_coefficients: unknown regions {sorted(set(kept) - set(REGIONS))}")
            kwargs["specs"] = make_specs(kept, sizes)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return PipelineConfig(**kwargs)


def load_config(path: str | os.PathLike | None = None) -> PipelineConfig:
    """Read a config file; with no path, fall back to ``$DCTFACE_CONFIG`` or defaults."""
    if path is None:
        path = os.environ.get(CONFIG_ENV) or None
    if path is None:
        return PipelineConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(doc)
