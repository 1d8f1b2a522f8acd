"""Engine tuning knobs with a strict JSON loader."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from typing import IO, Union

from .errors import ParseError


@dataclass(frozen=True)
class EngineConfig:
    alpha: float = 0.5           # text weight in the combined score
    top_k: int = 10
    default_radius_km: float = 10.0
    footprint_pad_deg: float = 0.1

    def __post_init__(self):
        if not isinstance(self.alpha, (int, float)) or isinstance(self.alpha, bool):
            raise ValueError("alpha must be a number")
        if not math.isfinite(self.alpha) or not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not isinstance(self.top_k, int) or isinstance(self.top_k, bool) or self.top_k < 1:
            raise ValueError(f"top_k must be a positive integer, got {self.top_k!r}")
        if not isinstance(self.default_radius_km, (int, float)) or isinstance(self.default_radius_km, bool):
            raise ValueError("default_radius_km must be a number")
        if not math.isfinite(self.default_radius_km) or self.default_radius_km <= 0:
            raise ValueError(f"default_radius_km must be positive, got {self.default_radius_km}")
        if not isinstance(self.footprint_pad_deg, (int, float)) or isinstance(self.footprint_pad_deg, bool):
            raise ValueError("footprint_pad_deg must be a number")
        if not math.isfinite(self.footprint_pad_deg) or self.footprint_pad_deg < 0:
            raise ValueError(f"footprint_pad_deg must be >= 0, got {self.footprint_pad_deg}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "default_radius_km", float(self.default_radius_km))
        object.__setattr__(self, "footprint_pad_deg", float(self.footprint_pad_deg))

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "top_k": self.top_k,
            "default_radius_km": self.default_radius_km,
            "footprint_pad_deg": self.footprint_pad_deg,
        }


_FIELD_NAMES = frozenset(f.name for f in fields(EngineConfig))


def load_config(source: Union[IO[str], str]) -> EngineConfig:
    """Read a config from a JSON object; unknown keys are rejected.

    Accepts an open text stream or a JSON string. Missing keys take their
    defaults, so `{}` is a valid config file.
    """
    text = source if isinstance(source, str) else source.read()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from None
    if not isinstance(raw, dict):
        raise ParseError("config must be a JSON object")
    unknown = sorted(set(raw) - _FIELD_NAMES)
    if unknown:
        raise ParseError(f"unknown config keys: {', '.join(unknown)}")
    try:
        return EngineConfig(**raw)
    except (TypeError, ValueError) as e:
        raise ParseError(str(e)) from None
