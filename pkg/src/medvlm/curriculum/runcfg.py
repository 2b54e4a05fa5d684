"""YAML run configuration for training."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from ..errors import ConfigError
from .stages import PROFILES, stages_for_profile

_ALLOWED_KEYS = {"seed", "out", "profile", "model", "steps", "batch_size", "stages"}
_MODEL_PRESETS = ("toy",)


@dataclass
class TrainRunConfig:
    seed: int = 0
    out: str = "runs/toy"
    profile: str = "default"
    model: str = "toy"
    steps: list[int] = field(default_factory=lambda: [400, 600, 300])
    batch_size: int = 8
    # None runs the full curriculum; otherwise only the named stages
    stages: list[str] | None = None

    def validate(self) -> "TrainRunConfig":
        if self.profile not in PROFILES:
            raise ConfigError(f"unknown profile {self.profile!r}; expected one of {PROFILES}")
        if self.model not in _MODEL_PRESETS:
            raise ConfigError(f"unknown model preset {self.model!r}; "
                              f"expected one of {_MODEL_PRESETS}")
        if len(self.steps) != 3 or any(not isinstance(s, int) or s <= 0 for s in self.steps):
            raise ConfigError("steps must be three positive integers, one per stage")
        if self.batch_size <= 0:
            raise ConfigError("batch_size must be positive")
        if not isinstance(self.seed, int):
            raise ConfigError("seed must be an integer")
        if self.stages is not None:
            known = [s.name for s in stages_for_profile(self.profile)]
            unknown = sorted(set(self.stages) - set(known))
            if unknown:
                raise ConfigError(f"unknown stage names: {', '.join(unknown)}; "
                                  f"profile {self.profile!r} has: {', '.join(known)}")
            if not self.stages:
                raise ConfigError("stages must name at least one stage")
        return self


def load_run_config(path: str | Path) -> TrainRunConfig:
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except OSError as e:
        raise ConfigError(f"cannot read run config {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid YAML in {path}: {e}") from e
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"run config must be a mapping, got {type(raw).__name__}")
    unknown = sorted(set(raw) - _ALLOWED_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}; "
                          f"allowed: {', '.join(sorted(_ALLOWED_KEYS))}")
    return TrainRunConfig(**raw).validate()
