"""Stage definitions: what trains, at what rate, on which corpus.

The default profile freezes the vision tower for the first two stages:
stage 0 fits only the projector at a high rate, stage 1 adds the language
model at a low rate, stage 2 trains everything. The pt-vision-trainable
profile differs in one way: the vision tower already trains during
stage 1. Both keep weight decay at 0.05 and a 3% linear warmup into a
cosine decay; the optimizer is rebuilt from scratch at each stage
boundary so no moment state leaks across stages.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from ..errors import ConfigError

WEIGHT_DECAY = 0.05
WARMUP_RATIO = 0.03


@dataclass(frozen=True)
class StageSpec:
    name: str
    trainable: frozenset[str]
    lr: dict[str, float]
    corpus: str
    steps: int
    batch_size: int = 8
    weight_decay: float = WEIGHT_DECAY
    warmup_ratio: float = WARMUP_RATIO

    def validate(self) -> "StageSpec":
        if not self.trainable:
            raise ConfigError(f"stage {self.name}: nothing is trainable")
        if set(self.lr) != set(self.trainable):
            raise ConfigError(
                f"stage {self.name}: lr map keys {sorted(self.lr)} must equal "
                f"trainable modules {sorted(self.trainable)}")
        if any(v <= 0 for v in self.lr.values()):
            raise ConfigError(f"stage {self.name}: learning rates must be positive")
        if self.steps <= 0 or self.batch_size <= 0:
            raise ConfigError(f"stage {self.name}: steps and batch_size must be positive")
        if not 0.0 <= self.warmup_ratio < 1.0:
            raise ConfigError(f"stage {self.name}: warmup_ratio out of range")
        return self

    @property
    def warmup_steps(self) -> int:
        return int(self.steps * self.warmup_ratio)

    @property
    def frozen(self) -> frozenset[str]:
        return frozenset({"vision", "projector", "lm"} - set(self.trainable))


def default_stages(steps: tuple[int, int, int] = (400, 600, 300),
                   batch_size: int = 8) -> list[StageSpec]:
    return [
        StageSpec(name="align", trainable=frozenset({"projector"}),
                  lr={"projector": 1e-3}, corpus="synth-captions-v1",
                  steps=steps[0], batch_size=batch_size).validate(),
        StageSpec(name="mid", trainable=frozenset({"projector", "lm"}),
                  lr={"projector": 2e-5, "lm": 2e-5}, corpus="synth-reports-v1",
                  steps=steps[1], batch_size=batch_size).validate(),
        StageSpec(name="instruct", trainable=frozenset({"vision", "projector", "lm"}),
                  lr={"vision": 8e-5, "projector": 8e-5, "lm": 8e-5},
                  corpus="synth-vqa-v1",
                  steps=steps[2], batch_size=batch_size).validate(),
    ]


def _vision_trainable_variant(stages: list[StageSpec]) -> list[StageSpec]:
    out = []
    for s in stages:
        if s.name == "mid":
            s = replace(s, trainable=frozenset(s.trainable | {"vision"}),
                        lr={**s.lr, "vision": s.lr["lm"]})
        out.append(s.validate())
    return out


PROFILES = ("default", "pt-vision-trainable")


def stages_for_profile(profile: str, steps: tuple[int, int, int] = (400, 600, 300),
                       batch_size: int = 8) -> list[StageSpec]:
    if profile == "default":
        return default_stages(steps, batch_size)
    if profile == "pt-vision-trainable":
        return _vision_trainable_variant(default_stages(steps, batch_size))
    raise ConfigError(f"unknown profile {profile!r}; expected one of {PROFILES}")
