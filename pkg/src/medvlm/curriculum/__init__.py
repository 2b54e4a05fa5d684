"""Three-stage training curriculum with per-stage freezing and LR maps."""

from .data import Sample, build_corpus, corpus_digest
from .runcfg import TrainRunConfig, load_run_config
from .stages import PROFILES, StageSpec, default_stages, stages_for_profile
from .trainer import StageResult, run_stage, train_curriculum

__all__ = [
    "Sample",
    "build_corpus",
    "corpus_digest",
    "TrainRunConfig",
    "load_run_config",
    "PROFILES",
    "StageSpec",
    "default_stages",
    "stages_for_profile",
    "StageResult",
    "run_stage",
    "train_curriculum",
]
