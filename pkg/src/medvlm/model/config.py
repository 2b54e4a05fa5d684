"""Model hyperparameter dataclasses.

The tiling math is written against the full-size geometry (336 px tiles,
14 px patches, 0.5 spatial downsampling of the patch grid) but every
dimension is configurable so tests and toy training can run a miniature
model with identical code paths.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from ..errors import ConfigError

# byte vocab plus special tokens; kept here so config validation can see it
TEXT_VOCAB_SIZE = 260


@dataclass(frozen=True)
class VisionConfig:
    tile_size: int = 336
    patch_size: int = 14
    d_model: int = 64
    n_layers: int = 2
    n_heads: int = 2
    d_ff: int = 128
    downsample: float = 0.5
    max_tiles: int = 12
    use_thumbnail: bool = True

    def validate(self) -> "VisionConfig":
        if self.tile_size <= 0 or self.patch_size <= 0:
            raise ConfigError("tile_size and patch_size must be positive")
        if self.tile_size % self.patch_size != 0:
            raise ConfigError(
                f"tile_size {self.tile_size} not divisible by patch_size {self.patch_size}")
        grid = self.tile_size // self.patch_size
        if self.downsample != 0.5:
            raise ConfigError("only 0.5 spatial downsampling (2x2 merge) is supported")
        if grid % 2 != 0:
            raise ConfigError(f"patch grid {grid}x{grid} must be even for the 2x2 merge")
        if self.d_model % self.n_heads != 0:
            raise ConfigError("vision d_model must be divisible by n_heads")
        if self.max_tiles < 1:
            raise ConfigError("max_tiles must be at least 1")
        return self

    @property
    def patch_grid(self) -> int:
        return self.tile_size // self.patch_size

    @property
    def patch_dim(self) -> int:
        return 3 * self.patch_size * self.patch_size

    @property
    def n_patches(self) -> int:
        return self.patch_grid * self.patch_grid


@dataclass(frozen=True)
class DecoderConfig:
    vocab_size: int = TEXT_VOCAB_SIZE
    d_model: int = 64
    n_layers: int = 2
    n_heads: int = 2
    d_ff: int = 128
    max_seq: int = 1024
    rope_theta: float = 150000.0
    rope_original_context: int = 4096
    rope_scale: float = 1.0
    # fixed multiplier on head logits; small models need > 1 because layer
    # norm caps the residual norm and sigma=0.02 init compresses logit range
    logit_scale: float = 1.0

    def validate(self) -> "DecoderConfig":
        if self.d_model % self.n_heads != 0:
            raise ConfigError("decoder d_model must be divisible by n_heads")
        head_dim = self.d_model // self.n_heads
        if head_dim % 2 != 0:
            raise ConfigError("decoder head_dim must be even for rotary embeddings")
        if self.vocab_size < TEXT_VOCAB_SIZE:
            raise ConfigError(f"vocab_size must be >= {TEXT_VOCAB_SIZE}")
        if self.max_seq <= 0:
            raise ConfigError("max_seq must be positive")
        if self.rope_scale < 1.0:
            raise ConfigError("rope_scale must be >= 1")
        if self.logit_scale <= 0:
            raise ConfigError("logit_scale must be positive")
        return self

    @property
    def head_dim(self) -> int:
        return self.d_model // self.n_heads


@dataclass(frozen=True)
class ModelConfig:
    vision: VisionConfig = field(default_factory=VisionConfig)
    decoder: DecoderConfig = field(default_factory=DecoderConfig)
    projector_hidden: int = 128

    def validate(self) -> "ModelConfig":
        self.vision.validate()
        self.decoder.validate()
        if self.projector_hidden <= 0:
            raise ConfigError("projector_hidden must be positive")
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        try:
            return cls(vision=VisionConfig(**d["vision"]),
                       decoder=DecoderConfig(**d["decoder"]),
                       projector_hidden=d["projector_hidden"]).validate()
        except (KeyError, TypeError) as e:
            raise ConfigError(f"malformed model config: {e}") from e


def toy_config() -> ModelConfig:
    """Miniature geometry used by the test suite and toy training runs."""
    return ModelConfig(
        vision=VisionConfig(tile_size=56, patch_size=7, d_model=64, n_layers=1,
                            n_heads=2, d_ff=128, max_tiles=12),
        decoder=DecoderConfig(d_model=64, n_layers=2, n_heads=2, d_ff=128,
                              max_seq=512, logit_scale=12.0),
        projector_hidden=256,
    ).validate()
