"""Model components: tokenizer, image pipeline, encoder/decoder, checkpoints."""

from .checkpoint import load_checkpoint, save_checkpoint
from .config import DecoderConfig, ModelConfig, VisionConfig, toy_config
from .tiling import TilePlan, plan_tiling, prepare_image, tokens_per_tile
from .tokenizer import ByteTokenizer, BOS_ID, EOS_ID, IMG_ID, PAD_ID, VOCAB_SIZE
from .vlm import MedVlm

__all__ = [
    "load_checkpoint",
    "save_checkpoint",
    "DecoderConfig",
    "ModelConfig",
    "VisionConfig",
    "toy_config",
    "TilePlan",
    "plan_tiling",
    "prepare_image",
    "tokens_per_tile",
    "ByteTokenizer",
    "BOS_ID",
    "EOS_ID",
    "IMG_ID",
    "PAD_ID",
    "VOCAB_SIZE",
    "MedVlm",
]
