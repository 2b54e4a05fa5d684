"""The multimodal model: tiling + ViT + projector feeding a causal decoder."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DataError
from ..nn import Tensor, concat, gelu, linear, no_grad
from .config import ModelConfig
from .decoder import decoder_forward, embed_tokens
from .params import init_params, module_of
from .tokenizer import EOS_ID, IMG_ID, ByteTokenizer
from .vision import vision_forward
from .tiling import prepare_image


@dataclass
class AssembledSequence:
    """Decoder-ready embeddings for one sample.

    ids holds IMG_ID at every position occupied by an image token block,
    so next-token labels can mask them out. text_pos[i] is the expanded
    index of the i-th original token.
    """

    embeds: Tensor
    ids: np.ndarray
    text_pos: np.ndarray


class MedVlm:
    def __init__(self, config: ModelConfig, params: dict[str, np.ndarray]):
        self.config = config.validate()
        self.params = params
        self.tokenizer = ByteTokenizer()

    @classmethod
    def init(cls, config: ModelConfig, seed: int) -> "MedVlm":
        return cls(config, init_params(config, seed))

    # ---- parameter wrapping ---------------------------------------------
    def wrap(self, trainable_modules: set[str] | None = None) -> dict[str, Tensor]:
        """Tensor views of the raw params; grads flow only to listed modules."""
        trainable_modules = trainable_modules or set()
        return {name: Tensor(arr, requires_grad=module_of(name) in trainable_modules)
                for name, arr in self.params.items()}

    # ---- vision path ------------------------------------------------------
    def project(self, p: dict[str, Tensor], merged: Tensor) -> Tensor:
        h = gelu(linear(merged, p["projector.w1"], p["projector.b1"]))
        return linear(h, p["projector.w2"], p["projector.b2"])

    def encode_image(self, p: dict[str, Tensor], image: np.ndarray) -> Tensor:
        """One (h, w, 3) uint8 image -> (n_image_tokens, d_model) embeddings."""
        _, tiles = prepare_image(image, self.config.vision)
        feats = vision_forward(p, tiles, self.config.vision)
        n, m, c = feats.shape
        return self.project(p, feats.reshape(n * m, c))

    # ---- sequence assembly -------------------------------------------------
    def assemble_sequence(self, p: dict[str, Tensor], ids: list[int],
                          image_embeds: list[Tensor]) -> AssembledSequence:
        """Replace each IMG placeholder with that image's token block, in order."""
        n_img = sum(1 for t in ids if t == IMG_ID)
        if n_img != len(image_embeds):
            raise DataError(
                f"sequence has {n_img} image placeholders but {len(image_embeds)} images")
        segments: list[Tensor] = []
        out_ids: list[int] = []
        text_pos: list[int] = []
        run: list[int] = []
        img_i = 0

        def flush() -> None:
            if run:
                segments.append(embed_tokens(p, np.array(run, dtype=np.int64)))
                run.clear()

        for t in ids:
            if t == IMG_ID:
                flush()
                blockk = image_embeds[img_i]
                img_i += 1
                text_pos.append(len(out_ids))
                segments.append(blockk)
                out_ids.extend([IMG_ID] * blockk.shape[0])
            else:
                text_pos.append(len(out_ids))
                run.append(t)
                out_ids.append(t)
        flush()
        embeds = segments[0] if len(segments) == 1 else concat(segments, axis=0)
        if embeds.shape[0] > self.config.decoder.max_seq:
            raise ConfigError(
                f"assembled length {embeds.shape[0]} exceeds max_seq "
                f"{self.config.decoder.max_seq}")
        return AssembledSequence(embeds=embeds,
                                 ids=np.array(out_ids, dtype=np.int64),
                                 text_pos=np.array(text_pos, dtype=np.int64))

    # ---- inference -----------------------------------------------------------
    def forward_embeds(self, p: dict[str, Tensor], asm: AssembledSequence) -> Tensor:
        """Decoder logits (T', vocab) for an already-assembled sequence."""
        b = asm.embeds.reshape(1, *asm.embeds.shape)
        return decoder_forward(p, b, self.config.decoder)[0]

    def forward(self, ids: list[int], images: list[np.ndarray],
                p: dict[str, Tensor] | None = None) -> Tensor:
        """Logits (T', vocab) for one sample; T' includes expanded image blocks."""
        if p is None:
            p = self.wrap()
        embeds_list = [self.encode_image(p, im) for im in images]
        asm = self.assemble_sequence(p, ids, embeds_list)
        b = asm.embeds.reshape(1, *asm.embeds.shape)
        return decoder_forward(p, b, self.config.decoder)[0]

    def generate_greedy(self, ids: list[int], images: list[np.ndarray],
                        max_new_tokens: int = 64) -> list[int]:
        """Deterministic greedy decoding; stops at EOS or the token budget."""
        with no_grad():
            p = self.wrap()
            embeds_list = [self.encode_image(p, im) for im in images]
            asm = self.assemble_sequence(p, ids, embeds_list)
            embeds = asm.embeds
            out: list[int] = []
            for _ in range(max_new_tokens):
                if embeds.shape[0] >= self.config.decoder.max_seq:
                    break
                b = embeds.reshape(1, *embeds.shape)
                logits = decoder_forward(p, b, self.config.decoder)[0]
                nxt = int(np.argmax(logits.data[-1]))
                if nxt == EOS_ID:
                    break
                out.append(nxt)
                step = embed_tokens(p, np.array([nxt], dtype=np.int64))
                embeds = concat([embeds, step], axis=0)
            return out

    def generate_text(self, prompt: str, images: list[np.ndarray],
                      max_new_tokens: int = 64) -> str:
        ids = self.tokenizer.encode(prompt, add_bos=True)
        return self.tokenizer.decode(self.generate_greedy(ids, images, max_new_tokens))
