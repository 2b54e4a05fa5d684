"""Byte-level tokenizer with a sentinel for inline images.

Token ids 0..255 are raw UTF-8 bytes; 256..259 are PAD, BOS, EOS and the
image placeholder. The literal marker "<image>" in input text encodes to
a single IMG_ID, which the model later expands into that image's visual
token block.
"""

from __future__ import annotations

PAD_ID = 256
BOS_ID = 257
EOS_ID = 258
IMG_ID = 259
VOCAB_SIZE = 260

IMAGE_MARKER = "<image>"


class ByteTokenizer:
    vocab_size = VOCAB_SIZE

    def encode(self, text: str, add_bos: bool = False, add_eos: bool = False) -> list[int]:
        ids: list[int] = [BOS_ID] if add_bos else []
        chunks = text.split(IMAGE_MARKER)
        for i, chunk in enumerate(chunks):
            if i > 0:
                ids.append(IMG_ID)
            ids.extend(chunk.encode("utf-8"))
        if add_eos:
            ids.append(EOS_ID)
        return ids

    def decode(self, ids: list[int]) -> str:
        out = bytearray()
        for t in ids:
            if t < 256:
                out.append(t)
            elif t == IMG_ID:
                out.extend(IMAGE_MARKER.encode("ascii"))
            # PAD/BOS/EOS render as nothing
        return out.decode("utf-8", errors="replace")

    @staticmethod
    def count_images(ids: list[int]) -> int:
        return sum(1 for t in ids if t == IMG_ID)
