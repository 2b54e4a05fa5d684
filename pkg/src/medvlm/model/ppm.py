"""Binary PPM (P6) image IO and bilinear resizing.

PPM is the one image format the pipeline reads and writes: trivial to
parse, no external decoders, fully deterministic. Resizing uses half-pixel
aligned bilinear sampling in float64 with round-half-even quantization so
results are identical across platforms.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import DataError


def parse_ppm(data: bytes, where: str = "<bytes>") -> np.ndarray:
    """Decode binary P6 PPM bytes into a (height, width, 3) uint8 array."""
    if not data.startswith(b"P6"):
        raise DataError(f"not a binary PPM (P6) file: {where}")
    # header: magic, width, height, maxval, separated by whitespace/comments
    fields: list[int] = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise DataError(f"truncated PPM header: {where}")
        try:
            fields.append(int(data[start:pos]))
        except ValueError as e:
            raise DataError(f"bad PPM header token in {where}: {e}") from e
    pos += 1  # single whitespace byte after maxval
    width, height, maxval = fields
    if maxval != 255:
        raise DataError(f"only maxval 255 PPMs are supported, got {maxval}")
    need = width * height * 3
    pixels = data[pos:pos + need]
    if len(pixels) != need:
        raise DataError(f"PPM payload truncated: expected {need} bytes, got {len(pixels)}")
    return np.frombuffer(pixels, dtype=np.uint8).reshape(height, width, 3).copy()


def read_ppm(path: str | Path) -> np.ndarray:
    """Load a binary P6 PPM as a (height, width, 3) uint8 array."""
    return parse_ppm(Path(path).read_bytes(), where=str(path))


def write_ppm(path: str | Path, image: np.ndarray) -> None:
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[2] != 3 or image.dtype != np.uint8:
        raise DataError("write_ppm expects a (h, w, 3) uint8 array")
    h, w = image.shape[:2]
    header = f"P6\n{w} {h}\n255\n".encode("ascii")
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_bytes(header + image.tobytes())


def bilinear_resize(image: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Resize with half-pixel-center bilinear sampling; uint8 in, uint8 out."""
    if image.ndim != 3 or image.dtype != np.uint8:
        raise DataError("bilinear_resize expects a (h, w, c) uint8 array")
    in_h, in_w = image.shape[:2]
    if (in_h, in_w) == (out_h, out_w):
        return image.copy()
    src = image.astype(np.float64)
    ys = (np.arange(out_h, dtype=np.float64) + 0.5) * (in_h / out_h) - 0.5
    xs = (np.arange(out_w, dtype=np.float64) + 0.5) * (in_w / out_w) - 0.5
    y0 = np.clip(np.floor(ys), 0, in_h - 1).astype(np.int64)
    x0 = np.clip(np.floor(xs), 0, in_w - 1).astype(np.int64)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    wy = np.clip(ys - y0, 0.0, 1.0)[:, None, None]
    wx = np.clip(xs - x0, 0.0, 1.0)[None, :, None]
    top = src[y0][:, x0] * (1 - wx) + src[y0][:, x1] * wx
    bot = src[y1][:, x0] * (1 - wx) + src[y1][:, x1] * wx
    out = top * (1 - wy) + bot * wy
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)
