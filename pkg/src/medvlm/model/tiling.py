"""Dynamic aspect-ratio tiling of arbitrary images into fixed-size tiles.

An image of size (w, h) is mapped to a (rows, cols) tile grid chosen to
match the image aspect ratio, resized to fill that grid exactly, and cut
row-major into tiles. A global thumbnail tile is appended after the grid
tiles when more than one tile is produced. Grid selection is exact: ratio
mismatch is compared with integer fractions, never floats, so ties break
identically on every platform.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import ConfigError
from .config import VisionConfig
from .ppm import bilinear_resize


@dataclass(frozen=True)
class TilePlan:
    rows: int
    cols: int
    use_thumbnail: bool

    @property
    def n_grid_tiles(self) -> int:
        return self.rows * self.cols

    @property
    def n_tiles(self) -> int:
        return self.n_grid_tiles + (1 if self.use_thumbnail else 0)


def tokens_per_tile(cfg: VisionConfig) -> int:
    """Sequence positions one tile contributes after the 2x2 patch merge."""
    cfg.validate()
    grid = cfg.patch_grid
    return (grid // 2) * (grid // 2)


def _ratio_mismatch(rows: int, cols: int, width: int, height: int) -> Fraction:
    """How far grid aspect (cols/rows) is from image aspect (width/height).

    Returns max(a, b) / min(a, b) for a = cols * height, b = rows * width,
    which is monotone in |log| of the aspect ratio quotient and exact.
    """
    a = cols * height
    b = rows * width
    return Fraction(max(a, b), min(a, b))


def plan_tiling(width: int, height: int, cfg: VisionConfig) -> TilePlan:
    """Choose the tile grid for an image.

    Picks the grid with aspect ratio closest to the image (log-scale),
    breaking ties by tile count nearest to the pixel-area ideal, then by
    fewer tiles, then by fewer rows.
    """
    if width <= 0 or height <= 0:
        raise ConfigError(f"image size must be positive, got {width}x{height}")
    cfg.validate()
    ideal = -(-(width * height) // (cfg.tile_size * cfg.tile_size))  # ceil division
    best: tuple | None = None
    best_plan: tuple[int, int] | None = None
    for rows in range(1, cfg.max_tiles + 1):
        for cols in range(1, cfg.max_tiles // rows + 1):
            count = rows * cols
            key = (_ratio_mismatch(rows, cols, width, height),
                   abs(count - ideal), count, rows)
            if best is None or key < best:
                best = key
                best_plan = (rows, cols)
    assert best_plan is not None
    rows, cols = best_plan
    thumb = cfg.use_thumbnail and rows * cols > 1
    return TilePlan(rows=rows, cols=cols, use_thumbnail=thumb)


def split_tiles(image: np.ndarray, plan: TilePlan, cfg: VisionConfig) -> np.ndarray:
    """Resize to the grid and cut row-major; thumbnail (if any) comes last.

    Returns (n_tiles, tile_size, tile_size, 3) uint8.
    """
    t = cfg.tile_size
    resized = bilinear_resize(image, plan.rows * t, plan.cols * t)
    tiles = [resized[r * t:(r + 1) * t, c * t:(c + 1) * t]
             for r in range(plan.rows) for c in range(plan.cols)]
    if plan.use_thumbnail:
        tiles.append(bilinear_resize(image, t, t))
    return np.stack(tiles, axis=0)


def prepare_image(image: np.ndarray, cfg: VisionConfig) -> tuple[TilePlan, np.ndarray]:
    """Plan and execute tiling for one (h, w, 3) uint8 image."""
    h, w = image.shape[:2]
    plan = plan_tiling(w, h, cfg)
    return plan, split_tiles(image, plan, cfg)


def image_token_count(width: int, height: int, cfg: VisionConfig) -> int:
    """Total sequence positions an image occupies in the decoder."""
    plan = plan_tiling(width, height, cfg)
    return plan.n_tiles * tokens_per_tile(cfg)
