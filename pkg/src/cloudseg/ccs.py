"""Incremental-threshold seeded region growing over brightness temperature.

Cloud patches start from the 8-connected components of the coldest pixels
and absorb warmer neighbours while the threshold is raised level by level,
up to a hard cap (253 K by default). Anything warmer than the cap is never
claimed, which is exactly why warm clouds go undetected by this scheme.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .flood import priority_flood, seed_order
from .markers import label_components
from .raster import CloudMask, Raster2D, SegmentMap, Units
from .watershed import merge_small_regions

_EIGHT = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class CcsConfig:
    """Threshold schedule and cleanup size for the region growing.

    threshold_levels must ascend and end at max_threshold; max_threshold
    defaults to the last level.
    """

    threshold_levels: tuple = (220.0, 235.0, 253.0)
    max_threshold: float = None
    min_area: int = 50

    def __post_init__(self):
        levels = tuple(float(t) for t in self.threshold_levels)
        if not levels:
            raise ValueError("need at least one threshold level")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ValueError(f"threshold levels must be strictly ascending: {levels}")
        cap = levels[-1] if self.max_threshold is None else float(self.max_threshold)
        if cap != levels[-1]:
            raise ValueError(f"last level {levels[-1]} must equal max_threshold {cap}")
        if self.min_area < 1:
            raise ValueError(f"min_area must be positive, got {self.min_area}")
        object.__setattr__(self, "threshold_levels", levels)
        object.__setattr__(self, "max_threshold", cap)
        object.__setattr__(self, "min_area", int(self.min_area))


def ccs_segment(bt: Raster2D, cfg: CcsConfig = CcsConfig()) -> SegmentMap:
    """Segment cloud patches by seeded growth up to the threshold cap.

    Seeds are the 8-connected components of pixels at or below the first
    level, labeled in row-major order. For each later level, frontier
    pixels grow into unlabeled neighbours with BT <= level, coldest first
    with FIFO ties; a pixel keeps the label that reaches it first. Pixels
    warmer than the cap stay 0 (clear). Patches below cfg.min_area are
    finally merged into their dominant neighbour or removed.

    An image with no pixel at or below the first level yields an all-zero
    map rather than an error.
    """
    if bt.units is not Units.KELVIN:
        raise ValueError("ccs_segment expects brightness temperature in kelvin")
    values = bt.values
    labels = label_components(values <= cfg.threshold_levels[0])
    if labels.max() == 0:
        return SegmentMap(labels, allow_zero=True)
    for level in cfg.threshold_levels[1:]:
        eligible = (labels == 0) & (values <= level)
        frontier = (labels > 0) & ndimage.binary_dilation(eligible, structure=_EIGHT)
        seeds = seed_order(np.where(frontier, labels, 0))
        if seeds:
            labels = priority_flood(values, labels, seeds, limit=level)
    seg = SegmentMap(labels, allow_zero=True)
    if seg.count:
        seg = merge_small_regions(seg, min_area=cfg.min_area)
    return seg


def ccs_cloud_mask(seg: SegmentMap) -> CloudMask:
    """Cloud wherever a patch label is present; label 0 is clear."""
    return CloudMask(seg.labels != 0)
