"""Marker-controlled watershed flooding, small-region merging, and
cloud/clear classification of the resulting segments."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .flood import priority_flood, seed_order
from .morphology import GradientField
from .raster import CloudMask, MarkerMap, Raster2D, SegmentMap


class EmptyMarkerMapError(ValueError):
    """Watershed needs at least one marker to flood from."""


@dataclass(frozen=True)
class RegionStats:
    """Per-region summary used for classification and the stats report."""

    label: int
    area: int
    mean_bt: float
    min_bt: float
    mean_gradient: Optional[float]
    is_cloud: bool


def watershed_from_markers(field: GradientField, markers: MarkerMap) -> SegmentMap:
    """Flood the gradient surface from the marker components.

    Each marker keeps its label; every pixel ends up in exactly one of the
    K regions. Marker pixels seed the flood in ascending label order,
    row-major within each component, and growth follows the deterministic
    priority-flood semantics of :mod:`cloudseg.flood`. The result is a
    total partition with bit-identical output for identical input.
    """
    if field.shape != markers.shape:
        raise ValueError(f"shape mismatch: field {field.shape} vs markers {markers.shape}")
    if markers.count < 1:
        raise EmptyMarkerMapError("marker map has no seed components")
    labels = priority_flood(field.values, markers.labels, seed_order(markers.labels))
    return SegmentMap(labels)


# ---------------------------------------------------------------------------
# region merging
# ---------------------------------------------------------------------------

def _boundary_counts(labels: np.ndarray) -> dict:
    """Count 8-adjacent pixel pairs between distinct regions.

    Returns {(lo, hi): npairs} with lo < hi; pairs involving label 0 are
    not recorded (clear sky is never a merge target).
    """
    slices = (
        (labels[:, :-1], labels[:, 1:]),    # east
        (labels[:-1, :], labels[1:, :]),    # south
        (labels[:-1, :-1], labels[1:, 1:]),  # south-east
        (labels[:-1, 1:], labels[1:, :-1]),  # south-west
    )
    counts = {}
    for a, b in slices:
        a = a.ravel()
        b = b.ravel()
        diff = (a != b) & (a != 0) & (b != 0)
        lo = np.minimum(a[diff], b[diff])
        hi = np.maximum(a[diff], b[diff])
        pairs, npairs = np.unique(np.stack([lo, hi], axis=1), axis=0, return_counts=True)
        for (x, y), c in zip(pairs, npairs):
            key = (int(x), int(y))
            counts[key] = counts.get(key, 0) + int(c)
    return counts


def _compact(labels: np.ndarray, allow_zero: bool) -> SegmentMap:
    """Renumber surviving labels to 1..K' preserving ascending order."""
    present = np.unique(labels)
    present = present[present > 0]
    remap = np.zeros(int(labels.max()) + 1, dtype=np.int32)
    remap[present] = np.arange(1, len(present) + 1, dtype=np.int32)
    return SegmentMap(remap[labels], allow_zero=allow_zero)


def merge_small_regions(seg: SegmentMap, field: Optional[GradientField] = None,
                        min_area: int = 1) -> SegmentMap:
    """Absorb regions smaller than min_area into their dominant neighbour.

    Repeatedly takes the smallest offending region (ties: lowest label) and
    merges it into the neighbouring region sharing the longest common
    boundary, measured in 8-adjacent pixel pairs (ties: lower label).
    Label 0, where present, is untouchable: an undersized region with no
    positive-label neighbour is removed to 0 instead. Surviving labels are
    recompacted to 1..K' in ascending order, so min_area <= 1 is the
    identity.

    The gradient field is accepted for interface stability; the merge rule
    itself is purely geometric.
    """
    if min_area < 1:
        raise ValueError(f"min_area must be positive, got {min_area}")
    labels = seg.labels.copy()
    allow_zero = bool((labels == 0).any())
    if min_area == 1:
        return _compact(labels, allow_zero)
    while True:
        top = int(labels.max())
        if top == 0:
            break
        areas = np.bincount(labels.ravel(), minlength=top + 1)
        live = np.flatnonzero(areas[1:] > 0) + 1
        if len(live) <= 1:
            break
        offenders = [l for l in live if areas[l] < min_area]
        if not offenders:
            break
        victim = min(offenders, key=lambda l: (areas[l], l))
        counts = _boundary_counts(labels)
        neighbours = {}
        for (a, b), c in counts.items():
            if a == victim:
                neighbours[b] = neighbours.get(b, 0) + c
            elif b == victim:
                neighbours[a] = neighbours.get(a, 0) + c
        if not neighbours:
            labels[labels == victim] = 0
            continue
        target = min(neighbours, key=lambda l: (-neighbours[l], l))
        labels[labels == victim] = target
    return _compact(labels, allow_zero)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


def classify_regions(seg: SegmentMap, bt: Raster2D, clear_sky_cutoff: float = 280.0,
                     gradient: Optional[GradientField] = None):
    """Split segments into cloud and clear by mean brightness temperature.

    A region is cloud iff its mean BT is strictly below clear_sky_cutoff.
    Pixels labeled 0 (clear sky in threshold-based maps) are never cloud.

    Returns:
        (CloudMask, list of RegionStats) with stats for every region 1..K;
        mean_gradient is None when no gradient field is supplied.
    """
    if seg.shape != bt.shape:
        raise ValueError(f"shape mismatch: segments {seg.shape} vs bt {bt.shape}")
    labels = seg.labels
    k = seg.count
    flat = labels.ravel()
    areas = np.bincount(flat, minlength=k + 1)
    bt_sums = np.bincount(flat, weights=bt.values.ravel(), minlength=k + 1)
    bt_min = np.full(k + 1, np.inf)
    np.minimum.at(bt_min, flat, bt.values.ravel())
    if gradient is not None:
        if gradient.shape != seg.shape:
            raise ValueError("gradient shape mismatch")
        grad_sums = np.bincount(flat, weights=gradient.values.ravel(), minlength=k + 1)
    stats = []
    cloudy = np.zeros(k + 1, dtype=bool)
    for label in range(1, k + 1):
        area = int(areas[label])
        mean_bt = float(bt_sums[label] / area)
        is_cloud = mean_bt < clear_sky_cutoff
        cloudy[label] = is_cloud
        stats.append(RegionStats(
            label=label,
            area=area,
            mean_bt=mean_bt,
            min_bt=float(bt_min[label]),
            mean_gradient=float(grad_sums[label] / area) if gradient is not None else None,
            is_cloud=is_cloud,
        ))
    return CloudMask(cloudy[labels]), stats
