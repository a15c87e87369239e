"""Otsu threshold selection on gradient magnitudes and seed extraction.

Gradient histograms are heavily bottom-loaded: most pixels sit in smooth
regions while edge pixels spread into a long tail, so a two-class Otsu
split cleanly separates seed candidates (low side) from edges. Seeds
become the markers the watershed floods from.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .morphology import GradientField
from .raster import MarkerMap

_EIGHT = np.ones((3, 3), dtype=bool)


class ConstantFieldError(ValueError):
    """Field has a single distinct value; no threshold can separate it."""


class NoSeedRegionsError(ValueError):
    """Every seed component fell below min_seed_area."""


@dataclass(frozen=True)
class OtsuResult:
    """Chosen bin-edge threshold and the variance it maximizes."""

    threshold: float
    between_class_variance: float
    histogram_bins: int


def otsu_threshold(field: GradientField, bins: int = 256) -> OtsuResult:
    """Pick the histogram bin edge maximizing between-class variance.

    A `bins`-bin histogram is built over [min, max]; every interior bin
    edge is a candidate split with the low class taken as values <= edge.
    Ties go to the lowest qualifying edge.

    Raises:
        ConstantFieldError: all values identical, nothing to separate.
    """
    if bins < 2:
        raise ValueError(f"need at least 2 histogram bins, got {bins}")
    v = field.values.ravel()
    vmin = float(v.min())
    vmax = float(v.max())
    if vmin == vmax:
        raise ConstantFieldError(f"constant field (all values {vmin}); cannot threshold")
    hist, edges = np.histogram(v, bins=bins, range=(vmin, vmax))
    centers = (edges[:-1] + edges[1:]) / 2.0
    counts = hist.astype(np.float64)
    total = counts.sum()
    cum_n = np.cumsum(counts)
    cum_s = np.cumsum(counts * centers)
    n0 = cum_n[:-1]
    s0 = cum_s[:-1]
    n1 = total - n0
    s1 = cum_s[-1] - s0
    variance = np.zeros(bins - 1)
    ok = (n0 > 0) & (n1 > 0)
    mu0 = np.divide(s0, n0, out=np.zeros_like(s0), where=n0 > 0)
    mu1 = np.divide(s1, n1, out=np.zeros_like(s1), where=n1 > 0)
    variance[ok] = (n0 * n1)[ok] / (total * total) * (mu0 - mu1)[ok] ** 2
    split = int(np.argmax(variance))  # first occurrence = lowest edge on ties
    return OtsuResult(
        threshold=float(edges[split + 1]),
        between_class_variance=float(variance[split]),
        histogram_bins=int(bins),
    )


def label_components(mask: np.ndarray) -> np.ndarray:
    """8-connected components of a boolean mask, labeled 1..K in row-major
    order of each component's first pixel. Background stays 0."""
    labeled, count = ndimage.label(mask, structure=_EIGHT)
    if count == 0:
        return labeled.astype(np.int32)
    flat = labeled.ravel()
    values, first = np.unique(flat, return_index=True)
    nonzero = values != 0
    order = values[nonzero][np.argsort(first[nonzero])]
    remap = np.zeros(int(values.max()) + 1, dtype=np.int32)
    remap[order] = np.arange(1, len(order) + 1, dtype=np.int32)
    return remap[labeled]


def generate_markers(field: GradientField, otsu: OtsuResult, min_seed_area: int = 8) -> MarkerMap:
    """Label low-gradient seed components, dropping the tiny ones.

    Pixels with value <= otsu.threshold are seed pixels; 8-connected seed
    components get labels 1..K in row-major first-pixel order. Components
    smaller than min_seed_area are demoted to non-seed, and survivors are
    relabeled so the ids stay consecutive.

    Raises:
        NoSeedRegionsError: min_seed_area wiped out every component.
    """
    if min_seed_area < 1:
        raise ValueError(f"min_seed_area must be positive, got {min_seed_area}")
    seeds = field.values <= otsu.threshold
    labels = label_components(seeds)
    count = int(labels.max())
    if count == 0:
        raise NoSeedRegionsError("no pixel falls at or below the threshold")
    if min_seed_area > 1:
        areas = np.bincount(labels.ravel(), minlength=count + 1)
        demoted = np.flatnonzero(areas < min_seed_area)
        demoted = demoted[demoted > 0]
        if demoted.size:
            keep = np.ones(count + 1, dtype=bool)
            keep[demoted] = False
            survivors = labels * keep[labels]
            if survivors.max() == 0:
                raise NoSeedRegionsError(
                    f"all {count} seed components are smaller than min_seed_area="
                    f"{min_seed_area}; use a smaller value"
                )
            labels = label_components(survivors > 0)
    return MarkerMap(labels)
