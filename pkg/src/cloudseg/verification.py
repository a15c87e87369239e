"""Truth-mask derivation and categorical verification scores.

The truth rule sums all hydrometeor species level by level, takes each
column's vertical maximum of the summed profile, and calls the column
cloudy when that maximum exceeds 1e-6 kg/kg. Scores follow the standard
contingency-table definitions; metrics whose denominator is zero are
reported as None (serialized to JSON null), never as 0 or NaN.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .raster import CloudMask, HydrometeorVolume

MIXING_RATIO_THRESHOLD = 1e-6  # kg/kg


def derive_truth_mask(vol: HydrometeorVolume, threshold: float = MIXING_RATIO_THRESHOLD) -> CloudMask:
    """Column is cloudy iff the vertical max of the summed species profile
    exceeds the threshold (sum first, then maximize)."""
    summed = vol.values.sum(axis=0)        # (levels, h, w)
    column_max = summed.max(axis=0)        # (h, w)
    return CloudMask(column_max > threshold)


@dataclass(frozen=True)
class ContingencyTable:
    """Pixel counts of the four prediction/truth outcomes."""

    hits: int
    misses: int
    false_alarms: int
    correct_negatives: int

    def __post_init__(self):
        for name in ("hits", "misses", "false_alarms", "correct_negatives"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")
            object.__setattr__(self, name, int(v))

    @property
    def total(self) -> int:
        return self.hits + self.misses + self.false_alarms + self.correct_negatives


def contingency(pred: CloudMask, truth: CloudMask) -> ContingencyTable:
    """Tally TP/FN/FP/TN between a predicted and a reference mask."""
    if pred.shape != truth.shape:
        raise ValueError(f"dimension mismatch: prediction {pred.shape} vs truth {truth.shape}")
    p = pred.flags
    t = truth.flags
    return ContingencyTable(
        hits=int(np.sum(p & t)),
        misses=int(np.sum(~p & t)),
        false_alarms=int(np.sum(p & ~t)),
        correct_negatives=int(np.sum(~p & ~t)),
    )


@dataclass(frozen=True)
class VerificationReport:
    """The five categorical scores plus the raw counts.

    far is false alarms over not-observed events, implemented verbatim
    from its table definition; far_conventional is the textbook
    FP/(TP+FP) ratio, carried alongside for comparability.
    """

    pod: Optional[float]
    far: Optional[float]
    far_conventional: Optional[float]
    undetected_error_rate: Optional[float]
    bias: Optional[float]
    ets: Optional[float]
    hits: int
    misses: int
    false_alarms: int
    correct_negatives: int

    def to_json_dict(self) -> dict:
        return {
            "pod": self.pod,
            "far": self.far,
            "far_conventional": self.far_conventional,
            "undetected_error_rate": self.undetected_error_rate,
            "bias": self.bias,
            "ets": self.ets,
            "hits": self.hits,
            "misses": self.misses,
            "false_alarms": self.false_alarms,
            "correct_negatives": self.correct_negatives,
        }


def verify(table: ContingencyTable) -> VerificationReport:
    """Compute POD, FAR (both forms), undetected error rate, bias and ETS.

    observed = TP+FN and not_observed = FP+TN share the denominators:

        pod  = TP / observed          ur   = FN / observed
        far  = FP / not_observed      bias = (TP+FP) / observed
        ets  = (TP - h) / (TP+FN+FP - h),  h = observed*(TP+FP)/total

    Raises:
        ValueError: table with zero total.
    """
    tp, fn, fp, tn = table.hits, table.misses, table.false_alarms, table.correct_negatives
    total = table.total
    if total == 0:
        raise ValueError("empty contingency table")
    observed = tp + fn
    not_observed = fp + tn
    detected = tp + fp

    pod = tp / observed if observed else None
    ur = fn / observed if observed else None
    far = fp / not_observed if not_observed else None
    far_conv = fp / detected if detected else None
    bias = detected / observed if observed else None

    hits_random = observed * detected / total
    ets_denom = tp + fn + fp - hits_random
    ets = (tp - hits_random) / ets_denom if ets_denom != 0 else None

    return VerificationReport(
        pod=pod,
        far=far,
        far_conventional=far_conv,
        undetected_error_rate=ur,
        bias=bias,
        ets=ets,
        hits=tp,
        misses=fn,
        false_alarms=fp,
        correct_negatives=tn,
    )
