"""Brier score and equal-width reliability bins for risk predictions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ParameterError


@dataclass(frozen=True)
class ReliabilityBin:
    lower: float
    upper: float
    mean_predicted: float | None
    empirical_rate: float | None
    count: int


@dataclass(frozen=True)
class CalibrationReport:
    brier_score: float
    reliability_bins: tuple[ReliabilityBin, ...]
    expected_calibration_error: float
    n: int


def _bin_index(p: float, n_bins: int) -> int:
    return min(int(p * n_bins), n_bins - 1)


def calibration_report(predictions: Sequence[float], outcomes: Sequence[int | bool],
                       n_bins: int = 10) -> CalibrationReport:
    if len(predictions) != len(outcomes):
        raise ParameterError("predictions and outcomes differ in length")
    if not predictions:
        raise ParameterError("need at least one prediction")
    if n_bins < 1:
        raise ParameterError("n_bins must be >= 1")
    preds = [float(p) for p in predictions]
    ys = [1.0 if y else 0.0 for y in outcomes]
    if any(not 0.0 <= p <= 1.0 for p in preds):
        raise ParameterError("predictions must lie in [0, 1]")
    n = len(preds)
    brier = math.fsum((p - y) ** 2 for p, y in zip(preds, ys)) / n

    members: list[list[int]] = [[] for _ in range(n_bins)]
    for i, p in enumerate(preds):
        members[_bin_index(p, n_bins)].append(i)
    bins = []
    gaps = []
    for k, idx in enumerate(members):
        lo, hi = k / n_bins, (k + 1) / n_bins
        if not idx:
            bins.append(ReliabilityBin(lo, hi, None, None, 0))
            continue
        mean_p = math.fsum(preds[i] for i in idx) / len(idx)
        rate = math.fsum(ys[i] for i in idx) / len(idx)
        bins.append(ReliabilityBin(lo, hi, mean_p, rate, len(idx)))
        gaps.append(len(idx) * abs(mean_p - rate))
    return CalibrationReport(brier, tuple(bins), math.fsum(gaps) / n, n)
