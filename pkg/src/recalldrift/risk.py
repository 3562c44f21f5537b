"""Per-event overexposure risk, intervention gating and budgeted selection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import groupby
from typing import Callable, Iterable, Sequence

from .errors import ParameterError
from .recall import AgeBucket, FeatureVector, RecallModelParams, evaluate_recall


@dataclass(frozen=True)
class CostModel:
    c_f: float = 1.0  # friction per prompt shown
    c_o: float = 10.0  # harm per overexposure

    def __post_init__(self):
        for name in ("c_f", "c_o"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ParameterError(f"{name} must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class ScoredEvent:
    event_id: str
    risk: float
    delta_r: float
    weighted_benefit: float
    day_index: int = 0


def per_event_risk(p_c: float, p_o: float) -> float:
    return (1.0 - p_c) * p_o


def delta_r(p_c: float, p_o: float, pc_after: float, po_after: float) -> float:
    return per_event_risk(p_c, p_o) - per_event_risk(pc_after, po_after)


def should_intervene(delta: float, costs: CostModel) -> bool:
    # strict: a tie does not prompt
    return costs.c_o * delta > costs.c_f


def rule_trigger(x: FeatureVector, uncertainty_threshold: float) -> bool:
    return x.age_bucket is AgeBucket.OLD and (x.hesitation >= uncertainty_threshold or x.sensitive)


def constant_rate(lam: float) -> Callable[[float], float]:
    return lambda t: lam


def piecewise_rate(spans: Sequence[tuple[float, float]]) -> Callable[[float], float]:
    """Rate from consecutive ``(span_days, rate)`` pieces; zero past the last."""
    edges = []
    start = 0.0
    for span, lam in spans:
        if span < 0:
            raise ParameterError("span lengths must be >= 0")
        edges.append((start, start + span, lam))
        start += span

    def rate(t: float) -> float:
        for lo, hi, lam in edges:
            if lo <= t < hi:
                return lam
        return 0.0

    return rate


def cumulative_overexposures(
    rate: Callable[[float], float],
    model: RecallModelParams,
    features_at: Callable[[float], FeatureVector],
    horizon: float,
    step: float = 1.0,
) -> float:
    """Expected overexposures of one item over ``[0, horizon]`` days.

    Midpoint rule on ``rate(t) * (1 - p_c) * p_o``. The last panel is
    shortened when ``horizon`` is not a multiple of ``step``.
    """
    if not step > 0:
        raise ParameterError("step must be > 0")
    if horizon < 0:
        raise ParameterError("horizon must be >= 0")
    terms = []
    k = 0
    while True:
        a = k * step
        if a >= horizon:
            break
        b = min((k + 1) * step, horizon)
        mid = 0.5 * (a + b)
        p_c, p_o = evaluate_recall(features_at(mid), model)
        terms.append((b - a) * rate(mid) * per_event_risk(p_c, p_o))
        k += 1
    return math.fsum(terms)


def greedy_budget_select(candidates: Iterable[ScoredEvent], budget: int) -> list[ScoredEvent]:
    """Top ``budget`` events by weighted benefit, separately for each day.

    Ties go to the smaller event id. Output is ordered by day, then rank.
    """
    if budget < 0:
        raise ParameterError("budget must be >= 0")
    ordered = sorted(candidates, key=lambda e: (e.day_index, -e.weighted_benefit, e.event_id))
    selected: list[ScoredEvent] = []
    for _, day_events in groupby(ordered, key=lambda e: e.day_index):
        selected.extend(list(day_events)[:budget])
    return selected


@dataclass(frozen=True)
class OperatingPoint:
    threshold: float
    sensitivity: float
    specificity: float
    flagged: int


def operating_points(scores: Sequence[float], labels: Sequence[bool],
                     thresholds: Sequence[float]) -> list[OperatingPoint]:
    """Sensitivity/specificity of ``score >= threshold`` at each threshold.

    A rate with an empty denominator is reported as NaN.
    """
    if len(scores) != len(labels):
        raise ParameterError("scores and labels differ in length")
    pos = sum(1 for y in labels if y)
    neg = len(labels) - pos
    out = []
    for th in thresholds:
        tp = sum(1 for s, y in zip(scores, labels) if y and s >= th)
        fp = sum(1 for s, y in zip(scores, labels) if not y and s >= th)
        sens = tp / pos if pos else math.nan
        spec = (neg - fp) / neg if neg else math.nan
        out.append(OperatingPoint(th, sens, spec, tp + fp))
    return out
