"""Counterfactual replay of event logs under intervention policies.

Also collects the privacy-binned evaluation counters and computes
sensitivity bands over grids of prior probabilities.
"""

from __future__ import annotations

import enum
import math
import statistics
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ParameterError
from .events import EventLog, Override, ReuseEvent
from .provenance import detect_scope_widening
from .recall import EffectMode, InterventionEffect, RecallModelParams, apply_intervention, evaluate_recall
from .risk import CostModel, ScoredEvent, delta_r, greedy_budget_select, per_event_risk, rule_trigger, should_intervene


class PolicyKind(str, enum.Enum):
    NEVER = "never"
    ALWAYS = "always"
    THRESHOLD = "threshold"
    RULE = "rule"
    GREEDY = "greedy"


@dataclass(frozen=True)
class Policy:
    kind: PolicyKind
    budget: int | None = None
    uncertainty_threshold: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "kind", PolicyKind(self.kind))
        if self.kind is PolicyKind.GREEDY and (self.budget is None or self.budget < 0):
            raise ParameterError("greedy policy needs a budget >= 0")
        if not 0.0 <= self.uncertainty_threshold <= 1.0:
            raise ParameterError("uncertainty_threshold must lie in [0, 1]")

    @classmethod
    def parse(cls, text: str, uncertainty_threshold: float = 0.5) -> "Policy":
        """Parse ``never|always|threshold|rule[:u]|greedy:B``."""
        name, _, arg = text.strip().lower().partition(":")
        try:
            kind = PolicyKind(name)
        except ValueError:
            raise ParameterError(f"unknown policy {text!r}") from None
        try:
            if kind is PolicyKind.GREEDY:
                if not arg:
                    raise ParameterError("greedy policy is written greedy:B")
                return cls(kind, budget=int(arg), uncertainty_threshold=uncertainty_threshold)
            if kind is PolicyKind.RULE and arg:
                return cls(kind, uncertainty_threshold=float(arg))
        except ValueError as exc:
            if isinstance(exc, ParameterError):
                raise
            raise ParameterError(f"bad policy argument in {text!r}") from None
        if arg:
            raise ParameterError(f"policy {name!r} takes no argument")
        return cls(kind, uncertainty_threshold=uncertainty_threshold)

    def __str__(self) -> str:
        if self.kind is PolicyKind.GREEDY:
            return f"greedy:{self.budget}"
        if self.kind is PolicyKind.RULE:
            return f"rule:{self.uncertainty_threshold:g}"
        return self.kind.value


@dataclass(frozen=True)
class EventScore:
    event: ReuseEvent
    p_c: float
    p_o: float
    pc_after: float
    po_after: float
    scored: ScoredEvent
    selected: bool = False


def score_events(log: Sequence[ReuseEvent], model: RecallModelParams, effect: InterventionEffect,
                 costs: CostModel) -> list[EventScore]:
    rows = []
    for ev in log:
        p_c, p_o = evaluate_recall(ev.features, model)
        pc2, po2 = apply_intervention(p_c, p_o, effect)
        d = delta_r(p_c, p_o, pc2, po2)
        scored = ScoredEvent(ev.event_id, per_event_risk(p_c, p_o), d, costs.c_o * d, ev.day_index)
        rows.append(EventScore(ev, p_c, p_o, pc2, po2, scored))
    return rows


def select_events(policy: Policy, rows: Sequence[EventScore], costs: CostModel) -> list[EventScore]:
    """Return ``rows`` with ``selected`` filled in according to ``policy``."""
    kind = policy.kind
    if kind is PolicyKind.GREEDY:
        chosen = {s.event_id for s in greedy_budget_select([r.scored for r in rows], policy.budget)}
        pick = lambda r: r.event.event_id in chosen  # noqa: E731
    elif kind is PolicyKind.ALWAYS:
        pick = lambda r: True  # noqa: E731
    elif kind is PolicyKind.THRESHOLD:
        pick = lambda r: should_intervene(r.scored.delta_r, costs)  # noqa: E731
    elif kind is PolicyKind.RULE:
        pick = lambda r: rule_trigger(r.event.features, policy.uncertainty_threshold)  # noqa: E731
    else:
        pick = lambda r: False  # noqa: E731
    return [EventScore(r.event, r.p_c, r.p_o, r.pc_after, r.po_after, r.scored, pick(r)) for r in rows]


@dataclass(frozen=True)
class PolicyReport:
    policy: str
    n_events: int
    expected_overexposures_baseline: float
    expected_overexposures_with_policy: float
    expected_prompted: float
    expected_unprompted: float
    prompts_shown: int
    absolute_reduction: float
    relative_reduction: float

    def as_rows(self) -> list[tuple[str, object]]:
        return [(k, getattr(self, k)) for k in self.__dataclass_fields__]

    def to_text(self) -> str:
        lines = [
            f"policy                        {self.policy}",
            f"events                        {self.n_events}",
            f"prompts shown                 {self.prompts_shown}",
            f"baseline E[overexposures]     {self.expected_overexposures_baseline:.3f}",
            f"  prompted bucket             {self.expected_prompted:.3f}",
            f"  unprompted bucket           {self.expected_unprompted:.3f}",
            f"with policy E[overexposures]  {self.expected_overexposures_with_policy:.3f}",
            f"absolute reduction            {self.absolute_reduction:.3f}",
            f"relative reduction            {100 * self.relative_reduction:.2f}%",
        ]
        return "\n".join(lines) + "\n"


def summarize(policy: Policy, rows: Sequence[EventScore]) -> PolicyReport:
    baseline = math.fsum(r.scored.risk for r in rows)
    prompted = math.fsum(per_event_risk(r.pc_after, r.po_after) for r in rows if r.selected)
    unprompted = math.fsum(r.scored.risk for r in rows if not r.selected)
    with_policy = prompted + unprompted
    absolute = baseline - with_policy
    return PolicyReport(
        policy=str(policy),
        n_events=len(rows),
        expected_overexposures_baseline=baseline,
        expected_overexposures_with_policy=with_policy,
        expected_prompted=prompted,
        expected_unprompted=unprompted,
        prompts_shown=sum(1 for r in rows if r.selected),
        absolute_reduction=absolute,
        relative_reduction=absolute / baseline if baseline > 0 else 0.0,
    )


def replay_policy(log: Sequence[ReuseEvent], policy: Policy, model: RecallModelParams,
                  effect: InterventionEffect, costs: CostModel) -> PolicyReport:
    """Replay ``log`` with and without ``policy``.

    Selected events get the post-intervention probabilities; the baseline is
    the never-prompt policy on the same log.
    """
    rows = select_events(policy, score_events(log, model, effect, costs), costs)
    return summarize(policy, rows)


# -- evaluation counters -----------------------------------------------------

@dataclass(frozen=True)
class CounterBin:
    start_day: int
    end_day: int  # exclusive
    events: int
    widening_count: int
    missing_provenance: int
    broaden_overrides: int
    narrow_overrides: int
    completion_rate: float
    median_time_to_post: float


@dataclass(frozen=True)
class CounterSet:
    bin_width_days: int
    bins: tuple[CounterBin, ...] = field(default_factory=tuple)
    noise_scale: float = 0.0

    @property
    def widening_count(self) -> int:
        return sum(b.widening_count for b in self.bins)


_NOISY_FIELDS = ("widening_count", "missing_provenance", "broaden_overrides", "narrow_overrides")


def collect_counters(log: Sequence[ReuseEvent], bin_width_days: int = 7, noise_scale: float = 0.0,
                     seed: int = 0) -> CounterSet:
    """Aggregate the three evaluation counters into day windows.

    With ``noise_scale > 0``, seeded Laplace noise is added to each count,
    which is then rounded and floored at zero. Rates are left exact.
    """
    if bin_width_days < 1:
        raise ParameterError("bin width must be >= 1 day")
    if noise_scale < 0:
        raise ParameterError("noise scale must be >= 0")
    groups: dict[int, list[ReuseEvent]] = {}
    for ev in log:
        groups.setdefault(ev.day_index // bin_width_days, []).append(ev)

    rng = np.random.default_rng(seed) if noise_scale > 0 else None
    bins = []
    for b in sorted(groups):
        evs = groups[b]
        tally: Counter = Counter()
        for ev in evs:
            if ev.outgoing is None:
                continue
            if detect_scope_widening(ev.provenance, ev.outgoing, tally):
                tally["widening_count"] += 1
        tally["broaden_overrides"] = sum(1 for e in evs if e.overridden is Override.BROADENED)
        tally["narrow_overrides"] = sum(1 for e in evs if e.overridden is Override.NARROWED)
        counts = {k: tally[k] for k in _NOISY_FIELDS}
        if rng is not None:
            noise = rng.laplace(0.0, noise_scale, size=len(_NOISY_FIELDS))
            counts = {k: max(0, int(round(v + n))) for (k, v), n in zip(counts.items(), noise)}
        bins.append(CounterBin(
            start_day=b * bin_width_days,
            end_day=(b + 1) * bin_width_days,
            events=len(evs),
            completion_rate=sum(1 for e in evs if e.completed) / len(evs),
            median_time_to_post=float(statistics.median(e.time_to_post_ms for e in evs)),
            **counts,
        ))
    return CounterSet(bin_width_days, tuple(bins), noise_scale)


# -- sensitivity bands -------------------------------------------------------

PriorPoint = tuple[float, float, float, float]


@dataclass(frozen=True)
class SensitivityBand:
    policy: str
    prior_grid: tuple[PriorPoint, ...]
    reductions: tuple[float, ...]
    reduction_min: float
    reduction_mid: float
    reduction_max: float


def sensitivity_sweep(log: Sequence[ReuseEvent], policy: Policy, prior_grid: Sequence[PriorPoint],
                      costs: CostModel, old_threshold_days: float = 180.0) -> SensitivityBand:
    """Relative reduction of ``policy`` at every ``(p_c, p_o, p~_c, p~_o)`` prior.

    Each grid point is applied uniformly to all events. The band is the
    min / median / max over the grid.
    """
    grid = tuple(tuple(float(v) for v in p) for p in prior_grid)
    if not grid:
        raise ParameterError("prior grid is empty")
    reductions = []
    for pc, po, pc2, po2 in grid:
        model = RecallModelParams.uniform(pc, po, old_threshold_days=old_threshold_days)
        effect = InterventionEffect(pc2, po2, EffectMode.ABSOLUTE)
        reductions.append(replay_policy(log, policy, model, effect, costs).relative_reduction)
    return SensitivityBand(
        policy=str(policy),
        prior_grid=grid,
        reductions=tuple(reductions),
        reduction_min=min(reductions),
        reduction_mid=statistics.median(reductions),
        reduction_max=max(reductions),
    )


class Dominance(enum.Enum):
    A_DOMINATES = "A_dominates"
    B_DOMINATES = "B_dominates"
    OVERLAP = "Overlap"


def dominance_check(a: SensitivityBand, b: SensitivityBand) -> Dominance:
    if a.prior_grid != b.prior_grid:
        raise ParameterError("bands were computed on different prior grids")
    if a.reduction_min > b.reduction_max:
        return Dominance.A_DOMINATES
    if b.reduction_min > a.reduction_max:
        return Dominance.B_DOMINATES
    return Dominance.OVERLAP
