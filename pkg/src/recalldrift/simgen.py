"""Seeded synthetic reuse-event streams.

Each item draws from its own generator seeded by ``(seed, item_index)``;
outcome sampling hashes ``(seed, event_id)``. Results therefore do not
depend on generation order.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .events import EventLog, ReuseEvent
from .lattice import AudienceScope
from .provenance import Activity, ProvenanceRecord
from .recall import DEFAULT_OLD_THRESHOLD_DAYS, FeatureVector, RecallModelParams, evaluate_recall

_SUM_TOL = 1e-9


@dataclass(frozen=True)
class SimConfig:
    n_items: int = 10
    horizon_days: int = 30
    # constant rate (events/day) or consecutive (span_days, rate) pieces
    reuse_rate: float | tuple[tuple[float, float], ...] = 0.1
    old_fraction: float = 0.5
    sensitive_fraction: float = 0.1
    hesitation_range: tuple[float, float] = (0.0, 1.0)
    scope_dist: tuple[float, float, float] = (0.3, 0.5, 0.2)
    seed: int = 0
    old_threshold_days: float = DEFAULT_OLD_THRESHOLD_DAYS
    device_contexts: tuple[str, ...] = ("mobile", "desktop")
    start_date: date = field(default_factory=lambda: date(2025, 1, 1))

    def __post_init__(self):
        if self.n_items < 0:
            raise ConfigError("must be >= 0", field="n_items")
        if self.horizon_days < 1:
            raise ConfigError("must be >= 1", field="horizon_days")
        for name in ("old_fraction", "sensitive_fraction"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError("must lie in [0, 1]", field=name)
        a, b = self.hesitation_range
        if not 0.0 <= a <= b <= 1.0:
            raise ConfigError("need 0 <= a <= b <= 1", field="hesitation_range")
        if len(self.scope_dist) != 3 or any(p < 0 for p in self.scope_dist) \
                or abs(sum(self.scope_dist) - 1.0) > _SUM_TOL:
            raise ConfigError("three non-negative probabilities summing to 1", field="scope_dist")
        rates = [self.reuse_rate] if isinstance(self.reuse_rate, (int, float)) \
            else [lam for _, lam in self.reuse_rate] + [s for s, _ in self.reuse_rate]
        if any(r < 0 or not math.isfinite(r) for r in rates):
            raise ConfigError("rates and spans must be finite and >= 0", field="reuse_rate")
        if not self.device_contexts:
            raise ConfigError("need at least one context", field="device_contexts")

    def rate_on_day(self, day: int) -> float:
        if isinstance(self.reuse_rate, (int, float)):
            return float(self.reuse_rate)
        start = 0.0
        mid = day + 0.5
        for span, lam in self.reuse_rate:
            if start <= mid < start + span:
                return float(lam)
            start += span
        return 0.0


def _month_of(d: date) -> date:
    return d.replace(day=1)


def generate_log(config: SimConfig) -> EventLog:
    scopes = list(AudienceScope)
    thr = config.old_threshold_days
    events: list[tuple[int, int, int, ReuseEvent]] = []
    for i in range(config.n_items):
        rng = np.random.default_rng([config.seed, i])
        item_id = f"item{i:05d}"
        scope = scopes[int(rng.choice(3, p=config.scope_dist))]
        sensitive = bool(rng.random() < config.sensitive_fraction)
        k = 0
        for day in range(config.horizon_days):
            for _ in range(int(rng.poisson(config.rate_on_day(day)))):
                old = bool(rng.random() < config.old_fraction)
                age = float(rng.uniform(thr, 3 * thr)) if old else float(rng.uniform(0.0, thr))
                age = round(age, 3)
                if old and age < thr:
                    age = thr
                if not old and age >= thr:
                    age = math.nextafter(thr, 0.0)
                hes = round(float(rng.uniform(*config.hesitation_range)), 6)
                device = config.device_contexts[int(rng.integers(len(config.device_contexts)))]
                created = _month_of(config.start_date + timedelta(days=day) - timedelta(days=age))
                features = FeatureVector.from_age(age, old_threshold_days=thr, sensitive=sensitive,
                                                  hesitation=hes, device_context=device)
                event_id = f"{item_id}-e{k:04d}"
                prov = ProvenanceRecord(item_id, scope, created, "sim", Activity.POST, sensitive)
                ttp = float(round(rng.lognormal(math.log(8000.0), 0.5)))
                ev = ReuseEvent(event_id, item_id, day, features, prov, None, completed=True,
                                time_to_post_ms=ttp)
                events.append((day, i, k, ev))
                k += 1
    events.sort(key=lambda t: t[:3])
    return EventLog(ev for *_, ev in events)


def _uniforms(seed: int, event_id: str) -> tuple[float, float]:
    digest = hashlib.sha256(f"{seed}:{event_id}".encode()).digest()
    u1 = int.from_bytes(digest[:8], "big") / 2.0 ** 64
    u2 = int.from_bytes(digest[8:16], "big") / 2.0 ** 64
    return u1, u2


@dataclass(frozen=True)
class SampledLog:
    log: EventLog
    skipped: tuple[str, ...] = ()


def sample_outcomes(log: Sequence[ReuseEvent], model: RecallModelParams, seed: int) -> SampledLog:
    """Realize each event's outgoing scope from the recall model.

    Correct recall keeps the original scope; an error widens one step with
    probability ``p_o`` and otherwise narrows one step. A step off either
    end of the lattice is treated as correct recall. Events without
    provenance are left untouched and listed in ``skipped``.
    """
    out = []
    skipped = []
    for ev in log:
        if ev.provenance is None:
            skipped.append(ev.event_id)
            out.append(ev)
            continue
        p_c, p_o = evaluate_recall(ev.features, model)
        u_correct, u_dir = _uniforms(seed, ev.event_id)
        original = ev.provenance.original_audience
        if u_correct < p_c:
            scope = original
        else:
            target = original.width + (1 if u_dir < p_o else -1)
            scope = AudienceScope(target) if 0 <= target <= 2 else original
        out.append(ev.with_outgoing(scope))
    return SampledLog(EventLog(out), tuple(skipped))
