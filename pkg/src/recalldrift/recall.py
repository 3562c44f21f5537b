"""Recall-correctness and error-direction probabilities for reuse events."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import ConfigError

DEFAULT_OLD_THRESHOLD_DAYS = 180.0


class AgeBucket(str, enum.Enum):
    RECENT = "Recent"
    OLD = "Old"


def clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


@dataclass(frozen=True)
class FeatureVector:
    perceived_age_days: float
    age_bucket: AgeBucket
    sensitive: bool = False
    hesitation: float = 0.0
    device_context: str = "unknown"

    def __post_init__(self):
        if self.perceived_age_days < 0:
            raise ValueError("perceived_age_days must be >= 0")
        if not 0.0 <= self.hesitation <= 1.0:
            raise ValueError("hesitation must lie in [0, 1]")
        object.__setattr__(self, "age_bucket", AgeBucket(self.age_bucket))

    @classmethod
    def from_age(cls, perceived_age_days: float, *, old_threshold_days: float = DEFAULT_OLD_THRESHOLD_DAYS,
                 **kwargs) -> "FeatureVector":
        bucket = AgeBucket.OLD if perceived_age_days >= old_threshold_days else AgeBucket.RECENT
        return cls(perceived_age_days, bucket, **kwargs)

    def to_dict(self) -> dict:
        return {
            "perceived_age_days": self.perceived_age_days,
            "age_bucket": self.age_bucket.value,
            "sensitive": self.sensitive,
            "hesitation": self.hesitation,
            "device_context": self.device_context,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FeatureVector":
        return cls(
            perceived_age_days=float(data["perceived_age_days"]),
            age_bucket=AgeBucket(data["age_bucket"]),
            sensitive=bool(data.get("sensitive", False)),
            hesitation=float(data.get("hesitation", 0.0)),
            device_context=str(data.get("device_context", "unknown")),
        )


@dataclass(frozen=True)
class DecayParams:
    floor: float = 0.0
    ceiling: float = 1.0
    half_life_days: float = 365.0

    def __post_init__(self):
        if not (0.0 <= self.floor <= self.ceiling <= 1.0):
            raise ConfigError("need 0 <= floor <= ceiling <= 1", field="decay")
        if not self.half_life_days > 0:
            raise ConfigError("half_life_days must be > 0", field="decay.half_life_days")


def recall_decay(t: float, decay: DecayParams) -> float:
    """Recall specificity at perceived age ``t`` days.

    Exponential approach from ``ceiling`` at t=0 to ``floor`` as t grows,
    halving the gap every ``half_life_days``.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    # written from the ceiling down so that t=0 returns it exactly
    return decay.ceiling - (decay.ceiling - decay.floor) * (1.0 - 2.0 ** (-t / decay.half_life_days))


BucketKey = tuple[AgeBucket, bool]


@dataclass(frozen=True)
class RecallModelParams:
    bucket_table: dict[BucketKey, tuple[float, float]]
    decay: DecayParams = field(default_factory=DecayParams)
    blend: bool = False
    old_threshold_days: float = DEFAULT_OLD_THRESHOLD_DAYS

    def __post_init__(self):
        for (bucket, sens), pair in self.bucket_table.items():
            if len(pair) != 2 or not all(0.0 <= p <= 1.0 for p in pair):
                raise ConfigError(f"probabilities must lie in [0, 1], got {pair}",
                                  field=f"bucket_table[{bucket.value},{'sensitive' if sens else 'plain'}]")

    @classmethod
    def uniform(cls, p_c: float, p_o: float, **kwargs) -> "RecallModelParams":
        """Same (p_c, p_o) in every bucket."""
        table = {(b, s): (p_c, p_o) for b in AgeBucket for s in (False, True)}
        return cls(table, **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "RecallModelParams":
        table: dict[BucketKey, tuple[float, float]] = {}
        for i, row in enumerate(data.get("bucket_table", [])):
            try:
                key = (AgeBucket(row["age_bucket"]), bool(row["sensitive"]))
                table[key] = (float(row["p_c"]), float(row["p_o"]))
            except (KeyError, ValueError, TypeError) as exc:
                raise ConfigError(f"bad row: {exc}", field=f"bucket_table[{i}]") from None
        decay = DecayParams(**data.get("decay", {}))
        return cls(
            bucket_table=table,
            decay=decay,
            blend=bool(data.get("blend", False)),
            old_threshold_days=float(data.get("old_threshold_days", DEFAULT_OLD_THRESHOLD_DAYS)),
        )

    def to_dict(self) -> dict:
        rows = [
            {"age_bucket": b.value, "sensitive": s, "p_c": pc, "p_o": po}
            for (b, s), (pc, po) in sorted(self.bucket_table.items(), key=lambda kv: (kv[0][0].value, kv[0][1]))
        ]
        return {
            "bucket_table": rows,
            "decay": {"floor": self.decay.floor, "ceiling": self.decay.ceiling,
                      "half_life_days": self.decay.half_life_days},
            "blend": self.blend,
            "old_threshold_days": self.old_threshold_days,
        }


def evaluate_recall(x: FeatureVector, params: RecallModelParams) -> tuple[float, float]:
    key = (x.age_bucket, x.sensitive)
    try:
        p_c, p_o = params.bucket_table[key]
    except KeyError:
        raise ConfigError(
            f"no entry for age_bucket={x.age_bucket.value}, sensitive={x.sensitive}",
            field="bucket_table",
        ) from None
    if params.blend:
        ceiling = params.decay.ceiling
        factor = recall_decay(x.perceived_age_days, params.decay) / ceiling if ceiling > 0 else 0.0
        p_c = p_c * factor
    return clamp01(p_c), clamp01(p_o)


class EffectMode(str, enum.Enum):
    ABSOLUTE = "absolute"
    DELTA = "delta"


@dataclass(frozen=True)
class InterventionEffect:
    pc_after: float
    po_after: float
    mode: EffectMode = EffectMode.ABSOLUTE

    def __post_init__(self):
        object.__setattr__(self, "mode", EffectMode(self.mode))
        if self.mode is EffectMode.ABSOLUTE and not (0 <= self.pc_after <= 1 and 0 <= self.po_after <= 1):
            raise ConfigError("absolute effect probabilities must lie in [0, 1]", field="effect")

    @classmethod
    def identity(cls) -> "InterventionEffect":
        return cls(0.0, 0.0, EffectMode.DELTA)


def apply_intervention(p_c: float, p_o: float, effect: InterventionEffect) -> tuple[float, float]:
    if effect.mode is EffectMode.ABSOLUTE:
        return effect.pc_after, effect.po_after
    return clamp01(p_c + effect.pc_after), clamp01(p_o + effect.po_after)
