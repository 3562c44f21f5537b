"""Reuse events and the line-delimited JSON event-log format."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Iterator

from .errors import ConfigError
from .lattice import AudienceScope
from .provenance import ProvenanceRecord
from .recall import FeatureVector


class Override(str, enum.Enum):
    NONE = "none"
    BROADENED = "broadened"
    NARROWED = "narrowed"


@dataclass(frozen=True)
class ReuseEvent:
    event_id: str
    item_id: str
    day_index: int
    features: FeatureVector
    provenance: ProvenanceRecord | None = None
    outgoing: AudienceScope | None = None
    overridden: Override = Override.NONE
    completed: bool = True
    time_to_post_ms: float = 0.0

    def with_outgoing(self, scope: AudienceScope | None) -> "ReuseEvent":
        return replace(self, outgoing=scope)

    def to_dict(self) -> dict:
        return {
            "event_id": self.event_id,
            "item_id": self.item_id,
            "day_index": self.day_index,
            "features": self.features.to_dict(),
            "provenance": self.provenance.to_dict() if self.provenance else None,
            "outgoing": self.outgoing.label if self.outgoing is not None else None,
            "overridden": Override(self.overridden).value,
            "completed": self.completed,
            "time_to_post_ms": self.time_to_post_ms,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ReuseEvent":
        prov = data.get("provenance")
        out = data.get("outgoing")
        return cls(
            event_id=str(data["event_id"]),
            item_id=str(data.get("item_id", data["event_id"])),
            day_index=int(data.get("day_index", 0)),
            features=FeatureVector.from_dict(data["features"]),
            provenance=ProvenanceRecord.from_dict(prov) if prov is not None else None,
            outgoing=AudienceScope.parse(out) if out is not None else None,
            overridden=Override(data.get("overridden", "none")),
            completed=bool(data.get("completed", True)),
            time_to_post_ms=float(data.get("time_to_post_ms", 0.0)),
        )


class EventLog(tuple):
    """An ordered, validated sequence of :class:`ReuseEvent`."""

    def __new__(cls, events: Iterable[ReuseEvent] = ()):
        events = tuple(events)
        seen = set()
        last_day = None
        for ev in events:
            if ev.event_id in seen:
                raise ConfigError(f"duplicate event_id {ev.event_id!r}", field="events")
            seen.add(ev.event_id)
            if last_day is not None and ev.day_index < last_day:
                raise ConfigError(f"day_index decreases at {ev.event_id!r}", field="events")
            last_day = ev.day_index
        return super().__new__(cls, events)


def dumps_log(log: Iterable[ReuseEvent]) -> str:
    return "".join(json.dumps(ev.to_dict(), sort_keys=True, separators=(",", ":")) + "\n" for ev in log)


def write_log(log: Iterable[ReuseEvent], path: str | Path) -> None:
    Path(path).write_text(dumps_log(log), encoding="utf-8")


def iter_log_lines(lines: Iterable[str]) -> Iterator[ReuseEvent]:
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            yield ReuseEvent.from_dict(json.loads(line))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"{type(exc).__name__}: {exc}", field=f"line {lineno}") from None


def read_log(path: str | Path) -> EventLog:
    with open(path, encoding="utf-8") as fh:
        return EventLog(iter_log_lines(fh))
