"""PROV-lite audience provenance sidecars and badge rendering.

A sidecar is a projection of a PROV-DM Entity (``entity_id``, ``scope``,
``created_at``, ``sensitive``) generated by an Activity (``activity``)
associated with an Agent (``agent``). One record per
``<content-id>.prov.json`` file.
"""

from __future__ import annotations

import enum
import json
import os
import tempfile
from collections import Counter
from dataclasses import dataclass
from datetime import date
from pathlib import Path

from .errors import ProvenanceParseError
from .lattice import AudienceScope, Ordering, compare_scopes

SIDECAR_SUFFIX = ".prov.json"
SIDECAR_FIELDS = ("activity", "agent", "created_at", "entity_id", "scope", "sensitive")

NO_PROVENANCE_TEXT = "No provenance — defaulting to Private"


class Activity(str, enum.Enum):
    POST = "post"
    RESHARE = "reshare"
    IMPORT = "import"


@dataclass(frozen=True)
class ProvenanceRecord:
    entity_id: str
    original_audience: AudienceScope
    created_at: date
    agent: str
    activity: Activity = Activity.POST
    sensitive: bool = False

    def __post_init__(self):
        if not self.entity_id:
            raise ValueError("entity_id must be non-empty")
        # month granularity is all the sidecar carries
        if self.created_at.day != 1:
            object.__setattr__(self, "created_at", self.created_at.replace(day=1))
        object.__setattr__(self, "original_audience", AudienceScope.parse(self.original_audience))
        object.__setattr__(self, "activity", Activity(self.activity))

    def to_dict(self) -> dict:
        return {
            "activity": self.activity.value,
            "agent": self.agent,
            "created_at": f"{self.created_at.year:04d}-{self.created_at.month:02d}",
            "entity_id": self.entity_id,
            "scope": self.original_audience.label,
            "sensitive": self.sensitive,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ProvenanceRecord":
        if not isinstance(data, dict):
            raise ProvenanceParseError("<root>", "expected a JSON object")
        for name in SIDECAR_FIELDS:
            if name not in data:
                raise ProvenanceParseError(name, "missing")
        entity_id = data["entity_id"]
        if not isinstance(entity_id, str) or not entity_id:
            raise ProvenanceParseError("entity_id", "must be a non-empty string")
        try:
            scope = AudienceScope.parse(data["scope"])
        except ValueError as exc:
            raise ProvenanceParseError("scope", str(exc)) from None
        created_at = _parse_year_month(data["created_at"])
        if not isinstance(data["agent"], str):
            raise ProvenanceParseError("agent", "must be a string")
        try:
            activity = Activity(data["activity"])
        except ValueError:
            raise ProvenanceParseError("activity", f"unknown activity {data['activity']!r}") from None
        if not isinstance(data["sensitive"], bool):
            raise ProvenanceParseError("sensitive", "must be true or false")
        return cls(entity_id, scope, created_at, data["agent"], activity, data["sensitive"])


def _parse_year_month(value) -> date:
    if not isinstance(value, str) or len(value) != 7 or value[4] != "-":
        raise ProvenanceParseError("created_at", f"expected YYYY-MM, got {value!r}")
    try:
        return date(int(value[:4]), int(value[5:]), 1)
    except ValueError as exc:
        raise ProvenanceParseError("created_at", str(exc)) from None


def serialize_record(record: ProvenanceRecord) -> bytes:
    """Canonical sidecar bytes: UTF-8, sorted keys, compact, trailing newline."""
    text = json.dumps(record.to_dict(), sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return (text + "\n").encode("utf-8")


def sidecar_path(directory: str | Path, entity_id: str) -> Path:
    return Path(directory) / f"{entity_id}{SIDECAR_SUFFIX}"


def attach_record(record: ProvenanceRecord, store: str | Path) -> None:
    """Write ``record`` to the sidecar at ``store``, replacing any previous one.

    Raises OSError when the location is not writable.
    """
    store = Path(store)
    payload = serialize_record(record)
    fd, tmp = tempfile.mkstemp(dir=store.parent, prefix=".prov-", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, store)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_record(store: str | Path) -> ProvenanceRecord | None:
    """Load a sidecar; ``None`` when there is no file at ``store``."""
    store = Path(store)
    try:
        raw = store.read_bytes()
    except FileNotFoundError:
        return None
    try:
        data = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ProvenanceParseError("<document>", str(exc)) from None
    return ProvenanceRecord.from_dict(data)


@dataclass(frozen=True)
class BadgeLabel:
    text: str
    abstracted: bool = False


def _month_year(d: date) -> str:
    # %B is locale dependent
    months = ("January", "February", "March", "April", "May", "June", "July",
              "August", "September", "October", "November", "December")
    return f"{months[d.month - 1]} {d.year}"


def render_badge(record: ProvenanceRecord | None) -> BadgeLabel:
    if record is None:
        return BadgeLabel(NO_PROVENANCE_TEXT)
    when = _month_year(record.created_at)
    if record.sensitive:
        return BadgeLabel(f"Limited audience — {when}", abstracted=True)
    return BadgeLabel(f"Original audience: {record.original_audience.label} — {when}")


def detect_scope_widening(
    record: ProvenanceRecord | None,
    outgoing: AudienceScope,
    tally: Counter | None = None,
) -> bool:
    """True when ``outgoing`` is strictly broader than the recorded audience.

    Without a record nothing can be assessed; the miss is counted in
    ``tally["missing_provenance"]`` when a tally is supplied.
    """
    if record is None:
        if tally is not None:
            tally["missing_provenance"] += 1
        return False
    return compare_scopes(outgoing, record.original_audience) is Ordering.BROADER
