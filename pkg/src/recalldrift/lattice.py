"""Audience scopes on the Private < Friends < Public chain.

Also handles foreign audience ontologies (other apps' labels) and maps them
onto the chain, falling back to the narrowest admissible scope.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError


class AudienceScope(enum.IntEnum):
    PRIVATE = 0
    FRIENDS = 1
    PUBLIC = 2

    @property
    def width(self) -> int:
        return int(self)

    @property
    def label(self) -> str:
        return self.name.capitalize()

    @classmethod
    def parse(cls, value: "str | AudienceScope") -> "AudienceScope":
        if isinstance(value, AudienceScope):
            return value
        try:
            return cls[str(value).strip().upper()]
        except KeyError:
            raise ValueError(f"unknown audience scope {value!r}") from None

    def __str__(self) -> str:
        return self.label


class Ordering(enum.Enum):
    NARROWER = "Narrower"
    EQUAL = "Equal"
    BROADER = "Broader"


class DriftKind(enum.Enum):
    CORRECT = "Correct"
    OVEREXPOSURE = "Overexposure"
    UNDEREXPOSURE = "Underexposure"


@dataclass(frozen=True)
class DriftOutcome:
    kind: DriftKind
    steps: int

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError("steps must be non-negative")
        if (self.kind is DriftKind.CORRECT) != (self.steps == 0):
            raise ValueError("Correct outcomes have zero steps and only they do")


def compare_scopes(a: AudienceScope, b: AudienceScope) -> Ordering:
    """Order ``a`` relative to ``b``."""
    if a.width < b.width:
        return Ordering.NARROWER
    if a.width > b.width:
        return Ordering.BROADER
    return Ordering.EQUAL


def step_distance(a: AudienceScope, b: AudienceScope) -> int:
    return abs(a.width - b.width)


def classify_drift(original: AudienceScope, recalled: AudienceScope) -> DriftOutcome:
    order = compare_scopes(recalled, original)
    steps = step_distance(original, recalled)
    if order is Ordering.BROADER:
        return DriftOutcome(DriftKind.OVEREXPOSURE, steps)
    if order is Ordering.NARROWER:
        return DriftOutcome(DriftKind.UNDEREXPOSURE, steps)
    return DriftOutcome(DriftKind.CORRECT, 0)


@dataclass(frozen=True)
class MappingEntry:
    """Target(s) for one foreign label; a single candidate means an exact mapping."""

    candidates: tuple[AudienceScope, ...]

    def __post_init__(self):
        if not self.candidates:
            raise ValueError("mapping entry needs at least one candidate")
        # keep narrowest-first, no duplicates
        object.__setattr__(self, "candidates", tuple(sorted(set(self.candidates))))

    @property
    def exact(self) -> bool:
        return len(self.candidates) == 1


@dataclass(frozen=True)
class AudienceOntology:
    name: str
    scopes: tuple[str, ...]
    mapping: dict[str, MappingEntry] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "AudienceOntology":
        try:
            name = data["name"]
            scopes = tuple(data.get("scopes", ()))
            raw = data.get("mapping", {})
        except (TypeError, KeyError) as exc:
            raise ConfigError(f"missing key {exc}", field="ontology") from None
        mapping: dict[str, MappingEntry] = {}
        for label, spec in raw.items():
            where = f"mapping.{label}"
            if not isinstance(spec, dict):
                raise ConfigError("expected an object", field=where)
            if "target" in spec and "candidates" in spec:
                raise ConfigError("give either target or candidates, not both", field=where)
            try:
                if "target" in spec:
                    targets = (AudienceScope.parse(spec["target"]),)
                elif "candidates" in spec:
                    targets = tuple(AudienceScope.parse(c) for c in spec["candidates"])
                else:
                    raise ConfigError("needs target or candidates", field=where)
                mapping[label] = MappingEntry(targets)
            except ValueError as exc:
                if isinstance(exc, ConfigError):
                    raise
                raise ConfigError(str(exc), field=where) from None
        return cls(name=name, scopes=scopes, mapping=mapping)

    @classmethod
    def load(cls, path: str | Path) -> "AudienceOntology":
        text = Path(path).read_text(encoding="utf-8")
        try:
            data = json.loads(text, object_pairs_hook=_no_duplicate_keys)
        except json.JSONDecodeError as exc:
            raise ConfigError(str(exc), field=str(path)) from None
        return cls.from_dict(data)


def _no_duplicate_keys(pairs):
    seen = {}
    for key, value in pairs:
        if key in seen:
            raise ConfigError("label appears more than once", field=f"mapping.{key}")
        seen[key] = value
    return seen


@dataclass(frozen=True)
class MappedScope:
    scope: AudienceScope
    ambiguous: bool = False
    missing: bool = False
    candidates: tuple[AudienceScope, ...] = ()


def map_scope(foreign: str, ontology: AudienceOntology) -> MappedScope:
    """Translate a foreign label, defaulting narrow when unsure.

    Unknown labels become Private with ``missing`` set; ambiguous entries
    resolve to their narrowest candidate with ``ambiguous`` set.
    """
    entry = ontology.mapping.get(foreign)
    if entry is None:
        return MappedScope(AudienceScope.PRIVATE, missing=True)
    if entry.exact:
        return MappedScope(entry.candidates[0], candidates=entry.candidates)
    return MappedScope(entry.candidates[0], ambiguous=True, candidates=entry.candidates)
