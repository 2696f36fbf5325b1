"""Canonicalize free-text crime-type strings into a fixed category set.

Raw sources spell the same offense many ways ("AUTO THEFT", "motor
vehicle theft", "Theft of Motor Vehicle"). An ordered list of
stem-match rules, each optionally vetoed by guard stems, maps every
input string onto one canonical category. Rules live in a JSON data
file so the mapping is auditable and extensible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Sequence

from .errors import DuplicatePriority

if TYPE_CHECKING:
    from .ingest import MergedCrimeDataset


class CanonicalCrimeType(str, Enum):
    ROBBERY = "Robbery"
    ASSAULT = "Assault"
    DRUG = "Drug"
    VEHICLE_THEFT = "VehicleTheft"
    VEHICLE_ACCIDENT = "VehicleAccident"
    ACCIDENT = "Accident"
    HOMICIDE = "Homicide"
    SEX_OFFENSE = "SexOffense"
    FRAUD = "Fraud"
    VANDALISM = "Vandalism"
    WEAPONS_VIOLATION = "WeaponsViolation"
    ARSON = "Arson"
    KIDNAPPING = "Kidnapping"
    TERRORISM = "Terrorism"
    OTHER = "Other"  # the only fallback


@dataclass(frozen=True)
class CrimeTypeRule:
    """One mapping rule: match stems, veto stems, and a priority rank.

    Lower priority wins. A rule matches a string when some
    whitespace-split lowercase token has one of ``stems`` as a prefix
    and no token has any of ``guards`` as a prefix.
    """

    category: CanonicalCrimeType
    stems: tuple[str, ...]
    guards: tuple[str, ...]
    priority: int

    def __post_init__(self):
        if not self.stems:
            raise ValueError("rule stems must be non-empty")


def _stem_hit(tokens: Sequence[str], stems: Iterable[str]) -> bool:
    return any(tok.startswith(stem) for tok in tokens for stem in stems)


class CrimeTypeMapper:
    """Immutable compiled ruleset; safe for concurrent lookups."""

    def __init__(self, rules: Sequence[CrimeTypeRule]):
        self._rules = tuple(sorted(rules, key=lambda r: r.priority))

    @property
    def rules(self) -> tuple[CrimeTypeRule, ...]:
        return self._rules

    @property
    def categories(self) -> frozenset[CanonicalCrimeType]:
        """Every category this mapper can emit, fallback included."""
        return frozenset(r.category for r in self._rules) | {CanonicalCrimeType.OTHER}

    def canonicalize(self, crime_type: str | None) -> CanonicalCrimeType:
        """Map a raw crime-type string to its canonical category.

        Case-insensitive; null or blank input falls through to Other.
        First non-vetoed stem match in priority order wins.
        """
        if not crime_type:
            return CanonicalCrimeType.OTHER
        tokens = crime_type.lower().split()
        for rule in self._rules:
            if _stem_hit(tokens, rule.stems) and not _stem_hit(tokens, rule.guards):
                return rule.category
        return CanonicalCrimeType.OTHER


def compile_rules(rules: Sequence[CrimeTypeRule]) -> CrimeTypeMapper:
    """Build a mapper, rejecting rulesets with duplicate priorities."""
    seen: dict[int, CrimeTypeRule] = {}
    for rule in rules:
        if rule.priority in seen:
            raise DuplicatePriority(
                f"priority {rule.priority} used by both "
                f"{seen[rule.priority].category.value} and {rule.category.value}"
            )
        seen[rule.priority] = rule
    return CrimeTypeMapper(rules)


def load_rules(path: str | Path) -> list[CrimeTypeRule]:
    """Read a ruleset JSON file: list of {category, stems, guards, priority}."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    return _rules_from_obj(raw)


def _rules_from_obj(raw: list[dict]) -> list[CrimeTypeRule]:
    return [
        CrimeTypeRule(
            category=CanonicalCrimeType(entry["category"]),
            stems=tuple(s.lower() for s in entry["stems"]),
            guards=tuple(g.lower() for g in entry.get("guards", [])),
            priority=int(entry["priority"]),
        )
        for entry in raw
    ]


def default_mapper() -> CrimeTypeMapper:
    """Compile the bundled ruleset."""
    text = resources.files("crimekit.data").joinpath("crime_type_rules.json").read_text(
        encoding="utf-8"
    )
    return compile_rules(_rules_from_obj(json.loads(text)))


def category_distribution(
    dataset: "MergedCrimeDataset", mapper: CrimeTypeMapper
) -> dict[CanonicalCrimeType, int]:
    """Count records per canonical category; counts sum to dataset size.

    Every category the mapper can emit appears in the result, zero or not.
    """
    counts = {cat: 0 for cat in sorted(mapper.categories, key=lambda c: c.value)}
    for record in dataset.records:
        counts[mapper.canonicalize(record.crime_type)] += 1
    return counts
