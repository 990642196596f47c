"""Parsing, validation, and filtering of coded bilateral political-event records.

Records arrive as JSON Lines (one object per line) or as a single JSON array,
with the field names used by the event-coding pipeline: ``year``, ``country1``,
``country2``, ``event_name``, ``event_description``, ``CAMEO_quad_class``,
``CAMEO_root_code``, ``CAMEO_event_code``, ``economic_event``,
``Goldstein_Scale``, ``relationship``, ``evaluation_summary``. A wrapper object
holding the list under ``historical_political_events`` is also accepted.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from enum import Enum
from io import StringIO
from pathlib import Path
from typing import IO, Iterable

from .errors import EventParseError, EventValidationError

GOLDSTEIN_MIN = -10.0
GOLDSTEIN_MAX = 10.0
ROOT_CODE_MIN = 1
ROOT_CODE_MAX = 20
# Two-digit root code families: 1-8 are cooperation, 9-20 conflict. Roots 9-18
# are the "mild conflict" families used to build the instrument series.
COOPERATION_ROOT_MAX = 8
MILD_CONFLICT_ROOTS = (9, 18)

NO_EVENT_SENTINEL = "No Major Bilateral Events Found"


class QuadClass(Enum):
    VERBAL_COOPERATION = "Verbal Cooperation"
    MATERIAL_COOPERATION = "Material Cooperation"
    VERBAL_CONFLICT = "Verbal Conflict"
    MATERIAL_CONFLICT = "Material Conflict"

    @property
    def is_cooperation(self) -> bool:
        return self in (QuadClass.VERBAL_COOPERATION, QuadClass.MATERIAL_COOPERATION)


class EconomicClass(Enum):
    TARIFFS = "Tariffs"
    ECONOMIC_SANCTIONS = "Economic Sanctions"
    TRADE_AGREEMENTS_AND_TREATIES = "Trade Agreements and Treaties"
    OTHER_ECONOMIC_POLICIES = "Other Economic Policies"
    NOT_AN_ECONOMIC_EVENT = "Not an economic event"


RELATIONSHIP_CATEGORIES = (
    "State of War / Active Conflict",
    "Crisis / Intense Confrontation",
    "Hostile / Antagonistic Relationship",
    "Competitive / Rivalrous Relationship",
    "Limited Contact / Cool Relationship",
    "Selective Cooperation / Transactional Relationship",
    "Broad Cooperation / Partnership",
    "Strategic Partnership",
    "Alliance",
)


def _norm(text: str) -> str:
    return "".join(ch for ch in text.lower() if ch.isalnum())


_QUAD_LOOKUP = {_norm(q.value): q for q in QuadClass}
_ECON_LOOKUP = {_norm(e.value): e for e in EconomicClass}
_ECON_LOOKUP[_norm("NotAnEconomicEvent")] = EconomicClass.NOT_AN_ECONOMIC_EVENT
_RELATIONSHIP_LOOKUP = {_norm(r): r for r in RELATIONSHIP_CATEGORIES}
for _r in RELATIONSHIP_CATEGORIES:
    for _half in _r.split(" / "):
        _RELATIONSHIP_LOOKUP.setdefault(_norm(_half), _r)

_FIELD_ORDER = (
    "year",
    "country1",
    "country2",
    "event_name",
    "event_description",
    "CAMEO_quad_class",
    "CAMEO_root_code",
    "CAMEO_event_code",
    "economic_event",
    "Goldstein_Scale",
    "relationship",
    "evaluation_summary",
)


@dataclass(frozen=True)
class EventRecord:
    """One coded bilateral political event."""

    year: int
    country1: str
    country2: str
    event_name: str
    event_description: str
    quad_class: QuadClass
    root_code: int
    event_code: int
    economic_class: EconomicClass
    goldstein: float
    relationship: str
    evaluation_summary: str = ""

    def problems(self) -> list[tuple[str, str]]:
        """Return (field, reason) pairs for every violated invariant."""
        issues: list[tuple[str, str]] = []
        if not self.country1 or not self.country2:
            issues.append(("country1", "country codes must be non-empty"))
        elif self.country1 == self.country2:
            issues.append(("country2", "country1 and country2 must differ"))
        if not ROOT_CODE_MIN <= self.root_code <= ROOT_CODE_MAX:
            issues.append(("CAMEO_root_code", f"root code {self.root_code} outside 1-20"))
        elif self.event_code // 10 != self.root_code:
            issues.append(
                (
                    "CAMEO_event_code",
                    f"event code prefix mismatch: {self.event_code} does not extend root {self.root_code}",
                )
            )
        else:
            coop_root = self.root_code <= COOPERATION_ROOT_MAX
            if coop_root != self.quad_class.is_cooperation:
                issues.append(
                    (
                        "CAMEO_quad_class",
                        f"quad class {self.quad_class.value!r} inconsistent with root code {self.root_code}",
                    )
                )
        if not GOLDSTEIN_MIN <= self.goldstein <= GOLDSTEIN_MAX:
            issues.append(("Goldstein_Scale", f"goldstein out of range: {self.goldstein}"))
        if self.relationship and _norm(self.relationship) not in _RELATIONSHIP_LOOKUP:
            issues.append(("relationship", f"unknown relationship category: {self.relationship!r}"))
        return issues

    def to_json_dict(self) -> dict:
        return {
            "year": self.year,
            "country1": self.country1,
            "country2": self.country2,
            "event_name": self.event_name,
            "event_description": self.event_description,
            "CAMEO_quad_class": self.quad_class.value,
            "CAMEO_root_code": self.root_code,
            "CAMEO_event_code": self.event_code,
            "economic_event": self.economic_class.value,
            "Goldstein_Scale": self.goldstein,
            "relationship": self.relationship,
            "evaluation_summary": self.evaluation_summary,
        }


@dataclass(frozen=True)
class NoEventYear:
    """Sentinel row: a pair-year searched with no major event found."""

    year: int
    country1: str
    country2: str
    relationship: str


@dataclass(frozen=True)
class Rejection:
    index: int
    field: str
    reason: str


@dataclass
class ParsedEvents:
    """Validated events plus the audit trail from parsing."""

    events: list[EventRecord] = field(default_factory=list)
    no_event_years: list[NoEventYear] = field(default_factory=list)
    rejections: list[Rejection] = field(default_factory=list)
    duplicate_count: int = 0


@dataclass(frozen=True)
class EventFilter:
    """Conjunction of clauses; ``None`` clauses match everything."""

    root_code_range: tuple[int, int] | None = None
    economic_classes: frozenset[EconomicClass] | None = None
    goldstein_min: float | None = None
    goldstein_max: float | None = None

    def __post_init__(self):
        if self.root_code_range is not None:
            lo, hi = self.root_code_range
            if lo > hi:
                raise ValueError(f"root code interval bounds out of order: ({lo}, {hi})")
        if (
            self.goldstein_min is not None
            and self.goldstein_max is not None
            and self.goldstein_min > self.goldstein_max
        ):
            raise ValueError("goldstein_min exceeds goldstein_max")

    def matches(self, event: EventRecord) -> bool:
        if self.root_code_range is not None:
            lo, hi = self.root_code_range
            if not lo <= event.root_code <= hi:
                return False
        if self.economic_classes is not None and event.economic_class not in self.economic_classes:
            return False
        if self.goldstein_min is not None and event.goldstein < self.goldstein_min:
            return False
        if self.goldstein_max is not None and event.goldstein > self.goldstein_max:
            return False
        return True

    @classmethod
    def mild_conflict_instrument(cls) -> "EventFilter":
        """Non-economic mild conflicts: roots 9-18, score at most zero."""
        return cls(
            root_code_range=MILD_CONFLICT_ROOTS,
            economic_classes=frozenset({EconomicClass.NOT_AN_ECONOMIC_EVENT}),
            goldstein_max=0.0,
        )


def filter_events(events: Iterable[EventRecord], flt: EventFilter) -> list[EventRecord]:
    """Keep records matching every filter clause, preserving order."""
    return [e for e in events if flt.matches(e)]


class _FieldError(ValueError):
    def __init__(self, field_name: str, reason: str):
        self.field = field_name
        self.reason = reason
        super().__init__(f"{field_name}: {reason}")


def _coerce_int(value, field_name: str) -> int:
    try:
        if isinstance(value, bool):
            raise ValueError
        if isinstance(value, int):
            return value
        if isinstance(value, float) and value.is_integer():
            return int(value)
        if isinstance(value, str):
            return int(value.strip())
    except ValueError:
        pass
    raise _FieldError(field_name, f"must be an integer, got {value!r}")


def _coerce_float(value, field_name: str) -> float:
    try:
        if isinstance(value, bool):
            raise ValueError
        if isinstance(value, (int, float)):
            return float(value)
        if isinstance(value, str):
            return float(value.strip())
    except ValueError:
        pass
    raise _FieldError(field_name, f"must be a number, got {value!r}")


def _record_from_dict(obj: dict) -> EventRecord:
    missing = [k for k in _FIELD_ORDER if k not in obj and k != "evaluation_summary"]
    if missing:
        raise _FieldError(missing[0], "missing field")
    quad_raw = obj["CAMEO_quad_class"]
    quad = _QUAD_LOOKUP.get(_norm(str(quad_raw)))
    if quad is None:
        raise _FieldError("CAMEO_quad_class", f"unknown CAMEO quad class: {quad_raw!r}")
    econ_raw = obj["economic_event"]
    econ = _ECON_LOOKUP.get(_norm(str(econ_raw)))
    if econ is None:
        raise _FieldError("economic_event", f"unknown economic_event class: {econ_raw!r}")
    return EventRecord(
        year=_coerce_int(obj["year"], "year"),
        country1=str(obj["country1"]).strip(),
        country2=str(obj["country2"]).strip(),
        event_name=str(obj["event_name"]),
        event_description=str(obj["event_description"]),
        quad_class=quad,
        root_code=_coerce_int(obj["CAMEO_root_code"], "CAMEO_root_code"),
        event_code=_coerce_int(obj["CAMEO_event_code"], "CAMEO_event_code"),
        economic_class=econ,
        goldstein=_coerce_float(obj["Goldstein_Scale"], "Goldstein_Scale"),
        relationship=str(obj.get("relationship", "")),
        evaluation_summary=str(obj.get("evaluation_summary", "")),
    )


def _is_sentinel(obj: dict) -> bool:
    return str(obj.get("event_name", "")).strip() == NO_EVENT_SENTINEL


def _sentinel_from_dict(obj: dict) -> NoEventYear:
    return NoEventYear(
        year=_coerce_int(obj["year"], "year"),
        country1=str(obj["country1"]).strip(),
        country2=str(obj["country2"]).strip(),
        relationship=str(obj.get("relationship", "")),
    )


def _read_text(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, Path):
        return source.read_text(encoding="utf-8")
    if isinstance(source, str):
        return source
    return source.read()


def _iter_raw_records(text: str):
    """Yield (line_number, raw_dict) pairs from JSONL, a JSON array, or a wrapper object."""
    stripped = text.lstrip()
    if stripped.startswith("["):
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise EventParseError(exc.msg, line=exc.lineno) from exc
        if not isinstance(payload, list):
            raise EventParseError("top-level JSON value must be an array of records")
        for obj in payload:
            if not isinstance(obj, dict):
                raise EventParseError("array elements must be JSON objects")
            yield 0, obj
        return
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise EventParseError(exc.msg, line=lineno) from exc
        if not isinstance(obj, dict):
            raise EventParseError("each line must be a JSON object", line=lineno)
        if "historical_political_events" in obj:
            inner = obj["historical_political_events"]
            if not isinstance(inner, list):
                raise EventParseError("historical_political_events must be a list", line=lineno)
            for item in inner:
                yield lineno, item
        else:
            yield lineno, obj


def parse_events(source: str | bytes | Path | IO, *, strict: bool = True) -> ParsedEvents:
    """Parse and validate event records.

    In strict mode the first invalid record aborts with
    :class:`EventValidationError`; in lenient mode invalid records are
    collected in the rejection report and skipped. Sentinel "no events found"
    rows never become events; they are returned separately so empty pair-years
    stay out of score averages. Duplicate (pair, year, name) records pass
    through but are counted.
    """
    result = ParsedEvents()
    seen: set[tuple] = set()
    index = -1
    for _lineno, obj in _iter_raw_records(_read_text(source)):
        index += 1
        if isinstance(obj, dict) and _is_sentinel(obj):
            try:
                result.no_event_years.append(_sentinel_from_dict(obj))
            except (ValueError, KeyError) as exc:
                rej = Rejection(index, "event_name", f"bad sentinel record: {exc}")
                if strict:
                    raise EventValidationError(rej.index, rej.field, rej.reason) from exc
                result.rejections.append(rej)
            continue
        try:
            record = _record_from_dict(obj)
        except _FieldError as exc:
            if strict:
                raise EventValidationError(index, exc.field, exc.reason) from exc
            result.rejections.append(Rejection(index, exc.field, exc.reason))
            continue
        issues = record.problems()
        if issues:
            bad_field, reason = issues[0]
            if strict:
                raise EventValidationError(index, bad_field, reason)
            result.rejections.extend(Rejection(index, f, r) for f, r in issues)
            continue
        key = (
            min(record.country1, record.country2),
            max(record.country1, record.country2),
            record.year,
            record.event_name,
        )
        if key in seen:
            result.duplicate_count += 1
        seen.add(key)
        result.events.append(record)
    return result


def serialize_events(events: Iterable[EventRecord]) -> str:
    """Canonical JSON Lines, one record per line, fixed field order."""
    out = StringIO()
    for event in events:
        json.dump(event.to_json_dict(), out, ensure_ascii=False)
        out.write("\n")
    return out.getvalue()


def write_rejection_report(rejections: Iterable[Rejection], path: str | Path) -> None:
    """CSV report: record index, field, reason."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["record_index", "field", "reason"])
        for rej in rejections:
            writer.writerow([rej.index, rej.field, rej.reason])
