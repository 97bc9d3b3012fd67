"""
Event log model: events, per-case tables, variants and timestamp pairs.

Everything here is immutable once built and every operation is a pure
function, so tables and series can be shared between threads.
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)


class EventLogError(ValueError):
    """Base class for event log problems."""


class MalformedRowError(EventLogError):
    """A data row could not be turned into an event."""

    def __init__(self, line_number: int, reason: str):
        super().__init__(f"Malformed row at line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason


class MissingColumnError(EventLogError):
    """A mandatory column is absent from the input header."""


class EmptyLogError(EventLogError):
    """The input contains no events."""


class PairExtractionError(EventLogError):
    """A pair of activities cannot be extracted from a case table."""


class NegativeExecutionTimeError(PairExtractionError):
    """Anchoring put an activity before its reference point."""

    def __init__(self, case_id: str, activity: str, value: float):
        self.case_id = case_id
        self.activity = activity
        self.value = value
        super().__init__(
            f"Case '{case_id}': '{activity}' completes {-value:g}s before its anchor"
        )


class AnchorModality(str, Enum):
    """Reference point used to turn timestamps into execution times."""

    ABSOLUTE = "absolute"
    RELATIVE = "relative"

    @classmethod
    def parse(cls, value) -> "AnchorModality":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise EventLogError(
                f"Unknown anchoring modality '{value}' (expected 'absolute' or 'relative')"
            ) from None


@dataclass(frozen=True)
class Event:
    """
    A single activity completion.

    Attributes:
        case_id: Case the event belongs to
        activity: Activity name
        timestamp: Completion instant in seconds since the Unix epoch
        attributes: (name, value) pairs attached to the event
        start_timestamp: Instant the activity started, when the log records it
    """

    case_id: str
    activity: str
    timestamp: float
    attributes: Tuple[Tuple[str, float], ...] = ()
    start_timestamp: Optional[float] = None

    def __post_init__(self):
        if not self.activity:
            raise EventLogError(f"Event of case '{self.case_id}' has an empty activity name")
        if not math.isfinite(self.timestamp) or self.timestamp < 0:
            raise EventLogError(
                f"Event {self.activity} of case '{self.case_id}' has invalid timestamp {self.timestamp}"
            )
        if self.start_timestamp is not None:
            if not math.isfinite(self.start_timestamp) or self.start_timestamp < 0:
                raise EventLogError(
                    f"Event {self.activity} of case '{self.case_id}' has invalid start "
                    f"timestamp {self.start_timestamp}"
                )
            if self.start_timestamp > self.timestamp:
                raise EventLogError(
                    f"Event {self.activity} of case '{self.case_id}' starts after it completes"
                )

    @property
    def begin(self) -> float:
        """Start instant, or the completion instant when no start was recorded."""
        return self.timestamp if self.start_timestamp is None else self.start_timestamp


@dataclass(frozen=True)
class EventLog:
    """Ordered multiset of events."""

    events: Tuple[Event, ...] = ()

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    @property
    def case_ids(self) -> List[str]:
        """Distinct case ids in order of first appearance."""
        return list(dict.fromkeys(event.case_id for event in self.events))

    @property
    def activities(self) -> List[str]:
        return sorted({event.activity for event in self.events})


@dataclass(frozen=True)
class CaseRow:
    """All events of one case, sorted by completion time."""

    case_id: str
    sequence: Tuple[Event, ...]

    def __post_init__(self):
        if not self.sequence:
            raise EventLogError(f"Case '{self.case_id}' has no events")
        stamps = [event.timestamp for event in self.sequence]
        if any(later < earlier for earlier, later in zip(stamps, stamps[1:])):
            raise EventLogError(f"Events of case '{self.case_id}' are not in timestamp order")

    @property
    def activities(self) -> Tuple[str, ...]:
        return tuple(event.activity for event in self.sequence)

    @property
    def start_time(self) -> float:
        """Initial execution time t_0 of the case."""
        return min(event.begin for event in self.sequence)

    def first_index(self, activity: str) -> Optional[int]:
        """Position of the first occurrence of ``activity``, or None."""
        for index, event in enumerate(self.sequence):
            if event.activity == activity:
                return index
        return None


@dataclass(frozen=True)
class CaseTable:
    """Tabular form of an event log: one row per case."""

    rows: Tuple[CaseRow, ...] = ()

    def __post_init__(self):
        seen = set()
        for row in self.rows:
            if row.case_id in seen:
                raise EventLogError(f"Duplicate case id '{row.case_id}' in case table")
            seen.add(row.case_id)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    @property
    def case_ids(self) -> List[str]:
        return [row.case_id for row in self.rows]

    def row_index(self) -> Dict[str, CaseRow]:
        return {row.case_id: row for row in self.rows}


@dataclass(frozen=True)
class Variant:
    """A distinct activity sequence and the number of cases following it."""

    sequence: Tuple[str, ...]
    frequency: int = 1

    def __post_init__(self):
        object.__setattr__(self, "sequence", tuple(self.sequence))
        if not self.sequence:
            raise EventLogError("A variant needs at least one activity")
        if self.frequency < 1:
            raise EventLogError(f"Variant {self.label} has frequency {self.frequency}")

    def __contains__(self, activity) -> bool:
        return activity in self.sequence

    @property
    def label(self) -> str:
        return ",".join(self.sequence)


@dataclass(frozen=True, eq=False)
class PairSeries:
    """
    Timestamps of two activities, one sample per case.

    ``modality`` is None until the series has been anchored; the arrays are
    read-only.
    """

    first_activity: str
    second_activity: str
    case_ids: Tuple[str, ...]
    first: np.ndarray = field(repr=False)
    second: np.ndarray = field(repr=False)
    modality: Optional[AnchorModality] = None

    def __post_init__(self):
        first = np.array(self.first, dtype=float)
        second = np.array(self.second, dtype=float)
        if first.shape != second.shape or first.shape != (len(self.case_ids),):
            raise PairExtractionError("Pair series columns must have one value per case")
        first.setflags(write=False)
        second.setflags(write=False)
        object.__setattr__(self, "first", first)
        object.__setattr__(self, "second", second)

    def __len__(self) -> int:
        return len(self.case_ids)

    @property
    def samples(self) -> np.ndarray:
        """Samples as an (n, 2) array of (t_i, t_j)."""
        return np.column_stack([self.first, self.second])

    def swapped(self) -> "PairSeries":
        return PairSeries(
            self.second_activity, self.first_activity, self.case_ids,
            self.second, self.first, self.modality
        )

    def scaled(self, factor: float) -> "PairSeries":
        return PairSeries(
            self.first_activity, self.second_activity, self.case_ids,
            self.first * factor, self.second * factor, self.modality
        )


def to_tabular(log: EventLog) -> CaseTable:
    """
    Group a log into one row per case.

    Rows follow the order in which cases first appear; events inside a row
    are sorted by completion time, ties keeping their input order.
    """
    grouped: Dict[str, List[Event]] = {}
    for event in log.events:
        grouped.setdefault(event.case_id, []).append(event)

    rows = tuple(
        CaseRow(case_id, tuple(sorted(events, key=lambda e: e.timestamp)))
        for case_id, events in grouped.items()
    )
    return CaseTable(rows)


def flatten(table: CaseTable) -> EventLog:
    """Inverse of :func:`to_tabular`."""
    return EventLog(tuple(event for row in table.rows for event in row.sequence))


def extract_variants(table: CaseTable) -> List[Variant]:
    """
    Enumerate the distinct activity sequences of a table.

    Returns:
        Variants sorted by descending frequency, ties by sequence
    """
    counts = Counter(row.activities for row in table.rows)
    ordered = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return [Variant(sequence, frequency) for sequence, frequency in ordered]


def top_variants(
    variants: Sequence[Variant],
    coverage: float = 0.95,
    k: Optional[int] = None
) -> List[Variant]:
    """
    Pick the most frequent variants.

    Args:
        variants: Variants sorted by descending frequency
        coverage: Minimum share of cases the selection must cover
        k: Take exactly the first ``k`` variants instead

    Returns:
        Selected variants

    Raises:
        EventLogError: k below 1 or coverage outside (0, 1]
    """
    if k is not None:
        if k < 1:
            raise EventLogError(f"top-k must be at least 1, got {k}")
        return list(variants[:k])
    if not 0 < coverage <= 1:
        raise EventLogError(f"Coverage must be in (0, 1], got {coverage}")

    total = sum(variant.frequency for variant in variants)
    selected = []
    covered = 0
    for variant in variants:
        selected.append(variant)
        covered += variant.frequency
        if covered >= coverage * total:
            break
    return selected


def variant_from_string(text: str, delimiter: str = ",") -> Variant:
    """Build a variant from text such as ``"Accept,Email,Archive"``."""
    names = tuple(name.strip() for name in text.split(delimiter) if name.strip())
    return Variant(names)


def select_cases(table: CaseTable, variants: Iterable[Variant]) -> CaseTable:
    """
    Keep the rows whose activity sequence equals one of ``variants``.

    Input row order is preserved; selecting nothing yields an empty table.
    """
    wanted = {tuple(variant.sequence) for variant in variants}
    return CaseTable(tuple(row for row in table.rows if row.activities in wanted))


def extract_pair(table: CaseTable, e_i: str, e_j: str) -> PairSeries:
    """
    Extract the raw timestamps of two activities from every row.

    The first occurrence of each activity in a row is used.

    Raises:
        PairExtractionError: If the activities are equal or a row lacks one
    """
    if e_i == e_j:
        raise PairExtractionError(f"Pair activities must differ, got ({e_i}, {e_j})")

    case_ids = []
    first = []
    second = []
    for row in table.rows:
        i = row.first_index(e_i)
        j = row.first_index(e_j)
        if i is None or j is None:
            missing = e_i if i is None else e_j
            raise PairExtractionError(f"Case '{row.case_id}' has no '{missing}' event")
        case_ids.append(row.case_id)
        first.append(row.sequence[i].timestamp)
        second.append(row.sequence[j].timestamp)

    return PairSeries(e_i, e_j, tuple(case_ids), np.asarray(first), np.asarray(second))


def anchor(series: PairSeries, table: CaseTable, modality) -> PairSeries:
    """
    Convert raw timestamps into execution times.

    Absolute anchoring subtracts the case start t_0. Relative anchoring
    subtracts the completion of the event right before the first activity's
    occurrence; when that activity opens the case, t_0 is used instead.

    Raises:
        NegativeExecutionTimeError: The second activity completes before the
            reference point, which relative anchoring allows when variants
            order the activities differently
    """
    modality = AnchorModality.parse(modality)
    rows = table.row_index()

    offsets = np.empty(len(series))
    for position, case_id in enumerate(series.case_ids):
        row = rows.get(case_id)
        if row is None:
            raise PairExtractionError(f"Case '{case_id}' is not in the table")
        if modality is AnchorModality.ABSOLUTE:
            offsets[position] = row.start_time
            continue
        index = row.first_index(series.first_activity)
        if index is None:
            raise PairExtractionError(
                f"Case '{case_id}' has no '{series.first_activity}' event"
            )
        offsets[position] = row.start_time if index == 0 else row.sequence[index - 1].timestamp

    first = series.first - offsets
    second = series.second - offsets
    for column, activity in ((first, series.first_activity), (second, series.second_activity)):
        negative = np.flatnonzero(column < 0)
        if len(negative):
            position = int(negative[0])
            raise NegativeExecutionTimeError(series.case_ids[position], activity, float(column[position]))

    return PairSeries(
        series.first_activity, series.second_activity, series.case_ids, first, second, modality
    )


def log_to_dict(log: EventLog) -> Dict:
    """Canonical JSON-ready form of a log, written next to generated CSV logs."""
    return {
        "schema": "eventlog/1",
        "events": [
            {
                "case_id": event.case_id,
                "activity": event.activity,
                "timestamp": event.timestamp,
                "start_timestamp": event.start_timestamp,
                "attributes": {name: value for name, value in event.attributes},
            }
            for event in log.events
        ],
    }
