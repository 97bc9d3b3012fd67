"""
Synthetic event logs for the confounder, collider and mediator patterns.

Durations are drawn per case from a PCG64 stream: one ``random((n, 3))``
block, row k holding the draws (D1, D2, D3) of case k. Uniform durations
are scaled draws, exponential durations use the inverse CDF. Case k starts
``k * case_start_interval`` seconds after the epoch.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from .eventlog import (
    AnchorModality,
    Event,
    EventLog,
    PairExtractionError,
    to_tabular,
)

logger = logging.getLogger(__name__)

# 2024-01-01T00:00:00Z
DEFAULT_EPOCH = 1704067200.0

PATTERN_ACTIVITIES = {
    "confounder": ("Accept", "Email", "Archive"),
    "collider": ("Email", "Archive", "CloseApplication"),
    "mediator": ("Archive", "CloseApplication", "PaperDisposal"),
}


class ScenarioError(ValueError):
    """Invalid scenario or duration configuration."""


@dataclass(frozen=True)
class DurationSpec:
    """Random activity duration in seconds: uniform(low, high) or exponential(mean)."""

    distribution: str
    low: float = 0.0
    high: float = 0.0
    mean: float = 0.0

    def __post_init__(self):
        if self.distribution == "uniform":
            if not (np.isfinite(self.low) and np.isfinite(self.high)) or self.low > self.high:
                raise ScenarioError(f"Uniform duration needs low <= high, got [{self.low}, {self.high}]")
            if self.low < 0:
                raise ScenarioError(f"Durations must be non-negative, got low={self.low}")
        elif self.distribution == "exponential":
            if not np.isfinite(self.mean) or self.mean <= 0:
                raise ScenarioError(f"Exponential duration needs a positive mean, got {self.mean}")
        else:
            raise ScenarioError(
                f"Unknown distribution '{self.distribution}' (expected 'uniform' or 'exponential')"
            )

    @classmethod
    def uniform(cls, low: float, high: float) -> "DurationSpec":
        return cls("uniform", low=float(low), high=float(high))

    @classmethod
    def exponential(cls, mean: float) -> "DurationSpec":
        return cls("exponential", mean=float(mean))

    def transform(self, u: np.ndarray) -> np.ndarray:
        """Map draws in [0, 1) to durations."""
        if self.distribution == "uniform":
            return self.low + (self.high - self.low) * u
        return -self.mean * np.log1p(-u)

    @property
    def expected(self) -> float:
        if self.distribution == "uniform":
            return (self.low + self.high) / 2
        return self.mean

    def describe(self) -> str:
        if self.distribution == "uniform":
            return f"U[{self.low:g},{self.high:g}]"
        return f"Exp({self.mean:g})"

    def to_dict(self) -> Dict:
        if self.distribution == "uniform":
            return {"distribution": "uniform", "low": self.low, "high": self.high}
        return {"distribution": "exponential", "mean": self.mean}


@dataclass(frozen=True)
class ScenarioConfig:
    """
    One synthetic experiment.

    Attributes:
        pattern: "confounder", "collider" or "mediator"
        durations: Activity -> duration; keys are exactly the pattern's activities
        n_cases: Number of cases
        case_start_interval: Seconds between consecutive case starts
        seed: Seed of the PCG64 stream
        modality: Anchoring under which the pattern's structure is identifiable
        epoch: Start instant of the first case
    """

    pattern: str
    durations: Mapping[str, DurationSpec]
    n_cases: int = 9999
    case_start_interval: float = 300.0
    seed: int = 0
    modality: AnchorModality = AnchorModality.ABSOLUTE
    epoch: float = DEFAULT_EPOCH

    def __post_init__(self):
        if self.pattern not in PATTERN_ACTIVITIES:
            raise ScenarioError(
                f"Unknown pattern '{self.pattern}' (expected one of {', '.join(PATTERN_ACTIVITIES)})"
            )
        expected = set(PATTERN_ACTIVITIES[self.pattern])
        if set(self.durations) != expected:
            raise ScenarioError(
                f"Durations of the {self.pattern} pattern must cover exactly "
                f"{', '.join(PATTERN_ACTIVITIES[self.pattern])}; got {', '.join(sorted(self.durations))}"
            )
        if self.n_cases < 1:
            raise ScenarioError(f"n_cases must be at least 1, got {self.n_cases}")
        if self.case_start_interval < 0:
            raise ScenarioError(f"case_start_interval must be non-negative, got {self.case_start_interval}")
        object.__setattr__(self, "modality", AnchorModality.parse(self.modality))

    @property
    def activities(self) -> Tuple[str, ...]:
        return PATTERN_ACTIVITIES[self.pattern]

    def with_overrides(self, n_cases: Optional[int] = None, seed: Optional[int] = None) -> "ScenarioConfig":
        changes = {}
        if n_cases is not None:
            changes["n_cases"] = n_cases
        if seed is not None:
            changes["seed"] = seed
        return replace(self, **changes)

    def to_dict(self) -> Dict:
        return {
            "pattern": self.pattern,
            "durations": {name: self.durations[name].to_dict() for name in self.activities},
            "n_cases": self.n_cases,
            "case_start_interval": self.case_start_interval,
            "seed": self.seed,
            "modality": self.modality.value,
            "epoch": self.epoch,
        }


def _preset(pattern, specs, interval=300.0, modality=AnchorModality.ABSOLUTE) -> ScenarioConfig:
    return ScenarioConfig(
        pattern=pattern,
        durations=dict(zip(PATTERN_ACTIVITIES[pattern], specs)),
        case_start_interval=interval,
        modality=modality,
    )


U = DurationSpec.uniform
Exp = DurationSpec.exponential

# The exponential Archive duration has a one-hour mean; with a one-minute
# mean roughly 3% of the cases would swap Email and Archive.
SCENARIOS: Dict[str, ScenarioConfig] = {
    "confounder-uniform": _preset("confounder", (U(2, 4), U(7, 9), U(10, 12))),
    "confounder-exponential": _preset("confounder", (Exp(2), Exp(2), Exp(3600)), interval=1800.0),
    "confounder-overlap": _preset("confounder", (U(2, 4), U(7, 9), U(8, 10))),
    "collider-uniform": _preset("collider", (U(5, 7), U(9, 11), U(2, 4))),
    "collider-overlap": _preset("collider", (U(5, 9), U(7, 11), U(2, 4))),
    "mediator-uniform": _preset(
        "mediator", (U(7, 11), U(5, 7), U(2, 4)), modality=AnchorModality.RELATIVE
    ),
}


def get_scenario(name: str, n_cases: Optional[int] = None, seed: Optional[int] = None) -> ScenarioConfig:
    """Look up a preset by name and apply overrides."""
    try:
        preset = SCENARIOS[name]
    except KeyError:
        raise ScenarioError(
            f"Unknown scenario '{name}' (expected one of {', '.join(sorted(SCENARIOS))})"
        ) from None
    return preset.with_overrides(n_cases=n_cases, seed=seed)


def _case_times(pattern: str, d1: float, d2: float, d3: float):
    """(activity index, start offset, completion offset) of one case."""
    if pattern == "confounder":
        accept = d1
        return [(0, 0.0, accept), (1, accept, accept + d2), (2, accept, accept + d3)]
    if pattern == "collider":
        email, archive = d1, d2
        return [(0, 0.0, email), (1, 0.0, archive), (2, max(email, archive), email + archive + d3)]
    archive = d1
    close = archive + d2
    return [(0, 0.0, archive), (1, archive, close), (2, close, close + archive + d3)]


def generate(cfg: ScenarioConfig) -> EventLog:
    """
    Generate the event log of a scenario.

    Confounder: Accept = D1, Email = Accept + D2, Archive = Accept + D3.
    Collider: Email = D1, Archive = D2, CloseApplication = Email + Archive + D3.
    Mediator: Archive = D1, CloseApplication = Archive + D2,
    PaperDisposal = CloseApplication + Archive + D3.
    Times are relative to the case start. Each event also records its start:
    the case start, or the completion of the activity it waits for.

    Args:
        cfg: Scenario configuration

    Returns:
        EventLog ordered by case, then completion time
    """
    activities = cfg.activities
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    draws = rng.random((cfg.n_cases, 3))
    durations = np.column_stack([
        cfg.durations[name].transform(draws[:, i]) for i, name in enumerate(activities)
    ])

    events = []
    for k in range(cfg.n_cases):
        case_id = f"case_{k + 1:05d}"
        start = cfg.epoch + k * cfg.case_start_interval
        times = _case_times(cfg.pattern, *durations[k])
        for index, begin, end in sorted(times, key=lambda item: (item[2], item[0])):
            events.append(Event(
                case_id=case_id,
                activity=activities[index],
                timestamp=start + end,
                start_timestamp=start + begin,
            ))

    log = EventLog(tuple(events))
    logger.info(
        "Generated %s log: %d cases, %d events (seed %d)",
        cfg.pattern, cfg.n_cases, len(log), cfg.seed
    )
    return log


def _swapped_cases(log: EventLog, first: str, second: str, strict: bool):
    swapped = []
    for row in to_tabular(log):
        i = row.first_index(first)
        j = row.first_index(second)
        if i is None or j is None:
            if strict:
                missing = first if i is None else second
                raise PairExtractionError(f"Case '{row.case_id}' has no '{missing}' event")
            continue
        if row.sequence[j].timestamp < row.sequence[i].timestamp:
            swapped.append(row.case_id)
    return swapped


def count_swaps(log: EventLog, first: str, second: str) -> int:
    """
    Number of cases in which ``second`` completes before ``first``.

    Raises:
        PairExtractionError: A case lacks one of the activities
    """
    return len(_swapped_cases(log, first, second, strict=True))


def filter_swaps(log: EventLog, first: str, second: str) -> EventLog:
    """Drop every case in which ``second`` completes before ``first``."""
    swapped = set(_swapped_cases(log, first, second, strict=False))
    if swapped:
        logger.info("Removing %d swapped cases (%s before %s)", len(swapped), second, first)
    return EventLog(tuple(event for event in log.events if event.case_id not in swapped))
