"""
Process discovery: footprints, the alpha miner and the heuristic miner.

Models are directly-follows graphs typed with footprint relations rather
than Petri nets; the overlay only needs edges, eventually-follows and the
parallel/choice typing.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .eventlog import CaseTable, Variant

logger = logging.getLogger(__name__)

Edge = Tuple[str, str]


class DiscoveryError(ValueError):
    """Invalid miner settings."""


class Relation(str, Enum):
    """Footprint relation of an ordered activity pair."""

    SEQUENCE = "->"
    REVERSE = "<-"
    PARALLEL = "||"
    CHOICE = "#"


@dataclass(frozen=True, eq=False)
class Footprint:
    """
    Directly-follows counts of a set of traces.

    Attributes:
        activities: All activity names
        df_count: (a, b) -> number of times a is immediately followed by b
        start_activities: Activities opening at least one trace
        end_activities: Activities closing at least one trace
        traces: Distinct traces the counts were taken from
    """

    activities: FrozenSet[str] = frozenset()
    df_count: Dict[Edge, int] = field(default_factory=dict)
    start_activities: FrozenSet[str] = frozenset()
    end_activities: FrozenSet[str] = frozenset()
    traces: Tuple[Tuple[str, ...], ...] = ()

    def df(self, a: str, b: str) -> int:
        return self.df_count.get((a, b), 0)

    @property
    def total(self) -> int:
        return sum(self.df_count.values())


@dataclass(frozen=True)
class HeuristicConfig:
    """
    Heuristic miner settings.

    A threshold of 0 disables the dependency filter, so with a frequency
    floor of 0 the miner returns the plain directly-follows graph.
    """

    dependency_threshold: float = 0.9
    frequency_floor: int = 1

    def __post_init__(self):
        if not 0 <= self.dependency_threshold <= 1:
            raise DiscoveryError(
                f"Dependency threshold must be in [0, 1], got {self.dependency_threshold}"
            )
        if self.frequency_floor < 0:
            raise DiscoveryError(f"Frequency floor must be non-negative, got {self.frequency_floor}")


@dataclass(frozen=True, eq=False)
class ProcessModel:
    """
    Discovered process model (directly-follows graph with relation typing).

    Attributes:
        activities: Sorted activity names
        df_edges: Kept directly-follows edges and their frequencies
        relations: Relation of every ordered pair of distinct activities
        ef_closure: Eventually-follows pairs over the mined traces
        provenance: "alpha" or "heuristic(<threshold>)"
    """

    activities: Tuple[str, ...]
    df_edges: Dict[Edge, int]
    relations: Dict[Edge, Relation]
    ef_closure: FrozenSet[Edge]
    provenance: str
    start_activities: FrozenSet[str] = frozenset()
    end_activities: FrozenSet[str] = frozenset()

    def has_edge(self, a: str, b: str) -> bool:
        return (a, b) in self.df_edges

    def eventually(self, a: str, b: str) -> bool:
        return (a, b) in self.ef_closure

    def relation(self, a: str, b: str) -> Relation:
        return self.relations.get((a, b), Relation.CHOICE)

    @property
    def edges(self) -> List[Edge]:
        return sorted(self.df_edges)


def _count(traces: Iterable[Tuple[Tuple[str, ...], int]]) -> Footprint:
    df_count: Counter = Counter()
    activities: Set[str] = set()
    starts: Set[str] = set()
    ends: Set[str] = set()
    distinct = []

    for trace, weight in traces:
        if not trace:
            continue
        distinct.append(tuple(trace))
        activities.update(trace)
        starts.add(trace[0])
        ends.add(trace[-1])
        for a, b in zip(trace, trace[1:]):
            df_count[(a, b)] += weight

    return Footprint(
        activities=frozenset(activities),
        df_count=dict(df_count),
        start_activities=frozenset(starts),
        end_activities=frozenset(ends),
        traces=tuple(sorted(set(distinct))),
    )


def footprint(table: CaseTable) -> Footprint:
    """
    Count directly-follows occurrences over every row of a case table.

    Single-event rows contribute activities and start/end sets but no pairs.
    """
    fp = _count(Counter(row.activities for row in table.rows).items())
    logger.debug(
        "Footprint: %d activities, %d directly-follows pairs, %d occurrences",
        len(fp.activities), len(fp.df_count), fp.total
    )
    return fp


def footprint_from_variants(variants: Sequence[Variant]) -> Footprint:
    """Same as :func:`footprint`, weighting each variant by its frequency."""
    return _count((variant.sequence, variant.frequency) for variant in variants)


def _ef_pairs(traces: Iterable[Sequence[str]]) -> FrozenSet[Edge]:
    pairs = set()
    for trace in traces:
        for i, a in enumerate(trace):
            for b in trace[i + 1:]:
                if a != b:
                    pairs.add((a, b))
    return frozenset(pairs)


def eventually_follows(model: ProcessModel, variants: Sequence[Variant]) -> FrozenSet[Edge]:
    """
    Eventually-follows relation of ``variants`` restricted to the model's activities.

    a ↠ b holds when a precedes b, not necessarily adjacently, in at least one
    variant.
    """
    known = set(model.activities)
    return frozenset(
        (a, b) for a, b in _ef_pairs(variant.sequence for variant in variants)
        if a in known and b in known
    )


def _relations_from_edges(activities: Sequence[str], kept: Set[Edge], fp: Footprint) -> Dict[Edge, Relation]:
    relations = {}
    for a in activities:
        for b in activities:
            if a == b:
                continue
            forward = (a, b) in kept
            backward = (b, a) in kept
            if forward and not backward:
                relations[(a, b)] = Relation.SEQUENCE
            elif backward and not forward:
                relations[(a, b)] = Relation.REVERSE
            elif forward and backward:
                relations[(a, b)] = Relation.PARALLEL
            elif fp.df(a, b) > 0 and fp.df(b, a) > 0:
                relations[(a, b)] = Relation.PARALLEL
            else:
                relations[(a, b)] = Relation.CHOICE
    return relations


def alpha_miner(fp: Footprint) -> ProcessModel:
    """
    Mine a model with the alpha algorithm's footprint relations.

    Relations use zero tolerance: a -> b iff df(a,b) > 0 and df(b,a) = 0,
    a || b iff both counts are positive, a # b iff both are zero.

    Args:
        fp: Footprint of the log

    Returns:
        ProcessModel whose edges are the sequence pairs
    """
    activities = tuple(sorted(fp.activities))
    kept = {
        (a, b) for (a, b), count in fp.df_count.items()
        if a != b and count > 0 and fp.df(b, a) == 0
    }
    model = ProcessModel(
        activities=activities,
        df_edges={edge: fp.df_count[edge] for edge in sorted(kept)},
        relations=_relations_from_edges(activities, kept, fp),
        ef_closure=_ef_pairs(fp.traces),
        provenance="alpha",
        start_activities=fp.start_activities,
        end_activities=fp.end_activities,
    )
    logger.info("Alpha miner: %d activities, %d edges", len(activities), len(kept))
    return model


def dependency(fp: Footprint, a: str, b: str) -> float:
    """Dependency measure (|a>b| - |b>a|) / (|a>b| + |b>a| + 1)."""
    ab = fp.df(a, b)
    ba = fp.df(b, a)
    return (ab - ba) / (ab + ba + 1)


def heuristic_miner(fp: Footprint, cfg: Optional[HeuristicConfig] = None) -> ProcessModel:
    """
    Mine a model with the heuristic miner.

    An edge a -> b is kept when df(a,b) > 0, df(a,b) reaches the frequency
    floor and the dependency measure reaches the threshold. Pairs observed
    in both orders with neither direction kept are typed parallel.

    Args:
        fp: Footprint of the log
        cfg: Threshold and frequency floor

    Returns:
        ProcessModel with provenance "heuristic(<threshold>)"
    """
    cfg = cfg or HeuristicConfig()
    activities = tuple(sorted(fp.activities))

    kept = set()
    for (a, b), count in fp.df_count.items():
        if a == b or count <= 0 or count < cfg.frequency_floor:
            continue
        if cfg.dependency_threshold > 0:
            measure = dependency(fp, a, b)
            if measure < cfg.dependency_threshold:
                logger.debug("Dropping %s -> %s: dependency %.4f", a, b, measure)
                continue
        kept.add((a, b))

    model = ProcessModel(
        activities=activities,
        df_edges={edge: fp.df_count[edge] for edge in sorted(kept)},
        relations=_relations_from_edges(activities, kept, fp),
        ef_closure=_ef_pairs(fp.traces),
        provenance=f"heuristic({cfg.dependency_threshold:g})",
        start_activities=fp.start_activities,
        end_activities=fp.end_activities,
    )
    logger.info(
        "Heuristic miner (threshold %g, floor %d): %d activities, %d edges",
        cfg.dependency_threshold, cfg.frequency_floor, len(activities), len(kept)
    )
    return model


def mine(fp: Footprint, miner: str = "heuristic", cfg: Optional[HeuristicConfig] = None) -> ProcessModel:
    """Dispatch to :func:`alpha_miner` or :func:`heuristic_miner` by name."""
    if miner == "alpha":
        return alpha_miner(fp)
    if miner == "heuristic":
        return heuristic_miner(fp, cfg)
    raise DiscoveryError(f"Unknown miner '{miner}' (expected 'alpha' or 'heuristic')")
