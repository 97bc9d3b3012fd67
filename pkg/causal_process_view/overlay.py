"""
Overlay of the process model and the causal graph.

Three pattern checks (confounder, collider, mediator) compare triples of
activities in both graphs and emit edits: labels on directly-follows edges
and injections of causal edges the process model lacks. A final pass labels
the remaining edges that coincide with a causal edge. Edits are merged in
that fixed order into an AnnotatedModel.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import permutations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .causal import CausalGraph
from .discovery import Edge, ProcessModel

logger = logging.getLogger(__name__)

CONFOUNDER = "confounder"
COLLIDER = "collider"
MEDIATOR = "mediator"
CONSISTENT = "consistent"
MERGE_ORDER = (CONFOUNDER, COLLIDER, MEDIATOR, CONSISTENT)


class NodeSetMismatchError(ValueError):
    """The process model has activities the causal graph does not know."""


class InvalidEditError(ValueError):
    """An edit cannot be applied to the process model."""


class LabelConflictError(ValueError):
    """Two edits give one edge different labels."""

    def __init__(self, edge: Edge, first: "Edit", second: "Edit"):
        self.edge = edge
        self.first = first
        self.second = second
        super().__init__(
            f"Conflicting labels on {edge[0]} -> {edge[1]}: "
            f"'{first.tag.value}' from {first.source}, '{second.tag.value}' from {second.source}"
        )


class EdgeTag(str, Enum):
    CAUSAL = "C"
    NOT_CAUSAL = "not C"
    UNLABELED = "unlabeled"


@dataclass(frozen=True)
class Edit:
    """
    One change to the process model.

    ``kind`` is "label" (``tag`` set) or "inject" (``coefficient`` carries the
    causal beta when known).
    """

    kind: str
    edge: Edge
    source: str
    tag: Optional[EdgeTag] = None
    coefficient: Optional[float] = None

    @staticmethod
    def label(edge: Edge, tag: EdgeTag, source: str) -> "Edit":
        return Edit("label", edge, source, tag=tag)

    @staticmethod
    def inject(edge: Edge, source: str, coefficient: Optional[float] = None) -> "Edit":
        return Edit("inject", edge, source, coefficient=coefficient)

    def same_effect(self, other: "Edit") -> bool:
        return self.kind == other.kind and self.edge == other.edge and self.tag == other.tag


@dataclass(frozen=True)
class EdgeLabel:
    tag: EdgeTag
    source: str = ""


@dataclass(frozen=True, eq=False)
class AnnotatedModel:
    """
    Process model with causal labels and injected causal edges.

    Attributes:
        base: Process model the annotation was made on (never modified)
        labels: Directly-follows edge -> label; edges absent here are unlabeled
        injected: Causal edge -> beta (None when unknown)
        edits: Applied edits in merge order, duplicates removed
    """

    base: ProcessModel
    labels: Dict[Edge, EdgeLabel] = field(default_factory=dict)
    injected: Dict[Edge, Optional[float]] = field(default_factory=dict)
    edits: Tuple[Edit, ...] = ()

    def label_of(self, a: str, b: str) -> EdgeLabel:
        return self.labels.get((a, b), EdgeLabel(EdgeTag.UNLABELED))

    def edges_tagged(self, tag: EdgeTag) -> List[Edge]:
        if tag is EdgeTag.UNLABELED:
            return [edge for edge in self.base.edges if edge not in self.labels]
        return sorted(edge for edge, label in self.labels.items() if label.tag is tag)


def _check_nodes(pdm: ProcessModel, cbp: CausalGraph):
    missing = sorted(set(pdm.activities) - set(cbp.nodes))
    if missing:
        raise NodeSetMismatchError(
            f"Activities of the process model missing from the causal graph: {', '.join(missing)}"
        )


def _triples(pdm: ProcessModel) -> Iterable[Tuple[str, str, str]]:
    return permutations(pdm.activities, 3)


def annotate_confounder(pdm: ProcessModel, cbp: CausalGraph) -> List[Edit]:
    """
    Edits for confounders: a causes both b and c while the model routes c through b.

    For every triple with a ↠ b, b -> c and no a -> c in the model and
    a -> b, a -> c in the causal graph: label a -> b causal (or inject it),
    inject a => c and, when the causal graph has no b -> c, label b -> c
    not causal.
    """
    _check_nodes(pdm, cbp)
    edits = []
    for a, b, c in _triples(pdm):
        if not (pdm.eventually(a, b) and pdm.has_edge(b, c) and not pdm.has_edge(a, c)):
            continue
        if not (cbp.has_edge(a, b) and cbp.has_edge(a, c)):
            continue
        logger.debug("Confounder %s over (%s, %s)", a, b, c)
        if pdm.has_edge(a, b):
            edits.append(Edit.label((a, b), EdgeTag.CAUSAL, CONFOUNDER))
        else:
            edits.append(Edit.inject((a, b), CONFOUNDER, cbp.coefficient(a, b)))
        edits.append(Edit.inject((a, c), CONFOUNDER, cbp.coefficient(a, c)))
        if not cbp.has_edge(b, c):
            edits.append(Edit.label((b, c), EdgeTag.NOT_CAUSAL, CONFOUNDER))
    return edits


def annotate_collider(pdm: ProcessModel, cbp: CausalGraph) -> List[Edit]:
    """
    Edits for colliders: a and b both cause c while the model routes a through b.

    For every triple with a -> b, b ↠ c and no a -> c in the model and
    a -> c, b -> c in the causal graph: label b -> c causal (or inject it),
    inject a => c and, when the causal graph has no a -> b, label a -> b
    not causal.
    """
    _check_nodes(pdm, cbp)
    edits = []
    for a, b, c in _triples(pdm):
        if not (pdm.has_edge(a, b) and pdm.eventually(b, c) and not pdm.has_edge(a, c)):
            continue
        if not (cbp.has_edge(a, c) and cbp.has_edge(b, c)):
            continue
        logger.debug("Collider %s of (%s, %s)", c, a, b)
        if pdm.has_edge(b, c):
            edits.append(Edit.label((b, c), EdgeTag.CAUSAL, COLLIDER))
        else:
            edits.append(Edit.inject((b, c), COLLIDER, cbp.coefficient(b, c)))
        edits.append(Edit.inject((a, c), COLLIDER, cbp.coefficient(a, c)))
        if not cbp.has_edge(a, b):
            edits.append(Edit.label((a, b), EdgeTag.NOT_CAUSAL, COLLIDER))
    return edits


def annotate_mediator(pdm: ProcessModel, cbp: CausalGraph) -> List[Edit]:
    """
    Edits for mediators with a direct effect the model lacks.

    For every triple (a, m, b) with a -> m, m -> b and no a -> b in the model
    and all three edges in the causal graph: label both chain edges causal
    and inject a => b.
    """
    _check_nodes(pdm, cbp)
    edits = []
    for a, m, b in _triples(pdm):
        if not (pdm.has_edge(a, m) and pdm.has_edge(m, b) and not pdm.has_edge(a, b)):
            continue
        if not (cbp.has_edge(a, m) and cbp.has_edge(m, b) and cbp.has_edge(a, b)):
            continue
        logger.debug("Mediator %s between %s and %s", m, a, b)
        edits.append(Edit.label((a, m), EdgeTag.CAUSAL, MEDIATOR))
        edits.append(Edit.label((m, b), EdgeTag.CAUSAL, MEDIATOR))
        edits.append(Edit.inject((a, b), MEDIATOR, cbp.coefficient(a, b)))
    return edits


def annotate_consistent(pdm: ProcessModel, cbp: CausalGraph, prior: Iterable[Edit] = ()) -> List[Edit]:
    """
    Label causal every still-unlabeled edge that also exists in the causal graph.

    Edges without a causal counterpart stay unlabeled, which is not the same
    as not causal.
    """
    labeled = {edit.edge for edit in prior if edit.kind == "label"}
    return [
        Edit.label(edge, EdgeTag.CAUSAL, CONSISTENT)
        for edge in pdm.edges
        if edge not in labeled and cbp.has_edge(*edge)
    ]


def merge(
    pdm: ProcessModel,
    edit_lists: Sequence[Sequence[Edit]],
    start: Optional[AnnotatedModel] = None
) -> AnnotatedModel:
    """
    Apply edit lists in order and build the annotated model.

    Identical edits are applied once. Two different labels on one edge raise
    LabelConflictError naming both sources.

    Args:
        pdm: Process model being annotated
        edit_lists: Edit lists in merge order
        start: Annotated model to continue from

    Returns:
        AnnotatedModel over ``pdm``
    """
    applied: List[Edit] = list(start.edits) if start is not None else []
    labels: Dict[Edge, Edit] = {e.edge: e for e in applied if e.kind == "label"}
    injected: Dict[Edge, Edit] = {e.edge: e for e in applied if e.kind == "inject"}

    for edits in edit_lists:
        for edit in edits:
            if edit.kind == "label":
                if not pdm.has_edge(*edit.edge):
                    raise InvalidEditError(f"Label on {edit.edge[0]} -> {edit.edge[1]}, which is not a model edge")
                existing = labels.get(edit.edge)
                if existing is not None:
                    if existing.tag is not edit.tag:
                        raise LabelConflictError(edit.edge, existing, edit)
                    continue
                labels[edit.edge] = edit
            elif edit.kind == "inject":
                if pdm.has_edge(*edit.edge):
                    raise InvalidEditError(f"Injected edge {edit.edge[0]} -> {edit.edge[1]} is already a model edge")
                if edit.edge in injected:
                    continue
                injected[edit.edge] = edit
            else:
                raise InvalidEditError(f"Unknown edit kind '{edit.kind}'")
            applied.append(edit)

    return AnnotatedModel(
        base=pdm,
        labels={edge: EdgeLabel(edit.tag, edit.source) for edge, edit in sorted(labels.items())},
        injected={edge: edit.coefficient for edge, edit in sorted(injected.items())},
        edits=tuple(applied),
    )


def annotate(pdm: ProcessModel, cbp: CausalGraph, start: Optional[AnnotatedModel] = None) -> AnnotatedModel:
    """
    Run the three pattern checks and the consistent pass and merge the edits.

    Args:
        pdm: Discovered process model
        cbp: Discovered causal graph
        start: Earlier annotation of the same model to extend

    Returns:
        AnnotatedModel
    """
    pattern_edits = [
        annotate_confounder(pdm, cbp),
        annotate_collider(pdm, cbp),
        annotate_mediator(pdm, cbp),
    ]
    prior = list(start.edits) if start is not None else []
    for edits in pattern_edits:
        prior.extend(edits)
    consistent = annotate_consistent(pdm, cbp, prior)

    result = merge(pdm, pattern_edits + [consistent], start)
    logger.info(
        "Annotation: %d causal, %d not causal, %d unlabeled, %d injected",
        len(result.edges_tagged(EdgeTag.CAUSAL)),
        len(result.edges_tagged(EdgeTag.NOT_CAUSAL)),
        len(result.edges_tagged(EdgeTag.UNLABELED)),
        len(result.injected),
    )
    return result
