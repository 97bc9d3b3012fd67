"""
Causal business process discovery with pairwise bivariate LiNGAM.

Each activity pair of the selected variants is anchored, regressed in both
directions and oriented towards the direction whose residual is independent
of the regressor. The union of the oriented pairs is the causal graph.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy import stats

from .config import CausalConfig
from .eventlog import (
    AnchorModality,
    CaseTable,
    NegativeExecutionTimeError,
    PairSeries,
    Variant,
    anchor,
    extract_pair,
    select_cases,
)
from .independence import independence_test, seeded_rng

logger = logging.getLogger(__name__)

CausalEdge = Tuple[str, str, float]


class DegenerateSeriesError(ValueError):
    """A pair column has zero variance."""

    def __init__(self, activity: str):
        self.activity = activity
        super().__init__(f"Execution times of '{activity}' have zero variance")


class InsufficientSamplesError(ValueError):
    """Too few cases to fit a pair."""


class CycleError(ValueError):
    """The union of pairwise results is not a DAG."""

    def __init__(self, pairs: Sequence[Tuple[str, str]]):
        self.pairs = list(pairs)
        cycle = " -> ".join([a for a, _ in self.pairs] + [self.pairs[0][0]]) if self.pairs else ""
        super().__init__(f"Discovered causal graph has a cycle: {cycle}")


class Verdict(str, Enum):
    A_CAUSES_B = "a_causes_b"
    B_CAUSES_A = "b_causes_a"
    INDEPENDENT = "independent"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class PairResult:
    """
    Outcome of one bivariate fit.

    ``coefficient`` is the OLS slope in the accepted direction, 0.0 when no
    direction was accepted. ``stats`` holds p_forward, p_backward,
    p_marginal and n_samples.
    """

    pair: Tuple[str, str]
    verdict: Verdict
    coefficient: float
    stats: Dict[str, float] = field(default_factory=dict)

    @property
    def edge(self) -> Optional[CausalEdge]:
        """(cause, effect, beta) for directed verdicts, else None."""
        a, b = self.pair
        if self.verdict is Verdict.A_CAUSES_B:
            return (a, b, self.coefficient)
        if self.verdict is Verdict.B_CAUSES_A:
            return (b, a, self.coefficient)
        return None


@dataclass(frozen=True)
class PairDiagnostic:
    """Per-pair record kept for the diagnostics report."""

    pair: Tuple[str, str]
    status: str
    n_samples: int = 0
    p_forward: Optional[float] = None
    p_backward: Optional[float] = None
    p_marginal: Optional[float] = None
    coefficient: Optional[float] = None
    reason: str = ""
    constant_activity: Optional[str] = None


@dataclass(frozen=True, eq=False)
class CausalGraph:
    """
    DAG over activities with weighted causal edges.

    Attributes:
        nodes: Sorted activity names
        edges: (cause, effect, beta) triples sorted by (cause, effect)
        alpha_level: Significance level used by the fits
        modality: Anchoring modality used for every pair
        diagnostics: One record per fitted or skipped pair
    """

    nodes: Tuple[str, ...]
    edges: Tuple[CausalEdge, ...]
    alpha_level: float = 0.05
    modality: AnchorModality = AnchorModality.ABSOLUTE
    diagnostics: Tuple[PairDiagnostic, ...] = ()

    def __post_init__(self):
        seen = set()
        for a, b, beta in self.edges:
            if a not in self.nodes or b not in self.nodes:
                raise ValueError(f"Causal edge {a} -> {b} uses an unknown activity")
            if frozenset((a, b)) in seen:
                raise ValueError(f"More than one causal edge between {a} and {b}")
            if not np.isfinite(beta):
                raise ValueError(f"Causal edge {a} -> {b} has non-finite coefficient")
            seen.add(frozenset((a, b)))

    def has_edge(self, a: str, b: str) -> bool:
        return any(cause == a and effect == b for cause, effect, _ in self.edges)

    def coefficient(self, a: str, b: str) -> Optional[float]:
        for cause, effect, beta in self.edges:
            if cause == a and effect == b:
                return beta
        return None

    def edge_pairs(self) -> List[Tuple[str, str]]:
        return [(a, b) for a, b, _ in self.edges]

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.nodes)
        for a, b, beta in self.edges:
            graph.add_edge(a, b, beta=beta)
        return graph


def pair_set(variants: Sequence[Variant]) -> List[Tuple[str, str]]:
    """
    All ordered pairs (e_i, e_j), i < j, of every variant.

    Duplicates are dropped; order follows the variants, then positions.
    Repeated activities inside a variant do not pair with themselves.
    """
    pairs = {}
    for variant in variants:
        sequence = variant.sequence
        for i in range(len(sequence)):
            for j in range(i + 1, len(sequence)):
                if sequence[i] != sequence[j]:
                    pairs.setdefault((sequence[i], sequence[j]), None)
    return list(pairs)


def _check_series(series: PairSeries, min_samples: int):
    if len(series) < min_samples:
        raise InsufficientSamplesError(
            f"Pair ({series.first_activity}, {series.second_activity}) has {len(series)} "
            f"samples, at least {min_samples} needed"
        )
    for name, column in ((series.first_activity, series.first), (series.second_activity, series.second)):
        if not np.all(np.isfinite(column)) or np.ptp(column) == 0:
            raise DegenerateSeriesError(name)


def _subsample(series: PairSeries, max_samples: Optional[int], seed: int) -> PairSeries:
    if max_samples is None or len(series) <= max_samples:
        return series
    names = sorted((series.first_activity, series.second_activity))
    keep = np.sort(seeded_rng(seed, "subsample", *names).choice(len(series), max_samples, replace=False))
    return PairSeries(
        series.first_activity,
        series.second_activity,
        tuple(series.case_ids[i] for i in keep),
        series.first[keep],
        series.second[keep],
        series.modality,
    )


def _residual_p(regressor: np.ndarray, response: np.ndarray, regressor_name: str,
                response_name: str, cfg: CausalConfig) -> Tuple[float, float]:
    fit = stats.linregress(regressor, response)
    residual = response - (fit.intercept + fit.slope * regressor)
    p_value = independence_test(
        residual, regressor, cfg.n_permutations,
        rng=seeded_rng(cfg.seed, regressor_name, response_name),
    )
    return float(fit.slope), p_value


def fit_pair(series: PairSeries, alpha_level: Optional[float] = None,
             config: Optional[CausalConfig] = None) -> PairResult:
    """
    Orient one activity pair with bivariate LiNGAM.

    The columns are first tested for marginal dependence; independent
    columns give verdict ``independent``. Otherwise the second column is
    regressed on the first (forward) and the first on the second
    (backward), and each residual is tested against its regressor.
    Independence in exactly one direction orients the pair.

    Args:
        series: Anchored pair series
        alpha_level: Significance level (overrides ``config.alpha_level``)
        config: Sample limits, permutation count and seed

    Returns:
        PairResult for (first_activity, second_activity)

    Raises:
        InsufficientSamplesError: Fewer samples than ``min_samples``
        DegenerateSeriesError: A column is constant
    """
    cfg = config or CausalConfig()
    alpha = cfg.alpha_level if alpha_level is None else alpha_level
    a, b = series.first_activity, series.second_activity

    series = _subsample(series, cfg.max_samples, cfg.seed)
    _check_series(series, cfg.min_samples)
    x, y = series.first, series.second

    # Column order is fixed by name so a swapped series draws the same permutations.
    ordered = sorted([(a, x), (b, y)], key=lambda item: item[0])
    p_marginal = independence_test(
        ordered[0][1], ordered[1][1], cfg.n_permutations,
        rng=seeded_rng(cfg.seed, "marginal", ordered[0][0], ordered[1][0]),
    )
    result_stats = {"n_samples": len(series), "p_marginal": p_marginal}

    if p_marginal > alpha:
        logger.debug("%s / %s: marginally independent (p=%.4f)", a, b, p_marginal)
        return PairResult((a, b), Verdict.INDEPENDENT, 0.0, result_stats)

    slope_forward, p_forward = _residual_p(x, y, a, b, cfg)
    slope_backward, p_backward = _residual_p(y, x, b, a, cfg)
    result_stats.update(p_forward=p_forward, p_backward=p_backward)

    forward = p_forward > alpha
    backward = p_backward > alpha
    if forward and not backward:
        verdict, coefficient = Verdict.A_CAUSES_B, slope_forward
    elif backward and not forward:
        verdict, coefficient = Verdict.B_CAUSES_A, slope_backward
    elif forward and backward:
        verdict, coefficient = Verdict.INDEPENDENT, 0.0
    else:
        verdict, coefficient = Verdict.UNDETERMINED, 0.0

    logger.debug(
        "%s / %s: %s beta=%.4f p_forward=%.4f p_backward=%.4f n=%d",
        a, b, verdict.value, coefficient, p_forward, p_backward, len(series)
    )
    return PairResult((a, b), verdict, coefficient, result_stats)


def _fit_unordered(table: CaseTable, variants: Sequence[Variant], pair: Tuple[str, str],
                   modality: AnchorModality, cfg: CausalConfig) -> Tuple[Optional[PairResult], PairDiagnostic]:
    a, b = pair
    selected = select_cases(table, [v for v in variants if a in v and b in v])
    try:
        series = anchor(extract_pair(selected, a, b), selected, modality)
        result = fit_pair(series, config=cfg)
    except (InsufficientSamplesError, DegenerateSeriesError, NegativeExecutionTimeError) as e:
        logger.warning("Skipping pair (%s, %s): %s", a, b, e)
        return None, PairDiagnostic(
            pair, "skipped", n_samples=len(selected), reason=str(e),
            constant_activity=e.activity if isinstance(e, DegenerateSeriesError) else None,
        )

    edge = result.edge
    status = "edge" if edge else result.verdict.value
    return result, PairDiagnostic(
        pair,
        status,
        n_samples=int(result.stats["n_samples"]),
        p_forward=result.stats.get("p_forward"),
        p_backward=result.stats.get("p_backward"),
        p_marginal=result.stats.get("p_marginal"),
        coefficient=edge[2] if edge else None,
        reason=f"{edge[0]} -> {edge[1]}" if edge else "",
    )


def constant_openers(variants: Sequence[Variant], diagnostics: Sequence[PairDiagnostic]) -> List[str]:
    """
    Variant-opening activities whose every pair was skipped as constant.

    Without start timestamps a case starts at its first completion, so the
    first activity of every case anchors to zero.
    """
    openers = sorted({variant.sequence[0] for variant in variants})
    constant = []
    for activity in openers:
        involved = [d for d in diagnostics if activity in d.pair]
        if involved and all(d.constant_activity == activity for d in involved):
            constant.append(activity)
    return constant


def discover_cbp(
    table: CaseTable,
    variants: Sequence[Variant],
    modality=AnchorModality.ABSOLUTE,
    alpha_level: Optional[float] = None,
    config: Optional[CausalConfig] = None
) -> CausalGraph:
    """
    Discover the causal business process graph of the selected variants.

    Swapped ordered pairs are pooled: every unordered pair is fitted once,
    on all selected cases containing both activities, with one modality.

    Args:
        table: Case table of the log
        variants: Selected variants
        modality: Anchoring modality applied to every pair
        alpha_level: Significance level (overrides ``config.alpha_level``)
        config: Causal discovery settings

    Returns:
        CausalGraph holding directed verdicts as edges and every pair in
        the diagnostics

    Raises:
        CycleError: The union of the oriented pairs is not acyclic
    """
    cfg = config or CausalConfig()
    if alpha_level is not None:
        cfg = CausalConfig(alpha_level, cfg.min_samples, cfg.n_permutations,
                           cfg.max_samples, cfg.seed, cfg.max_workers)
    modality = AnchorModality.parse(modality)

    unordered = {}
    for a, b in pair_set(variants):
        unordered.setdefault(frozenset((a, b)), (a, b))
    jobs = list(unordered.values())
    logger.info("Fitting %d activity pairs (%s anchoring)", len(jobs), modality.value)

    def run(pair):
        return _fit_unordered(table, variants, pair, modality, cfg)

    if cfg.max_workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=cfg.max_workers) as pool:
            outcomes = list(pool.map(run, jobs))
    else:
        outcomes = [run(pair) for pair in jobs]

    edges = sorted(
        (result.edge for result, _ in outcomes if result is not None and result.edge is not None),
        key=lambda edge: (edge[0], edge[1])
    )
    nodes = tuple(sorted({activity for variant in variants for activity in variant.sequence}))

    graph = nx.DiGraph()
    graph.add_nodes_from(nodes)
    graph.add_edges_from((a, b) for a, b, _ in edges)
    if not nx.is_directed_acyclic_graph(graph):
        raise CycleError([(u, v) for u, v in nx.find_cycle(graph)])

    diagnostics = tuple(d for _, d in outcomes)
    constant = constant_openers(variants, diagnostics)
    if constant:
        logger.warning(
            "Every pair with %s was skipped because its execution time is constant. "
            "Cases seem to start at their first completion; give the log a start "
            "timestamp column", ", ".join(constant)
        )

    undetermined = [d.pair for _, d in outcomes if d.status == Verdict.UNDETERMINED.value]
    if undetermined:
        logger.info("Undetermined pairs: %s", ", ".join(f"({a}, {b})" for a, b in undetermined))
    logger.info("Causal graph: %d nodes, %d edges", len(nodes), len(edges))

    return CausalGraph(
        nodes=nodes,
        edges=tuple(edges),
        alpha_level=cfg.alpha_level,
        modality=modality,
        diagnostics=diagnostics,
    )
