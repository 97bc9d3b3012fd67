"""
Causal Process View - process discovery annotated with causal execution dependencies.
"""

from .analyzer import CausalProcessAnalyzer
from .causal import CausalGraph, PairResult, Verdict, discover_cbp, fit_pair, pair_set
from .config import CausalConfig, CsvDescriptor, PipelineConfig, load_config
from .discovery import (
    HeuristicConfig,
    ProcessModel,
    alpha_miner,
    eventually_follows,
    footprint,
    heuristic_miner,
)
from .eventlog import (
    AnchorModality,
    EventLog,
    anchor,
    extract_pair,
    extract_variants,
    select_cases,
    to_tabular,
)
from .independence import independence_test
from .log_parser import parse_log
from .overlay import (
    AnnotatedModel,
    EdgeTag,
    annotate,
    annotate_collider,
    annotate_confounder,
    annotate_consistent,
    annotate_mediator,
    merge,
)
from .synth import SCENARIOS, ScenarioConfig, count_swaps, filter_swaps, generate

__version__ = "0.1.0"
__all__ = [
    "CausalProcessAnalyzer",
    "CausalGraph",
    "PairResult",
    "Verdict",
    "discover_cbp",
    "fit_pair",
    "pair_set",
    "CausalConfig",
    "CsvDescriptor",
    "PipelineConfig",
    "load_config",
    "HeuristicConfig",
    "ProcessModel",
    "alpha_miner",
    "eventually_follows",
    "footprint",
    "heuristic_miner",
    "AnchorModality",
    "EventLog",
    "anchor",
    "extract_pair",
    "extract_variants",
    "select_cases",
    "to_tabular",
    "independence_test",
    "parse_log",
    "AnnotatedModel",
    "EdgeTag",
    "annotate",
    "annotate_collider",
    "annotate_confounder",
    "annotate_consistent",
    "annotate_mediator",
    "merge",
    "SCENARIOS",
    "ScenarioConfig",
    "count_swaps",
    "filter_swaps",
    "generate",
]
