"""
Main analyzer class that orchestrates the discovery workflow.
"""

import logging
import os
from typing import Dict, List, Optional

from .causal import CausalGraph, discover_cbp
from .config import ConfigError, PipelineConfig
from .discovery import HeuristicConfig, ProcessModel, footprint, mine
from .eventlog import (
    AnchorModality,
    CaseTable,
    EventLog,
    Variant,
    anchor,
    extract_pair,
    extract_variants,
    select_cases,
    to_tabular,
    top_variants,
    variant_from_string,
)
from .exporters import (
    AnnotatedModelExporter,
    CausalGraphExporter,
    EventLogExporter,
    PairSeriesExporter,
    ProcessModelExporter,
    write_json,
)
from .log_parser import parse_log
from .overlay import AnnotatedModel, annotate
from .plotting import plot_pair_series
from .synth import ScenarioConfig, filter_swaps, generate, get_scenario

logger = logging.getLogger(__name__)


class CausalProcessAnalyzer:
    """
    Runs the pipeline: load a log, select variants, mine the process model,
    discover the causal graph and annotate the model with it.

    Intermediate results of the last run are kept on ``last_*`` attributes.
    """

    def __init__(self, config: PipelineConfig):
        """
        Initialize the analyzer.

        Args:
            config: Pipeline configuration (validated here)
        """
        self.config = config.validate()
        self.last_scenario: Optional[ScenarioConfig] = None
        self.last_log: Optional[EventLog] = None
        self.last_table: Optional[CaseTable] = None
        self.last_variants: List[Variant] = []
        self.last_selected: List[Variant] = []
        self.last_model: Optional[ProcessModel] = None
        self.last_graph: Optional[CausalGraph] = None
        self.last_annotated: Optional[AnnotatedModel] = None

    @property
    def seed(self) -> int:
        return self.config.resolved_seed()

    def scenario(self) -> Optional[ScenarioConfig]:
        if self.config.scenario is None:
            return None
        return get_scenario(self.config.scenario, n_cases=self.config.n_cases, seed=self.seed)

    @property
    def modality(self) -> AnchorModality:
        """Configured modality, else the scenario's, else absolute."""
        if self.config.modality is not None:
            return AnchorModality.parse(self.config.modality)
        scenario = self.scenario()
        if scenario is not None:
            return scenario.modality
        return AnchorModality.ABSOLUTE

    def load_log(self) -> EventLog:
        """Parse the configured log or generate the configured scenario."""
        scenario = self.scenario()
        if scenario is not None:
            log = generate(scenario)
        else:
            log = parse_log(self.config.log_path, self.config.descriptor)

        if self.config.filter_swaps is not None:
            first, second = self.config.filter_swaps
            before = len(log.case_ids)
            log = filter_swaps(log, first, second)
            logger.info("Swap filter kept %d of %d cases", len(log.case_ids), before)

        self.last_scenario = scenario
        self.last_log = log
        self.last_table = to_tabular(log)
        self.last_variants = extract_variants(self.last_table)
        self.last_selected = []
        return log

    def select_variants(self) -> List[Variant]:
        """
        Pick the variants to analyse.

        Explicit variant strings win over top-k, which wins over coverage.
        """
        if self.last_table is None:
            self.load_log()

        if self.config.variants:
            known = {variant.sequence: variant for variant in self.last_variants}
            selected = []
            for text in self.config.variants:
                wanted = variant_from_string(text)
                if wanted.sequence not in known:
                    raise ConfigError(f"Variant '{wanted.label}' does not occur in the log")
                selected.append(known[wanted.sequence])
        else:
            selected = top_variants(self.last_variants, self.config.coverage, self.config.top_k)

        covered = sum(variant.frequency for variant in selected)
        logger.info(
            "Selected %d of %d variants covering %d of %d cases",
            len(selected), len(self.last_variants), covered, len(self.last_table)
        )
        self.last_selected = selected
        return selected

    def selected_table(self) -> CaseTable:
        if not self.last_selected:
            self.select_variants()
        return select_cases(self.last_table, self.last_selected)

    def discover_model(self) -> ProcessModel:
        """Mine the process model of the selected variants."""
        table = self.selected_table()
        cfg = HeuristicConfig(self.config.threshold, self.config.frequency_floor)
        self.last_model = mine(footprint(table), self.config.miner, cfg)
        return self.last_model

    def discover_causal(self) -> CausalGraph:
        """Discover the causal graph of the selected variants."""
        table = self.selected_table()
        self.last_graph = discover_cbp(
            table, self.last_selected, self.modality, config=self.config.causal_config()
        )
        return self.last_graph

    def annotate(self) -> AnnotatedModel:
        """Run mining, causal discovery and the overlay."""
        model = self.discover_model()
        graph = self.discover_causal()
        self.last_annotated = annotate(model, graph)
        return self.last_annotated

    def _path(self, output_dir: str, suffix: str) -> str:
        return os.path.join(output_dir, f"{self.config.base_name}_{suffix}")

    def export_config(self, output_dir: str) -> str:
        """Echo the resolved configuration next to the outputs."""
        document = {"schema": "pipeline-config/1", "config": self.config.to_dict()}
        scenario = self.last_scenario or self.scenario()
        if scenario is not None:
            document["scenario"] = scenario.to_dict()
        path = self._path(output_dir, "config.json")
        write_json(document, path)
        return path

    def export_log(self, output_dir: str) -> List[str]:
        csv_path = self._path(output_dir, "log.csv")
        json_path = self._path(output_dir, "log.json")
        EventLogExporter.export_csv(self.last_log, csv_path)
        EventLogExporter.export_json(self.last_log, json_path)
        return [csv_path, json_path]

    def export_model(self, output_dir: str) -> List[str]:
        paths = [self._path(output_dir, "model.json"), self._path(output_dir, "model.dot")]
        ProcessModelExporter.export(self.last_model, paths[0])
        ProcessModelExporter.export_dot(self.last_model, paths[1])
        return paths

    def export_causal(self, output_dir: str) -> List[str]:
        paths = [
            self._path(output_dir, "causal.json"),
            self._path(output_dir, "causal.dot"),
            self._path(output_dir, "diagnostics.json"),
        ]
        CausalGraphExporter.export(self.last_graph, paths[0])
        CausalGraphExporter.export_dot(self.last_graph, paths[1])
        CausalGraphExporter.export_diagnostics(self.last_graph, paths[2])
        return paths

    def export_annotated(self, output_dir: str) -> List[str]:
        paths = [self._path(output_dir, "annotated.json"), self._path(output_dir, "annotated.dot")]
        AnnotatedModelExporter.export(self.last_annotated, paths[0])
        AnnotatedModelExporter.export_dot(self.last_annotated, paths[1])
        return paths

    def export_pairs(self, output_dir: str, plots: bool = False) -> List[str]:
        """
        Export the anchored samples of every causal edge, optionally with scatter plots.
        """
        table = self.selected_table()
        paths = []
        for diagnostic in self.last_graph.diagnostics:
            if diagnostic.status != "edge":
                continue
            a, b = diagnostic.pair
            # The slope is drawn only when the edge runs along the plotted axes.
            beta = diagnostic.coefficient if diagnostic.reason == f"{a} -> {b}" else None
            rows = select_cases(table, [v for v in self.last_selected if a in v and b in v])
            series = anchor(extract_pair(rows, a, b), rows, self.last_graph.modality)
            csv_path = self._path(output_dir, f"pair_{a}_{b}.csv")
            PairSeriesExporter.export_csv(series, csv_path)
            paths.append(csv_path)
            if plots:
                paths.append(plot_pair_series(
                    series, self._path(output_dir, f"pair_{a}_{b}.png"), coefficient=beta
                ))
        return paths

    def summary(self) -> Dict:
        """Counts of the last run, for progress output."""
        result = {}
        if self.last_log is not None:
            result["events"] = len(self.last_log)
            result["cases"] = len(self.last_table)
            result["variants"] = len(self.last_variants)
            result["selected_variants"] = len(self.last_selected)
        if self.last_model is not None:
            result["model_edges"] = len(self.last_model.df_edges)
        if self.last_graph is not None:
            result["causal_edges"] = len(self.last_graph.edges)
        if self.last_annotated is not None:
            result["injected_edges"] = len(self.last_annotated.injected)
        return result
