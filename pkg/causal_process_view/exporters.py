"""
Export models, causal graphs, annotations and logs to DOT, JSON and CSV.

JSON documents carry a ``schema`` tag and sorted keys; every file is
written to a temporary file next to the target and renamed into place.
"""

import json
import os
import tempfile
from typing import Dict, Iterable, List, Optional

import graphviz
import numpy as np
import pandas as pd

from .causal import CausalGraph
from .discovery import ProcessModel, Relation
from .eventlog import EventLog, PairSeries, log_to_dict
from .overlay import AnnotatedModel, EdgeTag


def write_atomic(output_path: str, text: str):
    """Write text to ``output_path`` through a temp file and os.replace."""
    directory = os.path.dirname(os.path.abspath(output_path))
    os.makedirs(directory, exist_ok=True)
    fd, temp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(output_path))
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
        os.replace(temp_path, output_path)
    except BaseException:
        if os.path.exists(temp_path):
            os.remove(temp_path)
        raise


def dumps_json(document: Dict) -> str:
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def write_json(document: Dict, output_path: str):
    write_atomic(output_path, dumps_json(document))


def _edge_name(edge) -> str:
    return f"{edge[0]}->{edge[1]}"


def format_timestamps(seconds: Iterable[Optional[float]]) -> List[str]:
    """ISO-8601 UTC strings with microseconds; None becomes an empty string."""
    values = list(seconds)
    present = [v for v in values if v is not None]
    micros = np.round(np.asarray(present, dtype=float) * 1e6).astype('int64')
    stamps = iter(pd.to_datetime(micros, unit='us', utc=True).strftime('%Y-%m-%dT%H:%M:%S.%fZ'))
    return [next(stamps) if v is not None else '' for v in values]


class ProcessModelExporter:
    """Export a discovered process model."""

    @staticmethod
    def to_dict(model: ProcessModel) -> Dict:
        return {
            "schema": "process-model/1",
            "provenance": model.provenance,
            "activities": list(model.activities),
            "start_activities": sorted(model.start_activities),
            "end_activities": sorted(model.end_activities),
            "edges": [
                {"source": a, "target": b, "frequency": count}
                for (a, b), count in sorted(model.df_edges.items())
            ],
            "relations": [
                {"source": a, "target": b, "relation": relation.value}
                for (a, b), relation in sorted(model.relations.items())
                if a < b and relation is not Relation.CHOICE
            ],
            "eventually_follows": [_edge_name(edge) for edge in sorted(model.ef_closure)],
        }

    @staticmethod
    def to_dot(model: ProcessModel) -> str:
        """DOT source; edge labels are frequencies, parallel pairs are dotted and undirected."""
        dot = graphviz.Digraph('process_model', graph_attr={'rankdir': 'LR', 'label': model.provenance})
        for activity in model.activities:
            dot.node(activity, shape='box')
        for (a, b), count in sorted(model.df_edges.items()):
            dot.edge(a, b, label=str(count))
        for (a, b), relation in sorted(model.relations.items()):
            if a < b and relation is Relation.PARALLEL and not (model.has_edge(a, b) or model.has_edge(b, a)):
                dot.edge(a, b, style='dotted', dir='none', label='||')
        return dot.source

    @staticmethod
    def export(model: ProcessModel, output_path: str):
        write_json(ProcessModelExporter.to_dict(model), output_path)

    @staticmethod
    def export_dot(model: ProcessModel, output_path: str):
        write_atomic(output_path, ProcessModelExporter.to_dot(model))


class CausalGraphExporter:
    """Export a causal graph and its per-pair diagnostics."""

    @staticmethod
    def to_dict(graph: CausalGraph) -> Dict:
        return {
            "schema": "causal-graph/1",
            "nodes": list(graph.nodes),
            "edges": [{"cause": a, "effect": b, "beta": beta} for a, b, beta in graph.edges],
            "alpha_level": graph.alpha_level,
            "modality": graph.modality.value,
        }

    @staticmethod
    def diagnostics_to_dict(graph: CausalGraph) -> Dict:
        return {
            "schema": "causal-diagnostics/1",
            "alpha_level": graph.alpha_level,
            "modality": graph.modality.value,
            "pairs": [
                {
                    "first": d.pair[0],
                    "second": d.pair[1],
                    "status": d.status,
                    "n_samples": d.n_samples,
                    "p_forward": d.p_forward,
                    "p_backward": d.p_backward,
                    "p_marginal": d.p_marginal,
                    "coefficient": d.coefficient,
                    "reason": d.reason,
                }
                for d in graph.diagnostics
            ],
        }

    @staticmethod
    def to_dot(graph: CausalGraph) -> str:
        """DOT source; edge labels are beta to two decimals."""
        dot = graphviz.Digraph('causal_graph', graph_attr={'rankdir': 'LR'})
        for node in graph.nodes:
            dot.node(node, shape='ellipse')
        for a, b, beta in graph.edges:
            dot.edge(a, b, label=f'{beta:.2f}')
        return dot.source

    @staticmethod
    def export(graph: CausalGraph, output_path: str):
        write_json(CausalGraphExporter.to_dict(graph), output_path)

    @staticmethod
    def export_dot(graph: CausalGraph, output_path: str):
        write_atomic(output_path, CausalGraphExporter.to_dot(graph))

    @staticmethod
    def export_diagnostics(graph: CausalGraph, output_path: str):
        write_json(CausalGraphExporter.diagnostics_to_dict(graph), output_path)


class AnnotatedModelExporter:
    """Export the annotated process view."""

    @staticmethod
    def to_dict(annotated: AnnotatedModel) -> Dict:
        return {
            "schema": "annotated-model/1",
            "model": ProcessModelExporter.to_dict(annotated.base),
            "labels": [
                {
                    "source": a,
                    "target": b,
                    "tag": annotated.label_of(a, b).tag.value,
                    "assigned_by": annotated.label_of(a, b).source,
                }
                for a, b in annotated.base.edges
            ],
            "injected": [
                {"cause": a, "effect": b, "beta": beta}
                for (a, b), beta in sorted(annotated.injected.items())
            ],
            "edits": [
                {
                    "kind": edit.kind,
                    "edge": _edge_name(edit.edge),
                    "tag": edit.tag.value if edit.tag is not None else None,
                    "source": edit.source,
                    "coefficient": edit.coefficient,
                }
                for edit in annotated.edits
            ],
        }

    @staticmethod
    def to_dot(annotated: AnnotatedModel) -> str:
        """
        DOT source of the annotated view.

        Causal edges get a trailing "c", non-causal edges are dashed with
        "not c", injected causal edges are bold and labeled with beta.
        """
        model = annotated.base
        dot = graphviz.Digraph('annotated_model', graph_attr={'rankdir': 'LR'})
        for activity in model.activities:
            dot.node(activity, shape='box')
        for (a, b), count in sorted(model.df_edges.items()):
            tag = annotated.label_of(a, b).tag
            if tag is EdgeTag.CAUSAL:
                dot.edge(a, b, label=f'{count} c')
            elif tag is EdgeTag.NOT_CAUSAL:
                dot.edge(a, b, label=f'{count} not c', style='dashed')
            else:
                dot.edge(a, b, label=str(count))
        for (a, b), beta in sorted(annotated.injected.items()):
            label = f'{beta:.2f}' if beta is not None else 'c'
            dot.edge(a, b, label=label, style='bold', color='#d62728')
        return dot.source

    @staticmethod
    def export(annotated: AnnotatedModel, output_path: str):
        write_json(AnnotatedModelExporter.to_dict(annotated), output_path)

    @staticmethod
    def export_dot(annotated: AnnotatedModel, output_path: str):
        write_atomic(output_path, AnnotatedModelExporter.to_dot(annotated))


class EventLogExporter:
    """Export event logs."""

    COLUMNS = ['case_id', 'activity', 'start_timestamp', 'timestamp']

    @staticmethod
    def to_frame(log: EventLog) -> pd.DataFrame:
        return pd.DataFrame({
            'case_id': [e.case_id for e in log.events],
            'activity': [e.activity for e in log.events],
            'start_timestamp': format_timestamps(e.start_timestamp for e in log.events),
            'timestamp': format_timestamps(e.timestamp for e in log.events),
        }, columns=EventLogExporter.COLUMNS)

    @staticmethod
    def export_csv(log: EventLog, output_path: str):
        """
        Export a log as CSV with columns case_id, activity, start_timestamp, timestamp.

        Timestamps are ISO-8601 UTC with microseconds.
        """
        write_atomic(output_path, EventLogExporter.to_frame(log).to_csv(index=False, lineterminator='\n'))

    @staticmethod
    def export_json(log: EventLog, output_path: str):
        write_json(log_to_dict(log), output_path)


class PairSeriesExporter:
    """Export pair samples for scatter analysis."""

    @staticmethod
    def export_csv(series: PairSeries, output_path: str):
        frame = pd.DataFrame({
            'case_id': list(series.case_ids),
            series.first_activity: series.first,
            series.second_activity: series.second,
        })
        write_atomic(output_path, frame.to_csv(index=False, lineterminator='\n'))
