"""
Example usage of the Causal Process View library.
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
from causal_process_view import (
    CausalProcessAnalyzer,
    CausalConfig,
    EdgeTag,
    HeuristicConfig,
    PipelineConfig,
    annotate,
    discover_cbp,
    extract_variants,
    footprint,
    generate,
    heuristic_miner,
    to_tabular,
)
from causal_process_view.synth import get_scenario


def example_step_by_step():
    """Example: Mine, discover and annotate the confounder scenario by hand."""
    log = generate(get_scenario('confounder-uniform', n_cases=3000, seed=1))
    table = to_tabular(log)
    variants = extract_variants(table)
    print(f"{len(log)} events, {len(table)} cases, {len(variants)} variants")

    # Process model: Accept -> Email -> Archive
    model = heuristic_miner(footprint(table), HeuristicConfig(dependency_threshold=0.9))
    print("Process model:", ", ".join(f"{a}->{b}" for a, b in model.edges))

    # Causal graph: Accept -> Email, Accept -> Archive
    graph = discover_cbp(table, variants, 'absolute',
                         config=CausalConfig(alpha_level=0.01, n_permutations=100, seed=1))
    print("Causal graph:", ", ".join(f"{a}->{b} ({beta:.2f})" for a, b, beta in graph.edges))

    annotated = annotate(model, graph)
    for a, b in model.edges:
        print(f"  {a} -> {b}: {annotated.label_of(a, b).tag.value}")
    for a, b in annotated.injected:
        print(f"  {a} => {b}: injected")
    print(f"Not causal: {annotated.edges_tagged(EdgeTag.NOT_CAUSAL)}")


def example_pipeline():
    """Example: Run the whole pipeline on a scenario and export every artifact."""
    config = PipelineConfig(
        scenario='mediator-uniform',
        n_cases=3000,
        seed=2,
        alpha_level=0.01,
        n_permutations=100,
        output_dir='./cpv_output',
        base_name='mediator',
    )
    analyzer = CausalProcessAnalyzer(config)
    analyzer.load_log()
    analyzer.annotate()
    print(analyzer.summary())

    os.makedirs(config.output_dir, exist_ok=True)
    analyzer.export_model(config.output_dir)
    analyzer.export_causal(config.output_dir)
    analyzer.export_annotated(config.output_dir)
    analyzer.export_pairs(config.output_dir, plots=True)
    print(f"Exported to {config.output_dir}/")


def example_from_csv(log_path):
    """Example: Analyse a CSV event log with non-default column names."""
    from causal_process_view import CsvDescriptor

    config = PipelineConfig(
        log_path=log_path,
        descriptor=CsvDescriptor(
            case_column='case:concept:name',
            activity_column='concept:name',
            timestamp_column='time:timestamp',
        ),
        top_k=5,
    )
    analyzer = CausalProcessAnalyzer(config)
    analyzer.load_log()
    model = analyzer.discover_model()
    print(f"{len(model.activities)} activities, {len(model.df_edges)} edges")


if __name__ == '__main__':
    print("Causal Process View Example")
    print("=" * 50)

    print("\nExample 1: Step by step")
    print("-" * 50)
    example_step_by_step()

    print("\nExample 2: Pipeline with exports")
    print("-" * 50)
    example_pipeline()

    if len(sys.argv) > 1:
        print("\nExample 3: CSV event log")
        print("-" * 50)
        try:
            example_from_csv(sys.argv[1])
        except (ValueError, OSError) as e:
            print(f"Error: {e}")
