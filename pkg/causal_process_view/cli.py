"""
Command-line interface for causal process discovery.
"""

import argparse
import logging
import os
import sys
from dataclasses import replace
from typing import List, Optional

from .analyzer import CausalProcessAnalyzer
from .config import PipelineConfig, load_config
from .synth import SCENARIOS

LOG_FORMAT = "%(filename)s %(lineno)s %(levelname)s: %(message)s"

# CLI flag -> PipelineConfig field
_PIPELINE_FLAGS = [
    "log_path", "scenario", "miner", "threshold", "frequency_floor", "variants",
    "top_k", "coverage", "modality", "alpha_level", "n_permutations", "min_samples",
    "max_samples", "max_workers", "output_dir", "base_name", "seed", "n_cases",
]
_DESCRIPTOR_FLAGS = [
    "case_column", "activity_column", "timestamp_column", "timestamp_format",
    "delimiter",
]


def _add_common_arguments(parser: argparse.ArgumentParser, needs_log: bool = True):
    parser.add_argument(
        '--config',
        help='JSON or TOML pipeline configuration; flags override its values'
    )

    input_group = parser.add_mutually_exclusive_group()
    if needs_log:
        input_group.add_argument(
            '--log',
            dest='log_path',
            help='Event log CSV'
        )
    input_group.add_argument(
        '--scenario',
        choices=sorted(SCENARIOS),
        help='Generate a synthetic scenario instead of reading a log'
    )
    parser.add_argument(
        '--n-cases',
        type=int,
        help='Number of cases of a generated scenario (default: 9999)'
    )
    parser.add_argument(
        '--seed',
        type=int,
        help='Random seed (default: $CPV_SEED or 0)'
    )
    parser.add_argument(
        '--filter-swaps',
        nargs=2,
        metavar=('FIRST', 'SECOND'),
        help='Drop cases in which SECOND completes before FIRST'
    )

    # Output options
    parser.add_argument(
        '--output-dir',
        help='Output directory (default: ./cpv_output)'
    )
    parser.add_argument(
        '--base-name',
        help='Base name for output files (default: cpv)'
    )
    parser.add_argument(
        '-v', '--verbose',
        action='store_true',
        help='Debug logging'
    )

    if not needs_log:
        return

    # Log format options
    parser.add_argument('--case-column', help='Case id column (default: case_id)')
    parser.add_argument('--activity-column', help='Activity column (default: activity)')
    parser.add_argument('--timestamp-column', help='Completion timestamp column (default: timestamp)')
    parser.add_argument('--start-column', help='Start timestamp column (default: start_timestamp when the header has it)')
    parser.add_argument('--timestamp-format', help='strptime pattern or ISO8601 (default: ISO8601)')
    parser.add_argument('--delimiter', help='Field delimiter (default: ,)')

    # Variant selection
    parser.add_argument(
        '--variants',
        nargs='+',
        metavar='A,B,C',
        help='Explicit variants, activities separated by commas'
    )
    parser.add_argument(
        '--top-k',
        type=int,
        help='Use the K most frequent variants'
    )
    parser.add_argument(
        '--coverage',
        type=float,
        help='Use the most frequent variants covering this share of cases (default: 0.95)'
    )


def _add_miner_arguments(parser: argparse.ArgumentParser):
    parser.add_argument(
        '--miner',
        choices=['alpha', 'heuristic'],
        help='Process discovery algorithm (default: heuristic)'
    )
    parser.add_argument(
        '--threshold',
        type=float,
        help='Heuristic miner dependency threshold (default: 0.9)'
    )
    parser.add_argument(
        '--frequency-floor',
        type=int,
        help='Heuristic miner minimum directly-follows count (default: 1)'
    )


def _add_causal_arguments(parser: argparse.ArgumentParser):
    parser.add_argument(
        '--modality',
        choices=['absolute', 'relative'],
        help='Timestamp anchoring (default: the scenario\'s, else absolute)'
    )
    parser.add_argument(
        '--alpha',
        dest='alpha_level',
        type=float,
        help='Significance level of the independence tests (default: 0.05)'
    )
    parser.add_argument(
        '--n-permutations',
        type=int,
        help='Permutations per independence test (default: 200)'
    )
    parser.add_argument(
        '--min-samples',
        type=int,
        help='Minimum cases per activity pair (default: 30)'
    )
    parser.add_argument(
        '--max-samples',
        type=int,
        help='Subsample larger pairs to this many cases'
    )
    parser.add_argument(
        '--workers',
        dest='max_workers',
        type=int,
        help='Threads used to fit pairs (default: 1)'
    )
    parser.add_argument(
        '--plots',
        action='store_true',
        help='Also export pair samples and scatter plots of every causal edge'
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='causal-process-view',
        description='Discover process models and causal business processes from event logs'
    )
    subparsers = parser.add_subparsers(dest='command', required=True)

    generate = subparsers.add_parser('generate', help='Generate a synthetic event log')
    _add_common_arguments(generate, needs_log=False)

    discover = subparsers.add_parser('discover', help='Mine the process model')
    _add_common_arguments(discover)
    _add_miner_arguments(discover)

    causal = subparsers.add_parser('causal', help='Discover the causal graph')
    _add_common_arguments(causal)
    _add_causal_arguments(causal)

    annotate = subparsers.add_parser('annotate', help='Annotate the process model with the causal graph')
    _add_common_arguments(annotate)
    _add_miner_arguments(annotate)
    _add_causal_arguments(annotate)

    return parser


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    """Build the pipeline configuration from --config and the flags given."""
    config = load_config(args.config) if args.config else PipelineConfig()

    overrides = {
        name: getattr(args, name) for name in _PIPELINE_FLAGS
        if getattr(args, name, None) is not None
    }
    if args.filter_swaps is not None:
        overrides['filter_swaps'] = tuple(args.filter_swaps)
    if overrides.get('log_path') is not None:
        overrides.setdefault('scenario', None)
    if overrides.get('scenario') is not None:
        overrides.setdefault('log_path', None)

    descriptor_overrides = {
        name: getattr(args, name) for name in _DESCRIPTOR_FLAGS
        if getattr(args, name, None) is not None
    }
    if getattr(args, 'start_column', None) is not None:
        descriptor_overrides['start_timestamp_column'] = args.start_column
    if descriptor_overrides:
        overrides['descriptor'] = replace(config.descriptor, **descriptor_overrides)

    return replace(config, **overrides).validate()


def _print_skipped(graph):
    skipped = [d for d in graph.diagnostics if d.status == 'skipped']
    if skipped:
        print(f"  {len(skipped)} pairs skipped: " + "; ".join(d.reason for d in skipped))


def _run(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    analyzer = CausalProcessAnalyzer(config)
    output_dir = config.output_dir
    os.makedirs(output_dir, exist_ok=True)

    if config.scenario:
        print(f"Generating scenario {config.scenario} (seed {analyzer.seed})...")
    else:
        print(f"Reading event log {config.log_path}...")
    analyzer.load_log()
    summary = analyzer.summary()
    print(f"  {summary['events']} events, {summary['cases']} cases, {summary['variants']} variants")

    written = [analyzer.export_config(output_dir)]

    if args.command == 'generate':
        written.extend(analyzer.export_log(output_dir))
    else:
        analyzer.select_variants()
        print(f"  Using {len(analyzer.last_selected)} variants")

        if args.command == 'discover':
            print(f"Mining process model ({config.miner})...")
            model = analyzer.discover_model()
            print(f"  {len(model.df_edges)} edges: " + ", ".join(f"{a}->{b}" for a, b in model.edges))
            written.extend(analyzer.export_model(output_dir))

        elif args.command == 'causal':
            print(f"Discovering causal graph ({analyzer.modality.value} anchoring)...")
            graph = analyzer.discover_causal()
            print(f"  {len(graph.edges)} causal edges: "
                  + ", ".join(f"{a}->{b} ({beta:.2f})" for a, b, beta in graph.edges))
            _print_skipped(graph)
            written.extend(analyzer.export_causal(output_dir))

        else:
            print(f"Mining process model ({config.miner}) and causal graph "
                  f"({analyzer.modality.value} anchoring)...")
            annotated = analyzer.annotate()
            print(f"  {len(analyzer.last_model.df_edges)} model edges, "
                  f"{len(analyzer.last_graph.edges)} causal edges, "
                  f"{len(annotated.injected)} injected")
            for a, b in annotated.base.edges:
                print(f"    {a} -> {b}: {annotated.label_of(a, b).tag.value}")
            for a, b in annotated.injected:
                print(f"    {a} => {b}: injected")
            _print_skipped(analyzer.last_graph)
            written.extend(analyzer.export_model(output_dir))
            written.extend(analyzer.export_causal(output_dir))
            written.extend(analyzer.export_annotated(output_dir))

        if getattr(args, 'plots', False):
            written.extend(analyzer.export_pairs(output_dir, plots=True))

    print(f"Wrote {len(written)} files to {output_dir}")
    print("Done!")
    return 0


def _origin(error: BaseException) -> str:
    """Short name of the innermost package module the error passed through."""
    origin = type(error).__module__
    tb = error.__traceback__
    while tb is not None:
        name = tb.tb_frame.f_globals.get('__name__', '')
        if name.startswith(__package__ or 'causal_process_view'):
            origin = name
        tb = tb.tb_next
    return origin.rsplit('.', 1)[-1]


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point. Returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format=LOG_FORMAT,
    )

    try:
        return _run(args)
    except (ValueError, OSError) as e:
        print(f"Error ({_origin(e)}): {e}", file=sys.stderr)
        return 1


if __name__ == '__main__':
    sys.exit(main())
