#!/usr/bin/env python3
"""Command-line entry point for dataset generation, decomposition, experiments and scoring.

Exit status: 0 on success, 1 on a reported error (bad input, bad config,
missing file), 2 on anything unexpected (a traceback is printed).
"""

import argparse
import sys
import traceback
from pathlib import Path
from typing import List, Optional

import numpy as np

from config.config_loader import ConfigLoader
from datagen.dataset import save_dataset
from datagen.flows import gradient_flow_family, localization_dataset, noisy_flow_family, random_cyclic_flow
from datagen.partition import planted_partition
from experiments.interpolation import run_interpolation_experiment
from experiments.localization import run_localization_experiment
from graphs.graph_io import read_flow_file, read_graph_file, write_flow_file
from graphs.hodge import hodge_decompose
from utils.errors import HodgeFlowError
from utils.metrics_calculator import MetricsCalculator

DATAGEN_KINDS = ("localization", "cyclic-family", "gradient-family")


def _add_config_args(parser: argparse.ArgumentParser):
    parser.add_argument('--config', help='JSON file overriding the section defaults')
    parser.add_argument('--set', action='append', default=[], metavar='KEY=VALUE',
                        help='single override, value parsed as JSON (repeatable)')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Hodge-Laplacian flow signal processing')
    parser.add_argument('--defaults', help='YAML defaults file (default: config/config.yaml)')
    subparsers = parser.add_subparsers(dest='command', required=True)

    datagen = subparsers.add_parser('datagen', help='generate a synthetic flow dataset')
    datagen.add_argument('--kind', choices=DATAGEN_KINDS, required=True)
    datagen.add_argument('--n', type=int, required=True, help='number of flows')
    datagen.add_argument('--seed', type=int, default=0)
    datagen.add_argument('--graph', help='graph file (families only; default: planted partition)')
    datagen.add_argument('--base-flow', help='base flow file for cyclic-family')
    datagen.add_argument('--out', required=True, help='dataset directory')
    _add_config_args(datagen)

    decompose = subparsers.add_parser('decompose', help='split a flow into cyclic and gradient parts')
    decompose.add_argument('--graph', required=True)
    decompose.add_argument('--flow', required=True)
    decompose.add_argument('--out', required=True, help='directory for cyclic.txt and gradient.txt')

    for name, help_text in (('interpolate', 'run the flow interpolation experiment'),
                            ('localize', 'run the source localization experiment')):
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument('--output-dir', help='results directory (default: output_dir of the config)')
        sub.add_argument('--quiet', action='store_true', help='suppress progress output')
        _add_config_args(sub)

    evaluate = subparsers.add_parser('eval', help='score predictions')
    evaluate.add_argument('--truth', help='true flow file')
    evaluate.add_argument('--pred', help='predicted flow file')
    evaluate.add_argument('--eval-edges', help='file of edge indices to score (default: all edges)')
    evaluate.add_argument('--labels-true', help='file of true labels')
    evaluate.add_argument('--labels-pred', help='file of predicted labels')
    return parser


def _partition_from(settings: dict, seed: int):
    return planted_partition(settings["k"], settings["nodes_per"], settings["p"], settings["q"],
                             seed, settings["max_retries"])


def run_datagen(args, loader: ConfigLoader) -> int:
    settings = loader.resolve_experiment_config("datagen", args.config, args.set)

    if args.kind == "localization":
        pg = _partition_from(settings, args.seed)
        dataset = localization_dataset(pg, args.n, (settings["t_min"], settings["t_max"]),
                                       settings["noise_std"], args.seed)
    else:
        graph = read_graph_file(args.graph) if args.graph else _partition_from(settings, args.seed).graph
        if args.kind == "cyclic-family":
            base = read_flow_file(args.base_flow, graph) if args.base_flow else random_cyclic_flow(graph, args.seed)
            dataset = noisy_flow_family(base, graph, args.n, settings["cyclic_std"], settings["gradient_std"],
                                        settings["smooth_order"], args.seed)
        else:
            dataset = gradient_flow_family(graph, args.n, settings["potential_std"],
                                           settings["smooth_order"], args.seed)

    path = save_dataset(dataset, args.out)
    print(f"💾 {len(dataset)} {args.kind} flows on {dataset.graph.num_edges} edges saved to {path}")
    return 0


def run_decompose(args) -> int:
    graph = read_graph_file(args.graph)
    flow = read_flow_file(args.flow, graph)
    cyclic, gradient = hodge_decompose(flow, graph)

    out = Path(args.out)
    write_flow_file(cyclic, out / "cyclic.txt")
    write_flow_file(gradient, out / "gradient.txt")
    print(f"✅ Decomposed {graph.num_edges}-edge flow into {out / 'cyclic.txt'} and {out / 'gradient.txt'}")
    return 0


def run_interpolate(args, loader: ConfigLoader) -> int:
    config = loader.resolve_experiment_config("interpolation_experiment", args.config, args.set)
    rows = run_interpolation_experiment(config, args.output_dir, loader, verbose=not args.quiet)
    print(f"✅ {len(rows)} result rows written")
    return 0


def run_localize(args, loader: ConfigLoader) -> int:
    config = loader.resolve_experiment_config("localization_experiment", args.config, args.set)
    rows, curves = run_localization_experiment(config, args.output_dir, loader, verbose=not args.quiet)
    print(f"✅ {len(rows)} result rows and {len(curves)} curve rows written")
    return 0


def _read_column(path: str, dtype) -> np.ndarray:
    try:
        return np.loadtxt(path, dtype=dtype, ndmin=1)
    except OSError:
        raise FileNotFoundError(f"File not found: {path}")


def run_eval(args) -> int:
    if args.truth or args.pred:
        if not (args.truth and args.pred):
            raise ValueError("PSNR needs both --truth and --pred")
        truth = read_flow_file(args.truth)
        pred = read_flow_file(args.pred)
        edges = _read_column(args.eval_edges, np.int64) if args.eval_edges else np.arange(truth.shape[0])
        print(f"psnr_db {MetricsCalculator.psnr(truth, pred, edges)!r}")
        return 0
    if args.labels_true and args.labels_pred:
        value = MetricsCalculator.accuracy(_read_column(args.labels_true, np.int64),
                                           _read_column(args.labels_pred, np.int64))
        print(f"accuracy {value!r}")
        return 0
    raise ValueError("eval needs --truth/--pred or --labels-true/--labels-pred")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    try:
        loader = ConfigLoader(args.defaults)
        if args.command == 'datagen':
            return run_datagen(args, loader)
        if args.command == 'decompose':
            return run_decompose(args)
        if args.command == 'interpolate':
            return run_interpolate(args, loader)
        if args.command == 'localize':
            return run_localize(args, loader)
        return run_eval(args)

    except KeyboardInterrupt:
        print("\n⚠️  Interrupted by user.")
        return 130
    except (HodgeFlowError, ValueError, FileNotFoundError) as e:
        print(f"❌ {args.command} failed: {e}")
        return 1
    except Exception as e:
        print(f"❌ Unexpected error during {args.command}: {e}")
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
