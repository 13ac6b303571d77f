"""Flow interpolation experiment.

For every seed: draw ``1 + max(train_sizes)`` flows from the configured
family, hide a fraction of the edges of the first one, train the learned
interpolators on nested prefixes of the rest (observed on the same edges)
and score every method by PSNR on the hidden edges.
"""

import threading
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from baselines.interpolator_factory import InterpolatorFactory
from config.config_loader import ConfigLoader
from datagen.flows import gradient_flow_family, noisy_flow_family, random_cyclic_flow
from datagen.masks import mask_flow
from datagen.partition import planted_partition
from graphs.graph import Graph
from graphs.graph_io import read_flow_file, read_graph_file
from reports.csv_generator import CSVReportGenerator, ResultRow
from utils.errors import ConfigError, ZeroPeakError
from utils.metrics_calculator import MetricsCalculator

FLOW_KINDS = ("cyclic", "gradient")
NO_SHIFT = "none"


class InterpolationExperiment:
    def __init__(self, config: Dict[str, Any], config_loader: ConfigLoader = None, verbose: bool = True):
        self.config_loader = config_loader or ConfigLoader()
        self.config = config
        self.verbose = verbose
        self.lock = threading.Lock()
        self._validate()
        self.graph, self.base_flow = self._load_graph_and_base()
        self.config_hash: Optional[str] = None

    def _log(self, message: str):
        if self.verbose:
            with self.lock:
                print(message)

    def _validate(self):
        cfg = self.config
        supported = InterpolatorFactory.get_supported_methods()
        unknown = [m for m in cfg["methods"] if m not in supported]
        if unknown:
            raise ConfigError(f"Unsupported methods {unknown}. Supported methods: {supported}")
        if cfg["flow_kind"] not in FLOW_KINDS:
            raise ConfigError(f"flow_kind must be one of {FLOW_KINDS}, got '{cfg['flow_kind']}'")
        if not cfg["train_sizes"] or any(int(n) < 1 for n in cfg["train_sizes"]):
            raise ConfigError(f"train_sizes must be positive integers, got {cfg['train_sizes']}")
        if not cfg["seeds"]:
            raise ConfigError("at least one seed is required")
        if cfg["flow_file"] and not cfg["graph_file"]:
            raise ConfigError("flow_file needs a graph_file")

    def _load_graph_and_base(self) -> Tuple[Graph, Optional[np.ndarray]]:
        cfg = self.config
        if cfg["graph_file"]:
            graph = read_graph_file(cfg["graph_file"])
        else:
            graph = planted_partition(cfg["k"], cfg["nodes_per"], cfg["p"], cfg["q"], cfg["graph_seed"],
                                      self.config_loader.get_datagen_config()["max_retries"]).graph
        if cfg["flow_kind"] == "gradient":
            return graph, None
        if cfg["flow_file"]:
            return graph, read_flow_file(cfg["flow_file"], graph)
        return graph, random_cyclic_flow(graph, cfg["graph_seed"])

    def sample_flows(self, n: int, seed: int) -> List[np.ndarray]:
        defaults = self.config_loader.get_datagen_config()
        if self.config["flow_kind"] == "cyclic":
            dataset = noisy_flow_family(self.base_flow, self.graph, n, defaults["cyclic_std"],
                                        defaults["gradient_std"], defaults["smooth_order"], seed)
        else:
            dataset = gradient_flow_family(self.graph, n, defaults["potential_std"],
                                           defaults["smooth_order"], seed)
        return [record.flow for record in dataset.records]

    def _method_config(self, method: str) -> Dict[str, Any]:
        if InterpolatorFactory.is_learned(method):
            return dict(self.config_loader.get_rnn_config(), **self.config["rnn"])
        return dict(self.config_loader.get_baseline_config(method), **self.config[method])

    def _dataset_id(self, size: int) -> str:
        return f"{self.config['dataset_id']}-{self.config['flow_kind']}-n{size}@{self.config_hash}"

    def run_single_seed(self, seed: int) -> List[ResultRow]:
        cfg = self.config
        sizes = sorted(int(n) for n in cfg["train_sizes"])
        flows = self.sample_flows(1 + sizes[-1], seed)
        truth, train = flows[0], flows[1:]
        f_obs, mask = mask_flow(truth, cfg["unobserved_fraction"], seed)
        hidden = mask.unobserved(self.graph.num_edges)
        eval_set = hidden if hidden.size else np.arange(self.graph.num_edges)

        rows = []
        for method in cfg["methods"]:
            unsigned = MetricsCalculator.is_unsigned(method)
            target = np.abs(truth) if unsigned else truth
            shift = method.rsplit("-", 1)[0] if InterpolatorFactory.is_learned(method) else NO_SHIFT
            settings = self._method_config(method)

            if InterpolatorFactory.is_learned(method):
                runs = []
                for size in sizes:
                    interpolator = InterpolatorFactory.create_interpolator(method, self.graph, settings, seed=seed)
                    interpolator.fit(train[:size], mask)
                    runs.append((size, interpolator.timed_interpolate(f_obs, mask)))
            else:
                interpolator = InterpolatorFactory.create_interpolator(method, self.graph, settings)
                response = interpolator.timed_interpolate(f_obs, mask)
                runs = [(size, response) for size in sizes]

            for size, response in runs:
                if not response['success']:
                    self._log(f"    ❌ {method} (seed {seed}, n={size}): {response['error']}")
                    continue
                try:
                    value = MetricsCalculator.psnr(target, response['prediction'], eval_set)
                except ZeroPeakError as e:
                    self._log(f"    ❌ {method} (seed {seed}, n={size}): {e}")
                    continue
                wall = response['wall_time_s'] if cfg["record_timing"] else 0.0
                rows.append(ResultRow(method, shift, self._dataset_id(size), seed, "psnr_db", value, wall))
                self._log(f"    ✅ {method} seed={seed} n={size}: PSNR {value:.2f} dB")
        return rows

    def run(self, output_dir: Optional[str] = None) -> List[ResultRow]:
        output_dir = output_dir or self.config["output_dir"]
        self.config_hash = ConfigLoader.write_resolved(self.config, output_dir)
        seeds = [int(s) for s in self.config["seeds"]]

        self._log("🚀 Interpolation experiment")
        self._log("=" * 60)
        self._log(f"📊 {self.graph.num_nodes} nodes, {self.graph.num_edges} edges, "
                  f"methods {self.config['methods']}, sizes {self.config['train_sizes']}, seeds {seeds}")

        rows: List[ResultRow] = []
        workers = int(self.config["workers"])
        if workers > 1 and len(seeds) > 1:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                future_to_seed = {executor.submit(self.run_single_seed, seed): seed for seed in seeds}
                for i, future in enumerate(as_completed(future_to_seed), 1):
                    rows.extend(future.result())
                    self._log(f"✅ seed {future_to_seed[future]} done ({i}/{len(seeds)})")
        else:
            for seed in seeds:
                rows.extend(self.run_single_seed(seed))

        written = CSVReportGenerator(output_dir).write_all(rows)
        self._log(f"💾 Results saved to {written['results']}")
        return sorted(rows)


def run_interpolation_experiment(config: Dict[str, Any], output_dir: Optional[str] = None,
                                 config_loader: ConfigLoader = None, verbose: bool = True) -> List[ResultRow]:
    return InterpolationExperiment(config, config_loader, verbose).run(output_dir)
