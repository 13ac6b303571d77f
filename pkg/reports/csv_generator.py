import csv
from dataclasses import astuple, dataclass, fields
from pathlib import Path
from typing import Dict, Iterable, List

import pandas as pd

from utils.metrics_calculator import MetricsCalculator

RESULT_HEADER = ['method', 'shift', 'dataset', 'seed', 'metric', 'value', 'wall_time_s']
CURVE_HEADER = ['shift', 'seed', 'epoch', 'train_loss', 'test_accuracy']


@dataclass(frozen=True, order=True)
class ResultRow:
    method: str
    shift: str
    dataset: str
    seed: int
    metric: str
    value: float
    wall_time_s: float = 0.0


@dataclass(frozen=True, order=True)
class CurveRow:
    shift: str
    seed: int
    epoch: int
    train_loss: float
    test_accuracy: float


def format_value(value) -> str:
    """Round-trip exact text for floats (``inf``, ``-inf`` and ``nan`` included)."""
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


class CSVReportGenerator:
    def __init__(self, results_dir: str = "results"):
        self.results_dir = Path(results_dir)
        self.results_dir.mkdir(parents=True, exist_ok=True)

    def _write_rows(self, rows: Iterable, header: List[str], filename: str) -> str:
        output_path = self.results_dir / filename

        with open(output_path, 'w', newline='', encoding='utf-8') as csvfile:
            writer = csv.writer(csvfile, lineterminator='\n')
            writer.writerow(header)
            for row in sorted(rows):
                writer.writerow([format_value(v) for v in astuple(row)])

        return str(output_path)

    def generate_results_report(self, rows: Iterable[ResultRow], filename: str = "results.csv") -> str:
        return self._write_rows(rows, RESULT_HEADER, filename)

    def generate_curve_report(self, rows: Iterable[CurveRow], filename: str = "curves.csv") -> str:
        return self._write_rows(rows, CURVE_HEADER, filename)

    def generate_summary_report(self, rows: Iterable[ResultRow], filename: str = "summary.csv") -> str:
        output_path = self.results_dir / filename
        frame = pd.DataFrame([astuple(r) for r in sorted(rows)], columns=[f.name for f in fields(ResultRow)])
        summary = MetricsCalculator.summarize(frame)
        summary.to_csv(output_path, index=False, float_format="%.17g", lineterminator="\n")
        return str(output_path)

    @staticmethod
    def read_results(path: str) -> pd.DataFrame:
        return pd.read_csv(path, float_precision="round_trip")

    def write_all(self, rows: List[ResultRow], curves: List[CurveRow] = None) -> Dict[str, str]:
        written = {
            'results': self.generate_results_report(rows),
            'summary': self.generate_summary_report(rows),
        }
        if curves is not None:
            written['curves'] = self.generate_curve_report(curves)
        return written
