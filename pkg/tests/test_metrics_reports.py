import math

import numpy as np
import pandas as pd
import pytest

from reports.csv_generator import CSVReportGenerator, CurveRow, ResultRow, format_value
from utils.errors import EmptyEvalSetError, LengthMismatchError, ZeroPeakError
from utils.metrics_calculator import MetricsCalculator, accuracy, psnr


def test_psnr_examples():
    truth = np.array([2.0, 0.0])
    assert psnr(truth, truth.copy(), [0, 1]) == math.inf
    assert psnr(truth, np.array([0.0, 0.0]), [0]) == pytest.approx(0.0, abs=1e-12)
    assert psnr(truth, np.array([1.0, 0.0]), [0]) == pytest.approx(6.0206, abs=1e-4)


def test_psnr_peak_uses_all_edges():
    truth = np.array([1.0, 0.0, 4.0])
    pred = np.array([0.0, 0.0, 4.0])
    assert psnr(truth, pred, [0]) == pytest.approx(10 * math.log10(16.0), rel=1e-12)


def test_psnr_zero_truth():
    assert psnr(np.zeros(2), np.zeros(2), [0]) == math.inf
    with pytest.raises(ZeroPeakError):
        psnr(np.zeros(2), np.array([1.0, 0.0]), [0])


def test_psnr_errors():
    with pytest.raises(EmptyEvalSetError):
        psnr(np.ones(2), np.ones(2), [])
    with pytest.raises(LengthMismatchError):
        psnr(np.ones(2), np.ones(3), [0])


@pytest.mark.parametrize("pred, expected", [
    ([0, 1, 2, 3, 4], 1.0),
    ([1, 2, 3, 4, 0], 0.0),
    ([0, 1, 2, 0, 0], 0.6),
])
def test_accuracy_examples(pred, expected):
    assert accuracy([0, 1, 2, 3, 4], pred) == pytest.approx(expected)


def test_accuracy_errors():
    with pytest.raises(LengthMismatchError):
        accuracy([0, 1], [0])
    with pytest.raises(EmptyEvalSetError):
        accuracy([], [])


def test_unsigned_methods():
    assert MetricsCalculator.is_unsigned("kriging")
    assert MetricsCalculator.is_unsigned("linegraph-rnn")
    assert not MetricsCalculator.is_unsigned("hodge-rnn")


def test_summarize_groups_by_method():
    frame = pd.DataFrame({
        "method": ["convopt", "convopt", "kriging"],
        "shift": ["none", "none", "none"],
        "dataset": ["d", "d", "d"],
        "seed": [0, 1, 0],
        "metric": ["psnr_db"] * 3,
        "value": [10.0, 20.0, 5.0],
        "wall_time_s": [0.0] * 3,
    })
    summary = MetricsCalculator.summarize(frame)
    assert list(summary.columns) == ["method", "shift", "dataset", "metric", "unsigned", "mean", "std", "count"]
    convopt = summary[summary["method"] == "convopt"].iloc[0]
    assert convopt["mean"] == 15.0 and convopt["count"] == 2 and not convopt["unsigned"]
    assert convopt["std"] == pytest.approx(np.std([10.0, 20.0], ddof=1))
    assert bool(summary[summary["method"] == "kriging"].iloc[0]["unsigned"])


def test_summarize_empty_frame():
    assert MetricsCalculator.summarize(pd.DataFrame()).empty


def test_format_value():
    assert format_value(math.inf) == "inf"
    assert format_value(-math.inf) == "-inf"
    assert format_value(0.1) == "0.1"
    assert format_value(3) == "3"
    assert format_value("hodge") == "hodge"


def test_results_csv_is_sorted_with_exact_header(tmp_path):
    rows = [
        ResultRow("kriging", "none", "d@abc", 1, "psnr_db", 3.25),
        ResultRow("convopt", "none", "d@abc", 1, "psnr_db", math.inf),
        ResultRow("convopt", "none", "d@abc", 0, "psnr_db", 1.0 / 3.0, 0.5),
    ]
    generator = CSVReportGenerator(str(tmp_path / "out"))
    path = generator.generate_results_report(rows)
    lines = open(path, encoding="utf-8").read().splitlines()
    assert lines[0] == "method,shift,dataset,seed,metric,value,wall_time_s"
    assert lines[1] == f"convopt,none,d@abc,0,psnr_db,{1.0 / 3.0!r},0.5"
    assert lines[2] == "convopt,none,d@abc,1,psnr_db,inf,0.0"
    assert lines[3].startswith("kriging,")

    frame = CSVReportGenerator.read_results(path)
    assert frame["value"].iloc[0] == 1.0 / 3.0
    assert frame["value"].iloc[1] == math.inf


def test_write_all_outputs(tmp_path):
    rows = [ResultRow("agnn", "hodge", "pp@abc", s, "accuracy", 0.5 + 0.1 * s) for s in range(3)]
    curves = [CurveRow("hodge", 0, epoch, 1.0 / (epoch + 1), 0.5) for epoch in range(4)]
    written = CSVReportGenerator(str(tmp_path)).write_all(rows, curves)
    assert set(written) == {"results", "summary", "curves"}

    curve_lines = open(written["curves"], encoding="utf-8").read().splitlines()
    assert curve_lines[0] == "shift,seed,epoch,train_loss,test_accuracy"
    assert len(curve_lines) == 5

    summary = pd.read_csv(written["summary"])
    assert len(summary) == 1
    assert summary["count"].iloc[0] == 3
    assert summary["mean"].iloc[0] == pytest.approx(0.6)


def test_write_all_is_byte_identical_on_rerun(tmp_path):
    rows = [ResultRow("convopt", "none", "d@abc", s, "psnr_db", 10.0 / (s + 1)) for s in range(4)]
    first = CSVReportGenerator(str(tmp_path / "a")).write_all(rows)
    second = CSVReportGenerator(str(tmp_path / "b")).write_all(list(reversed(rows)))
    for key in first:
        assert open(first[key], "rb").read() == open(second[key], "rb").read()
