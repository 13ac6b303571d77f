import math
from typing import Iterable, Sequence

import numpy as np
import pandas as pd

from .errors import EmptyEvalSetError, LengthMismatchError, ZeroPeakError

# interpolators that only see |f|; they are scored against |f_true|
UNSIGNED_METHODS = frozenset({"kriging", "linegraph-rnn"})

SUMMARY_KEYS = ["method", "shift", "dataset", "metric"]


class MetricsCalculator:
    @staticmethod
    def psnr(f_true: np.ndarray, f_pred: np.ndarray, eval_set: Iterable[int]) -> float:
        """10 log10(peak^2 / MSE) in dB.

        The peak is max |f_true| over all edges; the MSE runs over ``eval_set``
        only. A perfect reconstruction returns +inf. An all-zero truth with a
        nonzero error has no finite PSNR and raises ZeroPeakError.
        """
        f_true = np.asarray(f_true, dtype=float)
        f_pred = np.asarray(f_pred, dtype=float)
        if f_true.shape != f_pred.shape:
            raise LengthMismatchError(f"truth has shape {f_true.shape}, prediction {f_pred.shape}")
        index = np.asarray(list(eval_set), dtype=np.int64)
        if index.size == 0:
            raise EmptyEvalSetError("PSNR needs at least one evaluated edge")

        mse = float(np.mean((f_true[index] - f_pred[index]) ** 2))
        if mse == 0.0:
            return math.inf
        peak = float(np.max(np.abs(f_true)))
        if peak == 0.0:
            raise ZeroPeakError("PSNR is undefined: the true flow is zero but the prediction is not")
        return 10.0 * math.log10(peak ** 2 / mse)

    @staticmethod
    def accuracy(labels_true: Sequence[int], labels_pred: Sequence[int]) -> float:
        labels_true = np.asarray(labels_true)
        labels_pred = np.asarray(labels_pred)
        if labels_true.shape != labels_pred.shape:
            raise LengthMismatchError(
                f"{labels_true.shape[0]} true labels but {labels_pred.shape[0]} predictions"
            )
        if labels_true.size == 0:
            raise EmptyEvalSetError("accuracy needs at least one label")
        return float(np.mean(labels_true == labels_pred))

    @staticmethod
    def is_unsigned(method: str) -> bool:
        return method in UNSIGNED_METHODS

    @staticmethod
    def summarize(results: pd.DataFrame) -> pd.DataFrame:
        """Mean, std and count of every (method, shift, dataset, metric) group."""
        if results.empty:
            return pd.DataFrame(columns=SUMMARY_KEYS + ["unsigned", "mean", "std", "count"])
        grouped = (
            results.groupby(SUMMARY_KEYS, sort=True)["value"]
            .agg(["mean", "std", "count"])
            .reset_index()
        )
        grouped.insert(len(SUMMARY_KEYS), "unsigned", grouped["method"].map(MetricsCalculator.is_unsigned))
        return grouped


psnr = MetricsCalculator.psnr
accuracy = MetricsCalculator.accuracy
