from typing import Any, Dict, Optional, Sequence

import numpy as np

from graphs.graph import Graph
from graphs.operators import ShiftOperator
from models.hodge_rnn import HodgeRNN, RnnTrainingConfig
from utils.errors import EmptyDatasetError

from .base_interpolator import BaseInterpolator, Observed, as_mask


class RnnInterpolator(BaseInterpolator):
    """Recurrent interpolator behind the common interpolator surface.

    Training flows are observed on the same edge set as the flow being
    interpolated. The linegraph variant reports |f_obs| on observed edges.
    """

    def __init__(self, graph: Graph, config: Dict[str, Any] = None, shift: str = "hodge",
                 seed: Optional[int] = None):
        super().__init__(f"{shift}-rnn", graph)
        settings = dict(config or {}, shift=shift)
        self.cfg = RnnTrainingConfig.from_dict(settings)
        self.model = HodgeRNN(ShiftOperator.build(graph, shift), self.cfg)
        self.unsigned = shift == "linegraph"
        self.seed = seed

    def fit(self, train_flows: Sequence[np.ndarray], observed: Observed) -> "RnnInterpolator":
        if len(train_flows) == 0:
            raise EmptyDatasetError("no training flows supplied")
        mask = as_mask(observed)
        self.model.fit([(np.asarray(f, dtype=float), mask) for f in train_flows], seed=self.seed)
        return self

    def interpolate(self, f_obs: np.ndarray, observed: Observed) -> np.ndarray:
        f_hat = self.model.predict(f_obs, observed)
        if self.unsigned:
            known = np.array(as_mask(observed).observed, dtype=np.int64)
            f_hat[known] = np.abs(f_hat[known])
        return f_hat
