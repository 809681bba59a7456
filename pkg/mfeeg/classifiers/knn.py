"""k-nearest-neighbour majority vote on z-scored features."""

from dataclasses import dataclass
from typing import Any, Dict, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import ConfigError, KTooLarge
from .base import NEGATIVE, POSITIVE, Classifier, Signature, TrainedModel
from .helpers import ZScoreScaler, check_features, check_labels

K_NEIGHBORS = 5


class KNNSignature(Signature):
    """A convenience class to represent the reproducibility signature for kNN.

    :param args: key-value dictionary passed from the actual classifier instance.
    """
    def __init__(self, args: dict):
        """`KNNSignature` initializer."""
        super().__init__(args)
        self._abbr.update({'k': 'nn', 'metric': 'd'})
        self.info.update({'k': args['k'], 'metric': 'euclidean'})


@dataclass(frozen=True, eq=False)
class KnnModel(TrainedModel):
    """The standardized training set and its labels."""
    features: np.ndarray
    labels: np.ndarray
    k: int
    feature_scaler: ZScoreScaler

    def neighbours(self, features: np.ndarray) -> np.ndarray:
        """Indices of the k nearest training samples per query row; equal
        distances keep the lower training index first."""
        x = self.feature_scaler.transform(features)
        dist = cdist(x, self.features, 'sqeuclidean')
        return np.argsort(dist, axis=1, kind='stable')[:, :self.k]

    def decision_function(self, features: np.ndarray) -> np.ndarray:
        """Returns the vote margin, the mean +1/-1 label of the neighbours."""
        return self.labels[self.neighbours(features)].mean(axis=1)


def train_knn(features: Sequence, labels: Sequence, k: int = K_NEIGHBORS) -> KnnModel:
    """Stores the standardized training set.

    :raises KTooLarge: If `k` exceeds the number of training samples.
    """
    if k < 1 or k % 2 == 0:
        raise ConfigError(f'k must be a positive odd number, got {k}')
    x = check_features(features)
    y = check_labels(labels, x.shape[0])
    if k > x.shape[0]:
        raise KTooLarge(f'k = {k} exceeds the {x.shape[0]} training samples')
    scaler = ZScoreScaler.fit(x)
    return KnnModel(features=scaler.transform(x), labels=y, k=k, feature_scaler=scaler)


def predict_knn(model: KnnModel, x: Sequence[float]) -> int:
    """Majority label among the k nearest neighbours of a single vector."""
    vote = model.decision_function(np.asarray(x, dtype=float).reshape(1, -1))[0]
    return POSITIVE if vote >= 0 else NEGATIVE


class KNN(Classifier):
    """k-nearest-neighbour classifier with Euclidean distance.

    :param k: Number of neighbours, odd.
    """

    _SIGNATURE_TYPE = KNNSignature

    name = 'knn'

    def __init__(self, k: int = K_NEIGHBORS):
        """`KNN` initializer."""
        if k < 1 or k % 2 == 0:
            raise ConfigError(f'k must be a positive odd number, got {k}')
        self.k = k

    def fit(self, features: np.ndarray, labels: np.ndarray) -> KnnModel:
        return train_knn(features, labels, self.k)

    def hyperparameters(self) -> Dict[str, Any]:
        return {'k': self.k}
