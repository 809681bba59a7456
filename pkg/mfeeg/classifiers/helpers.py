"""Feature scaling, the RBF kernel and input checks shared by the classifiers."""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import ConfigError, DimensionMismatch, NonFiniteSample, SingleClass
from .base import NEGATIVE, POSITIVE


def check_features(features: Sequence, n_features: Optional[int] = None) -> np.ndarray:
    """Returns `features` as a finite 2-D float array.

    :param n_features: If given, the required number of columns.
    """
    x = np.asarray(features, dtype=float)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    if x.ndim != 2:
        raise DimensionMismatch(f'Expected a 2-D feature matrix, got shape {x.shape}')
    if n_features is not None and x.shape[1] != n_features:
        raise DimensionMismatch(f'Expected {n_features} features, got {x.shape[1]}')
    if not np.all(np.isfinite(x)):
        raise NonFiniteSample('Feature matrix contains non-finite values')
    return x


def check_labels(labels: Sequence, n_samples: int) -> np.ndarray:
    """Returns +1/-1 `labels` as an int array; both classes must be present."""
    y = np.asarray(labels).ravel()
    if y.size != n_samples:
        raise DimensionMismatch(f'{n_samples} samples but {y.size} labels')
    if not np.all((y == POSITIVE) | (y == NEGATIVE)):
        raise ConfigError('Labels must be +1 or -1')
    if np.unique(y).size < 2:
        raise SingleClass(f'Training set holds only class {int(y[0]):+d}')
    return y.astype(int)


@dataclass(frozen=True, eq=False)
class ZScoreScaler:
    """Per-feature standardization learned from a training set.
    Constant features get a unit scale so that they map to 0."""
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, features: np.ndarray) -> 'ZScoreScaler':
        x = np.asarray(features, dtype=float)
        std = x.std(axis=0)
        std[std == 0] = 1.0
        return cls(mean=x.mean(axis=0), std=std)

    def transform(self, features: np.ndarray) -> np.ndarray:
        x = check_features(features, n_features=self.mean.size)
        return (x - self.mean) / self.std


def rbf_kernel(c: Sequence[float], d: Sequence[float], gamma: float) -> float:
    """``exp(-gamma * ||c - d||**2)``."""
    c = np.asarray(c, dtype=float).ravel()
    d = np.asarray(d, dtype=float).ravel()
    if c.shape != d.shape:
        raise DimensionMismatch(f'Cannot compare vectors of sizes {c.size} and {d.size}')
    if gamma <= 0:
        raise ConfigError(f'gamma must be positive, got {gamma}')
    return float(np.exp(-gamma * np.sum((c - d) ** 2)))


def rbf_kernel_matrix(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    """The RBF kernel between every row of `a` and every row of `b`."""
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatch(f'Cannot compare {a.shape[1]}-D and {b.shape[1]}-D vectors')
    return np.exp(-gamma * cdist(a, b, 'sqeuclidean'))
