"""Soft-margin RBF support vector machine trained by sequential minimal
optimization.

The dual is solved over ``beta_i = alpha_i y_i``, which turns the box
``0 <= alpha_i <= C`` into ``A_i <= beta_i <= B_i`` with ``A_i = min(0, y_i C)``
and ``B_i = max(0, y_i C)``, and the equality constraint into
``sum(beta) = 0``. Each step moves mass between the pair of maximal KKT
violation: the sample of largest gradient that can still grow and the one
of smallest gradient that can still shrink.
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from ..errors import ConfigError, NonConvergence
from .base import NEGATIVE, POSITIVE, Classifier, Signature, TrainedModel
from .helpers import ZScoreScaler, check_features, check_labels, rbf_kernel_matrix

KKT_TOL = 1e-3
MAX_ITER = 100_000
C_PENALTY = 1.0

# Floor for the curvature of a pair whose two samples coincide
MIN_CURVATURE = 1e-12


class SVMSignature(Signature):
    """A convenience class to represent the reproducibility signature for the SVM.

    :param args: key-value dictionary passed from the actual classifier instance.
    """
    def __init__(self, args: dict):
        """`SVMSignature` initializer."""
        super().__init__(args)
        self._abbr.update({
            'kernel': 'ker',
            'c': 'C',
            'gamma': 'g',
            'tol': 'tol',
        })

        self.info.update({
            'kernel': 'rbf',
            'c': args['c_penalty'],
            'gamma': 'auto' if args['gamma'] is None else args['gamma'],
            'tol': args['tol'],
        })


@dataclass(frozen=True, eq=False)
class SvmModel(TrainedModel):
    """A trained SVM. Support vectors are stored already standardized.

    :param dual_coefficients: ``alpha_i y_i`` of each support vector.
    :param support_labels: The +1/-1 label of each support vector.
    :param iterations: SMO steps taken.
    """
    support_vectors: np.ndarray
    dual_coefficients: np.ndarray
    support_labels: np.ndarray
    bias: float
    gamma: float
    c_penalty: float
    feature_scaler: ZScoreScaler
    iterations: int = 0

    def decision_function(self, features: np.ndarray) -> np.ndarray:
        x = self.feature_scaler.transform(features)
        kernel = rbf_kernel_matrix(x, self.support_vectors, self.gamma)
        return kernel @ self.dual_coefficients + self.bias

    @property
    def n_support(self) -> int:
        return self.dual_coefficients.size


def _smo(kernel: np.ndarray, y: np.ndarray, c_penalty: float,
         tol: float, max_iter: int) -> Tuple[np.ndarray, float, int]:
    """Solves the dual for a precomputed kernel matrix.

    :return: beta, bias and the number of steps taken.
    """
    lower = np.minimum(0.0, y * c_penalty)
    upper = np.maximum(0.0, y * c_penalty)
    beta = np.zeros_like(y)
    # gradient of the dual objective, y - K beta
    grad = y.copy()
    i = j = 0
    gap = np.inf

    for it in range(max_iter):
        can_grow = beta < upper
        can_shrink = beta > lower
        i = int(np.argmax(np.where(can_grow, grad, -np.inf)))
        j = int(np.argmin(np.where(can_shrink, grad, np.inf)))
        gap = grad[i] - grad[j]
        if gap < tol:
            break

        curvature = max(kernel[i, i] + kernel[j, j] - 2 * kernel[i, j], MIN_CURVATURE)
        step = min(upper[i] - beta[i], beta[j] - lower[j], gap / curvature)
        beta[i] = min(beta[i] + step, upper[i])
        beta[j] = max(beta[j] - step, lower[j])
        grad -= step * (kernel[i] - kernel[j])
    else:
        raise NonConvergence(
            f'SMO did not reach KKT tolerance {tol:g} within {max_iter} steps '
            f'(C={c_penalty:g}, remaining gap {gap:.3e})')

    eps = 1e-8 * c_penalty
    free = (beta > lower + eps) & (beta < upper - eps)
    if free.any():
        bias = float(grad[free].mean())
    else:
        # every multiplier is at a bound: take the middle of the feasible interval
        bias = float((grad[i] + grad[j]) / 2)
    return beta, bias, it


def train_svm(features: Sequence, labels: Sequence, c_penalty: float = C_PENALTY,
              gamma: Optional[float] = None, tol: float = KKT_TOL,
              max_iter: int = MAX_ITER) -> SvmModel:
    """Trains an RBF SVM on z-scored features.

    :param features: One row per sample.
    :param labels: +1/-1 per sample, both classes present.
    :param c_penalty: Soft-margin penalty C.
    :param gamma: RBF width; `None` means 1 / number of features.
    :param tol: KKT tolerance.
    :param max_iter: Hard cap on SMO steps.
    :raises NonConvergence: If the KKT gap is still above `tol` after `max_iter` steps.
    """
    x = check_features(features)
    y = check_labels(labels, x.shape[0]).astype(float)
    if c_penalty <= 0:
        raise ConfigError(f'C must be positive, got {c_penalty}')
    gamma = 1.0 / x.shape[1] if gamma is None else gamma
    if gamma <= 0:
        raise ConfigError(f'gamma must be positive, got {gamma}')

    scaler = ZScoreScaler.fit(x)
    xs = scaler.transform(x)
    kernel = rbf_kernel_matrix(xs, xs, gamma)
    beta, bias, iterations = _smo(kernel, y, c_penalty, tol, max_iter)

    support = beta != 0
    return SvmModel(
        support_vectors=xs[support],
        dual_coefficients=beta[support],
        support_labels=y[support].astype(int),
        bias=bias,
        gamma=gamma,
        c_penalty=c_penalty,
        feature_scaler=scaler,
        iterations=iterations)


def predict_svm(model: SvmModel, x: Sequence[float]) -> Tuple[int, float]:
    """Classifies a single feature vector.

    :return: The label (+1 on a zero decision value) and the decision value.
    """
    value = float(model.decision_function(np.asarray(x, dtype=float).reshape(1, -1))[0])
    return (POSITIVE if value >= 0 else NEGATIVE), value


class SVM(Classifier):
    """RBF support vector machine.

    :param c_penalty: Soft-margin penalty C.
    :param gamma: RBF width; `None` means 1 / number of features at fit time.
    :param tol: KKT tolerance of SMO.
    :param max_iter: Hard cap on SMO steps.
    """

    _SIGNATURE_TYPE = SVMSignature

    name = 'svm'

    def __init__(self, c_penalty: float = C_PENALTY, gamma: Optional[float] = None,
                 tol: float = KKT_TOL, max_iter: int = MAX_ITER):
        """`SVM` initializer."""
        if c_penalty <= 0:
            raise ConfigError(f'C must be positive, got {c_penalty}')
        if gamma is not None and gamma <= 0:
            raise ConfigError(f'gamma must be positive, got {gamma}')
        self.c_penalty = c_penalty
        self.gamma = gamma
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, features: np.ndarray, labels: np.ndarray) -> SvmModel:
        return train_svm(features, labels, self.c_penalty, self.gamma, self.tol, self.max_iter)

    def hyperparameters(self) -> Dict[str, Any]:
        return {'C': self.c_penalty, 'gamma': self.gamma}
