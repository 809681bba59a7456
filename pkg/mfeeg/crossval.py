"""Stratified k-fold cross-validation, hyperparameter grid search and the
confusion-matrix metrics.

The positive class is +1 (non-seizure) and the negative class -1
(seizure), so sensitivity is the rate of recognised non-seizure signals
and specificity the rate of recognised seizures.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from .classifiers import KNN, NEGATIVE, POSITIVE, SVM, Classifier
from .classifiers.helpers import check_features, check_labels
from .errors import ClassTooSmall, ConfigError, NonConvergence, UndefinedMetric
from .utils import run_tasks

mfeeglogger = logging.getLogger('mfeeg')

K_FOLDS = 10

#: 2^-5, 2^-3, ..., 2^15
DEFAULT_C_GRID = tuple(2.0 ** e for e in range(-5, 16, 2))
#: 2^-15, 2^-13, ..., 2^3
DEFAULT_GAMMA_GRID = tuple(2.0 ** e for e in range(-15, 4, 2))
DEFAULT_K_GRID = (1, 3, 5, 7, 9)


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    @classmethod
    def from_predictions(cls, truth: Sequence[int], predicted: Sequence[int]) -> 'ConfusionMatrix':
        truth = np.asarray(truth)
        predicted = np.asarray(predicted)
        return cls(
            tp=int(np.sum((truth == POSITIVE) & (predicted == POSITIVE))),
            tn=int(np.sum((truth == NEGATIVE) & (predicted == NEGATIVE))),
            fp=int(np.sum((truth == NEGATIVE) & (predicted == POSITIVE))),
            fn=int(np.sum((truth == POSITIVE) & (predicted == NEGATIVE))))

    def __add__(self, other: 'ConfusionMatrix') -> 'ConfusionMatrix':
        return ConfusionMatrix(self.tp + other.tp, self.tn + other.tn,
                               self.fp + other.fp, self.fn + other.fn)

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def as_dict(self) -> Dict[str, int]:
        return {'tp': self.tp, 'tn': self.tn, 'fp': self.fp, 'fn': self.fn}


@dataclass(frozen=True)
class Metrics:
    """Accuracy, sensitivity and specificity in percent. A metric whose
    denominator is zero is `None`."""
    accuracy: Optional[float]
    sensitivity: Optional[float]
    specificity: Optional[float]

    def require(self, name: str) -> float:
        """Returns a metric by name.

        :raises UndefinedMetric: If it is absent.
        """
        value = getattr(self, name)
        if value is None:
            raise UndefinedMetric(f'{name} is undefined: its denominator is 0')
        return value

    def as_dict(self) -> Dict[str, Optional[float]]:
        return {'accuracy': self.accuracy, 'sensitivity': self.sensitivity,
                'specificity': self.specificity}


def _percent(num: int, den: int) -> Optional[float]:
    return 100.0 * num / den if den > 0 else None


def compute_metrics(cm: ConfusionMatrix) -> Metrics:
    """accuracy = (TP + TN) / total, sensitivity = TP / (TP + FN) and
    specificity = TN / (TN + FP), all times 100."""
    return Metrics(
        accuracy=_percent(cm.tp + cm.tn, cm.total),
        sensitivity=_percent(cm.tp, cm.tp + cm.fn),
        specificity=_percent(cm.tn, cm.tn + cm.fp))


def _mean_defined(values: Sequence[Optional[float]]) -> Optional[float]:
    defined = [v for v in values if v is not None]
    return float(np.mean(defined)) if defined else None


@dataclass
class EvaluationReport:
    """Cross-validated performance of one classifier on one problem.

    Aggregate metrics are computed on the sum of the fold confusion
    matrices; `fold_mean_metrics` averages the per-fold metrics instead.
    """
    classifier: str
    hyperparameters: Dict[str, Any]
    k_folds: int
    seed: Optional[int]
    fold_confusions: List[ConfusionMatrix]
    signature: str = ''
    problem_id: Optional[str] = None
    feature_indices: Optional[List[int]] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def confusion(self) -> ConfusionMatrix:
        total = ConfusionMatrix()
        for cm in self.fold_confusions:
            total = total + cm
        return total

    @property
    def metrics(self) -> Metrics:
        return compute_metrics(self.confusion)

    @property
    def accuracy(self) -> float:
        return self.metrics.require('accuracy')

    @property
    def fold_mean_metrics(self) -> Metrics:
        per_fold = [compute_metrics(cm) for cm in self.fold_confusions]
        return Metrics(
            accuracy=_mean_defined([m.accuracy for m in per_fold]),
            sensitivity=_mean_defined([m.sensitivity for m in per_fold]),
            specificity=_mean_defined([m.specificity for m in per_fold]))

    def to_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = {
            'problem': self.problem_id,
            'classifier': self.classifier,
            'hyperparameters': self.hyperparameters,
            'features': self.feature_indices,
            'k_folds': self.k_folds,
            'seed': self.seed,
            'signature': self.signature,
            'metrics': self.metrics.as_dict(),
            'fold_mean_metrics': self.fold_mean_metrics.as_dict(),
            'confusion': self.confusion.as_dict(),
            'fold_confusions': [cm.as_dict() for cm in self.fold_confusions],
        }
        d.update(self.extra)
        return d


def stratified_folds(labels: Sequence, k_folds: int, seed: Optional[int] = None) -> np.ndarray:
    """Assigns every sample to one of `k_folds` folds.

    Each class is shuffled with a generator seeded by `seed` and dealt out
    round-robin, so per class the fold sizes differ by at most one.

    :return: The fold number of each sample.
    :raises ClassTooSmall: If a class has fewer than `k_folds` samples.
    """
    if k_folds < 2:
        raise ConfigError(f'Need at least 2 folds, got {k_folds}')
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    folds = np.empty(labels.size, dtype=int)
    for cls in np.unique(labels):
        members = np.flatnonzero(labels == cls)
        if members.size < k_folds:
            raise ClassTooSmall(
                f'Class {cls} has {members.size} samples, fewer than {k_folds} folds')
        folds[rng.permutation(members)] = np.arange(members.size) % k_folds
    return folds


def _evaluate_fold(classifier: Classifier, features: np.ndarray, labels: np.ndarray,
                   test_mask: np.ndarray) -> ConfusionMatrix:
    model = classifier.fit(features[~test_mask], labels[~test_mask])
    return ConfusionMatrix.from_predictions(labels[test_mask], model.predict(features[test_mask]))


def k_fold_cv(features: Sequence, labels: Sequence, k_folds: int = K_FOLDS,
              classifier: Optional[Classifier] = None, seed: Optional[int] = None,
              problem_id: Optional[str] = None, n_jobs: int = 1) -> EvaluationReport:
    """Cross-validates `classifier` with stratified folds.

    Every fold trains a fresh model, feature scaling included, on the
    remaining folds and tests on the held-out one.

    :param features: One row per sample.
    :param labels: +1/-1 per sample.
    :param classifier: Defaults to `SVM()`.
    :param seed: Seeds the fold assignment.
    :param n_jobs: Worker processes for the folds.
    """
    x = check_features(features)
    y = check_labels(labels, x.shape[0])
    classifier = classifier if classifier is not None else SVM()
    folds = stratified_folds(y, k_folds, seed)

    tasks = [(classifier, x, y, folds == fold) for fold in range(k_folds)]
    confusions = run_tasks(_evaluate_fold, tasks, n_jobs)

    return EvaluationReport(
        classifier=classifier.name,
        hyperparameters=classifier.hyperparameters(),
        k_folds=k_folds,
        seed=seed,
        fold_confusions=confusions,
        signature=classifier.get_signature(k_folds=k_folds, seed=seed).format(),
        problem_id=problem_id)


@dataclass
class GridCell:
    hyperparameters: Dict[str, Any]
    accuracy: Optional[float]
    converged: bool = True

    def as_dict(self) -> Dict[str, Any]:
        return {**self.hyperparameters, 'accuracy': self.accuracy, 'converged': self.converged}


@dataclass
class GridSearchResult:
    """The winning classifier, its cross-validation report and every cell."""
    best: Classifier
    report: EvaluationReport
    cells: List[GridCell]


def _evaluate_cell(classifier: Classifier, features: np.ndarray, labels: np.ndarray,
                   k_folds: int, seed: Optional[int],
                   problem_id: Optional[str]) -> Optional[EvaluationReport]:
    try:
        return k_fold_cv(features, labels, k_folds, classifier, seed, problem_id)
    except NonConvergence as e:
        mfeeglogger.warning(f'{classifier!r} disqualified: {e}')
        return None


def search(features: Sequence, labels: Sequence, candidates: Sequence[Classifier],
           k_folds: int = K_FOLDS, seed: Optional[int] = None,
           problem_id: Optional[str] = None, n_jobs: int = 1) -> GridSearchResult:
    """Cross-validates every candidate with the same folds and keeps the
    most accurate one; among equals the earliest candidate wins. A
    candidate whose training does not converge is disqualified.

    :raises NonConvergence: If no candidate converged.
    """
    if len(candidates) == 0:
        raise ConfigError('Empty hyperparameter grid')
    x = check_features(features)
    y = check_labels(labels, x.shape[0])

    mfeeglogger.info(f'Grid search over {len(candidates)} cell(s), {k_folds}-fold CV')
    tasks = [(clf, x, y, k_folds, seed, problem_id) for clf in candidates]
    reports = run_tasks(_evaluate_cell, tasks, n_jobs)

    cells = []
    best_idx = None
    for idx, (clf, report) in enumerate(zip(candidates, reports)):
        acc = None if report is None else report.accuracy
        cells.append(GridCell(clf.hyperparameters(), acc, converged=report is not None))
        if acc is not None and (best_idx is None or acc > cells[best_idx].accuracy):
            best_idx = idx

    if best_idx is None:
        raise NonConvergence('No cell of the grid converged')

    report = reports[best_idx]
    report.extra['grid'] = [cell.as_dict() for cell in cells]
    return GridSearchResult(best=candidates[best_idx], report=report, cells=cells)


def grid_search(features: Sequence, labels: Sequence,
                c_grid: Sequence[float] = DEFAULT_C_GRID,
                gamma_grid: Sequence[float] = DEFAULT_GAMMA_GRID,
                k_folds: int = K_FOLDS, seed: Optional[int] = None,
                problem_id: Optional[str] = None, n_jobs: int = 1) -> GridSearchResult:
    """Exhaustive (C, gamma) search for the RBF SVM. Ties go to the smaller
    C, then the smaller gamma."""
    if len(c_grid) == 0 or len(gamma_grid) == 0:
        raise ConfigError('C and gamma grids must be non-empty')
    candidates = [SVM(c_penalty=c, gamma=g) for c in sorted(c_grid) for g in sorted(gamma_grid)]
    return search(features, labels, candidates, k_folds, seed, problem_id, n_jobs)


def knn_grid_search(features: Sequence, labels: Sequence,
                    k_grid: Sequence[int] = DEFAULT_K_GRID,
                    k_folds: int = K_FOLDS, seed: Optional[int] = None,
                    problem_id: Optional[str] = None, n_jobs: int = 1) -> GridSearchResult:
    """Picks the number of neighbours by cross-validation; ties go to the smaller k."""
    candidates = [KNN(k) for k in sorted(k_grid)]
    return search(features, labels, candidates, k_folds, seed, problem_id, n_jobs)


def subset_evaluator(features: Sequence, labels: Sequence, k_folds: int = K_FOLDS,
                     seed: Optional[int] = None,
                     classifier: Optional[Classifier] = None,
                     n_jobs: int = 1) -> Callable[[List[int]], float]:
    """Returns a function mapping 1-based feature numbers to the CV accuracy
    of `classifier` (default `SVM()`) on those columns, for use with
    `mfeeg.stats.sequential_forward_select`."""
    x = check_features(features)
    y = check_labels(labels, x.shape[0])

    def evaluate(subset: List[int]) -> float:
        columns = [i - 1 for i in subset]
        return k_fold_cv(x[:, columns], y, k_folds, classifier, seed, n_jobs=n_jobs).accuracy

    return evaluate
