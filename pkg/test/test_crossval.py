from typing import Any, Dict

import numpy as np
import pytest

from mfeeg.classifiers import KNN, SVM, Classifier, TrainedModel
from mfeeg.crossval import (DEFAULT_C_GRID, DEFAULT_GAMMA_GRID, ConfusionMatrix, Metrics,
                            compute_metrics, grid_search, k_fold_cv, knn_grid_search, search,
                            stratified_folds, subset_evaluator)
from mfeeg.errors import ClassTooSmall, ConfigError, NonConvergence, UndefinedMetric

EPSILON = 1e-9

test_metrics_cases = [
    # tp, tn, fp, fn, accuracy, sensitivity, specificity
    (50, 50, 0, 0, 100.0, 100.0, 100.0),
    (40, 45, 5, 10, 85.0, 80.0, 90.0),
    (39, 40, 1, 0, 98.75, 100.0, 40 / 41 * 100),
    (0, 10, 0, 0, 100.0, None, 100.0),
    (0, 0, 0, 0, None, None, None),
]


class ColumnModel(TrainedModel):
    """Scores every row by its first feature."""

    def decision_function(self, features):
        return np.asarray(features, dtype=float)[:, 0]


class ColumnClassifier(Classifier):
    name = 'column'

    def fit(self, features, labels):
        return ColumnModel()

    def hyperparameters(self) -> Dict[str, Any]:
        return {}


class ConstantModel(TrainedModel):
    def decision_function(self, features):
        return np.ones(len(features))


class ConstantClassifier(Classifier):
    name = 'constant'

    def fit(self, features, labels):
        return ConstantModel()

    def hyperparameters(self) -> Dict[str, Any]:
        return {}


def clouds(n=30, shift=4.0, seed=0):
    rng = np.random.default_rng(seed)
    x = np.vstack([rng.standard_normal((n, 2)) + shift, rng.standard_normal((n, 2))])
    return x, np.array([1] * n + [-1] * n)


@pytest.mark.parametrize("tp, tn, fp, fn, acc, sens, spec", test_metrics_cases)
def test_compute_metrics(tp, tn, fp, fn, acc, sens, spec):
    m = compute_metrics(ConfusionMatrix(tp=tp, tn=tn, fp=fp, fn=fn))
    for value, expected in zip((m.accuracy, m.sensitivity, m.specificity), (acc, sens, spec)):
        if expected is None:
            assert value is None
        else:
            assert abs(value - expected) < EPSILON


def test_undefined_metric():
    m = compute_metrics(ConfusionMatrix(tn=10))
    assert m.require('specificity') == 100.0
    with pytest.raises(UndefinedMetric):
        m.require('sensitivity')


def test_reported_rates_need_eighty_samples():
    # The smallest confusion matrix reproducing 98.75 / 100 / 97.56 (two
    # decimals) has 39 positive and 41 negative samples.
    found = []
    for total in range(2, 201):
        for n_pos in range(1, total):
            n_neg = total - n_pos
            for fp in range(n_neg + 1):
                m = compute_metrics(ConfusionMatrix(tp=n_pos, tn=n_neg - fp, fp=fp, fn=0))
                if (round(m.accuracy, 2), round(m.specificity, 2)) == (98.75, 97.56):
                    found.append((n_pos, 0, n_neg - fp, fp))
        if found:
            break
    assert found == [(39, 0, 40, 1)]


def test_metrics_are_consistent():
    rng = np.random.default_rng(5)
    for _ in range(50):
        tp, tn, fp, fn = (int(v) for v in rng.integers(1, 100, 4))
        m = compute_metrics(ConfusionMatrix(tp, tn, fp, fn))
        weighted = (m.sensitivity * (tp + fn) + m.specificity * (tn + fp)) / (tp + tn + fp + fn)
        assert abs(m.accuracy - weighted) < EPSILON


def test_confusion_from_predictions():
    cm = ConfusionMatrix.from_predictions([1, 1, -1, -1, 1], [1, -1, -1, 1, 1])
    assert cm.as_dict() == {'tp': 2, 'tn': 1, 'fp': 1, 'fn': 1}
    assert (cm + cm).total == 10


@pytest.mark.parametrize("n_pos, n_neg, k", [(100, 100, 10), (200, 100, 10), (37, 23, 5), (3, 3, 3)])
def test_stratified_fold_sizes(n_pos, n_neg, k):
    labels = np.array([1] * n_pos + [-1] * n_neg)
    folds = stratified_folds(labels, k, seed=7)
    assert sorted(set(folds.tolist())) == list(range(k))
    for cls in (1, -1):
        sizes = np.bincount(folds[labels == cls], minlength=k)
        assert sizes.max() - sizes.min() <= 1


def test_stratified_folds_seeded():
    labels = np.array([1] * 20 + [-1] * 20)
    assert np.array_equal(stratified_folds(labels, 5, 1), stratified_folds(labels, 5, 1))
    assert not np.array_equal(stratified_folds(labels, 5, 1), stratified_folds(labels, 5, 2))


def test_stratified_folds_errors():
    with pytest.raises(ClassTooSmall):
        stratified_folds(np.array([1] * 20 + [-1] * 4), 5)
    with pytest.raises(ConfigError):
        stratified_folds(np.array([1, -1] * 5), 1)


def test_cv_perfect_classifier():
    labels = np.array([1] * 20 + [-1] * 20)
    features = labels[:, None].astype(float)
    report = k_fold_cv(features, labels, 10, ColumnClassifier(), seed=0)
    assert report.metrics == Metrics(100.0, 100.0, 100.0)
    assert report.confusion.total == 40
    assert len(report.fold_confusions) == 10


def test_cv_constant_classifier():
    labels = np.array([1] * 20 + [-1] * 20)
    report = k_fold_cv(np.zeros((40, 1)), labels, 4, ConstantClassifier(), seed=0)
    assert report.metrics == Metrics(50.0, 100.0, 0.0)
    assert report.fold_mean_metrics == Metrics(50.0, 100.0, 0.0)


def test_cv_report():
    x, y = clouds()
    report = k_fold_cv(x, y, 5, SVM(c_penalty=1.0, gamma=0.5), seed=3, problem_id='I')
    d = report.to_dict()
    assert d['problem'] == 'I'
    assert d['classifier'] == 'svm'
    assert d['hyperparameters'] == {'C': 1.0, 'gamma': 0.5}
    assert d['confusion'] == report.confusion.as_dict()
    assert sum(cm['tp'] + cm['tn'] + cm['fp'] + cm['fn'] for cm in d['fold_confusions']) == 60
    assert report.accuracy > 95.0
    assert 'folds:5' in report.signature


def test_cv_deterministic():
    x, y = clouds(shift=1.0, seed=4)
    a = k_fold_cv(x, y, 5, SVM(gamma=0.5), seed=11).to_dict()
    b = k_fold_cv(x, y, 5, SVM(gamma=0.5), seed=11).to_dict()
    assert a == b


def test_grid_search_single_cell():
    x, y = clouds()
    result = grid_search(x, y, [2.0], [0.5], k_folds=5, seed=0)
    assert result.best.hyperparameters() == {'C': 2.0, 'gamma': 0.5}
    assert len(result.cells) == 1
    assert result.report.extra['grid'][0]['accuracy'] == result.report.accuracy


def test_grid_search_ties_go_to_small_values():
    x, y = clouds(shift=8.0)
    result = grid_search(x, y, [16.0, 1.0, 4.0], [1.0, 0.25], k_folds=5, seed=0)
    assert all(cell.accuracy == 100.0 for cell in result.cells)
    assert result.best.hyperparameters() == {'C': 1.0, 'gamma': 0.25}
    assert [c.hyperparameters['C'] for c in result.cells] == [1.0, 1.0, 4.0, 4.0, 16.0, 16.0]


def test_grid_search_scale_invariant():
    x, y = clouds(shift=1.0, seed=2)
    grid = dict(c_grid=[0.5, 8.0], gamma_grid=[0.1, 2.0], k_folds=5, seed=9)
    a = grid_search(x, y, **grid)
    b = grid_search(x * 1000.0, y, **grid)
    assert [c.accuracy for c in a.cells] == pytest.approx([c.accuracy for c in b.cells])


def test_non_converging_cell_is_disqualified():
    x, y = clouds(shift=1.0)
    result = search(x, y, [SVM(max_iter=1), SVM()], k_folds=5, seed=0)
    assert not result.cells[0].converged
    assert result.cells[0].accuracy is None
    assert result.cells[1].converged
    assert result.best is not None and result.best.max_iter > 1

    with pytest.raises(NonConvergence):
        search(x, y, [SVM(max_iter=1)], k_folds=5, seed=0)


def test_knn_grid_search():
    x, y = clouds()
    result = knn_grid_search(x, y, [5, 1, 3], k_folds=5, seed=0)
    assert [c.hyperparameters['k'] for c in result.cells] == [1, 3, 5]
    assert isinstance(result.best, KNN)
    assert result.report.classifier == 'knn'


def test_default_grids():
    assert DEFAULT_C_GRID[0] == 2.0 ** -5 and DEFAULT_C_GRID[-1] == 2.0 ** 15
    assert len(DEFAULT_C_GRID) == 11
    assert DEFAULT_GAMMA_GRID[0] == 2.0 ** -15 and DEFAULT_GAMMA_GRID[-1] == 2.0 ** 3
    assert len(DEFAULT_GAMMA_GRID) == 10


def test_subset_evaluator():
    x, y = clouds()
    noise = np.random.default_rng(0).standard_normal((60, 1))
    evaluate = subset_evaluator(np.hstack([noise, x]), y, k_folds=5, seed=0)
    assert evaluate([2, 3]) > evaluate([1])
