"""Feature ranking by Welch's two-sample t-test and sequential forward
selection of a feature subset."""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import special

from .errors import ClassTooSmall, ConfigError, NonFiniteSample, SingleClass
from .features import FEATURE_NAMES

mfeeglogger = logging.getLogger('mfeeg')

LN10 = math.log(10.0)

# Below this, log10(p) comes from a series expansion of the tail instead
P_UNDERFLOW = 1e-300


@dataclass(frozen=True)
class TTestResult:
    """Outcome of a two-sided Welch test.

    Unpacks as ``t, p = two_sample_t_test(a, b)``.

    :param t_statistic: Welch's t of a against b.
    :param p_value: Two-sided p value.
    :param log10_p: log10 of the p value, exact even where `p_value` underflows.
    :param df: Welch-Satterthwaite degrees of freedom.
    :param zero_variance: Both samples are constant, t is 0 (equal means)
    or infinite (different means).
    """
    t_statistic: float
    p_value: float
    log10_p: float
    df: float
    zero_variance: bool = False

    def __iter__(self) -> Iterator[float]:
        return iter((self.t_statistic, self.p_value))


def _check_sample(x: Sequence[float], name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if x.size < 2:
        raise ClassTooSmall(f'Sample {name} needs at least 2 values, got {x.size}')
    if not np.all(np.isfinite(x)):
        raise NonFiniteSample(f'Sample {name} contains non-finite values')
    return x


def tail_log10_p(t: float, df: float) -> float:
    """log10 of the two-sided p value for large |t|, where the p value itself
    underflows.

    Uses ``I_x(a, b) = x**a (1 - x)**b / (a B(a, b)) 2F1(a + b, 1; a + 1; x)``
    with ``x = df / (df + t**2)``, ``a = df / 2`` and ``b = 1 / 2``, evaluated
    in log space.
    """
    a, b = df / 2.0, 0.5
    x = df / (df + t * t)
    if x == 0:
        return -math.inf
    log_p = (a * math.log(x) + b * math.log1p(-x) - math.log(a) - special.betaln(a, b)
             + math.log(special.hyp2f1(a + b, 1.0, a + 1.0, x)))
    return log_p / LN10


def two_sided_p(t: float, df: float) -> Tuple[float, float]:
    """Returns the two-sided Student-t p value and its log10.

    ``p = I_{df / (df + t**2)}(df / 2, 1 / 2)``, the regularized incomplete
    beta function.
    """
    if math.isinf(t):
        return 0.0, -math.inf
    p = float(special.betainc(df / 2.0, 0.5, df / (df + t * t)))
    p = min(max(p, 0.0), 1.0)
    if p > P_UNDERFLOW:
        return p, math.log10(p)
    return p, tail_log10_p(t, df)


def two_sample_t_test(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """Welch's unequal-variance t-test of a against b.

    :raises ClassTooSmall: If a sample has fewer than 2 values.
    :raises NonFiniteSample: If a sample has NaN or infinite values.
    """
    a = _check_sample(a, 'a')
    b = _check_sample(b, 'b')
    n_a, n_b = a.size, b.size
    mean_diff = a.mean() - b.mean()
    se2_a = a.var(ddof=1) / n_a
    se2_b = b.var(ddof=1) / n_b
    se2 = se2_a + se2_b

    if se2 == 0:
        df = float(n_a + n_b - 2)
        if mean_diff == 0:
            return TTestResult(0.0, 1.0, 0.0, df, zero_variance=True)
        return TTestResult(math.copysign(math.inf, mean_diff), 0.0, -math.inf, df, zero_variance=True)

    t = float(mean_diff / math.sqrt(se2))
    df = float(se2 ** 2 / (se2_a ** 2 / (n_a - 1) + se2_b ** 2 / (n_b - 1)))
    p, log10_p = two_sided_p(t, df)
    return TTestResult(t, p, log10_p, df)


@dataclass(frozen=True)
class RankedFeature:
    """A feature with its t-test against the two classes.

    :param feature_index: 1-based feature number (1 is f1).
    :param class_means: (positive class, negative class) means.
    :param class_stds: (positive class, negative class) sample standard deviations.
    """
    feature_index: int
    t_statistic: float
    p_value: float
    log10_p: float
    class_means: Tuple[float, float]
    class_stds: Tuple[float, float]
    zero_variance: bool = False

    @property
    def name(self) -> str:
        return FEATURE_NAMES[self.feature_index - 1] if self.feature_index <= len(FEATURE_NAMES) \
            else f'f{self.feature_index}'


def rank_features(features: np.ndarray, labels: Sequence, positive_label=1) -> List[RankedFeature]:
    """Ranks the columns of `features` by decreasing |t| between the
    `positive_label` rows and the other rows. Ties keep the lower index first.

    :raises SingleClass: If `labels` holds a single class.
    """
    features = np.asarray(features, dtype=float)
    if features.ndim != 2:
        raise ConfigError(f'Feature matrix must be 2-D, got shape {features.shape}')
    labels = np.asarray(labels)
    if labels.shape[0] != features.shape[0]:
        raise ConfigError('Features and labels differ in number of rows')

    classes = np.unique(labels)
    if classes.size < 2:
        raise SingleClass(f'Only one class present: {classes.tolist()}')
    if classes.size > 2:
        raise ConfigError(f'Ranking needs exactly two classes, got {classes.tolist()}')
    if positive_label not in classes:
        raise SingleClass(f'Positive class {positive_label!r} absent from labels')

    is_pos = labels == positive_label
    ranked = []
    for j in range(features.shape[1]):
        pos, neg = features[is_pos, j], features[~is_pos, j]
        res = two_sample_t_test(pos, neg)
        ranked.append(RankedFeature(
            feature_index=j + 1,
            t_statistic=res.t_statistic,
            p_value=res.p_value,
            log10_p=res.log10_p,
            class_means=(float(pos.mean()), float(neg.mean())),
            class_stds=(float(pos.std(ddof=1)), float(neg.std(ddof=1))),
            zero_variance=res.zero_variance))

    ranked.sort(key=lambda r: (-abs(r.t_statistic), r.feature_index))
    return ranked


def ranking_frame(ranked: Sequence[RankedFeature], class_names: Tuple[str, str],
                  width: int = 2) -> pd.DataFrame:
    """Lays out a ranking as a table: rank, feature, mean +/- std of each
    class, t, p and log10 p."""
    rows = []
    for rank, r in enumerate(ranked, 1):
        row = {'rank': rank, 'feature': r.name}
        for name, mean, std in zip(class_names, r.class_means, r.class_stds):
            row[name] = f'{mean:.{width}f} ± {std:.{width}f}'
        row.update({'t': r.t_statistic, 'p': r.p_value, 'log10_p': r.log10_p})
        rows.append(row)
    return pd.DataFrame(rows)


@dataclass(frozen=True)
class SelectionResult:
    """Outcome of sequential forward selection.

    :param selected_indices: 1-based feature numbers in the order they were added.
    :param accuracy_trace: CV accuracy after each accepted addition.
    :param rejected: The first feature whose addition did not improve the
    accuracy, with that accuracy; `None` if every feature was accepted.
    """
    selected_indices: List[int]
    accuracy_trace: List[float]
    rejected: Optional[Tuple[int, float]] = None
    evaluations: int = field(default=0)

    @property
    def accuracy(self) -> float:
        return self.accuracy_trace[-1]


def sequential_forward_select(ranked: Sequence[RankedFeature],
                              evaluator: Callable[[List[int]], float]) -> SelectionResult:
    """Grows a subset in rank order while the accuracy strictly improves.

    Starts from the top-ranked feature and adds the next one as long as
    `evaluator` reports a strictly higher accuracy; the subset reached before
    the first non-improving addition is returned.

    :param ranked: Output of `rank_features`.
    :param evaluator: Maps a list of 1-based feature numbers to an accuracy.
    """
    if len(ranked) == 0:
        raise ConfigError('Nothing to select from')

    selected = [ranked[0].feature_index]
    trace = [float(evaluator(list(selected)))]
    mfeeglogger.info(f'SFS: {ranked[0].name} -> {trace[-1]:.2f}')
    rejected = None

    for candidate in ranked[1:]:
        subset = selected + [candidate.feature_index]
        acc = float(evaluator(list(subset)))
        if acc > trace[-1]:
            selected = subset
            trace.append(acc)
            mfeeglogger.info(f'SFS: + {candidate.name} -> {acc:.2f}')
        else:
            rejected = (candidate.feature_index, acc)
            break

    return SelectionResult(selected_indices=selected, accuracy_trace=trace,
                           rejected=rejected, evaluations=len(trace) + (rejected is not None))
