"""The 14 singularity-spectrum features of a signal.

======  ==========================================================
Name    Definition
======  ==========================================================
f1      h(2), the classical Hurst exponent
f2      alpha at the spectrum peak
f3      alpha_max
f4      alpha_min
f5      (alpha_max + alpha_min) / 2
f6      alpha_max - alpha_min, the spectrum width
f7      alpha_peak - alpha_min
f8      alpha_peak - alpha_max
f9      f(alpha_max)
f10     f(alpha_min)
f11     (f(alpha_max) + f(alpha_min)) / 2
f12     f(alpha_max) - f(alpha_min)
f13     f(alpha_peak) - f(alpha_min)
f14     f(alpha_peak) - f(alpha_max)
======  ==========================================================

Under the ``table-consistent`` convention f7 and f8 trade places, so that
f7 is ``alpha_peak - alpha_max`` (never positive) and f8 is
``alpha_peak - alpha_min`` (never negative).
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from .errors import ConfigError, InsufficientScales, MissingQ2
from .mfdfa import MfdfaConfig, MfdfaResult, TimeSeries, mfdfa
from .spectrum import spectrum_descriptors
from .utils import run_tasks

mfeeglogger = logging.getLogger('mfeeg')

N_FEATURES = 14
FEATURE_NAMES = tuple(f'f{i}' for i in range(1, N_FEATURES + 1))

CONVENTIONS = ('literal', 'table-consistent')


def check_convention(convention: str) -> str:
    if convention not in CONVENTIONS:
        raise ConfigError(f'Unknown feature convention {convention!r}, pick one of {CONVENTIONS}')
    return convention


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """The 14 features of one signal, in the order f1..f14."""
    values: np.ndarray
    signal_id: str
    label: Optional[str] = None
    convention: str = 'literal'

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (N_FEATURES, ):
            raise ConfigError(f'Expected {N_FEATURES} feature values, got shape {values.shape}')
        object.__setattr__(self, 'values', values)

    def __getitem__(self, key: Union[int, str]) -> float:
        """Looks up a feature by name ('f7') or by 1-based number (7)."""
        if isinstance(key, str):
            return float(self.values[FEATURE_NAMES.index(key)])
        if not 1 <= key <= N_FEATURES:
            raise IndexError(key)
        return float(self.values[key - 1])

    def as_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = dict(zip(FEATURE_NAMES, self.values.tolist()))
        d['label'] = self.label
        d['signal_id'] = self.signal_id
        return d


def extract_features(result: MfdfaResult, convention: str = 'literal') -> FeatureVector:
    """Computes the features of an analysed signal.

    :param result: The output of `mfeeg.mfdfa.mfdfa`.
    :param convention: 'literal' or 'table-consistent', see the module docs.
    :raises MissingQ2: If q = 2 is not on the analysis grid.
    :raises InsufficientScales: If h(2) could not be fitted.
    """
    check_convention(convention)
    try:
        h2 = result.hurst.at(2.0)
    except KeyError:
        raise MissingQ2(f'{result.series_id}: q = 2 is not on the q grid') from None
    if not np.isfinite(h2):
        raise InsufficientScales(f'{result.series_id}: h(2) could not be estimated')

    d = spectrum_descriptors(result.spectrum)

    to_min = d.alpha_peak - d.alpha_min
    to_max = d.alpha_peak - d.alpha_max
    if convention == 'table-consistent':
        to_min, to_max = to_max, to_min

    values = np.array([
        h2,
        d.alpha_peak,
        d.alpha_max,
        d.alpha_min,
        (d.alpha_max + d.alpha_min) / 2,
        d.alpha_max - d.alpha_min,
        to_min,
        to_max,
        d.f_at_alpha_max,
        d.f_at_alpha_min,
        (d.f_at_alpha_max + d.f_at_alpha_min) / 2,
        d.f_at_alpha_max - d.f_at_alpha_min,
        d.f_at_peak - d.f_at_alpha_min,
        d.f_at_peak - d.f_at_alpha_max,
    ])
    return FeatureVector(values=values, signal_id=result.series_id,
                         label=result.label, convention=convention)


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """Feature vectors of many signals, one row per signal."""
    values: np.ndarray
    signal_ids: List[str]
    labels: List[Optional[str]]
    convention: str = 'literal'

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).reshape(-1, N_FEATURES)
        object.__setattr__(self, 'values', values)
        if not len(self.signal_ids) == len(self.labels) == values.shape[0]:
            raise ConfigError('Feature rows, signal ids and labels differ in number')

    @classmethod
    def from_vectors(cls, vectors: Sequence[FeatureVector]) -> 'FeatureMatrix':
        conventions = {v.convention for v in vectors}
        if len(conventions) > 1:
            raise ConfigError(f'Mixed feature conventions: {sorted(conventions)}')
        return cls(
            values=np.array([v.values for v in vectors]).reshape(-1, N_FEATURES),
            signal_ids=[v.signal_id for v in vectors],
            labels=[v.label for v in vectors],
            convention=conventions.pop() if conventions else 'literal')

    def __len__(self) -> int:
        return self.values.shape[0]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.values, columns=list(FEATURE_NAMES))
        frame['label'] = self.labels
        frame['signal_id'] = self.signal_ids
        return frame

    def to_records(self) -> List[Dict[str, Any]]:
        return [
            {**dict(zip(FEATURE_NAMES, row.tolist())), 'label': label, 'signal_id': sid}
            for row, label, sid in zip(self.values, self.labels, self.signal_ids)]


def _analyse_and_extract(series: TimeSeries, config: MfdfaConfig, convention: str) -> FeatureVector:
    return extract_features(mfdfa(series, config), convention)


def extract_feature_matrix(signals: Sequence[TimeSeries],
                           config: Optional[MfdfaConfig] = None,
                           convention: str = 'literal',
                           n_jobs: int = 1) -> FeatureMatrix:
    """Analyses every signal and stacks its features.

    :param signals: The signals to analyse.
    :param config: MFDFA parameters; the defaults if `None`.
    :param convention: The f7/f8 convention.
    :param n_jobs: Worker processes, see `mfeeg.utils.resolve_n_jobs`.
    """
    check_convention(convention)
    config = config if config is not None else MfdfaConfig()
    mfeeglogger.info(f'Extracting features from {len(signals)} signal(s)')
    tasks = [(series, config, convention) for series in signals]
    vectors = run_tasks(_analyse_and_extract, tasks, n_jobs)
    return FeatureMatrix.from_vectors(vectors)
