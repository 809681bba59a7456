"""Reading and writing Bonn-format signal files, and the classification
problems built from the five Bonn sets.

A Bonn file is plain ASCII text with one sample per line. The archive
stores integers; synthesized signals are written with full float
precision so that they reload unchanged.
"""

import os
import re
import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from ..errors import ConfigError, EmptyFile, MissingSet, ParseError
from ..mfdfa import TimeSeries
from ..utils import smart_open, write_text
from .base import Dataset

mfeeglogger = logging.getLogger('mfeeg')

BONN_SAMPLE_RATE = 173.61
BONN_LENGTH = 4097

POSITIVE = 1
NEGATIVE = -1

_NUMBER = re.compile(r'[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?')


def read_signal_file(path: str) -> np.ndarray:
    """Parses one number per line. Surrounding whitespace, CRLF endings and
    blank lines are tolerated.

    :raises ParseError: On the first line that is not a decimal number or
        not valid UTF-8.
    :raises EmptyFile: If the file holds no sample.
    """
    values = []
    with smart_open(path, 'rb') as fin:
        for lineno, raw in enumerate(fin, 1):
            try:
                token = raw.decode('utf-8').strip()
            except UnicodeDecodeError:
                raise ParseError(path, lineno, repr(raw.strip())) from None
            if not token:
                continue
            if not _NUMBER.fullmatch(token):
                raise ParseError(path, lineno, token)
            values.append(float(token))

    if not values:
        raise EmptyFile(f'{path}: no samples')
    return np.array(values)


def _signal_id(path: str) -> str:
    name = os.path.basename(path)
    for suffix in ('.gz', '.txt', '.asc', '.TXT'):
        if name.endswith(suffix):
            name = name[:-len(suffix)]
    return name


def load_bonn_signal(path: str, label: Optional[str] = None,
                     expected_length: Optional[int] = BONN_LENGTH) -> TimeSeries:
    """Loads a Bonn EEG segment sampled at 173.61 Hz.

    :param path: The signal file.
    :param label: Class tag to attach, usually the set name.
    :param expected_length: A different length is logged as a warning.
    """
    samples = read_signal_file(path)
    if expected_length is not None and samples.size != expected_length:
        mfeeglogger.warning(f'{path}: {samples.size} samples, expected {expected_length}')
    return TimeSeries(samples, sample_rate=BONN_SAMPLE_RATE, label=label,
                      signal_id=_signal_id(path))


def load_signal_file(path: str, sample_rate: float = 1.0) -> TimeSeries:
    """Loads any one-sample-per-line file without a length expectation."""
    return TimeSeries(read_signal_file(path), sample_rate=sample_rate, signal_id=_signal_id(path))


def format_sample(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def write_bonn_signal(series: Union[TimeSeries, np.ndarray], path: str):
    """Writes one sample per line. Integral values are written as integers,
    all others with the shortest repr that parses back to the same float."""
    samples = series.samples if isinstance(series, TimeSeries) else np.asarray(series, dtype=float)
    write_text(path, ''.join(f'{format_sample(v)}\n' for v in samples))


@dataclass
class BonnSet:
    """The loaded signals of one set."""
    set_id: str
    signals: List[TimeSeries]

    def __post_init__(self):
        lengths = {len(s) for s in self.signals}
        if len(lengths) > 1:
            mfeeglogger.warning(f'Set {self.set_id}: signals of unequal lengths {sorted(lengths)}')

    def __len__(self) -> int:
        return len(self.signals)


class BonnDataset(Dataset):
    """
    One of the five Bonn recording sets, a folder of ASCII segments.
    """

    def load_signal(self, path: str) -> TimeSeries:
        return load_bonn_signal(path, label=self.name)

    def load(self, root: Optional[str] = None) -> BonnSet:
        signals = self.signals(root)
        if self.expected_signals is not None and len(signals) != self.expected_signals:
            mfeeglogger.warning(
                f'Set {self.name}: {len(signals)} signals, expected {self.expected_signals}')
        mfeeglogger.info(f'Set {self.name}: loaded {len(signals)} signal(s)')
        return BonnSet(self.name, signals)


@dataclass(frozen=True)
class ClassificationProblem:
    """Two groups of sets to discriminate.

    :param problem_id: Roman numeral I..VIII.
    :param positive_sets: Sets labelled +1.
    :param negative_sets: Sets labelled -1; the seizure set E wherever it takes part.
    """
    problem_id: str
    positive_sets: Tuple[str, ...]
    negative_sets: Tuple[str, ...]
    description: str = ''

    def __post_init__(self):
        if not self.positive_sets or not self.negative_sets:
            raise ConfigError(f'Problem {self.problem_id}: both classes need a set')
        if set(self.positive_sets) & set(self.negative_sets):
            raise ConfigError(f'Problem {self.problem_id}: a set cannot be in both classes')

    @property
    def class_names(self) -> Tuple[str, str]:
        return ''.join(self.positive_sets), ''.join(self.negative_sets)

    @property
    def sets(self) -> Tuple[str, ...]:
        return self.positive_sets + self.negative_sets

    def __str__(self):
        pos, neg = self.class_names
        return f'{self.problem_id} ({pos},{neg})'


PROBLEMS = {
    p.problem_id: p for p in [
        ClassificationProblem('I', ('A', ), ('E', ), 'Healthy with eyes open vs seizure'),
        ClassificationProblem('II', ('B', ), ('E', ), 'Healthy with eyes closed vs seizure'),
        ClassificationProblem('III', ('C', ), ('E', ), 'Hippocampal interictal vs seizure'),
        ClassificationProblem('IV', ('D', ), ('E', ), 'Epileptogenic interictal vs seizure'),
        ClassificationProblem('V', ('A', 'B'), ('E', ), 'Healthy vs seizure'),
        ClassificationProblem('VI', ('C', 'D'), ('E', ), 'Interictal vs seizure'),
        ClassificationProblem('VII', ('A', 'B'), ('C', 'D'), 'Healthy vs interictal'),
        ClassificationProblem('VIII', ('A', 'B', 'C', 'D'), ('E', ), 'Seizure free vs seizure'),
    ]
}

_ARABIC = {str(i): pid for i, pid in enumerate(PROBLEMS, 1)}


def get_problem(problem_id: Union[str, ClassificationProblem]) -> ClassificationProblem:
    """Looks up a problem by roman numeral ('VII', 'cp-vii') or number ('7')."""
    if isinstance(problem_id, ClassificationProblem):
        return problem_id
    key = str(problem_id).strip().upper()
    if key.startswith('CP-') or key.startswith('CP'):
        key = key[3:] if key.startswith('CP-') else key[2:]
    key = _ARABIC.get(key, key)
    if key not in PROBLEMS:
        raise ConfigError(f'Unknown classification problem {problem_id!r}, pick one of {list(PROBLEMS)}')
    return PROBLEMS[key]


@dataclass
class LabeledDataset:
    """The signals of a problem with their +1/-1 class labels. No features
    are computed at this stage."""
    problem: ClassificationProblem
    signals: List[TimeSeries]
    labels: np.ndarray
    set_ids: List[str]

    @property
    def problem_id(self) -> str:
        return self.problem.problem_id

    @property
    def n_positive(self) -> int:
        return int(np.sum(self.labels == POSITIVE))

    @property
    def n_negative(self) -> int:
        return int(np.sum(self.labels == NEGATIVE))

    def __len__(self) -> int:
        return len(self.signals)


def assemble_problem(problem_id: Union[str, ClassificationProblem],
                     sets: Mapping[str, BonnSet]) -> LabeledDataset:
    """Collects the signals of a problem, positive sets first.

    :param problem_id: See `get_problem`.
    :param sets: Loaded sets keyed by set name.
    :raises MissingSet: If a referenced set has not been loaded.
    """
    problem = get_problem(problem_id)
    signals: List[TimeSeries] = []
    labels: List[int] = []
    set_ids: List[str] = []

    for names, label in ((problem.positive_sets, POSITIVE), (problem.negative_sets, NEGATIVE)):
        for name in names:
            if name not in sets:
                raise MissingSet(f'Problem {problem.problem_id} needs set {name}, which is not loaded')
            members = sets[name].signals
            signals.extend(members)
            labels.extend([label] * len(members))
            set_ids.extend([name] * len(members))

    ds = LabeledDataset(problem, signals, np.array(labels, dtype=int), set_ids)
    mfeeglogger.info(f'Problem {problem}: {ds.n_positive} positive, {ds.n_negative} negative signals')
    return ds


def load_sets(names, datasets: Mapping[str, BonnDataset],
              root: Optional[str] = None) -> Dict[str, BonnSet]:
    """Loads the named sets from `datasets` (a registry such as `mfeeg.dataset.SETS`)."""
    loaded = {}
    for name in names:
        key = name.upper()
        if key not in datasets:
            raise MissingSet(f'Unknown set {name!r}, pick one of {sorted(datasets)}')
        loaded[key] = datasets[key].load(root)
    return loaded
