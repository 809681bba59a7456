"""The base `Classifier`, `TrainedModel` and `Signature` classes to derive from.

`Classifier` holds the hyperparameters of a learner and produces an
immutable `TrainedModel` from a training set. Cross-validation and grid
search only talk to these two interfaces, so a correctly implemented
classifier works with the rest of the codebase.
"""

import logging
from abc import ABCMeta, abstractmethod
from typing import Any, Dict

import numpy as np

from ..utils import __version__

mfeeglogger = logging.getLogger('mfeeg')

POSITIVE = 1
NEGATIVE = -1


class Signature:
    """A convenience class to represent reproducibility signatures of an
    evaluation.

    :param args: key-value dictionary passed from the actual classifier instance,
    optionally extended with the `k_folds` and `seed` of the evaluation.
    """

    def __init__(self, args: dict):
        """`Signature` initializer."""
        self._abbr = {
            'version': 'v',
            'classifier': 'clf',
            'folds': 'k',
            'seed': 'rs',
            'scaling': 'sc',
        }

        # None's will be ignored
        self.info = {
            'version': __version__,
            'classifier': args.get('name', None),
            'folds': args.get('k_folds', None),
            'seed': args.get('seed', None),
            'scaling': 'zscore',
        }

    def format(self, short: bool = False) -> str:
        """Returns a string representation of the signature.

        :param short: If True, shortened signature is produced.
        :return: A string representation of the signature.
        """
        pairs = []
        keys = list(self.info.keys())
        # keep version always at end
        keys.remove('version')
        for name in keys + ['version']:
            value = self.info[name]
            if value is not None:
                if isinstance(value, bool):
                    value = 'yes' if value else 'no'
                elif isinstance(value, float):
                    value = f'{value:g}'
                final_name = self._abbr[name] if short else name
                pairs.append(f'{final_name}:{value}')

        return '|'.join(pairs)

    def update(self, key: str, value: Any):
        """Add a new item or update an existing one.

        :param key: The key to use in the dictionary.
        :param value: The associated value for the `key`.
        """
        self.info[key] = value

    def __str__(self):
        return self.format()

    def __repr__(self):
        return self.format()


class TrainedModel(metaclass=ABCMeta):
    """A fitted classifier. Instances are never modified after training and
    are safe to share between processes."""

    @abstractmethod
    def decision_function(self, features: np.ndarray) -> np.ndarray:
        """Returns one real score per row; non-negative means positive class."""
        pass

    def predict(self, features: np.ndarray) -> np.ndarray:
        """Returns a +1/-1 label per row of `features`."""
        scores = self.decision_function(features)
        return np.where(scores >= 0, POSITIVE, NEGATIVE)


class Classifier(metaclass=ABCMeta):
    """A base class for all classifiers."""

    # Each classifier should define its Signature class' name here
    _SIGNATURE_TYPE = Signature

    #: Registry key, also used in reports
    name = ''

    @abstractmethod
    def fit(self, features: np.ndarray, labels: np.ndarray) -> TrainedModel:
        """Trains on `features` (one row per sample) with +1/-1 `labels`.

        :return: A `TrainedModel`; the classifier itself is not modified.
        """
        pass

    @abstractmethod
    def hyperparameters(self) -> Dict[str, Any]:
        """Returns the tunable hyperparameters, for reports."""
        pass

    def get_signature(self, **extra) -> Signature:
        """Creates the signature of this classifier, extended with evaluation
        settings such as `k_folds` and `seed`."""
        return self._SIGNATURE_TYPE({**self.__dict__, 'name': self.name, **extra})

    def __repr__(self):
        params = ', '.join(f'{k}={v:g}' if isinstance(v, float) else f'{k}={v}'
                           for k, v in self.hyperparameters().items())
        return f'{self.__class__.__name__}({params})'
