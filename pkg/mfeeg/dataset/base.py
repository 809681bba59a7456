"""
The base class for all types of signal collections.
"""
import os
from abc import ABCMeta, abstractmethod
from typing import List, Optional, Sequence

from ..errors import MissingSet
from ..mfdfa import TimeSeries
from ..utils import MFEEG_DIR

SIGNAL_SUFFIXES = ('.txt', '.txt.gz', '.asc')


class Dataset(metaclass=ABCMeta):
    def __init__(
        self,
        name: str,
        description: Optional[str] = None,
        aliases: Sequence[str] = (),
        expected_signals: Optional[int] = None,
    ):
        """
        Params come from the values in SETS.

        :param name: Name of the set, e.g. 'A'.
        :param description: Description of the recordings.
        :param aliases: Other directory names the set is distributed under.
        :param expected_signals: Number of signal files in a complete copy.
        """
        self.name = name
        self.description = description
        self.aliases = tuple(aliases)
        self.expected_signals = expected_signals

    def find_directory(self, root: Optional[str] = None) -> Optional[str]:
        """Returns the folder of this set under `root` (default: $MFEEG_DIR).

        The set name and its aliases are matched case-insensitively, so
        both `A/` and `z/` are found for set A.
        """
        root = root if root is not None else MFEEG_DIR
        if not os.path.isdir(root):
            return None
        wanted = {n.lower() for n in (self.name, ) + self.aliases}
        for entry in sorted(os.listdir(root)):
            path = os.path.join(root, entry)
            if entry.lower() in wanted and os.path.isdir(path):
                return path
        return None

    def exists(self, root: Optional[str] = None) -> bool:
        return self.find_directory(root) is not None

    def get_files(self, root: Optional[str] = None) -> List[str]:
        """
        Returns the sorted paths of the signal files of this set.

        :raises MissingSet: If the folder is absent or holds no signal file.
        """
        directory = self.find_directory(root)
        if directory is None:
            raise MissingSet(f'Set {self.name} not found under {root or MFEEG_DIR}')
        files = [
            os.path.join(directory, f) for f in sorted(os.listdir(directory))
            if f.lower().endswith(SIGNAL_SUFFIXES)
        ]
        if not files:
            raise MissingSet(f'Set {self.name}: no signal files in {directory}')
        return files

    @abstractmethod
    def load_signal(self, path: str) -> TimeSeries:
        """Reads a single signal file.

        :param path: The file to read.
        """
        pass

    def signals(self, root: Optional[str] = None) -> List[TimeSeries]:
        """
        Loads every signal of the set, labelled with the set name.
        """
        return [self.load_signal(path) for path in self.get_files(root)]
