# The five sets of the Bonn EEG archive. Each is a folder of 100 ASCII
# segments; the archive names the folders Z, O, N, F and S, which are
# accepted as aliases of A to E. The root folder is $MFEEG_DIR.
from typing import Dict, Iterable, Optional

from .base import Dataset  # noqa: F401
from .bonn import (BONN_LENGTH, BONN_SAMPLE_RATE, PROBLEMS, BonnDataset, BonnSet,  # noqa: F401
                   ClassificationProblem, LabeledDataset, assemble_problem, get_problem,
                   load_bonn_signal, load_signal_file, read_signal_file, write_bonn_signal)
from .bonn import load_sets as _load_sets

SETS = {
    'A': BonnDataset(
        'A', aliases=['Z'], expected_signals=100,
        description='Healthy volunteers, surface electrodes, eyes open'),
    'B': BonnDataset(
        'B', aliases=['O'], expected_signals=100,
        description='Healthy volunteers, surface electrodes, eyes closed'),
    'C': BonnDataset(
        'C', aliases=['N'], expected_signals=100,
        description='Seizure-free intervals, hippocampal formation of the opposite hemisphere'),
    'D': BonnDataset(
        'D', aliases=['F'], expected_signals=100,
        description='Seizure-free intervals, epileptogenic zone'),
    'E': BonnDataset(
        'E', aliases=['S'], expected_signals=100,
        description='Seizure activity'),
}


def load_sets(names: Iterable[str], root: Optional[str] = None) -> Dict[str, BonnSet]:
    """Loads the named sets (A..E) from `root`, default $MFEEG_DIR."""
    return _load_sets(names, SETS, root)


def available_sets(root: Optional[str] = None) -> Dict[str, bool]:
    return {name: ds.exists(root) for name, ds in SETS.items()}
