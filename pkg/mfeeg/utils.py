import os
import gzip
import json
import math
import hashlib
import logging
import multiprocessing as mp
from argparse import Namespace
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import portalocker
from tabulate import tabulate
import colorama

try:
    from .version import __version__
except ImportError:  # source checkout that was never built
    __version__ = '0.0.0'


# Where the Bonn EEG archive lives.
# Define the environment variable $MFEEG_DIR, or use the default of ~/.mfeeg/bonn.
#
# Querying for a HOME environment variable can result in None (e.g., on Windows)
# in which case the os.path.join() throws a TypeError. Using expanduser() is
# a safe way to get the user's home folder.
USERHOME = os.path.expanduser("~")
MFEEG_DIR = os.environ.get('MFEEG_DIR', os.path.join(USERHOME, '.mfeeg', 'bonn'))

IS_WINDOWS = os.name == 'nt'

mfeeglogger = logging.getLogger('mfeeg')


class Color:
    ENABLE_COLORS = True

    @staticmethod
    def format(msg: str, color: str) -> str:
        """Returns a colored version of the given message string.

        :param msg: The string to Color.format.
        :param color: The color specifier i.e. 'red', 'blue', 'green', etc.
        :return: A colored version of the string if the output is a terminal.
        """
        if not Color.ENABLE_COLORS:
            return msg
        _ansi_str = getattr(colorama.Fore, color.upper(), None)
        if _ansi_str:
            return f'{_ansi_str}{msg}{colorama.Style.RESET_ALL}'

        return msg


def get_seed(seed: Optional[int] = None) -> Optional[int]:
    """Resolves the RNG seed used for fold assignment and synthesis.

    An explicit `seed` wins. Otherwise $MFEEG_SEED is consulted, falling back
    to 12345; the value 'none' (any case) leaves the RNG unseeded.
    """
    if seed is not None:
        return seed
    env_seed = os.environ.get('MFEEG_SEED', '12345')
    return None if env_seed.lower() == 'none' else int(env_seed)


def smart_open(file, mode='rt', encoding='utf-8'):
    """Convenience function for reading compressed or plain text files.
    :param file: The file to read.
    :param mode: The file mode (read, write).
    :param encoding: The file encoding.
    """
    if 'b' in mode:
        encoding = None
    newline = None if encoding is None else "\n"
    if str(file).endswith('.gz'):
        return gzip.open(file, mode=mode, encoding=encoding, newline=newline)
    return open(file, mode=mode, encoding=encoding, newline=newline)


def get_md5sum(path: str) -> str:
    md5 = hashlib.md5()
    with open(path, 'rb') as infile:
        for line in infile:
            md5.update(line)
    return md5.hexdigest()


def resolve_n_jobs(n_jobs: int, n_tasks: int) -> int:
    """Decides on the number of worker processes.

    :param n_jobs: 0 picks automatically, 1 disables multi-processing and
    any other positive value is taken as is.
    :param n_tasks: Upper bound on useful workers.
    :return: The number of workers to launch.
    """
    if IS_WINDOWS and n_jobs != 1:
        mfeeglogger.warning('Parallel jobs are not supported on Windows.')
        return 1
    if n_jobs == 0:
        # Divide by two to ignore hyper-threading
        n_max_jobs = mp.cpu_count() // 2
        n_jobs = 1 if n_max_jobs == 0 else min(n_max_jobs, n_tasks)
    return max(1, min(n_jobs, max(n_tasks, 1)))


def run_tasks(fn: Callable, tasks: Sequence[Tuple], n_jobs: int = 1) -> List[Any]:
    """Applies `fn` to every argument tuple in `tasks`, optionally on a pool
    of forked workers. The returned list follows the order of `tasks`.
    """
    n_jobs = resolve_n_jobs(n_jobs, len(tasks))
    if n_jobs == 1:
        return [fn(*args) for args in tasks]

    # NOTE: This only works on Linux/Mac OS X but not Windows. Windows only
    # supports `spawn` backend which requires things to be called
    # from within __main__.
    mfeeglogger.info(f'Launching {n_jobs} parallel workers.')
    with mp.get_context('fork').Pool(n_jobs) as pool:
        jobs = [pool.apply_async(fn, args) for args in tasks]
        # Keep the order deterministic
        return [j.get() for j in jobs]


def jsonify(obj: Any) -> Any:
    """Recursively converts numpy scalars/arrays to plain Python objects.
    Non-finite floats become `None` so that the output stays valid JSON."""
    if isinstance(obj, dict):
        return {str(k): jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonify(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return value if math.isfinite(value) else None
    return obj


def dumps_json(obj: Any) -> str:
    return json.dumps(jsonify(obj), indent=1, ensure_ascii=False) + '\n'


def write_text(path: str, content: str):
    """Writes `content` to `path` while holding an exclusive lock on it so
    that concurrent runs never interleave a file."""
    outdir = os.path.dirname(path)
    if outdir:
        os.makedirs(outdir, exist_ok=True)
    with portalocker.Lock(path, mode='w', timeout=60, encoding='utf-8', newline='\n') as fout:
        fout.write(content)


def write_json(path: str, obj: Any):
    write_text(path, dumps_json(obj))


def read_json(path: str) -> Any:
    with smart_open(path) as fin:
        return json.load(fin)


def write_csv(path: str, frame: pd.DataFrame, float_format: str = '%.10g'):
    write_text(path, frame.to_csv(index=False, float_format=float_format, lineterminator='\n'))


def format_table(rows: List[Dict[str, Any]], args: Namespace) -> str:
    """Formats a list of homogeneous records with `tabulate`, honouring
    `args.format` (text, latex or json) and `args.width`."""
    if args.format == 'json':
        return json.dumps(jsonify(rows), indent=4, ensure_ascii=False)

    tablefmt = args.format
    if tablefmt == 'text':
        tablefmt = 'fancy_grid'
    elif tablefmt == 'latex':
        # Use booktabs
        tablefmt = 'latex_booktabs'

    if not rows:
        return ''

    headers = list(rows[0].keys())
    body = [[row[h] for h in headers] for row in rows]
    if tablefmt == 'fancy_grid':
        headers = [Color.format(h, 'cyan') for h in headers]

    return tabulate(
        body, headers=headers, tablefmt=tablefmt,
        stralign='center', numalign='center',
        floatfmt=f'.{args.width}f')


def print_table(rows: List[Dict[str, Any]], args: Namespace, title: Optional[str] = None):
    """Prints out a nicely formatted table."""
    if title and args.format != 'json':
        print(Color.format(title, 'yellow'))
    print(format_table(rows, args))
    print()
