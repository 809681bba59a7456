#!/usr/bin/env python3

"""
mfeeg characterises signals by multifractal detrended fluctuation analysis
and classifies EEG segments of the Bonn archive from 14 features of their
singularity spectrum.

Subcommands:

    analyze   h(q), tau(q) and f(alpha) curves of signal files, folders or Bonn sets
    features  the 14-feature matrix of Bonn sets
    rank      t-test ranking of the features for classification problems
    run       ranking, forward selection, grid search and cross-validation
    synth     white noise, fractional Gaussian noise or a binomial cascade
"""

import os
import sys
import logging
import pathlib
import argparse
from typing import List, Optional

# Allows calling the script as a standalone utility
if __package__ is None and __name__ == '__main__':
    parent = pathlib.Path(__file__).absolute().parents[1]
    sys.path.insert(0, str(parent))
    __package__ = 'mfeeg'

from .classifiers import CLASSIFIERS
from .crossval import DEFAULT_C_GRID, DEFAULT_GAMMA_GRID, DEFAULT_K_GRID, K_FOLDS
from .dataset import PROBLEMS, SETS
from .errors import MfeegError
from .features import CONVENTIONS
from .pipeline import (PipelineConfig, ranking_rows, replay_manifest, run_analyze, run_features, run_rank,
                       run_run, run_synth)
from .utils import Color, __version__, get_seed, print_table

mfeeglogger = logging.getLogger('mfeeg')

try:
    # SIGPIPE is not available on Windows machines, throwing an exception.
    from signal import SIGPIPE  # type: ignore

    # If SIGPIPE is available, change behaviour to default instead of ignore.
    from signal import signal, SIG_DFL
    signal(SIGPIPE, SIG_DFL)
except ImportError:
    pass

OUTPUT_FORMATS = ['text', 'latex', 'json']


class ArgumentParser(argparse.ArgumentParser):
    """Reports usage errors with exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f'{self.prog}: error: {message}\n')


def _common_args() -> argparse.ArgumentParser:
    parent = ArgumentParser(add_help=False)

    io_args = parent.add_argument_group('Input/output related arguments')
    io_args.add_argument('--dataset-root', '-d', type=str, default=None,
                         help='Folder holding the Bonn sets A-E (or Z, O, N, F, S). '
                              'Defaults to $MFEEG_DIR, or ~/.mfeeg/bonn.')
    io_args.add_argument('--output-dir', '-o', type=str, default='mfeeg-output',
                         help='Where results are written (Default: %(default)s).')
    io_args.add_argument('--seed', type=int, default=None,
                         help='Seed for fold assignment and synthesis. Defaults to $MFEEG_SEED, or 12345.')
    io_args.add_argument('--jobs', '-j', type=int, default=argparse.SUPPRESS,
                         help='Worker processes; 0 picks automatically, 1 disables parallelism '
                              '(Default: 1). Not supported on Windows.')

    mfdfa_args = parent.add_argument_group('MFDFA related arguments')
    mfdfa_args.add_argument('--q-min', type=float, default=-5.0,
                            help='Smallest moment order (Default: %(default)s).')
    mfdfa_args.add_argument('--q-max', type=float, default=5.0,
                            help='Largest moment order (Default: %(default)s).')
    mfdfa_args.add_argument('--q-step', type=float, default=0.1,
                            help='Step of the q grid (Default: %(default)s).')
    mfdfa_args.add_argument('--scale-min', type=int, default=16,
                            help='Smallest segment length (Default: %(default)s).')
    mfdfa_args.add_argument('--scale-max', type=int, default=1024,
                            help='Largest segment length (Default: %(default)s).')
    mfdfa_args.add_argument('--scale-intervals', type=int, default=19,
                            help='Logarithmic intervals between the two scales (Default: %(default)s).')
    mfdfa_args.add_argument('--detrend-order', type=int, default=1,
                            help='Order of the detrending polynomial (Default: %(default)s).')
    mfdfa_args.add_argument('--feature-convention', choices=CONVENTIONS, default='literal',
                            help='Definition of f7/f8 (Default: %(default)s).')

    clf_args = parent.add_argument_group('Classification related arguments')
    clf_args.add_argument('--classifier', '-c', nargs='+', choices=list(CLASSIFIERS), default=['svm'],
                          help='Classifier(s) to evaluate on the selected features (Default: %(default)s).')
    clf_args.add_argument('--cv-folds', '-k', type=int, default=K_FOLDS,
                          help='Number of cross-validation folds (Default: %(default)s).')
    clf_args.add_argument('--c-grid', type=float, nargs='+', default=list(DEFAULT_C_GRID),
                          help='SVM penalties to search (Default: 2^-5, 2^-3, ..., 2^15).')
    clf_args.add_argument('--gamma-grid', type=float, nargs='+', default=list(DEFAULT_GAMMA_GRID),
                          help='RBF widths to search (Default: 2^-15, 2^-13, ..., 2^3).')
    clf_args.add_argument('--k-grid', type=int, nargs='+', default=list(DEFAULT_K_GRID),
                          help='kNN neighbour counts to search (Default: %(default)s).')

    report_args = parent.add_argument_group('Reporting related arguments')
    report_args.add_argument('--quiet', '-q', default=argparse.SUPPRESS, action='store_true',
                             help='Suppress verbose messages.')
    report_args.add_argument('--width', '-w', type=int, default=2,
                             help='Floating point width (Default: %(default)s).')
    report_args.add_argument('--no-color', '-nc', action='store_true',
                             help='Disable the occasional use of terminal colors.')
    report_args.add_argument('--format', '-f', default='text', choices=OUTPUT_FORMATS,
                             help='Set the terminal output format. This flag is overridden if the '
                                  'MFEEG_FORMAT environment variable is set to one of the valid choices '
                                  '(Default: %(default)s).')
    return parent


def parse_args(argv: Optional[List[str]] = None):
    parent = _common_args()
    arg_parser = ArgumentParser(
        prog='mfeeg',
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    arg_parser.add_argument('--manifest', '-m', type=str, default=None,
                            help='Re-run the command recorded in this manifest.json.')
    arg_parser.add_argument('--quiet', '-q', default=False, action='store_true',
                            help='Suppress verbose messages.')
    arg_parser.add_argument('--jobs', '-j', type=int, default=None,
                            help='Worker processes; 0 picks automatically (Default: 1).')
    arg_parser.add_argument('--version', '-V', action='version', version='%(prog)s {}'.format(__version__))

    sub = arg_parser.add_subparsers(dest='command', metavar='COMMAND')

    analyze = sub.add_parser('analyze', parents=[parent], help='Export h(q), tau(q) and f(alpha) curves.')
    analyze.add_argument('inputs', nargs='*', default=[],
                         help='Signal files or folders of signal files.')
    analyze.add_argument('--sets', '-s', nargs='+', default=[], choices=sorted(SETS),
                         type=str.upper, help='Bonn sets to analyse.')

    features = sub.add_parser('features', parents=[parent], help='Export the feature matrix of Bonn sets.')
    features.add_argument('--sets', '-s', nargs='+', default=sorted(SETS), choices=sorted(SETS),
                          type=str.upper, help='Bonn sets (Default: all).')

    for name, text in [('rank', 'Rank the features of classification problems.'),
                       ('run', 'Select features, tune and cross-validate classifiers.')]:
        cmd = sub.add_parser(name, parents=[parent], help=text)
        cmd.add_argument('problems', nargs='*', default=list(PROBLEMS),
                         help='Classification problems I..VIII (Default: all).')

    synth = sub.add_parser('synth', parents=[parent], help='Write a synthetic signal in Bonn format.')
    synth.add_argument('kind', choices=['white', 'fgn', 'cascade'], help='Type of signal.')
    synth.add_argument('--output', type=str, default=None,
                       help='Signal file to write (Default: <output-dir>/<signal name>.txt).')
    synth.add_argument('--length', '-n', type=int, default=16384,
                       help='Number of samples of white noise or fGn (Default: %(default)s).')
    synth.add_argument('--hurst', type=float, default=0.7,
                       help='Hurst exponent of the fGn (Default: %(default)s).')
    synth.add_argument('--levels', type=int, default=16,
                       help='Cascade levels; the cascade has 2^levels samples (Default: %(default)s).')
    synth.add_argument('--multiplier', '-a', type=float, default=0.6,
                       help='Cascade multiplier in (0.5, 1) (Default: %(default)s).')
    synth.add_argument('--analytic', action='store_true',
                       help='Also write the exact h, tau and f(alpha) of the cascade.')

    args = arg_parser.parse_args(argv)

    if args.manifest is None and args.command is None:
        arg_parser.error('a command or --manifest is required')

    # Override the format from the environment, if any
    if 'MFEEG_FORMAT' in os.environ and args.command is not None:
        _new_value = os.environ['MFEEG_FORMAT'].lower()
        if _new_value in OUTPUT_FORMATS:
            args.format = _new_value

    return args


def build_config(args) -> PipelineConfig:
    return PipelineConfig(
        dataset_root=args.dataset_root,
        q_min=args.q_min, q_max=args.q_max, q_step=args.q_step,
        scale_min=args.scale_min, scale_max=args.scale_max,
        scale_intervals=args.scale_intervals, detrend_order=args.detrend_order,
        cv_folds=args.cv_folds, seed=get_seed(args.seed),
        feature_convention=args.feature_convention,
        classifiers=tuple(args.classifier), output_dir=args.output_dir,
        c_grid=tuple(args.c_grid), gamma_grid=tuple(args.gamma_grid),
        k_grid=tuple(args.k_grid), n_jobs=args.jobs if args.jobs is not None else 1,
    ).validate()


def dispatch(args):
    config = build_config(args)

    if args.command == 'analyze':
        if not args.inputs and not args.sets:
            raise MfeegError('analyze needs signal files, folders or --sets')
        summary = run_analyze(config, args.inputs, args.sets)
        print_table(summary, args, title='Mean multifractal parameters')

    elif args.command == 'features':
        matrices = run_features(config, args.sets)
        rows = [{'set': name, 'signals': len(m), 'mean f1': m.values[:, 0].mean(),
                 'mean f6': m.values[:, 5].mean()} for name, m in matrices.items()]
        print_table(rows, args, title='Feature matrices')

    elif args.command == 'rank':
        for pid, frame in run_rank(config, args.problems).items():
            print_table(ranking_rows(frame), args, title=f'Feature ranking, problem {pid}')

    elif args.command == 'run':
        rows = run_run(config, args.problems)
        print_table(rows, args, title='Cross-validated performance')

    elif args.command == 'synth':
        path = run_synth(config, args.kind, args.output, args.length, args.hurst,
                         args.levels, args.multiplier, args.analytic)
        if not args.quiet:
            print(path)


def main(argv: Optional[List[str]] = None):
    args = parse_args(argv)

    if os.environ.get('NO_COLOR', False) or getattr(args, 'no_color', False):
        Color.ENABLE_COLORS = False
    else:
        import colorama
        colorama.init()

    if not args.quiet:
        logging.basicConfig(level=logging.INFO, format='mfeeg: %(message)s')

    try:
        if args.command is None:
            replay_manifest(args.manifest, args.jobs)
        else:
            dispatch(args)
    except MfeegError as e:
        mfeeglogger.error(f'{e.__class__.__name__}: {e}')
        sys.exit(e.exit_code)
    except OSError as e:
        mfeeglogger.error(str(e))
        sys.exit(2)


if __name__ == '__main__':
    main()
