"""End-to-end commands: curve export, feature export, feature ranking,
classification runs and signal synthesis.

Every command writes its results under `PipelineConfig.output_dir`
together with a `manifest.json` from which the command can be re-run.
"""

import json
import logging
import os
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .classifiers import CLASSIFIERS, KNN, SVM
from .crossval import (DEFAULT_C_GRID, DEFAULT_GAMMA_GRID, DEFAULT_K_GRID, K_FOLDS,
                       GridSearchResult, grid_search, knn_grid_search, subset_evaluator)
from .dataset import SETS, BonnSet, assemble_problem, get_problem, load_signal_file, write_bonn_signal
from .dataset.base import SIGNAL_SUFFIXES
from .errors import ConfigError, DataError
from .features import FEATURE_NAMES, FeatureMatrix, check_convention, extract_feature_matrix
from .mfdfa import MfdfaConfig, MfdfaResult, TimeSeries, make_q_grid, mfdfa
from .stats import rank_features, ranking_frame, sequential_forward_select
from .synth import (CascadeSpec, analytic_binomial_hurst, analytic_binomial_spectrum,
                    gen_binomial_cascade, gen_fgn, gen_white_noise)
from .utils import (MFEEG_DIR, __version__, get_md5sum, get_seed, jsonify, read_json,
                    run_tasks, write_csv, write_json)

mfeeglogger = logging.getLogger('mfeeg')

MANIFEST_NAME = 'manifest.json'


@dataclass(frozen=True)
class PipelineConfig:
    """Every setting of a pipeline run. The defaults reproduce the reference
    analysis: q from -5 to 5 by 0.1, scales 16 to 1024 in 19 logarithmic
    intervals, linear detrending and 10-fold cross-validation."""
    dataset_root: Optional[str] = None
    q_min: float = -5.0
    q_max: float = 5.0
    q_step: float = 0.1
    scale_min: int = 16
    scale_max: int = 1024
    scale_intervals: int = 19
    detrend_order: int = 1
    cv_folds: int = K_FOLDS
    seed: Optional[int] = 12345
    feature_convention: str = 'literal'
    classifiers: Tuple[str, ...] = ('svm', )
    output_dir: str = 'mfeeg-output'
    c_grid: Tuple[float, ...] = DEFAULT_C_GRID
    gamma_grid: Tuple[float, ...] = DEFAULT_GAMMA_GRID
    k_grid: Tuple[int, ...] = DEFAULT_K_GRID
    n_jobs: int = 1

    def __post_init__(self):
        for name in ('classifiers', 'c_grid', 'gamma_grid', 'k_grid'):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    def validate(self) -> 'PipelineConfig':
        check_convention(self.feature_convention)
        unknown = [c for c in self.classifiers if c not in CLASSIFIERS]
        if unknown or not self.classifiers:
            raise ConfigError(f'Unknown classifier(s) {unknown}, pick from {list(CLASSIFIERS)}')
        if self.cv_folds < 2:
            raise ConfigError(f'Need at least 2 folds, got {self.cv_folds}')
        if self.q_step <= 0 or self.q_min >= self.q_max:
            raise ConfigError('Need q_min < q_max and a positive q_step')
        if not self.c_grid or not self.gamma_grid or not self.k_grid:
            raise ConfigError('Hyperparameter grids must be non-empty')
        self.mfdfa_config().validate()
        return self

    @property
    def root(self) -> str:
        return self.dataset_root if self.dataset_root is not None else MFEEG_DIR

    def mfdfa_config(self) -> MfdfaConfig:
        return MfdfaConfig(
            q_values=make_q_grid(self.q_min, self.q_max, self.q_step),
            scale_min=self.scale_min, scale_max=self.scale_max,
            scale_intervals=self.scale_intervals, detrend_order=self.detrend_order)

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        for name in ('classifiers', 'c_grid', 'gamma_grid', 'k_grid'):
            d[name] = list(d[name])
        return d

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> 'PipelineConfig':
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in known})

    def output_path(self, *parts: str) -> str:
        return os.path.join(self.output_dir, *parts)


##############################
# Inputs
##############################
def _directory_signals(path: str) -> List[TimeSeries]:
    files = [os.path.join(path, f) for f in sorted(os.listdir(path))
             if f.lower().endswith(SIGNAL_SUFFIXES)]
    if not files:
        raise DataError(f'{path}: no signal files found')
    return [load_signal_file(f) for f in files]


def collect_inputs(config: PipelineConfig, inputs: Sequence[str] = (),
                   sets: Sequence[str] = ()) -> Tuple[Dict[str, List[TimeSeries]], List[str]]:
    """Resolves the inputs of `analyze`: signal files, folders of signal files
    and Bonn set names.

    :return: Signals grouped by folder or set name, and the list of files read.
    """
    groups: Dict[str, List[TimeSeries]] = {}
    files: List[str] = []

    for path in inputs:
        if os.path.isdir(path):
            name = os.path.basename(os.path.normpath(path))
            groups.setdefault(name, []).extend(_directory_signals(path))
            files.extend(os.path.join(path, f) for f in sorted(os.listdir(path))
                         if f.lower().endswith(SIGNAL_SUFFIXES))
        elif os.path.isfile(path):
            groups.setdefault('signals', []).append(load_signal_file(path))
            files.append(path)
        else:
            raise DataError(f'{path}: no such file or directory')

    for name in sets:
        bonn = _load_set(name, config)
        groups[bonn.set_id] = bonn.signals
        files.extend(SETS[bonn.set_id].get_files(config.root))

    if not groups:
        raise DataError('No input signals given')
    return groups, files


def _load_set(name: str, config: PipelineConfig) -> BonnSet:
    key = name.upper()
    if key not in SETS:
        raise ConfigError(f'Unknown set {name!r}, pick one of {sorted(SETS)}')
    return SETS[key].load(config.root)


def _set_files(set_names: Sequence[str], config: PipelineConfig) -> List[str]:
    return [f for name in set_names for f in SETS[name].get_files(config.root)]


##############################
# analyze
##############################
def _analyse(series: TimeSeries, config: MfdfaConfig) -> MfdfaResult:
    return mfdfa(series, config)


def mean_curves(results: Sequence[MfdfaResult]) -> Dict[str, pd.DataFrame]:
    """Averages h(q), tau(q) and (alpha, f) point-wise over signals analysed
    on the same q grid. Absent exponents are skipped."""
    q = results[0].hurst.q_values
    h = np.array([r.hurst.h for r in results])
    alpha = np.array([r.spectrum.alpha for r in results])
    f = np.array([r.spectrum.f_alpha for r in results])
    with np.errstate(invalid='ignore'):
        mean_h = np.nanmean(h, axis=0)
        std_h = np.nanstd(h, axis=0)
        return {
            'hq': pd.DataFrame({'q': q, 'h': mean_h, 'h_std': std_h}),
            'tau': pd.DataFrame({'q': q, 'tau': q * mean_h - 1.0}),
            'spectrum': pd.DataFrame({'q': q, 'alpha': np.nanmean(alpha, axis=0),
                                      'f': np.nanmean(f, axis=0)}),
        }


def _summary_row(name: str, results: Sequence[MfdfaResult]) -> Dict[str, Any]:
    def mean_at(q):
        values = []
        for r in results:
            try:
                values.append(r.hurst.at(q))
            except KeyError:
                pass
        return float(np.nanmean(values)) if values else float('nan')

    return {
        'set': name,
        'signals': len(results),
        'h(2)': mean_at(2.0),
        'h(5)': mean_at(5.0),
        'delta_alpha': float(np.nanmean([r.spectrum.width for r in results])),
    }


def run_analyze(config: PipelineConfig, inputs: Sequence[str] = (),
                sets: Sequence[str] = ()) -> List[Dict[str, Any]]:
    """Writes hq.csv, tau.csv and spectrum.csv for every signal under
    `<output>/<group>/<signal>/`, the mean curves of every group as
    `<output>/<group>_mean_{hq,tau,spectrum}.csv` and a summary table.

    :return: One summary row per group.
    """
    mcfg = config.mfdfa_config()
    groups, files = collect_inputs(config, inputs, sets)

    summary = []
    for name, signals in groups.items():
        mfeeglogger.info(f'Analysing {len(signals)} signal(s) of {name}')
        results = run_tasks(_analyse, [(s, mcfg) for s in signals], config.n_jobs)
        for result in results:
            for kind, frame in result.curve_frames().items():
                write_csv(config.output_path(name, result.series_id, f'{kind}.csv'), frame)
        for kind, frame in mean_curves(results).items():
            write_csv(config.output_path(f'{name}_mean_{kind}.csv'), frame)
        summary.append(_summary_row(name, results))

    write_csv(config.output_path('analyze_summary.csv'), pd.DataFrame(summary))
    write_manifest(config, 'analyze', {'inputs': list(inputs), 'sets': list(sets)}, files)
    return summary


##############################
# features
##############################
def _extract_sets(loaded: Dict[str, BonnSet], config: PipelineConfig) -> Dict[str, FeatureMatrix]:
    mcfg = config.mfdfa_config()
    return {
        name: extract_feature_matrix(bonn.signals, mcfg, config.feature_convention, config.n_jobs)
        for name, bonn in loaded.items()
    }


def set_features(set_names: Sequence[str], config: PipelineConfig) -> Dict[str, FeatureMatrix]:
    """Loads each set and extracts its feature matrix."""
    loaded = {}
    for name in set_names:
        bonn = _load_set(name, config)
        loaded[bonn.set_id] = bonn
    return _extract_sets(loaded, config)


def run_features(config: PipelineConfig, sets: Sequence[str]) -> Dict[str, FeatureMatrix]:
    """Writes `features_<set>.csv` and `features_<set>.json` per set."""
    if not sets:
        raise ConfigError('No sets given')
    set_names = [s.upper() for s in sets]
    matrices = set_features(set_names, config)
    for name, matrix in matrices.items():
        write_csv(config.output_path(f'features_{name}.csv'), matrix.to_frame())
        write_json(config.output_path(f'features_{name}.json'), {
            'set': name, 'convention': matrix.convention, 'features': list(FEATURE_NAMES),
            'signals': matrix.to_records()})
    write_manifest(config, 'features', {'sets': set_names}, _set_files(set_names, config))
    return matrices


##############################
# rank / run
##############################
@dataclass
class ProblemData:
    problem_id: str
    class_names: Tuple[str, str]
    features: np.ndarray
    labels: np.ndarray
    signal_ids: List[str] = field(default_factory=list)


def problem_data(problem_ids: Sequence[str],
                 config: PipelineConfig) -> Tuple[List[ProblemData], List[str]]:
    """Assembles every problem, extracting the features of each needed set once.

    :return: The problems and the signal files they were built from.
    """
    if not problem_ids:
        raise ConfigError('No classification problems given')
    problems = [get_problem(pid) for pid in problem_ids]
    needed = sorted({s for p in problems for s in p.sets})
    loaded = {name: _load_set(name, config) for name in needed}
    matrices = _extract_sets(loaded, config)

    data = []
    for problem in problems:
        labeled = assemble_problem(problem, loaded)
        # stacked in the same set order as assemble_problem's signals
        features = np.vstack([matrices[name].values for name in problem.sets])
        data.append(ProblemData(problem.problem_id, problem.class_names, features,
                                labeled.labels, [s.signal_id for s in labeled.signals]))
    return data, _set_files(needed, config)


def ranking_rows(frame: pd.DataFrame) -> List[Dict[str, Any]]:
    """Table rows of a ranking with p in scientific notation."""
    rows = frame.to_dict(orient='records')
    for row in rows:
        row['p'] = f"{row['p']:.2e}"
    return rows


def run_rank(config: PipelineConfig, problem_ids: Sequence[str]) -> Dict[str, pd.DataFrame]:
    """Writes `rank_<problem>.csv`: every feature with its class means and
    deviations, t, p and log10 p, by decreasing |t|."""
    data, files = problem_data(problem_ids, config)
    tables = {}
    for prob in data:
        ranked = rank_features(prob.features, prob.labels)
        frame = ranking_frame(ranked, prob.class_names)
        write_csv(config.output_path(f'rank_{prob.problem_id}.csv'), frame)
        tables[prob.problem_id] = frame
    write_manifest(config, 'rank', {'problem_ids': [p.problem_id for p in data]}, files)
    return tables


def _tune(name: str, features: np.ndarray, labels: np.ndarray, config: PipelineConfig,
          problem_id: str) -> GridSearchResult:
    if name == SVM.name:
        return grid_search(features, labels, config.c_grid, config.gamma_grid,
                           config.cv_folds, config.seed, problem_id, config.n_jobs)
    if name == KNN.name:
        return knn_grid_search(features, labels, config.k_grid, config.cv_folds,
                               config.seed, problem_id, config.n_jobs)
    raise ConfigError(f'Unknown classifier {name!r}')


def run_run(config: PipelineConfig, problem_ids: Sequence[str]) -> List[Dict[str, Any]]:
    """For every problem: rank the features, select a subset by SFS with a
    default SVM, tune each requested classifier on the subset and write
    `report_<problem>_<classifier>.json`, the ranking table and one
    `results.csv` row per problem and classifier.

    :return: The `results.csv` rows.
    """
    data, files = problem_data(problem_ids, config)
    rows = []
    for prob in data:
        mfeeglogger.info(f'Problem {prob.problem_id} ({",".join(prob.class_names)}): '
                         f'{len(prob.labels)} signals')
        ranked = rank_features(prob.features, prob.labels)
        write_csv(config.output_path(f'rank_{prob.problem_id}.csv'),
                  ranking_frame(ranked, prob.class_names))

        evaluator = subset_evaluator(prob.features, prob.labels, config.cv_folds, config.seed,
                                     n_jobs=config.n_jobs)
        selection = sequential_forward_select(ranked, evaluator)
        columns = [i - 1 for i in selection.selected_indices]
        subset = prob.features[:, columns]

        for name in config.classifiers:
            result = _tune(name, subset, prob.labels, config, prob.problem_id)
            report = result.report
            report.feature_indices = list(selection.selected_indices)
            report.extra['selection'] = {
                'features': [FEATURE_NAMES[i - 1] for i in selection.selected_indices],
                'accuracy_trace': selection.accuracy_trace,
                'rejected': None if selection.rejected is None else {
                    'feature': FEATURE_NAMES[selection.rejected[0] - 1],
                    'accuracy': selection.rejected[1]},
            }
            report.extra['classes'] = {'positive': prob.class_names[0],
                                       'negative': prob.class_names[1]}
            write_json(config.output_path(f'report_{prob.problem_id}_{name}.json'), report.to_dict())

            metrics = report.metrics
            rows.append({
                'problem': f'{prob.problem_id} ({",".join(prob.class_names)})',
                'classifier': name,
                'features': ' '.join(FEATURE_NAMES[i - 1] for i in selection.selected_indices),
                'accuracy': metrics.accuracy,
                'sensitivity': metrics.sensitivity,
                'specificity': metrics.specificity,
                'fold_mean_accuracy': report.fold_mean_metrics.accuracy,
                'hyperparameters': json.dumps(jsonify(report.hyperparameters), sort_keys=True),
            })

    write_csv(config.output_path('results.csv'), pd.DataFrame(rows))
    write_manifest(config, 'run', {'problem_ids': [p.problem_id for p in data]}, files)
    return rows


##############################
# synth
##############################
def synthesize(kind: str, n: int = 16384, hurst_h: float = 0.7, levels: int = 16,
               multiplier_a: float = 0.6, seed: Optional[int] = None) -> TimeSeries:
    if kind == 'white':
        return gen_white_noise(n, seed)
    if kind == 'fgn':
        return gen_fgn(n, hurst_h, seed)
    if kind == 'cascade':
        return gen_binomial_cascade(CascadeSpec(levels, multiplier_a, seed))
    raise ConfigError(f'Unknown signal kind {kind!r}, pick one of white, fgn, cascade')


def run_synth(config: PipelineConfig, kind: str, output: Optional[str] = None,
              n: int = 16384, hurst_h: float = 0.7, levels: int = 16,
              multiplier_a: float = 0.6, analytic: bool = False) -> str:
    """Generates a signal and writes it in Bonn format. With `analytic`, a
    cascade also gets `<name>_analytic.csv` holding the exact h, tau, alpha
    and f on the configured q grid.

    :return: The path of the signal file.
    """
    seed = get_seed(config.seed)
    series = synthesize(kind, n, hurst_h, levels, multiplier_a, seed)
    path = output if output is not None else config.output_path(f'{series.signal_id}.txt')
    write_bonn_signal(series, path)
    mfeeglogger.info(f'Wrote {len(series)} samples to {path}')

    if analytic:
        if kind != 'cascade':
            raise ConfigError('Analytic curves exist for the cascade only')
        q = np.asarray(make_q_grid(config.q_min, config.q_max, config.q_step))
        tau, alpha, f = analytic_binomial_spectrum(q, multiplier_a)
        frame = pd.DataFrame({'q': q, 'h': analytic_binomial_hurst(q, multiplier_a),
                              'tau': tau, 'alpha': alpha, 'f': f})
        write_csv(os.path.splitext(path)[0] + '_analytic.csv', frame)

    write_manifest(config, 'synth', {
        'kind': kind, 'output': output, 'n': n, 'hurst_h': hurst_h, 'levels': levels,
        'multiplier_a': multiplier_a, 'analytic': analytic}, [])
    return path


##############################
# Manifest
##############################
def write_manifest(config: PipelineConfig, command: str, arguments: Dict[str, Any],
                   input_files: Sequence[str]):
    """Records what is needed to repeat a command in `<output>/manifest.json`."""
    write_json(config.output_path(MANIFEST_NAME), {
        'command': command,
        'arguments': arguments,
        'config': config.to_dict(),
        'seed': config.seed,
        'version': __version__,
        'inputs': {path: get_md5sum(path) for path in input_files},
    })


COMMANDS = {
    'analyze': run_analyze,
    'features': run_features,
    'rank': run_rank,
    'run': run_run,
    'synth': run_synth,
}


def replay_manifest(path: str, n_jobs: Optional[int] = None) -> Any:
    """Re-runs the command recorded in a manifest with the same configuration.
    Changed input files or a different package version are reported."""
    manifest = read_json(path)
    command = manifest.get('command')
    if command not in COMMANDS:
        raise ConfigError(f'{path}: unknown command {command!r}')
    config = PipelineConfig.from_dict(manifest['config'])
    if n_jobs is not None:
        config = PipelineConfig.from_dict({**config.to_dict(), 'n_jobs': n_jobs})

    if manifest.get('version') != __version__:
        mfeeglogger.warning(f'Manifest written by mfeeg {manifest.get("version")}, '
                            f'running {__version__}')
    for fname, md5 in manifest.get('inputs', {}).items():
        if not os.path.exists(fname):
            raise DataError(f'{fname}: input listed in the manifest is missing')
        if get_md5sum(fname) != md5:
            mfeeglogger.warning(f'{fname}: contents changed since the manifest was written')

    mfeeglogger.info(f'Replaying `{command}` from {path}')
    return COMMANDS[command](config.validate(), **manifest['arguments'])
