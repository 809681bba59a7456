import json
import os

import numpy as np
import pandas as pd
import pytest

from mfeeg.dataset import read_signal_file, write_bonn_signal
from mfeeg.mfeeg import main, parse_args
from mfeeg.synth import gen_fgn, gen_white_noise

# Small analysis settings for 1024-sample signals
FAST = ['--scale-min', '16', '--scale-max', '128', '--scale-intervals', '6', '--q-step', '0.5',
        '--cv-folds', '3', '--c-grid', '1', '4', '--gamma-grid', '0.1', '1', '--seed', '3', '-q']


@pytest.fixture(autouse=True)
def no_color(monkeypatch):
    monkeypatch.setenv('NO_COLOR', '1')
    monkeypatch.delenv('MFEEG_FORMAT', raising=False)


@pytest.fixture(scope='module')
def bonn_root(tmp_path_factory):
    """Sets A (as Z/) and E (as S/): white noise against persistent fGn."""
    root = tmp_path_factory.mktemp('bonn')
    for folder, make in (('Z', lambda i: gen_white_noise(1024, seed=i)),
                         ('S', lambda i: gen_fgn(1024, 0.9, seed=100 + i).scaled(50.0))):
        os.makedirs(root / folder)
        for i in range(12):
            write_bonn_signal(make(i), str(root / folder / f'{folder}{i:03d}.txt'))
    return str(root)


def exit_code(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    return exc.value.code


def test_synth_cascade(tmp_path):
    out = str(tmp_path / 'cascade.txt')
    main(['synth', 'cascade', '--levels', '16', '--multiplier', '0.6', '--output', out,
          '--analytic', '-o', str(tmp_path), '-q'])
    samples = read_signal_file(out)
    assert samples.size == 65536
    assert abs(samples.sum() - 1.0) < 1e-9

    analytic = pd.read_csv(str(tmp_path / 'cascade_analytic.csv'))
    assert list(analytic.columns) == ['q', 'h', 'tau', 'alpha', 'f']
    assert len(analytic) == 101
    assert os.path.exists(tmp_path / 'manifest.json')


def test_synth_is_seeded(tmp_path):
    for name in ('a.txt', 'b.txt'):
        main(['synth', 'fgn', '-n', '1024', '--hurst', '0.3', '--seed', '5',
              '--output', str(tmp_path / name), '-o', str(tmp_path), '-q'])
    assert (tmp_path / 'a.txt').read_bytes() == (tmp_path / 'b.txt').read_bytes()


def test_analyze_files(tmp_path):
    signal = str(tmp_path / 'in' / 'white.txt')
    write_bonn_signal(gen_white_noise(16384, seed=1), signal)
    out = tmp_path / 'out'
    main(['analyze', signal, '-o', str(out), '-q'])

    for kind in ('hq', 'tau', 'spectrum'):
        assert os.path.exists(out / 'signals' / 'white' / f'{kind}.csv')
        assert os.path.exists(out / f'signals_mean_{kind}.csv')
    hq = pd.read_csv(str(out / 'signals' / 'white' / 'hq.csv'))
    assert list(hq.columns) == ['q', 'h', 'r2', 'stderr']
    assert abs(hq.loc[np.isclose(hq['q'], 2.0), 'h'].iloc[0] - 0.5) < 0.1

    summary = pd.read_csv(str(out / 'analyze_summary.csv'))
    assert summary['set'].tolist() == ['signals']


def test_analyze_folder_and_sets(tmp_path, bonn_root):
    out = tmp_path / 'out'
    main(['analyze', os.path.join(bonn_root, 'S'), '--sets', 'a', '-d', bonn_root,
          '-o', str(out)] + FAST)
    summary = pd.read_csv(str(out / 'analyze_summary.csv'))
    assert summary['set'].tolist() == ['S', 'A']
    assert summary['signals'].tolist() == [12, 12]
    # persistent noise against white noise
    assert summary['h(2)'][0] > summary['h(2)'][1] + 0.2

    manifest = json.loads((out / 'manifest.json').read_text())
    assert manifest['command'] == 'analyze'
    assert len(manifest['inputs']) == 24


def test_features(tmp_path, bonn_root):
    out = tmp_path / 'out'
    main(['features', '--sets', 'A', 'E', '-d', bonn_root, '-o', str(out)] + FAST)
    frame = pd.read_csv(str(out / 'features_A.csv'))
    assert frame.shape == (12, 16)
    records = json.loads((out / 'features_E.json').read_text())
    assert records['set'] == 'E'
    assert len(records['signals']) == 12


def test_rank_json_output(tmp_path, bonn_root, monkeypatch, capsys):
    monkeypatch.setenv('MFEEG_FORMAT', 'json')
    main(['rank', 'I', '-d', bonn_root, '-o', str(tmp_path)] + FAST)
    rows = json.loads(capsys.readouterr().out)
    assert [row['rank'] for row in rows] == list(range(1, 15))

    ranking = pd.read_csv(str(tmp_path / 'rank_I.csv'))
    assert list(ranking.columns) == ['rank', 'feature', 'A', 'E', 't', 'p', 'log10_p']
    assert ranking['t'].abs().is_monotonic_decreasing


def test_run_is_reproducible(tmp_path, bonn_root):
    outputs = []
    for name in ('first', 'second'):
        out = tmp_path / name
        main(['run', 'I', '-c', 'svm', 'knn', '--k-grid', '1', '3', '-d', bonn_root,
              '-o', str(out)] + FAST)
        outputs.append(out)

    for fname in ('report_I_svm.json', 'report_I_knn.json', 'results.csv', 'rank_I.csv'):
        assert (outputs[0] / fname).read_bytes() == (outputs[1] / fname).read_bytes()

    report = json.loads((outputs[0] / 'report_I_svm.json').read_text())
    assert report['problem'] == 'I'
    assert report['k_folds'] == 3
    assert report['seed'] == 3
    assert ['f{}'.format(i) for i in report['features']] == report['selection']['features']
    assert len(report['grid']) == 4
    assert report['metrics']['accuracy'] > 90.0
    assert report['classes'] == {'positive': 'A', 'negative': 'E'}

    results = pd.read_csv(str(outputs[0] / 'results.csv'))
    assert results['classifier'].tolist() == ['svm', 'knn']


def test_manifest_replay(tmp_path, bonn_root):
    out = tmp_path / 'out'
    main(['run', 'I', '-d', bonn_root, '-o', str(out)] + FAST)
    before = (out / 'report_I_svm.json').read_bytes()
    os.remove(out / 'report_I_svm.json')

    main(['--manifest', str(out / 'manifest.json'), '-q'])
    assert (out / 'report_I_svm.json').read_bytes() == before


def test_exit_codes(tmp_path, bonn_root):
    empty = tmp_path / 'empty'
    empty.mkdir()
    # no signal files
    assert exit_code(['analyze', str(empty), '-o', str(tmp_path / 'o'), '-q']) == 2
    # a byte that is not UTF-8
    binary = tmp_path / 'binary.txt'
    binary.write_bytes(b'1\n\xff\xfe2\n3\n')
    assert exit_code(['analyze', str(binary), '-o', str(tmp_path / 'o'), '-q']) == 2
    # nothing to analyse
    assert exit_code(['analyze', '-o', str(tmp_path / 'o'), '-q']) == 1
    # usage errors
    assert exit_code(['run', '--cv-folds', 'abc']) == 1
    assert exit_code([]) == 1
    # unknown problem
    assert exit_code(['rank', 'IX', '-d', bonn_root, '-q']) == 1
    # set B is not in the fake archive
    assert exit_code(['rank', 'II', '-d', bonn_root, '-o', str(tmp_path / 'o')] + FAST) == 2
    # scale_max above a quarter of the signal length
    assert exit_code(['features', '--sets', 'A', '-d', bonn_root, '-o', str(tmp_path / 'o'),
                      '-q', '--scale-max', '512']) == 1


@pytest.mark.parametrize("argv, quiet, jobs", [
    (['-q', 'rank', 'I'], True, None),
    (['-j', '4', 'rank', 'I'], False, 4),
    (['rank', 'I', '-q', '-j', '2'], True, 2),
    (['rank', 'I'], False, None),
])
def test_root_flags_reach_the_command(argv, quiet, jobs):
    args = parse_args(argv)
    assert args.quiet is quiet
    assert args.jobs == jobs
