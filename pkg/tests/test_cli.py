# -*- coding: utf-8 -*-
"""
Created on Fri Sep 25 11:17:45 2026

@author: compamg developers
"""

import json
import pandas as pd
import pytest

from compamg.compamg import get_parser, resolve_adaptive, run_pipeline
from compamg.sparse_core import load_matrix_market, is_symmetric
from compamg.utilities import ReadConfig


@pytest.fixture
def laplace_file(tmp_path):
    path = str(tmp_path / 'lap.mtx')
    assert run_pipeline(['gen', '--dim', '2', '--n', '8', '--epsilon', '1', '--theta', '0', '--out', path, '-q']) == 0
    return path


def test_gen_writes_matrix(laplace_file):
    A = load_matrix_market(laplace_file)
    assert A.shape == (49, 49)
    assert is_symmetric(A)


def test_build_report(laplace_file, tmp_path):
    report = str(tmp_path / 'build.json')
    aggregates = str(tmp_path / 'agg.txt')
    assert run_pipeline(['build', laplace_file, '--coarse-size', '8', '--report', report, '--aggregates', aggregates, '-q']) == 0
    with open(report) as infile:
        content = json.load(infile)
    assert content['kind'] == 'build'
    assert content['matrix']['dim'] == 49
    log = content['build_log']
    assert log['components'] >= 1
    assert log['entries'][0]['rho_b'] > 0.9
    assert log['config']['coarse_size'] == 8
    with open(aggregates) as infile:
        assert len(infile.read().splitlines()) == 49


def test_build_stops_with_exact_component(laplace_file, tmp_path):
    report = str(tmp_path / 'build.json')
    with pytest.warns(RuntimeWarning):
        assert run_pipeline(['build', laplace_file, '--report', report, '-q']) == 0
    with open(report) as infile:
        log = json.load(infile)['build_log']
    assert log['components'] == 1
    assert log['stop_reason'] == 'exact'


def test_solve_sweep(tmp_path):
    report = str(tmp_path / 'solve.json')
    history = str(tmp_path / 'history.csv')
    argv = ['solve', '--dim', '2', '--n', '16', '--coarse-size', '16', '-k', '1:2', '--tol', '1e-8',
            '--max-iters', '200', '--report', report, '--history', history, '-q']
    assert run_pipeline(argv) == 0
    with open(report) as infile:
        content = json.load(infile)
    ks = {record['components'] for record in content['solves']}
    assert 1 in ks
    assert ks <= {1, 2}
    assert {record['mode'] for record in content['solves']} == {'stationary', 'pcg'}
    for record in content['solves']:
        assert record['residual_history'][0] == 1
    assert len(content['metrics']) == len(ks)
    table = pd.read_csv(history)
    assert list(table.columns) == ['k', 'mode', 'iter', 'relres']
    assert len(table) == sum(record['iterations'] + 1 for record in content['solves'])
    for record in content['solves']:
        rows = table[(table['k'] == record['components']) & (table['mode'] == record['mode'])]
        assert list(rows['iter']) == list(range(record['iterations'] + 1))


def test_solve_single_mode(laplace_file, tmp_path):
    report = str(tmp_path / 'solve.json')
    with pytest.warns(RuntimeWarning):
        assert run_pipeline(['solve', laplace_file, '--mode', 'pcg', '--report', report, '-q']) == 0
    with open(report) as infile:
        solves = json.load(infile)['solves']
    assert [record['mode'] for record in solves] == ['pcg']
    assert solves[0]['converged']


def test_check_passes(tmp_path):
    report = str(tmp_path / 'check.json')
    assert run_pipeline(['check', '--laplace', '--dim', '2', '--n', '8', '--report', report, '-q']) == 0
    with open(report) as infile:
        content = json.load(infile)
    assert content['passed']
    assert content['checks']['modularity']['Q'] == pytest.approx(content['checks']['modularity']['Q_networkx'])
    assert content['checks']['cholesky']['passed']


def test_check_fails_on_nonsymmetric_matrix(tmp_path, capsys):
    path = tmp_path / 'general.mtx'
    path.write_text('%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 2.0\n1 2 1.0\n2 2 2.0\n')
    assert run_pipeline(['check', str(path), '-q']) == 1
    assert 'ERR' in capsys.readouterr().err


def test_missing_matrix_file(tmp_path, capsys):
    assert run_pipeline(['build', str(tmp_path / 'missing.mtx'), '-q']) == 2
    assert 'cannot open' in capsys.readouterr().err


def test_usage_error():
    assert run_pipeline(['solve', '--mode', 'direct']) == 2
    assert run_pipeline([]) == 2


def test_invalid_parameter_is_a_usage_error(laplace_file):
    assert run_pipeline(['build', laplace_file, '--target-rho', '1.5', '-q']) == 2


def test_parameter_precedence(tmp_path):
    ini = tmp_path / 'config.ini'
    ini.write_text('[ADAPTIVE]\ngamma = 6\nmu = 2\nseed = 7\n')
    config = ReadConfig(str(ini))
    args = get_parser().parse_args(['build', '--gamma', '3', '--config', str(ini)])
    adaptive = resolve_adaptive(args, config)
    # command line over config file over defaults
    assert adaptive.gamma == 3.0
    assert adaptive.mu == 2
    assert adaptive.seed == 7
    assert adaptive.nu == 2
    assert adaptive.target_rho == 0.9


def test_missing_config_file(tmp_path, capsys):
    assert run_pipeline(['check', '--config', str(tmp_path / 'none.ini'), '-q']) == 2
    assert 'cannot open' in capsys.readouterr().err


def test_build_rejects_nonsymmetric_matrix(tmp_path, capsys):
    path = tmp_path / 'general.mtx'
    path.write_text('%%MatrixMarket matrix coordinate real general\n3 3 7\n1 1 2.0\n1 2 -0.5\n2 1 -1.0\n'
                    '2 2 2.0\n2 3 -1.0\n3 2 -1.0\n3 3 2.0\n')
    assert run_pipeline(['build', str(path), '--coarse-size', '4', '-q']) == 2
    assert 'not symmetric' in capsys.readouterr().err
    assert run_pipeline(['solve', str(path), '-q']) == 2


def test_build_report_holds_spd_check(laplace_file, tmp_path):
    report = str(tmp_path / 'build.json')
    assert run_pipeline(['build', laplace_file, '--coarse-size', '8', '--max-components', '1', '--report', report, '-q']) == 0
    with open(report) as infile:
        check = json.load(infile)['build_log']['spd_check']
    assert check['pairs'] == 20
    assert check['symmetry_defect'] <= 1e-10
    assert check['min_rayleigh'] > 0
