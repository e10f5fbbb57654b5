import json

import pytest
from click.testing import CliRunner

from cli import cli


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def cache_args(tmp_path):
    return ['--cache-dir', str(tmp_path / 'cache')]


@pytest.mark.parametrize("algebra, dimension, simples", [
    ('qci-l3-n2-standard', 81, 9),
    ('no-tpp', 18, 2),
    ('truncated-p3', 3, 1),
])
def test_describe(runner, algebra, dimension, simples):
    result = runner.invoke(cli, ['describe', '--algebra', algebra])
    assert result.exit_code == 0, result.output
    assert f"Dimension:          {dimension}" in result.output
    assert f"Simples:            {simples}" in result.output
    assert 'hopf-axioms' in result.output


def test_resolve_writes_report(runner, cache_args, tmp_path):
    report = tmp_path / 'resolve.json'
    result = runner.invoke(cli, ['resolve', '--algebra', 'truncated-p3', '-m', 'k', '--degree-bound', '4',
                                 '--report', str(report)] + cache_args)
    assert result.exit_code == 0, result.output
    data = json.loads(report.read_text())
    assert data['checks'][0]['details']['ranks'] == [1, 1, 1, 1, 1]
    assert (tmp_path / 'resolve.json.timings.json').exists()


def test_cache_strategy_flag_keeps_the_config_hash(runner, cache_args, tmp_path):
    reports = []
    for strategy in ('LRU', 'lfu'):
        path = tmp_path / f'resolve-{strategy}.json'
        result = runner.invoke(cli, ['resolve', '--algebra', 'truncated-p3', '-m', 'k', '--degree-bound', '3',
                                     '--cache-strategy', strategy, '--report', str(path)] + cache_args)
        assert result.exit_code == 0, result.output
        reports.append(json.loads(path.read_text()))
    assert reports[0]['config_hash'] == reports[1]['config_hash']
    bad = runner.invoke(cli, ['resolve', '--algebra', 'truncated-p3', '--cache-strategy', 'FIFO'])
    assert bad.exit_code != 0


def test_ext_table_and_csv(runner, cache_args, tmp_path):
    csv = tmp_path / 'ext.csv'
    result = runner.invoke(cli, ['ext', '--algebra', 'qci-l3-n2-standard', '-m', 'k', '--target', 'k',
                                 '--degree-bound', '4', '--table-csv', str(csv)] + cache_args)
    assert result.exit_code == 0, result.output
    assert 'theta_cokernel' in result.output
    assert csv.exists()


def test_tpp_check_needs_two_modules(runner, cache_args):
    result = runner.invoke(cli, ['tpp-check', '--algebra', 'functions-p3-n2', '-m', 'k'] + cache_args)
    assert result.exit_code == 2
    assert 'needs 2 module specs' in result.output


def test_bad_config_values_are_usage_errors(runner, cache_args):
    result = runner.invoke(cli, ['resolve', '--stability', '1'] + cache_args)
    assert result.exit_code == 2
    result = runner.invoke(cli, ['resolve', '--algebra', 'e8'] + cache_args)
    assert result.exit_code == 2
    result = runner.invoke(cli, ['resolve', '-m', 'nonsense'] + cache_args)
    assert result.exit_code == 2


def test_unknown_suite_is_rejected(runner, cache_args):
    result = runner.invoke(cli, ['run-suite', 'no-such-suite'] + cache_args)
    assert result.exit_code != 0
    result = runner.invoke(cli, ['run-suite'] + cache_args)
    assert result.exit_code == 2


def test_qregular_check_by_names(runner, cache_args):
    result = runner.invoke(cli, ['qregular-check', '--names', 'x1,x2', '--transfer'] + cache_args)
    assert result.exit_code == 0, result.output
    assert 'sequence:   x1, x2' in result.output


def test_qregular_check_inconclusive_exits_nonzero(runner, cache_args):
    result = runner.invoke(cli, ['qregular-check', '--names', 'x1,x2', '--truncation', '1'] + cache_args)
    assert result.exit_code == 1
    assert 'inconclusive' in result.output


def test_oracle_compare(runner, cache_args):
    result = runner.invoke(cli, ['oracle-compare', '--algebra', 'functions-p3-n2', '-m', 'cyclic:x1',
                                 '--degree-bound', '10', '--ext-degree', '1'] + cache_args)
    assert result.exit_code == 0, result.output
    assert 'agrees' in result.output


def test_identity_braiding_fails_validation(runner, cache_args):
    result = runner.invoke(cli, ['ctpp-check', '--braiding', 'identity', '-m', 'cyclic:x1', '-m', 'k',
                                 '--degree-bound', '8', '--ext-degree', '1'] + cache_args)
    assert result.exit_code == 1
    assert 'half-braiding/cyclic:x1' in result.output


@pytest.mark.slow
def test_run_suite_no_tpp_writes_report(runner, cache_args, tmp_path):
    report = tmp_path / 'no-tpp.json'
    result = runner.invoke(cli, ['run-suite', 'no-tpp', '--report', str(report)] + cache_args)
    assert result.exit_code == 0, result.output
    data = json.loads(report.read_text())
    assert data['suite'] == 'no-tpp'
    statuses = {check['name']: check['status'] for check in data['checks']}
    assert 'expected_failure' in statuses.values()
    assert 'failed' not in statuses.values()
