import time

import pytest
import sympy

from errors import ConfigError, InconclusiveError
from reports import Report
from run_config import RunConfig
from suites import SUITES, SuiteItem, _deformation_pairs, _outcome, run_items, run_suite


def slow_item(name, delay, passed=True, expected_failure=False):
    def run():
        time.sleep(delay)
        return _outcome(passed, name)
    return SuiteItem(name, run, expected_failure)


def inconclusive_item(name):
    def run():
        raise InconclusiveError("window too small", witnesses=[5, 6])
    return SuiteItem(name, run)


def test_known_suites():
    assert sorted(SUITES) == ['borel-a2', 'connected-tpp', 'invariance', 'no-tpp', 'qci-centralized',
                              'qci-tpp', 'qregular-a', 'twtt', 'ures-nilpotent']


def test_unknown_suite_raises():
    with pytest.raises(ConfigError):
        run_suite('no-such-suite', RunConfig())


def test_run_items_keeps_item_order_with_workers():
    items = [slow_item('first', 0.05), slow_item('second', 0.0), slow_item('third', 0.02)]
    report = run_items(Report(RunConfig()), items, workers=3)
    assert [c.name for c in report.checks] == ['first', 'second', 'third']
    assert report.exit_code == 0


def test_run_items_records_inconclusive_and_negative_controls():
    items = [inconclusive_item('support/x'),
             slow_item('tpp/control', 0.0, passed=True, expected_failure=True),
             slow_item('tpp/broken', 0.0, passed=False)]
    report = run_items(Report(RunConfig()), items)
    assert [c.status for c in report.checks] == ['inconclusive', 'expected_failure', 'failed']
    assert report.checks[0].witnesses == [5, 6]


def test_deformation_pairs_share_linear_parts():
    f1, f2 = sympy.symbols('f1 f2')
    pairs = _deformation_pairs(3, 8, seed=1)
    assert len(pairs) == 8
    assert pairs == _deformation_pairs(3, 8, seed=1)
    for f, g in pairs:
        difference = sympy.expand(sympy.sympify(g) - sympy.sympify(f))
        assert sympy.Poly(difference, f1, f2).total_degree() == 2
        linear = [sympy.diff(sympy.sympify(f), x) for x in (f1, f2)]
        assert any(int(c) % 3 for c in linear)


@pytest.mark.slow
def test_qregular_suite_passes():
    report = run_suite('qregular-a', RunConfig())
    assert report.exit_code == 0
    names = [c.name for c in report.checks]
    assert 'A2-l3/character-E13' in names
    assert len(names) == 8


@pytest.mark.slow
def test_no_tpp_suite_observes_the_failure(shared_cache):
    report = run_suite('no-tpp', RunConfig(algebra='no-tpp', degree_bound=10, extension=1), shared_cache)
    statuses = {c.name: c.status for c in report.checks}
    assert statuses['no-tpp/tpp/truncated:x2:3|lambda'] == 'expected_failure'
    assert report.exit_code == 0
