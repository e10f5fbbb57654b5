import json

import numpy as np

from errors import InconclusiveError
from reports import Report, degree_table, render_table, stopwatch, to_jsonable
from run_config import RunConfig


def build_report():
    report = Report(RunConfig(), 'no-tpp', 'no-tpp')
    report.add('supports/V', True, "supp V = {[1:0]}", witnesses={'[1:0]': [9, 10]}, seconds=0.5)
    report.add('tpp/V|W', True, 'lhs_proper_superset', expected_failure=True, seconds=1.25)
    return report


def test_report_key_order():
    data = json.loads(build_report().to_json())
    assert list(data) == ['schema_version', 'tool_version', 'config_hash', 'seed', 'suite',
                          'algebra', 'checks']
    assert list(data['checks'][0]) == ['name', 'verdict', 'status', 'expected_failure',
                                       'witnesses', 'details']
    assert data['checks'][1]['status'] == 'expected_failure'


def test_reports_are_byte_identical_and_timings_go_to_sidecar(tmp_path):
    first, second = tmp_path / 'a.json', tmp_path / 'b.json'
    build_report().write(str(first))
    other = build_report()
    other.checks[0].seconds = 99.0
    other.write(str(second))
    assert first.read_bytes() == second.read_bytes()
    timings = json.loads((tmp_path / 'a.json.timings.json').read_text())
    assert timings == {'supports/V': 0.5, 'tpp/V|W': 1.25}


def test_exit_code_and_stats():
    report = build_report()
    assert report.exit_code == 0
    report.add('tpp/k|k', False, 'incomparable')
    report.add_inconclusive('support/random', InconclusiveError("raise D", witnesses=[8, 9]))
    assert report.exit_code == 1
    assert [c.name for c in report.failed] == ['tpp/k|k', 'support/random']
    stats = report.get_stats()
    assert stats == {'passed': 1, 'failed': 1, 'inconclusive': 1, 'expected_failure': 1, 'total': 4}
    assert report.checks[-1].witnesses == [8, 9]


def test_unobserved_negative_control_fails():
    report = Report(RunConfig())
    record = report.add('tpp/V|W', False, 'equal', expected_failure=True)
    assert record.status == 'failed'


def test_to_jsonable():
    value = {(1, 2): {3, 1}, 'n': np.int64(4), 'ok': np.bool_(True), 'point': (0, 1)}
    assert to_jsonable(value) == {'(1, 2)': [1, 3], 'n': 4, 'ok': True, 'point': [0, 1]}


def test_degree_tables(tmp_path):
    frame = degree_table([{'degree': 0, 'dim': 1}, {'degree': 1, 'dim': 0}])
    assert list(frame.index) == [0, 1]
    csv = tmp_path / 'table.csv'
    text = render_table(frame, str(csv))
    assert 'dim' in text
    assert csv.read_text().startswith('degree,dim')
    assert render_table(build_report().summary_frame()).count('\n') == 2


def test_stopwatch():
    with stopwatch() as timer:
        sum(range(1000))
    assert timer['seconds'] >= 0.0
