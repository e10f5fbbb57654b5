"""
Reports
=======

A Report is JSON text with a fixed key order:

    schema_version, tool_version, config_hash, seed, suite, algebra, checks

and one record per check with name, verdict, status, expected_failure,
witnesses and details. Inconclusive checks are recorded with status
'inconclusive', never dropped. Wall-clock timings go to a
``<report>.timings.json`` sidecar so that two runs of the same config
write byte-identical reports.

Per-degree tables (Ext dimensions, twisted-product comparisons) are pandas
DataFrames printed with ``to_string`` and optionally written with ``to_csv``.
"""

import json
import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence

import numpy as np
import pandas as pd

from errors import InconclusiveError
from run_config import SCHEMA_VERSION, TOOL_VERSION, RunConfig

LOGGER = logging.getLogger(__name__)

STATUSES = ('passed', 'failed', 'inconclusive', 'expected_failure')


def to_jsonable(value: Any) -> Any:
    """Convert tuples, sets, numpy scalars and non-string keys into plain JSON values."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(to_jsonable(v) for v in value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)


@dataclass
class CheckRecord:
    """
    Outcome of one check.

    Attributes:
        name: check identifier
        verdict: short human-readable outcome
        status: passed, failed, inconclusive or expected_failure
        expected_failure: the check is a negative control
        witnesses: points, degrees or pairs behind the verdict
        details: the checker's report
        seconds: wall-clock time (sidecar only)
    """
    name: str
    verdict: str
    status: str
    expected_failure: bool = False
    witnesses: Any = None
    details: Dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'verdict': self.verdict,
            'status': self.status,
            'expected_failure': self.expected_failure,
            'witnesses': to_jsonable(self.witnesses),
            'details': to_jsonable(self.details),
        }


class Report:
    """Checks of one run, in the order they were added."""

    def __init__(self, config: RunConfig, suite: Optional[str] = None, algebra: str = ""):
        self.config = config
        self.suite = suite
        self.algebra = algebra
        self.checks: List[CheckRecord] = []

    def add(self, name: str, passed: bool, verdict: str = "", witnesses: Any = None,
            details: Optional[Dict] = None, expected_failure: bool = False,
            seconds: float = 0.0) -> CheckRecord:
        """
        Record a check. For a negative control, ``passed`` says whether the
        expected failure was observed.
        """
        if expected_failure:
            status = 'expected_failure' if passed else 'failed'
        else:
            status = 'passed' if passed else 'failed'
        record = CheckRecord(name=name, verdict=verdict or status, status=status,
                             expected_failure=expected_failure, witnesses=witnesses,
                             details=details or {}, seconds=seconds)
        self.checks.append(record)
        LOGGER.info("check %s: %s", name, record.verdict)
        return record

    def add_inconclusive(self, name: str, error: InconclusiveError, seconds: float = 0.0) -> CheckRecord:
        record = CheckRecord(name=name, verdict=str(error), status='inconclusive',
                             witnesses=list(getattr(error, 'witnesses', []) or []), seconds=seconds)
        self.checks.append(record)
        LOGGER.warning("check %s inconclusive: %s", name, error)
        return record

    @property
    def failed(self) -> List[CheckRecord]:
        return [c for c in self.checks if c.status in ('failed', 'inconclusive')]

    @property
    def exit_code(self) -> int:
        return 1 if self.failed else 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'schema_version': SCHEMA_VERSION,
            'tool_version': TOOL_VERSION,
            'config_hash': self.config.content_hash(),
            'seed': self.config.seed,
            'suite': self.suite,
            'algebra': self.algebra,
            'checks': [c.to_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def timings(self) -> Dict[str, float]:
        return {c.name: round(c.seconds, 3) for c in self.checks}

    def write(self, path: str):
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(self.to_json())
        Path(f"{path}.timings.json").write_text(json.dumps(self.timings(), indent=2) + "\n")
        LOGGER.info("report written to %s", target)

    def get_stats(self) -> Dict[str, int]:
        stats = {status: 0 for status in STATUSES}
        for c in self.checks:
            stats[c.status] += 1
        stats['total'] = len(self.checks)
        return stats

    def summary_frame(self) -> pd.DataFrame:
        return pd.DataFrame([{'check': c.name, 'status': c.status, 'verdict': c.verdict}
                             for c in self.checks], columns=['check', 'status', 'verdict'])


@contextmanager
def stopwatch() -> Iterator[Dict[str, float]]:
    """Yields a dict whose 'seconds' entry is filled in on exit."""
    timer = {'seconds': 0.0}
    start = time.perf_counter()
    try:
        yield timer
    finally:
        timer['seconds'] = time.perf_counter() - start


# ============================================================================
# TABLES
# ============================================================================

def degree_table(rows: Sequence[Dict[str, Any]]) -> pd.DataFrame:
    """Per-degree rows (ExtTable.to_rows, twisted-product comparisons) as a DataFrame."""
    frame = pd.DataFrame(list(rows))
    if 'degree' in frame.columns:
        frame = frame.set_index('degree')
    return frame


def render_table(frame: pd.DataFrame, csv_path: Optional[str] = None) -> str:
    if csv_path:
        frame.to_csv(csv_path)
        LOGGER.info("table written to %s", csv_path)
    return frame.to_string()
