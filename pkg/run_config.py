"""
Run Configuration
=================

RunConfig collects everything a run depends on: the algebra config, the
coefficient field, module specs, the bounds (D, s, extension degree) and
the seed. Its content hash covers exactly those fields, so the cache
directory and strategy, report path and worker count never change a hash.

Config files are JSON:

    {
      "algebra": "qci-l3-n2-standard"          (a named config, or an object
                                               with kind/l/p/matrix/...),
      "field_name": "prime",                   (prime, prime:<p> or cyclotomic)
      "modules": ["k", "cyclic:x1"],
      "degree_bound": 12, "stability": 4, "extension": 2,
      "seed": 20240917, "suite": "no-tpp"
    }
"""

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from errors import ConfigError
from hopf_algebras import HopfAlgebra
from module_catalog import build_algebra, get_named_algebra

LOGGER = logging.getLogger(__name__)

DEFAULT_SEED = 20240917
TOOL_VERSION = "1.0.0"
SCHEMA_VERSION = 1

ALGEBRA_KEYS = ('kind', 'l', 'p', 'matrix', 'grouplikes', 'rank', 'lattice', 'permutations',
                'field', 'brackets', 'dim', 'primitive_coproduct')
UNHASHED = ('cache_dir', 'cache_strategy', 'report', 'workers', 'table_csv')
CACHE_STRATEGIES = ('LRU', 'LFU')


@dataclass
class RunConfig:
    """
    Inputs of one run.

    Attributes:
        algebra: named config or algebra config object
        field_name: field override: 'prime', 'prime:<p>' or 'cyclotomic' (None keeps the config's)
        modules: module spec strings
        degree_bound: D, the top Ext degree
        stability: s, the stability window of support verdicts
        extension: e, points are enumerated over F_{p^e}
        seed: seed of every random choice
        suite: suite name for run-suite
        sigma_check: also compute the sigma-variant of supports
        cache_dir: cache root (None: environment or default)
        cache_strategy: eviction policy of the in-memory resolution cache, LRU or LFU
        report: report path (None: stdout only)
        workers: worker threads for independent checks
        table_csv: optional CSV path for per-degree tables
    """
    algebra: Union[str, Dict[str, Any]] = 'qci-l3-n2-standard'
    field_name: Optional[str] = None
    modules: List[str] = field(default_factory=lambda: ['k'])
    degree_bound: int = 12
    stability: int = 4
    extension: int = 2
    seed: int = DEFAULT_SEED
    suite: Optional[str] = None
    sigma_check: bool = True
    cache_dir: Optional[str] = None
    cache_strategy: str = 'LRU'
    report: Optional[str] = None
    workers: int = 1
    table_csv: Optional[str] = None

    def __post_init__(self):
        if self.degree_bound < 2:
            raise ConfigError("degree bound must be at least 2")
        if not 3 <= self.stability <= self.degree_bound + 1:
            raise ConfigError(f"stability window {self.stability} does not fit degree bound {self.degree_bound}")
        if self.extension < 1:
            raise ConfigError("extension degree must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be positive")
        self.cache_strategy = self.cache_strategy.upper()
        if self.cache_strategy not in CACHE_STRATEGIES:
            raise ConfigError(f"unknown cache strategy '{self.cache_strategy}'")

    def algebra_spec(self) -> Dict[str, Any]:
        spec = get_named_algebra(self.algebra) if isinstance(self.algebra, str) else dict(self.algebra)
        unknown = sorted(set(spec) - set(ALGEBRA_KEYS))
        if unknown:
            raise ConfigError(f"unknown algebra config keys {unknown}")
        if self.field_name:
            kind, _, p = self.field_name.partition(':')
            if kind not in ('prime', 'cyclotomic'):
                raise ConfigError(f"unknown field '{self.field_name}'")
            spec['field'] = kind
            if p:
                spec['p'] = int(p)
            elif kind == 'cyclotomic':
                spec.pop('p', None)
        return spec

    def build_algebra(self) -> HopfAlgebra:
        return build_algebra(self.algebra_spec())

    def hashed_fields(self) -> Dict[str, Any]:
        data = {f.name: getattr(self, f.name) for f in fields(self) if f.name not in UNHASHED}
        data['algebra'] = self.algebra_spec()
        return data

    def content_hash(self) -> str:
        text = json.dumps(self.hashed_fields(), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(text.encode()).hexdigest()

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def load_config(path: Union[str, Path], **overrides) -> RunConfig:
    """Read a JSON config file; keyword overrides that are not None win."""
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file {path} not found") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("a config file holds one JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config keys {unknown}")
    data.update({k: v for k, v in overrides.items() if v is not None})
    LOGGER.debug("loaded config %s", path)
    return RunConfig(**data)


def make_config(config_path: Optional[str] = None, **overrides) -> RunConfig:
    """Factory used by the CLI: a config file plus flag overrides, or defaults plus overrides."""
    if config_path:
        return load_config(config_path, **overrides)
    return RunConfig(**{k: v for k, v in overrides.items() if v is not None})
