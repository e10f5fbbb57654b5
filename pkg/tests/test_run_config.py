import json

import pytest

from errors import ConfigError
from run_config import DEFAULT_SEED, RunConfig, load_config, make_config


def test_defaults():
    config = RunConfig()
    assert config.algebra == 'qci-l3-n2-standard'
    assert config.seed == DEFAULT_SEED
    assert config.modules == ['k']
    assert config.build_algebra().dimension() == 81


def test_hash_ignores_cache_report_and_workers(tmp_path):
    base = RunConfig()
    moved = RunConfig(cache_dir=str(tmp_path), cache_strategy='lfu', report=str(tmp_path / 'r.json'),
                      workers=4, table_csv=str(tmp_path / 't.csv'))
    assert moved.cache_strategy == 'LFU'
    assert base.content_hash() == moved.content_hash()
    assert base.content_hash() != RunConfig(degree_bound=10).content_hash()
    assert base.content_hash() != RunConfig(seed=1).content_hash()


def test_named_and_inline_algebras_hash_alike():
    inline = {'kind': 'qci', 'l': 3, 'matrix': [[1, 1], [-1, 1]], 'grouplikes': 'standard'}
    assert RunConfig(algebra=inline).content_hash() == RunConfig().content_hash()


@pytest.mark.parametrize("overrides", [
    {'degree_bound': 1},
    {'stability': 2},
    {'stability': 20, 'degree_bound': 12},
    {'extension': 0},
    {'workers': 0},
    {'cache_strategy': 'FIFO'},
])
def test_invalid_bounds(overrides):
    with pytest.raises(ConfigError):
        RunConfig(**overrides)


def test_field_override():
    assert RunConfig(field_name='prime:13').algebra_spec()['p'] == 13
    assert RunConfig(field_name='cyclotomic').algebra_spec()['field'] == 'cyclotomic'
    with pytest.raises(ConfigError):
        RunConfig(field_name='complex').algebra_spec()


def test_unknown_algebra_keys_and_names():
    with pytest.raises(ConfigError):
        RunConfig(algebra={'kind': 'qci', 'l': 3, 'colour': 'red'}).algebra_spec()
    with pytest.raises(ConfigError):
        RunConfig(algebra='no-such-algebra').build_algebra()


def test_load_config_with_overrides(tmp_path):
    path = tmp_path / 'run.json'
    path.write_text(json.dumps({'algebra': 'truncated-p3', 'modules': ['k', 'truncated:x1:2'],
                                'degree_bound': 8, 'suite': 'twtt'}))
    config = load_config(path, seed=7, workers=None)
    assert config.algebra == 'truncated-p3'
    assert config.modules == ['k', 'truncated:x1:2']
    assert config.seed == 7
    assert config.workers == 1
    assert make_config(str(path)).suite == 'twtt'


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / 'missing.json')
    bad = tmp_path / 'bad.json'
    bad.write_text('{not json')
    with pytest.raises(ConfigError):
        load_config(bad)
    unknown = tmp_path / 'unknown.json'
    unknown.write_text(json.dumps({'algebra': 'no-tpp', 'colour': 'red'}))
    with pytest.raises(ConfigError):
        load_config(unknown)
