import pytest

from errors import ConfigError
from module_catalog import (NAMED_ALGEBRAS, build_algebra, build_catalog, cyclic_catalog,
                            get_named_algebra, parse_module, random_catalog)
from run_config import DEFAULT_SEED
from suites import QCI_RANDOM


@pytest.mark.parametrize("spec, dim", [
    ('k', 1),
    ('lambda', 9),
    ('simple:1', 1),
    ('free', 9),
    ('free:2', 9),
    ('cyclic:x1', 3),
    ('cyclic:x1;x2', 1),
    ('cyclic:x1*x2', 5),
    ('dual:cyclic:x1', 3),
    ('tensor:cyclic:x1|cyclic:x2', 9),
])
def test_parse_module_specs(qci, spec, dim):
    assert parse_module(qci, spec).dim == dim


def test_parse_block_algebra_specs(no_tpp):
    assert parse_module(no_tpp, 'truncated:x2:3').dim == 3
    assert parse_module(no_tpp, 'induced:truncated:x2:3').dim == 6


@pytest.mark.parametrize("spec", ['nonsense', 'cyclic:x9', 'simple:99', 'truncated:x1', 'random:abc'])
def test_bad_module_specs(qci, spec):
    with pytest.raises(ConfigError):
        parse_module(qci, spec)


def test_random_spec_is_reproducible(qci):
    first = parse_module(qci, 'random:5')
    second = parse_module(qci, 'random:5')
    assert first.content_hash() == second.content_hash()


def test_named_algebras_and_unknown_names():
    assert 'no-tpp' in NAMED_ALGEBRAS
    spec = get_named_algebra('truncated-p3')
    spec['p'] = 5
    assert get_named_algebra('truncated-p3')['p'] == 3
    with pytest.raises(ConfigError):
        get_named_algebra('e8')
    with pytest.raises(ConfigError):
        build_algebra({'kind': 'qci', 'l': 3})
    with pytest.raises(ConfigError):
        build_algebra({'kind': 'octonions'})


def test_cyclic_catalog_with_length_limit(qci):
    names = [e.name for e in cyclic_catalog(qci, 1, max_length=1)]
    assert sorted(names) == ['cyclic:x1', 'cyclic:x2']


def test_build_catalog_deduplicates(truncated):
    catalog = build_catalog(truncated, seed=1, random_count=0, include_carlson=False)
    assert [e.name for e in catalog] == ['k', 'cyclic:x1*x1']
    assert catalog[0].family == 'trivial'


def test_catalog_families(qci):
    catalog = build_catalog(qci, seed=3, random_count=2, max_length=1, include_simples=True,
                            include_carlson=False)
    families = [e.family for e in catalog]
    assert families.count('simple') == 8
    assert families.count('cyclic') == 2
    assert all(e.module.dim > 0 for e in catalog)
    assert len({e.module.content_hash() for e in catalog}) == len(catalog)


def test_random_catalog_seeds(qci):
    entries = random_catalog(qci, 2, seed=10)
    assert [e.name for e in entries] == ['random:10', 'random:11']
    assert entries[0].metadata == {'seed': 10}


@pytest.mark.parametrize("name", ['qci-l3-n2-standard', 'qci-l3-n2-extended'])
def test_qci_tpp_catalogs_hold_fifteen_modules(name, shared_cache):
    H = build_algebra(get_named_algebra(name))
    catalog = build_catalog(H, DEFAULT_SEED, random_count=QCI_RANDOM, max_generators=1,
                            include_carlson=True, cache=shared_cache)
    assert len(catalog) >= 15
    assert {'trivial', 'cyclic', 'carlson', 'random'} <= {e.family for e in catalog}
