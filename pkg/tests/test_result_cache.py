import logging

import pytest

from errors import ConfigError
from result_cache import (CACHE_DIR_ENV, DiskCache, LFUCache, LRUCache, create_memory_cache,
                          create_result_cache, resolve_cache_dir)


def test_lru_evicts_least_recently_used():
    cache = LRUCache(2)
    cache.put('a', 1)
    cache.put('b', 2)
    assert cache.get('a') == 1
    cache.put('c', 3)
    assert not cache.contains('b')
    assert cache.contains('a') and cache.contains('c')
    stats = cache.get_stats()
    assert stats['evictions'] == 1
    assert stats['hits'] == 1


def test_lfu_evicts_least_frequently_used():
    cache = LFUCache(2)
    cache.put('a', 1)
    cache.put('b', 2)
    cache.get('a')
    cache.get('a')
    cache.get('b')
    cache.put('c', 3)
    assert not cache.contains('b')
    assert cache.get('a') == 1
    assert cache.get('missing') is None
    assert cache.get_stats()['misses'] == 1


def test_memory_cache_factory():
    assert isinstance(create_memory_cache('lru', 4), LRUCache)
    assert isinstance(create_memory_cache('LFU', 4), LFUCache)
    with pytest.raises(ConfigError):
        create_memory_cache('FIFO', 4)
    lfu = create_result_cache(strategy='LFU', capacity=4, persistent=False)
    assert isinstance(lfu.memory, LFUCache)
    assert lfu.disk is None


def test_disk_cache_round_trip(tmp_path):
    cache = DiskCache(tmp_path, 'resolutions')
    cache.put('res:abc:4', {'ranks': [1, 2, 3]})
    assert cache.contains('res:abc:4')
    assert DiskCache(tmp_path, 'resolutions').get('res:abc:4') == {'ranks': [1, 2, 3]}
    assert cache.get_stats()['size'] == 1


def test_corrupt_entry_is_rebuilt_with_warning(tmp_path, caplog):
    cache = DiskCache(tmp_path)
    cache.put('key', [1, 2, 3])
    payload = next(cache.directory.glob('*.pkl'))
    payload.write_bytes(payload.read_bytes() + b'garbage')
    with caplog.at_level(logging.WARNING, logger='result_cache'):
        assert cache.get('key') is None
    assert 'corrupt' in caplog.text
    assert cache.rebuilds == 1
    assert not cache.contains('key')
    cache.put('key', [1, 2, 3])
    assert cache.get('key') == [1, 2, 3]


def test_cache_dir_resolution(monkeypatch, tmp_path):
    monkeypatch.setenv(CACHE_DIR_ENV, str(tmp_path / 'env'))
    assert resolve_cache_dir() == tmp_path / 'env'
    assert resolve_cache_dir(tmp_path / 'flag') == tmp_path / 'flag'
    monkeypatch.delenv(CACHE_DIR_ENV)
    assert resolve_cache_dir().name == 'hypersupport'


def test_result_cache_reads_through_to_disk(tmp_path):
    first = create_result_cache(tmp_path, capacity=2)
    first.put('key', 'value')
    second = create_result_cache(tmp_path, capacity=2)
    assert second.get('key') == 'value'
    assert second.memory.contains('key')
    stats = second.get_stats()
    assert stats['disk']['hits'] == 1


def test_memory_only_result_cache():
    cache = create_result_cache(persistent=False)
    assert cache.disk is None
    assert cache.get('nothing') is None
    assert 'disk' not in cache.get_stats()
