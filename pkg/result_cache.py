"""
Result Caching
==============

Caches for computed resolutions and Ext tables:
- LRU (Least Recently Used) and LFU (Least Frequently Used) in-memory caches
- DiskCache: pickled payloads under a cache root, checked against a sha256 digest
- ResultCache: an in-memory cache in front of a DiskCache

Keys are content hashes, so deleting the cache only changes timings.
"""

import hashlib
import logging
import os
import pickle
import threading
import time
from collections import OrderedDict, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Union

from errors import CacheCorruptionError, ConfigError

LOGGER = logging.getLogger(__name__)

CACHE_DIR_ENV = "HYPERSUPPORT_CACHE_DIR"
DEFAULT_CACHE_DIR = Path.home() / ".cache" / "hypersupport"


@dataclass
class CacheItem:
    """Cache item with metadata"""
    key: str
    value: Any
    access_count: int = 0
    last_access_time: float = 0.0
    insert_time: float = 0.0


class LRUCache:
    """Least Recently Used Cache Implementation"""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.cache: OrderedDict[str, CacheItem] = OrderedDict()
        self.hits = 0
        self.misses = 0
        self.evictions = 0

    def get(self, key: str) -> Optional[Any]:
        if key in self.cache:
            item = self.cache[key]
            item.last_access_time = time.time()
            self.cache.move_to_end(key)
            self.hits += 1
            return item.value
        self.misses += 1
        return None

    def put(self, key: str, value: Any):
        current_time = time.time()
        if key in self.cache:
            item = self.cache[key]
            item.value = value
            item.last_access_time = current_time
            self.cache.move_to_end(key)
            return
        if len(self.cache) >= self.capacity:
            self.cache.popitem(last=False)
            self.evictions += 1
        self.cache[key] = CacheItem(key=key, value=value, last_access_time=current_time,
                                    insert_time=current_time)

    def contains(self, key: str) -> bool:
        return key in self.cache

    def get_stats(self) -> Dict:
        total_requests = self.hits + self.misses
        hit_rate = (self.hits / total_requests * 100) if total_requests > 0 else 0
        return {
            'strategy': 'LRU',
            'hits': self.hits,
            'misses': self.misses,
            'hit_rate': hit_rate,
            'evictions': self.evictions,
            'size': len(self.cache),
            'capacity': self.capacity,
        }


class LFUCache:
    """Least Frequently Used Cache Implementation"""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.cache: Dict[str, CacheItem] = {}
        self.frequency_map: Dict[int, OrderedDict[str, CacheItem]] = defaultdict(OrderedDict)
        self.min_frequency = 0
        self.hits = 0
        self.misses = 0
        self.evictions = 0

    def get(self, key: str) -> Optional[Any]:
        if key not in self.cache:
            self.misses += 1
            return None
        item = self.cache[key]
        old_freq = item.access_count
        item.access_count += 1
        item.last_access_time = time.time()

        bucket = self.frequency_map.get(old_freq)
        if bucket is not None and key in bucket:
            del bucket[key]
            if not bucket and old_freq == self.min_frequency:
                self.min_frequency += 1
        self.frequency_map[item.access_count][key] = item
        self.hits += 1
        return item.value

    def put(self, key: str, value: Any):
        current_time = time.time()
        if key in self.cache:
            self.get(key)
            self.cache[key].value = value
            return
        if len(self.cache) >= self.capacity:
            while not self.frequency_map.get(self.min_frequency):
                self.min_frequency += 1
            evicted, _ = self.frequency_map[self.min_frequency].popitem(last=False)
            del self.cache[evicted]
            self.evictions += 1
        item = CacheItem(key=key, value=value, access_count=1, last_access_time=current_time,
                         insert_time=current_time)
        self.cache[key] = item
        self.frequency_map[1][key] = item
        self.min_frequency = 1

    def contains(self, key: str) -> bool:
        return key in self.cache

    def get_stats(self) -> Dict:
        total_requests = self.hits + self.misses
        hit_rate = (self.hits / total_requests * 100) if total_requests > 0 else 0
        return {
            'strategy': 'LFU',
            'hits': self.hits,
            'misses': self.misses,
            'hit_rate': hit_rate,
            'evictions': self.evictions,
            'size': len(self.cache),
            'capacity': self.capacity,
        }


def create_memory_cache(strategy: str = 'LRU', capacity: int = 64) -> Union[LRUCache, LFUCache]:
    """Factory function to create an in-memory cache by strategy name"""
    strategies = {'LRU': LRUCache, 'LFU': LFUCache}
    if strategy.upper() not in strategies:
        raise ConfigError(f"unknown cache strategy '{strategy}'")
    return strategies[strategy.upper()](capacity)


# ============================================================================
# DISK CACHE
# ============================================================================

def resolve_cache_dir(cache_dir: Optional[Union[str, Path]] = None) -> Path:
    """--cache-dir, else $HYPERSUPPORT_CACHE_DIR, else ~/.cache/hypersupport."""
    if cache_dir:
        return Path(cache_dir).expanduser()
    env = os.environ.get(CACHE_DIR_ENV)
    if env:
        return Path(env).expanduser()
    return DEFAULT_CACHE_DIR


class DiskCache:
    """
    Pickled payloads stored as <root>/<namespace>/<sha256>.pkl with the
    payload digest next to them in <sha256>.sha256.
    """

    def __init__(self, root: Union[str, Path], namespace: str = "default"):
        self.root = Path(root)
        self.directory = self.root / namespace
        self.directory.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0
        self.rebuilds = 0

    @staticmethod
    def _name(key: str) -> str:
        return hashlib.sha256(key.encode()).hexdigest()

    def _paths(self, key: str):
        name = self._name(key)
        return self.directory / f"{name}.pkl", self.directory / f"{name}.sha256"

    def _load(self, key: str) -> Any:
        payload_path, digest_path = self._paths(key)
        payload = payload_path.read_bytes()
        expected = digest_path.read_text().strip() if digest_path.exists() else ""
        if hashlib.sha256(payload).hexdigest() != expected:
            raise CacheCorruptionError(f"digest mismatch for {payload_path.name}")
        return pickle.loads(payload)

    def get(self, key: str) -> Optional[Any]:
        payload_path, digest_path = self._paths(key)
        if not payload_path.exists():
            self.misses += 1
            return None
        try:
            value = self._load(key)
        except (CacheCorruptionError, pickle.UnpicklingError, EOFError) as exc:
            LOGGER.warning("cache entry %s is corrupt (%s); it will be rebuilt", payload_path.name, exc)
            payload_path.unlink(missing_ok=True)
            digest_path.unlink(missing_ok=True)
            self.rebuilds += 1
            self.misses += 1
            return None
        self.hits += 1
        return value

    def put(self, key: str, value: Any):
        payload_path, digest_path = self._paths(key)
        payload = pickle.dumps(value, protocol=pickle.HIGHEST_PROTOCOL)
        tmp = payload_path.with_suffix(".tmp")
        tmp.write_bytes(payload)
        tmp.replace(payload_path)
        digest_path.write_text(hashlib.sha256(payload).hexdigest())

    def contains(self, key: str) -> bool:
        return self._paths(key)[0].exists()

    def get_stats(self) -> Dict:
        return {
            'strategy': 'disk',
            'hits': self.hits,
            'misses': self.misses,
            'rebuilds': self.rebuilds,
            'size': len(list(self.directory.glob("*.pkl"))),
            'directory': str(self.directory),
        }


class ResultCache:
    """In-memory cache in front of an optional DiskCache; safe to share across worker threads."""

    def __init__(self, memory: Union[LRUCache, LFUCache], disk: Optional[DiskCache] = None):
        self.memory = memory
        self.disk = disk
        self._lock = threading.Lock()

    def get(self, key: str) -> Optional[Any]:
        with self._lock:
            value = self.memory.get(key)
            if value is None and self.disk is not None:
                value = self.disk.get(key)
                if value is not None:
                    self.memory.put(key, value)
            return value

    def put(self, key: str, value: Any):
        with self._lock:
            self.memory.put(key, value)
            if self.disk is not None:
                self.disk.put(key, value)

    def contains(self, key: str) -> bool:
        return self.memory.contains(key) or (self.disk is not None and self.disk.contains(key))

    def get_stats(self) -> Dict:
        stats = {'memory': self.memory.get_stats()}
        if self.disk is not None:
            stats['disk'] = self.disk.get_stats()
        return stats


def create_result_cache(cache_dir: Optional[Union[str, Path]] = None, strategy: str = 'LRU',
                        capacity: int = 64, persistent: bool = True,
                        namespace: str = "resolutions") -> ResultCache:
    """Factory function for the cache handed to minimal_resolution and ext_table"""
    disk = DiskCache(resolve_cache_dir(cache_dir), namespace) if persistent else None
    return ResultCache(create_memory_cache(strategy, capacity), disk)
