"""
Zero-table cache and memoisation of precomputed node rules.
"""
import logging
import threading
from functools import wraps
from typing import Any, Callable, Dict, Optional, TypeVar

from .backends.base import BaseBackend
from .backends.memory import MemoryBackend
from .numerics.quadrature import QuadSpec
from .phi import ModelOrder
from .serializers.base import BaseSerializer
from .serializers.json import JSONSerializer
from .utils.key import generate_key, table_key
from .zeros import ZeroTable, locate_zeros

logger = logging.getLogger(__name__)

T = TypeVar("T")

RULE_CACHE_SIZE = 256

_RULES = MemoryBackend(max_entries=RULE_CACHE_SIZE)


def configure_rule_cache(max_entries: Optional[int]) -> None:
    """
    Bound the module-wide store of node rules and Borel lines.

    Entries beyond the bound are dropped least recently used first; None
    removes the bound.
    """
    _RULES.resize(max_entries)
    logger.debug("rule cache bound set to %s", max_entries)


class TableCache:
    """
    Front end for zero tables.

    Lookups go to the in-process memory first, then to the persistent store
    (if one is configured); misses are built with ``locate_zeros`` and
    written through to both.
    """

    def __init__(
        self,
        store: Optional[BaseBackend] = None,
        serializer: Optional[BaseSerializer] = None,
        memory: Optional[MemoryBackend] = None,
    ):
        """
        Args:
            store: Persistent backend holding serialized tables (optional)
            serializer: Table codec. Defaults to JSONSerializer.
            memory: Session store of decoded tables. Defaults to a new MemoryBackend.
        """
        self.store = store
        self.serializer = serializer or JSONSerializer()
        self.memory = memory or MemoryBackend()
        self._build_locks: Dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    @staticmethod
    def key_for(m: int, count: int, spec: QuadSpec) -> str:
        return table_key(m, count, spec.rel_tol, spec.abs_tol)

    def _lock_for(self, key: str) -> threading.Lock:
        with self._locks_guard:
            return self._build_locks.setdefault(key, threading.Lock())

    def get(self, m: int, count: int, spec: Optional[QuadSpec] = None) -> Optional[ZeroTable]:
        """Cached table or None; never builds."""
        key = self.key_for(m, count, spec or QuadSpec())
        table = self.memory.get(key)
        if table is not None:
            return table
        if self.store is None:
            return None
        data = self.store.get(key)
        if data is None:
            return None
        table = self.serializer.deserialize(data)
        logger.info("loaded zero table %s from disk", key)
        return self.memory.setdefault(key, table)

    def put(self, table: ZeroTable, count: int) -> str:
        """Store a table under the key of (m, count, tolerances)."""
        key = self.key_for(table.order.m, count, table.quad_tols)
        self.memory.set(key, table)
        if self.store is not None:
            self.store.set(key, self.serializer.serialize(table))
        return key

    def get_or_build(self, m: int, count: int, spec: Optional[QuadSpec] = None) -> ZeroTable:
        """
        Table of the first ``count`` zeros for order m.

        Concurrent callers asking for the same table wait for a single build.
        """
        spec = spec or QuadSpec()
        key = self.key_for(m, count, spec)
        table = self.get(m, count, spec)
        if table is not None:
            return table
        with self._lock_for(key):
            table = self.get(m, count, spec)
            if table is not None:
                return table
            logger.info("building zero table m=%d count=%d", m, count)
            table = locate_zeros(ModelOrder(m), count, spec)
            self.put(table, count)
            return table

    def clear(self) -> None:
        self.memory.clear()
        if self.store is not None:
            self.store.clear()


def cached(key_prefix: str = "", backend: Optional[MemoryBackend] = None) -> Callable:
    """
    Memoise a function of hashable numeric arguments in a MemoryBackend.

    Keys encode floats exactly, so only bit-identical arguments share a value.

    Args:
        key_prefix: Prefix for keys
        backend: Store to use (a module-wide one by default)

    Returns:
        Decorated function with ``cache_clear()``
    """
    store = backend if backend is not None else _RULES

    def decorator(func: Callable[..., T]) -> Callable[..., T]:
        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> T:
            key = generate_key(key_prefix, func.__qualname__, args, kwargs)
            result = store.get(key)
            if result is not None:
                return result
            result = func(*args, **kwargs)
            return store.setdefault(key, result)

        def cache_clear() -> None:
            base = generate_key(key_prefix, func.__qualname__, (), {})
            for key in list(store.keys()):
                if key == base or key.startswith(base + ":"):
                    store.delete(key)

        wrapper.cache_clear = cache_clear
        return wrapper

    return decorator
