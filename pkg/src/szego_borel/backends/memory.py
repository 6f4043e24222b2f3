"""
In-memory store backend.
"""
import threading
from collections import OrderedDict
from typing import Any, Iterator, Optional

from .base import BaseBackend


class MemoryBackend(BaseBackend):
    """
    Dictionary store shared by the threads of one process.

    Values are kept as given (no serialization), which lets the same class
    hold decoded zero tables and precomputed node rules.  With ``max_entries``
    set the store keeps only the most recently used entries.
    """

    def __init__(self, max_entries: Optional[int] = None):
        """
        Args:
            max_entries: Upper bound on stored entries; None for no bound

        Raises:
            ValueError: If max_entries is not positive
        """
        self._store: "OrderedDict[str, Any]" = OrderedDict()
        self._lock = threading.Lock()
        self.max_entries: Optional[int] = None
        self.resize(max_entries)

    def resize(self, max_entries: Optional[int]) -> None:
        """Change the bound, dropping the least recently used entries beyond it."""
        if max_entries is not None and max_entries < 1:
            raise ValueError(f"max_entries must be positive, got {max_entries}")
        with self._lock:
            self.max_entries = max_entries
            self._evict()

    def _evict(self) -> None:
        if self.max_entries is None:
            return
        while len(self._store) > self.max_entries:
            self._store.popitem(last=False)

    def get(self, key: str) -> Optional[Any]:
        with self._lock:
            if key not in self._store:
                return None
            self._store.move_to_end(key)
            return self._store[key]

    def set(self, key: str, value: Any) -> None:
        with self._lock:
            self._store[key] = value
            self._store.move_to_end(key)
            self._evict()

    def setdefault(self, key: str, value: Any) -> Any:
        """Store value unless key is present; return the stored value."""
        with self._lock:
            if key in self._store:
                self._store.move_to_end(key)
                return self._store[key]
            self._store[key] = value
            self._evict()
            return value

    def delete(self, key: str) -> None:
        with self._lock:
            self._store.pop(key, None)

    def keys(self) -> Iterator[str]:
        with self._lock:
            return iter(list(self._store))

    def clear(self) -> None:
        with self._lock:
            self._store.clear()

    def __len__(self) -> int:
        with self._lock:
            return len(self._store)
