"""
Base class for table store backends.
"""
from abc import ABC, abstractmethod
from typing import Any, Iterator, Optional


class BaseBackend(ABC):
    """Abstract base class for stores of zero tables and node rules."""

    @abstractmethod
    def get(self, key: str) -> Optional[Any]:
        """
        Retrieve a stored value.

        Args:
            key: Store key

        Returns:
            Stored value or None if not found
        """

    @abstractmethod
    def set(self, key: str, value: Any) -> None:
        """
        Store a value under key, replacing any previous one.

        Args:
            key: Store key
            value: Value to store
        """

    @abstractmethod
    def delete(self, key: str) -> None:
        """Delete a stored value; missing keys are ignored."""

    @abstractmethod
    def keys(self) -> Iterator[str]:
        """Iterate over the stored keys."""

    @abstractmethod
    def clear(self) -> None:
        """Remove every stored value."""

    def __contains__(self, key: str) -> bool:
        return self.get(key) is not None
