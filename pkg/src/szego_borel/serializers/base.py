"""
Abstract base class for zero-table serializers.
"""
from abc import ABC, abstractmethod

from ..zeros import ZeroTable


class BaseSerializer(ABC):
    """Converts ZeroTable objects to bytes and back."""

    @abstractmethod
    def serialize(self, table: ZeroTable) -> bytes:
        """
        Serialize a table to bytes.

        Raises:
            SerializationError: If serialization fails
        """

    @abstractmethod
    def deserialize(self, data: bytes) -> ZeroTable:
        """
        Rebuild a table from bytes.

        Raises:
            SerializationError: If the data is not a valid table document
        """
