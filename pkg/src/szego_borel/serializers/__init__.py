from .base import BaseSerializer
from .json import JSONSerializer, SerializationError

__all__ = ["BaseSerializer", "JSONSerializer", "SerializationError"]
