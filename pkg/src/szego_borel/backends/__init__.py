from .base import BaseBackend
from .filesystem import FileSystemBackend
from .memory import MemoryBackend

__all__ = ["BaseBackend", "FileSystemBackend", "MemoryBackend"]
