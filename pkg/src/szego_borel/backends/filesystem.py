"""
File system backend for zero tables.

Each entry is one file named after its key.  Writes go to a temporary file
in the same directory that is then renamed over the target, so readers never
see a partially written table.
"""
import logging
import os
import tempfile
from typing import Iterator, Optional

from .base import BaseBackend

logger = logging.getLogger(__name__)

SUFFIX = ".json"


def atomic_write(path: str, data: bytes, file_mode: int = 0o644) -> None:
    """
    Write data to path through a temporary file in the same directory.

    The target is either left as it was or holds all of data; the temporary
    file is removed when any step fails.
    """
    directory = os.path.dirname(os.path.abspath(path))
    fd, temp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
            f.flush()
            os.fsync(f.fileno())
        os.chmod(temp_path, file_mode)
        os.replace(temp_path, path)
    except BaseException:
        if os.path.exists(temp_path):
            os.unlink(temp_path)
        raise


class FileSystemBackend(BaseBackend):
    """
    Store of serialized tables (bytes) in a directory.

    Keys must be usable as file names; ``utils.key.table_key`` produces such keys.
    """

    def __init__(
        self,
        table_dir: str = ".szego_borel",
        create_dir: bool = True,
        dir_mode: int = 0o700,
        file_mode: int = 0o644,
    ):
        """
        Args:
            table_dir: Directory holding the table files
            create_dir: Whether to create the directory if it doesn't exist
            dir_mode: Permission mode for the directory
            file_mode: Permission mode for table files

        Raises:
            OSError: If create_dir is False and table_dir doesn't exist
        """
        self.table_dir = os.path.abspath(table_dir)
        self.dir_mode = dir_mode
        self.file_mode = file_mode

        if not os.path.isdir(self.table_dir):
            if create_dir:
                os.makedirs(self.table_dir, mode=self.dir_mode, exist_ok=True)
            else:
                raise OSError(f"Table directory {self.table_dir} does not exist")

    def path_for(self, key: str) -> str:
        if os.sep in key or key.startswith("."):
            raise ValueError(f"Key cannot be used as a file name: {key!r}")
        return os.path.join(self.table_dir, key + SUFFIX)

    def get(self, key: str) -> Optional[bytes]:
        path = self.path_for(key)
        try:
            with open(path, "rb") as f:
                data = f.read()
        except FileNotFoundError:
            return None
        logger.info("read %s (%d bytes)", path, len(data))
        return data

    def set(self, key: str, value: bytes) -> None:
        path = self.path_for(key)
        atomic_write(path, value, self.file_mode)
        logger.info("wrote %s", path)

    def delete(self, key: str) -> None:
        try:
            os.unlink(self.path_for(key))
        except OSError:
            pass

    def keys(self) -> Iterator[str]:
        for name in sorted(os.listdir(self.table_dir)):
            if name.endswith(SUFFIX) and not name.startswith("."):
                yield name[: -len(SUFFIX)]

    def clear(self) -> None:
        for key in list(self.keys()):
            self.delete(key)
