"""Tests for the file system table store."""
import os
import shutil
import tempfile

import pytest

from szego_borel.backends.filesystem import FileSystemBackend, atomic_write


@pytest.fixture
def table_dir():
    """Create a temporary directory for table files."""
    temp_dir = tempfile.mkdtemp()
    yield temp_dir
    shutil.rmtree(temp_dir, ignore_errors=True)


@pytest.fixture
def store(table_dir):
    return FileSystemBackend(table_dir=table_dir)


def test_filesystem_init(table_dir):
    """Test directory creation and permissions."""
    FileSystemBackend(table_dir)
    assert os.path.isdir(table_dir)

    custom_dir = os.path.join(table_dir, "custom")
    FileSystemBackend(custom_dir, dir_mode=0o755)
    assert oct(os.stat(custom_dir).st_mode)[-3:] == "755"

    with pytest.raises(OSError):
        FileSystemBackend(os.path.join(table_dir, "missing"), create_dir=False)


def test_filesystem_set_get(store):
    store.set("zeros-m2-n5-abc", b'{"m": 2}')
    assert store.get("zeros-m2-n5-abc") == b'{"m": 2}'
    assert store.get("nonexistent") is None

    store.set("empty", b"")
    assert store.get("empty") == b""


def test_filesystem_file_layout(store, table_dir):
    store.set("zeros-m3-n4-def", b"data")
    path = os.path.join(table_dir, "zeros-m3-n4-def.json")
    assert store.path_for("zeros-m3-n4-def") == path
    assert os.path.exists(path)
    assert oct(os.stat(path).st_mode)[-3:] == "644"
    # no temporary files left behind
    assert [n for n in os.listdir(table_dir) if n.startswith(".tmp-")] == []


def test_filesystem_rejects_path_keys(store):
    with pytest.raises(ValueError):
        store.set("../escape", b"x")
    with pytest.raises(ValueError):
        store.get(".hidden")


def test_filesystem_overwrite(store):
    for i in range(20):
        store.set("key", f"value{i}".encode())
    assert store.get("key") == b"value19"


def test_filesystem_delete(store):
    store.set("key1", b"value1")
    path = store.path_for("key1")
    store.delete("key1")
    assert store.get("key1") is None
    assert not os.path.exists(path)
    # deleting a missing key is not an error
    store.delete("nonexistent")


def test_filesystem_keys_and_clear(store, table_dir):
    store.set("b", b"2")
    store.set("a", b"1")
    assert list(store.keys()) == ["a", "b"]
    assert "a" in store

    other = os.path.join(table_dir, "notes.txt")
    with open(other, "w") as f:
        f.write("keep me")
    store.clear()
    assert list(store.keys()) == []
    assert os.path.exists(other)
    store.clear()


def test_filesystem_readonly_dir(table_dir):
    readonly_dir = os.path.join(table_dir, "readonly")
    os.makedirs(readonly_dir, mode=0o555)
    store = FileSystemBackend(readonly_dir)
    if os.access(readonly_dir, os.W_OK):
        pytest.skip("running with privileges that ignore directory modes")
    with pytest.raises(OSError):
        store.set("key", b"value")


def test_atomic_write_keeps_target_on_failure(table_dir, monkeypatch):
    path = os.path.join(table_dir, "zeros.json")
    atomic_write(path, b"old table")

    def fail(*args):
        raise OSError("disk full")

    with monkeypatch.context() as mp, pytest.raises(OSError, match="disk full"):
        mp.setattr(os, "replace", fail)
        atomic_write(path, b"new table")

    with open(path, "rb") as f:
        assert f.read() == b"old table"
    assert os.listdir(table_dir) == ["zeros.json"]
