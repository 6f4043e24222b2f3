import threading

import pytest

from szego_borel.backends.memory import MemoryBackend


def test_memory_backend_set_get():
    backend = MemoryBackend()
    backend.set("test_key", {"any": "object"})
    assert backend.get("test_key") == {"any": "object"}
    assert backend.get("missing") is None


def test_memory_backend_setdefault_keeps_first():
    backend = MemoryBackend()
    assert backend.setdefault("k", 1) == 1
    assert backend.setdefault("k", 2) == 1


def test_memory_backend_delete():
    backend = MemoryBackend()
    backend.set("test_key", b"test_value")
    backend.delete("test_key")
    assert backend.get("test_key") is None
    backend.delete("test_key")


def test_memory_backend_keys_clear():
    backend = MemoryBackend()
    backend.set("a", 1)
    backend.set("b", 2)
    assert sorted(backend.keys()) == ["a", "b"]
    assert len(backend) == 2
    assert "a" in backend
    backend.clear()
    assert len(backend) == 0


def test_memory_backend_threads():
    backend = MemoryBackend()

    def writer(n):
        for i in range(200):
            backend.setdefault(f"k{i}", n)

    threads = [threading.Thread(target=writer, args=(n,)) for n in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(backend) == 200


def test_memory_backend_drops_least_recently_used():
    backend = MemoryBackend(max_entries=3)
    for key in "abc":
        backend.set(key, key.upper())
    assert backend.get("a") == "A"
    backend.setdefault("d", "D")
    assert list(backend.keys()) == ["c", "a", "d"]
    assert backend.get("b") is None

    backend.resize(1)
    assert list(backend.keys()) == ["d"]
    backend.resize(None)
    for i in range(10):
        backend.set(str(i), i)
    assert len(backend) == 11


def test_memory_backend_rejects_empty_bound():
    with pytest.raises(ValueError):
        MemoryBackend(max_entries=0)
