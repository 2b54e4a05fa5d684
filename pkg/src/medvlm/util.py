"""Small shared utilities: canonical JSON, hashing, atomic IO, locks.

Everything here must be deterministic across platforms and processes:
hashes use hashlib (never the builtin hash()), JSON is serialized with
sorted keys and fixed separators so digests are stable.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Iterator

from .errors import LockError

# Keys whose values vary run-to-run (timings, wall clocks). They are kept in
# artifacts for humans but stripped before computing content digests.
VOLATILE_KEYS = frozenset({"latency_ms", "wall_time_s", "timestamp", "created_at"})


def canonical_json(obj: Any) -> str:
    """Serialize to a canonical JSON string (sorted keys, no extra spaces)."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def strip_volatile(obj: Any) -> Any:
    """Recursively drop volatile keys so digests ignore timing noise."""
    if isinstance(obj, dict):
        return {k: strip_volatile(v) for k, v in obj.items() if k not in VOLATILE_KEYS}
    if isinstance(obj, list):
        return [strip_volatile(v) for v in obj]
    return obj


def sha256_hex(data: bytes | str) -> str:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()


def digest_obj(obj: Any) -> str:
    """Content digest of a JSON-serializable object, ignoring volatile keys."""
    return sha256_hex(canonical_json(strip_volatile(obj)))


def digest_file(path: str | Path, chunk: int = 1 << 20) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        while True:
            block = f.read(chunk)
            if not block:
                break
            h.update(block)
    return h.hexdigest()


def atomic_write_bytes(path: str | Path, data: bytes) -> None:
    """Write via a temp file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def atomic_write_text(path: str | Path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def write_json(path: str | Path, obj: Any, indent: int | None = 2) -> None:
    text = json.dumps(obj, sort_keys=True, indent=indent, ensure_ascii=False)
    atomic_write_text(path, text + "\n")


def read_json(path: str | Path) -> Any:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def write_jsonl(path: str | Path, rows: Iterable[Any]) -> None:
    buf = "".join(canonical_json(r) + "\n" for r in rows)
    atomic_write_text(path, buf)


def read_jsonl(path: str | Path) -> list[Any]:
    out = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


def iter_jsonl(path: str | Path) -> Iterator[Any]:
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                yield json.loads(line)


class DirLock:
    """Advisory lock file guarding an output directory.

    Stale locks (dead pid on this host) are reclaimed; a live lock raises
    LockError so two runs cannot interleave writes.
    """

    def __init__(self, directory: str | Path, name: str = ".medvlm.lock"):
        self.path = Path(directory) / name
        self._held = False

    def acquire(self) -> "DirLock":
        self.path.parent.mkdir(parents=True, exist_ok=True)
        payload = canonical_json({"pid": os.getpid()}).encode()
        try:
            fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            if not self._stale():
                raise LockError(f"output directory is locked: {self.path}")
            os.unlink(self.path)
            fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        with os.fdopen(fd, "wb") as f:
            f.write(payload)
        self._held = True
        return self

    def _stale(self) -> bool:
        try:
            pid = json.loads(self.path.read_text()).get("pid")
        except (OSError, ValueError):
            return True
        if not isinstance(pid, int):
            return True
        try:
            os.kill(pid, 0)
        except ProcessLookupError:
            return True
        except PermissionError:
            return False
        return pid == os.getpid()

    def release(self) -> None:
        if self._held:
            try:
                self.path.unlink()
            except FileNotFoundError:
                pass
            self._held = False

    def __enter__(self) -> "DirLock":
        return self.acquire()

    def __exit__(self, *exc: Any) -> None:
        self.release()
