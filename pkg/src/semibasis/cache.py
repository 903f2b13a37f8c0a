"""Disk cache for submodule counts.

Counts are deterministic, so the store is append-only: one record per
line, ``n;L;i;a;p;json-map`` with multisegments in canonical text form
and the count map JSON-encoded with sorted keys.  Records are verified
on load; any malformed line, duplicate key with a different value, or
count total that disagrees with the Gaussian binomial is reported as
corruption rather than silently ignored.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from .errors import CacheCorruptError, ParseError
from .linalg import gaussian_binomial
from .quiver import Multisegment, t_top

__all__ = ["HallCache", "ENV_CACHE_DIR", "cache_dir_from_env"]

ENV_CACHE_DIR = "SEMIBASIS_CACHE_DIR"

_FILE_NAME = "hall_counts.txt"

Key = tuple[int, tuple[tuple[int, int], ...], int, int, int]


def cache_dir_from_env() -> str | None:
    """The cache directory configured via the environment, if any."""
    value = os.environ.get(ENV_CACHE_DIR, "").strip()
    return value or None


class HallCache:
    """Append-only store of hall_counts_simple_top results.

    One instance owns one directory; the file inside it is created on
    first write.  All reads go through an in-memory index loaded once.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.path = self.directory / _FILE_NAME
        self._index: dict[Key, dict[Multisegment, int]] = {}
        self._loaded = False
        self._load_error: CacheCorruptError | None = None
        self._handle = None

    # -- encoding

    @staticmethod
    def _encode(key: Key, counts: dict[Multisegment, int]) -> str:
        n, segs, i, a, p = key
        payload = json.dumps(
            {cls.text(): c for cls, c in counts.items()},
            sort_keys=True,
            separators=(",", ":"),
        )
        return f"{n};{Multisegment(segs).text()};{i};{a};{p};{payload}"

    @staticmethod
    def _decode(line: str, lineno: int) -> tuple[Key, dict[Multisegment, int]]:
        parts = line.split(";", 5)
        if len(parts) != 6:
            raise CacheCorruptError(f"line {lineno}: expected 6 fields, got {len(parts)}")
        try:
            n, i, a, p = int(parts[0]), int(parts[2]), int(parts[3]), int(parts[4])
            label = Multisegment.parse(parts[1])
            raw = json.loads(parts[5])
            counts = {Multisegment.parse(text): int(c) for text, c in raw.items()}
        except (ValueError, ParseError, json.JSONDecodeError) as exc:
            raise CacheCorruptError(f"line {lineno}: {exc}") from exc
        return (n, label.segments, i, a, p), counts

    # -- storage

    def _load(self) -> None:
        # a corrupt file stays unusable until cleared: re-raise on every
        # access instead of serving (or extending) a partial index
        if self._load_error is not None:
            raise self._load_error
        if self._loaded:
            return
        if not self.path.exists():
            self._loaded = True
            return
        try:
            with self.path.open("r", encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    line = line.strip()
                    if not line:
                        continue
                    key, counts = self._decode(line, lineno)
                    known = self._index.get(key)
                    if known is not None and known != counts:
                        raise CacheCorruptError(
                            f"line {lineno}: conflicting record for key {key[:1] + key[2:]}"
                        )
                    self._index[key] = counts
        except CacheCorruptError as exc:
            self._index.clear()
            self._load_error = exc
            raise
        self._loaded = True

    def get(self, n: int, m: Multisegment, i: int, a: int, p: int) -> dict[Multisegment, int] | None:
        self._load()
        hit = self._index.get((n, m.segments, i, a, p))
        return dict(hit) if hit is not None else None

    def put(self, n: int, m: Multisegment, i: int, a: int, p: int, counts: dict[Multisegment, int]) -> None:
        self._load()
        key: Key = (n, m.segments, i, a, p)
        if key in self._index:
            return
        self._index[key] = dict(counts)
        if self._handle is None:
            self.directory.mkdir(parents=True, exist_ok=True)
            self._handle = self.path.open("a", encoding="utf-8")
        # one write call per record keeps concurrent appends whole
        self._handle.write(self._encode(key, counts) + "\n")
        self._handle.flush()

    def close(self) -> None:
        if self._handle is not None:
            self._handle.close()
            self._handle = None

    # -- maintenance

    def stats(self) -> dict[str, object]:
        self._load()
        return {
            "path": str(self.path),
            "records": len(self._index),
            "size_bytes": self.path.stat().st_size if self.path.exists() else 0,
        }

    def clear(self) -> int:
        """Drop the store; returns the number of records removed.

        Works on a corrupt store too, counting parseable records as 0.
        """
        try:
            self._load()
        except CacheCorruptError:
            pass
        removed = len(self._index)
        self.close()
        if self.path.exists():
            self.path.unlink()
        self._index.clear()
        self._load_error = None
        self._loaded = True
        return removed

    def verify(self) -> int:
        """Check every record for internal consistency; returns the count.

        A record is consistent when the counts are positive, every class
        has the dimension vector of the label minus a at vertex i, and
        the total equals the number of codimension-a subspaces of the
        top, the Gaussian binomial [t_top(L, i) choose a]_p.
        """
        self.close()
        self._index.clear()
        self._loaded = False
        self._load_error = None
        self._load()
        for (n, segs, i, a, p), counts in self._index.items():
            label = Multisegment(segs)
            t = t_top(label, i)
            total = sum(counts.values())
            expected = gaussian_binomial(t, a, p)
            if total != expected:
                raise CacheCorruptError(
                    f"record ({n},{label},{i},{a},{p}): total {total}, expected {expected}"
                )
            want = list(label.dim_vector(n))
            if a > t:
                if counts:
                    raise CacheCorruptError(
                        f"record ({n},{label},{i},{a},{p}): counts present beyond the top"
                    )
                continue
            want[i - 1] -= a
            for cls, c in counts.items():
                if c <= 0:
                    raise CacheCorruptError(
                        f"record ({n},{label},{i},{a},{p}): non-positive count for {cls}"
                    )
                if list(cls.dim_vector(n)) != want:
                    raise CacheCorruptError(
                        f"record ({n},{label},{i},{a},{p}): {cls} has the wrong dimension vector"
                    )
        return len(self._index)
