"""
Content-addressed result cache.

One JSON record per key at <cache_dir>/<key[:2]>/<key>.json. Writes go to a
temporary file in the same directory and are renamed into place, so
concurrent writers of one key leave a single complete record.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Mapping, Optional

from . import __version__

logger = logging.getLogger(__name__)


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), allow_nan=False)


@dataclass(frozen=True)
class CacheRecord:
    key: str
    payload: dict
    timestamp: str


class ResultCache:
    def __init__(self, directory, version: str = __version__):
        self.directory = Path(directory)
        self.version = version
        self.hits = 0
        self.misses = 0

    def key(self, fields: Mapping[str, Any]) -> str:
        """sha256 over the canonical JSON of `fields` plus the code version."""
        material = dict(fields)
        material["version"] = self.version
        return hashlib.sha256(canonical_json(material).encode("utf-8")).hexdigest()

    def path(self, key: str) -> Path:
        return self.directory / key[:2] / f"{key}.json"

    def get(self, key: str) -> Optional[CacheRecord]:
        path = self.path(key)
        if not path.is_file():
            self.misses += 1
            return None
        try:
            record = json.loads(path.read_text(encoding="utf-8"))
            if record["key"] != key or not isinstance(record["payload"], dict):
                raise ValueError("record does not match its key")
            result = CacheRecord(key, record["payload"], record["metadata"]["timestamp"])
        except (OSError, ValueError, KeyError, TypeError) as exc:
            logger.warning("Ignoring corrupt cache record %s: %s", path, exc)
            self.misses += 1
            return None
        self.hits += 1
        logger.debug("Cache hit %s", key[:12])
        return result

    def put(self, key: str, payload: Mapping[str, Any]) -> CacheRecord:
        path = self.path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        timestamp = datetime.now(timezone.utc).isoformat()
        record = {
            "key": key,
            "payload": dict(payload),
            "metadata": {"timestamp": timestamp, "version": self.version},
        }
        text = json.dumps(record, sort_keys=True, indent=1, allow_nan=False)
        fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{key[:12]}-", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(text)
            os.replace(tmp_name, path)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise
        logger.debug("Cache store %s", key[:12])
        return CacheRecord(key, dict(payload), timestamp)


def cache_get(cache: ResultCache, key: str) -> Optional[CacheRecord]:
    return cache.get(key)


def cache_put(cache: ResultCache, key: str, payload: Mapping[str, Any]) -> CacheRecord:
    return cache.put(key, payload)
