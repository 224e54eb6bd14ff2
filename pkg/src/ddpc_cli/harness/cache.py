"""Disk-based caching of closed-loop run results.

Uses diskcache for persistent caching across CLI invocations. Runs are deterministic
functions of their configuration, so entries never expire; clear them with
``ddpc cache clear`` after changing the code.
"""

from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path
from typing import Any

import numpy as np
from diskcache import Cache as DiskCache

logger = logging.getLogger(__name__)

# Bump when the stored record layout changes.
CACHE_VERSION = 1


class ResultCache:
    """Disk cache for per-run result records."""

    def __init__(self, cache_dir: Path | None = None, enabled: bool = True) -> None:
        """
        Initialize the cache.

        Args:
            cache_dir: Directory to store cache files. Defaults to ~/.cache/ddpc-cli
            enabled: Whether caching is enabled.
        """
        self.enabled = enabled
        if cache_dir is None:
            cache_dir = Path.home() / ".cache" / "ddpc-cli"
        self.cache_dir = cache_dir
        self._cache: DiskCache | None = None

    @property
    def cache(self) -> DiskCache:
        """Lazily initialize the disk cache."""
        if self._cache is None:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
            self._cache = DiskCache(str(self.cache_dir))
        return self._cache

    @staticmethod
    def _encode(value: Any) -> Any:
        if isinstance(value, np.generic):
            return value.item()
        if isinstance(value, np.ndarray):
            return value.tolist()
        raise TypeError(f"Cannot cache value of type {type(value).__name__}")

    def _make_key(self, namespace: str, params: dict[str, Any]) -> str:
        key_data = {"namespace": namespace, "params": params, "version": CACHE_VERSION}
        key_string = json.dumps(key_data, sort_keys=True)
        return hashlib.sha256(key_string.encode()).hexdigest()

    def get(self, namespace: str, params: dict[str, Any]) -> dict[str, Any] | None:
        """Cached record, or None when missing or caching is off."""
        if not self.enabled:
            return None
        value = self.cache.get(self._make_key(namespace, params))
        if value is None:
            return None
        logger.debug("Cache hit for %s %s", namespace, params)
        return json.loads(value)  # type: ignore[no-any-return]

    def set(self, namespace: str, params: dict[str, Any], value: dict[str, Any]) -> None:
        if not self.enabled:
            return
        self.cache.set(self._make_key(namespace, params), json.dumps(value, default=self._encode))

    def invalidate(self) -> int:
        """
        Remove every entry.

        Returns:
            Number of entries removed.
        """
        if not self.enabled:
            return 0
        count = len(self.cache)
        self.cache.clear()
        return count

    def __len__(self) -> int:
        return len(self.cache)

    def close(self) -> None:
        """Close the cache connection."""
        if self._cache is not None:
            self._cache.close()
            self._cache = None

    def __enter__(self) -> ResultCache:
        return self

    def __exit__(self, *args: Any) -> None:
        self.close()
