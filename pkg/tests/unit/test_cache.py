"""Unit tests for the result cache."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ddpc_cli.harness.cache import ResultCache


class TestResultCache:
    """Tests for the ResultCache class."""

    def test_get_set(self, result_cache: ResultCache) -> None:
        """Test basic get and set operations."""
        result_cache.set("run", {"run": 0}, {"J": 1.5})

        assert result_cache.get("run", {"run": 0}) == {"J": 1.5}

    def test_get_missing(self, result_cache: ResultCache) -> None:
        """Test get returns None for missing keys."""
        assert result_cache.get("run", {"run": 99}) is None

    def test_keys_depend_on_params(self, result_cache: ResultCache) -> None:
        """Test that namespaces and params separate entries."""
        result_cache.set("run", {"run": 1}, {"J": 1.0})
        result_cache.set("run", {"run": 2}, {"J": 2.0})
        result_cache.set("oracle", {"run": 1}, {"J": 3.0})

        assert result_cache.get("run", {"run": 1}) == {"J": 1.0}
        assert result_cache.get("run", {"run": 2}) == {"J": 2.0}
        assert result_cache.get("oracle", {"run": 1}) == {"J": 3.0}

    def test_numpy_values(self, result_cache: ResultCache) -> None:
        """Test that numpy scalars and arrays are stored as plain JSON."""
        result_cache.set("run", {"run": 0}, {"J": np.float64(2.0), "u": np.array([1.0, 2.0])})

        assert result_cache.get("run", {"run": 0}) == {"J": 2.0, "u": [1.0, 2.0]}

    def test_cache_disabled(self, tmp_path: Path) -> None:
        """Test cache when disabled."""
        cache = ResultCache(cache_dir=tmp_path, enabled=False)

        try:
            cache.set("run", {"run": 0}, {"J": 1.0})
            assert cache.get("run", {"run": 0}) is None
            assert cache.invalidate() == 0
        finally:
            cache.close()

    def test_invalidate(self, result_cache: ResultCache) -> None:
        """Test that invalidate empties the cache and counts entries."""
        result_cache.set("run", {"run": 0}, {"J": 1.0})
        result_cache.set("run", {"run": 1}, {"J": 2.0})

        assert len(result_cache) == 2
        assert result_cache.invalidate() == 2
        assert len(result_cache) == 0

    def test_persists_across_instances(self, tmp_path: Path) -> None:
        """Test that entries survive closing the cache."""
        with ResultCache(cache_dir=tmp_path) as first:
            first.set("run", {"run": 0}, {"J": 4.0})

        with ResultCache(cache_dir=tmp_path) as second:
            assert second.get("run", {"run": 0}) == {"J": 4.0}
