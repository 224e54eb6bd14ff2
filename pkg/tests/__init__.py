"""Tests for ddpc_cli."""
