"""Configuration management for ddpc-cli."""

from __future__ import annotations

from pathlib import Path
from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

OutputFormat = Literal["json", "pretty", "compact"]


class Settings(BaseSettings):
    """Application settings loaded from DDPC_* environment variables and CLI options."""

    model_config = SettingsConfigDict(env_prefix="DDPC_", validate_assignment=True)

    output_format: OutputFormat = "json"
    use_cache: bool = True
    cache_dir: Path = Field(default_factory=lambda: Path.home() / ".cache" / "ddpc-cli")
    workers: int = Field(default=1, ge=1)
    debug: bool = False

    @property
    def parallel(self) -> bool:
        """Whether Monte-Carlo runs are dispatched to a process pool."""
        return self.workers > 1


# Global default settings instance
_default_settings: Settings | None = None


def get_settings() -> Settings:
    """Get the global settings instance."""
    global _default_settings
    if _default_settings is None:
        _default_settings = Settings()
    return _default_settings


def set_settings(settings: Settings) -> None:
    """Set the global settings instance."""
    global _default_settings
    _default_settings = settings
