"""
Runtime settings
Values come from the environment (and a local .env file), with defaults
suitable for a laptop run.
"""

import os
from dataclasses import dataclass

from dotenv import load_dotenv

from src.utils.errors import ConfigError

load_dotenv()

DEFAULT_MATERIALIZE_LIMIT = 20
DEFAULT_STREAMING_LIMIT = 28
DEFAULT_BLOCK_SIZE = 4096


@dataclass(frozen=True)
class Settings:
    jobs: int = 1
    materialize_limit: int = DEFAULT_MATERIALIZE_LIMIT
    streaming_limit: int = DEFAULT_STREAMING_LIMIT
    block_size: int = DEFAULT_BLOCK_SIZE
    database_url: str = 'sqlite:///warpmatrix.db'
    cors_origins: tuple = ('http://localhost:5173',)
    log_level: str = 'INFO'


def _int_env(name: str, default: int, minimum: int = 1) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}")
    if value < minimum:
        raise ConfigError(f"{name} must be >= {minimum}, got {value}")
    return value


def load_settings() -> Settings:
    """Read settings from the environment"""
    origins = os.getenv('CORS_ORIGINS', 'http://localhost:5173').split(',')
    return Settings(
        jobs=_int_env('WARPMATRIX_JOBS', 1),
        materialize_limit=_int_env('WARPMATRIX_MATERIALIZE_LIMIT', DEFAULT_MATERIALIZE_LIMIT),
        streaming_limit=_int_env('WARPMATRIX_STREAMING_LIMIT', DEFAULT_STREAMING_LIMIT),
        block_size=_int_env('WARPMATRIX_BLOCK_SIZE', DEFAULT_BLOCK_SIZE),
        database_url=os.getenv('DATABASE_URL', 'sqlite:///warpmatrix.db'),
        cors_origins=tuple(o.strip() for o in origins if o.strip()),
        log_level=os.getenv('LOG_LEVEL', 'INFO').upper(),
    )
