"""
Runtime settings and logging setup.

Values come from the process environment, optionally seeded from a `.env`
file in the working directory.
"""

import logging
import os
import sys
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from dotenv import load_dotenv

from errors import ConfigurationError

# Load environment variables
load_dotenv()

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def _float_env(name: str, default: float, positive: bool = True) -> float:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = float(raw)
    except ValueError:
        raise ConfigurationError(name, raw, "expected a number")
    if positive and not value > 0:
        raise ConfigurationError(name, raw, "must be > 0")
    return value


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigurationError(name, raw, "expected an integer")
    if value < 1:
        raise ConfigurationError(name, raw, "must be >= 1")
    return value


@dataclass(frozen=True)
class Settings:
    """Numerical and logging defaults shared by library and CLI"""
    log_level: str = "INFO"
    log_file: Optional[str] = None
    width_epsilon: float = 1e-12      # collapse guard on imag(c)
    step_tolerance: float = 1e-6      # step-doubling bound, per component scaled by 1+|y|
    output_stride: int = 10           # store every n-th accepted step
    scan_workers: int = 4             # concurrent scan points

    @classmethod
    def from_env(cls) -> 'Settings':
        """Build settings from WAVEPACKET_* environment variables"""
        level = os.getenv("WAVEPACKET_LOG_LEVEL", "INFO").upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ConfigurationError("WAVEPACKET_LOG_LEVEL", level, "unknown logging level")
        return cls(
            log_level=level,
            log_file=os.getenv("WAVEPACKET_LOG_FILE") or None,
            width_epsilon=_float_env("WAVEPACKET_WIDTH_EPSILON", cls.width_epsilon),
            step_tolerance=_float_env("WAVEPACKET_STEP_TOLERANCE", cls.step_tolerance),
            output_stride=_int_env("WAVEPACKET_OUTPUT_STRIDE", cls.output_stride),
            scan_workers=_int_env("WAVEPACKET_SCAN_WORKERS", cls.scan_workers),
        )


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Process-wide settings, read once"""
    return Settings.from_env()


def setup_logging(settings: Optional[Settings] = None) -> None:
    """Configure root logging for CLI use; stderr keeps stdout free for --schema output"""
    settings = settings or get_settings()
    handlers = [logging.StreamHandler(sys.stderr)]
    if settings.log_file:
        handlers.append(logging.FileHandler(settings.log_file))
    logging.basicConfig(
        level=getattr(logging, settings.log_level),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )
