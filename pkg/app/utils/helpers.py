"""
Helper Functions Module
Utility functions used across the application
"""

import hashlib
import json
from datetime import datetime
from typing import Any

import numpy as np

from .constants import SCENARIO_START_HOUR


def keyed_rng(seed: int, *keys: int) -> np.random.Generator:
    """Counter-style generator: the stream depends only on (seed, *keys)"""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *[int(k) for k in keys]]))


def config_hash(payload: Any) -> str:
    """Stable SHA-256 of a JSON-serializable payload (or pydantic model)"""
    if hasattr(payload, "model_dump"):
        payload = payload.model_dump(mode="json")
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def seconds_to_minutes(seconds: float) -> float:
    return seconds / 60.0


def minutes_to_seconds(minutes: float) -> float:
    return minutes * 60.0


def scenario_hour(minute: float) -> int:
    """Wall-clock hour of a scenario minute (minute 0 is 22:00)"""
    return int((SCENARIO_START_HOUR + minute // 60) % 24)


def evening_offset_hours(hour: int) -> int:
    """Hours since 22:00 for a wall-clock service hour (22 -> 0, 3 -> 5)"""
    return (hour - SCENARIO_START_HOUR) % 24


def format_float(value: float) -> str:
    """Round-trip exact decimal representation (17 significant digits)"""
    return format(float(value), ".17g")


def get_current_timestamp() -> str:
    """Get current timestamp in ISO format"""
    return datetime.now().isoformat()
