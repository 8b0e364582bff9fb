# Utils Package
# Logging, error types, constants and small numeric helpers

from .logger import logger, setup_logger
from .helpers import config_hash, keyed_rng, minutes_to_seconds, seconds_to_minutes
from .constants import *
from .decorators import timed
from .errors import InputError, RidepoolError, SolverError

__all__ = [
    "logger",
    "setup_logger",
    "timed",
    "config_hash",
    "keyed_rng",
    "minutes_to_seconds",
    "seconds_to_minutes",
    "RidepoolError",
    "InputError",
    "SolverError",
]
