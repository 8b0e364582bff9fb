"""
Command Context
Effective configuration and shared helpers handed to every command
"""

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from ..config import AppConfig, save_config
from ..models.network import StopNetwork
from ..services.network_service import NetworkService
from ..utils.constants import WEEKDAYS
from ..utils.errors import SchemaError
from ..utils.helpers import config_hash
from ..utils.logger import logger

# Scenario files are named weekNN_<Day>.csv
DAY_PATTERN = re.compile(r"_(" + "|".join(WEEKDAYS) + r")(?:\.|_|$)")


def day_of(path: Path, fallback: Optional[str] = None) -> str:
    match = DAY_PATTERN.search(path.name)
    if match:
        return match.group(1)
    if fallback:
        return fallback
    raise SchemaError(f"cannot tell the weekday of {path.name}; pass --day")


@dataclass
class CommandContext:
    cfg: AppConfig
    config_hash: str = field(init=False)

    def __post_init__(self):
        self.config_hash = config_hash(self.cfg)

    def network(self, stops: Optional[str] = None, costs: Optional[str] = None) -> StopNetwork:
        """Network from explicit files, the configured files, or the synthetic default"""
        service = NetworkService(self.cfg.network)
        if stops:
            return service.load_network(stops, costs)
        return service.load_configured()

    def output_dir(self, out: Optional[Union[str, Path]] = None) -> Path:
        path = Path(out or self.cfg.pipeline.output_dir)
        path.mkdir(parents=True, exist_ok=True)
        return path

    def write_provenance(self, directory: Union[str, Path]) -> Path:
        """run_config.yaml with the effective configuration next to the outputs"""
        path = Path(directory) / "run_config.yaml"
        save_config(self.cfg, str(path))
        with open(path, "a", encoding="utf-8") as f:
            f.write(f"# config_hash: {self.config_hash}\n")
        logger.debug(f"Wrote {path}")
        return path
