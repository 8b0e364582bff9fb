"""
Configuration Management Module
Loads and manages application configuration from config.yaml
"""

from contextvars import ContextVar
from pathlib import Path
from typing import Any, Dict, Iterable, List, Literal, Tuple

import yaml
from pydantic import BaseModel, Field, field_validator
from pydantic.fields import FieldInfo
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict

# Contents of the config.yaml being loaded
_yaml_data: ContextVar[Dict[str, Any]] = ContextVar("yaml_data", default={})


class LoggingConfig(BaseModel):
    """Logging configuration"""
    level: str = "INFO"
    file: str = "./logs/app.log"
    max_size: int = 10
    backup_count: int = 5
    console: bool = True
    colorize: bool = True


class NetworkConfig(BaseModel):
    """Synthetic stop network configuration"""
    n_stops: int = 50
    extent_km: float = 8.0
    detour_factor: float = 1.3
    seed: int = 7
    stops_csv: str = ""
    cost_csv: str = ""


class DemandConfig(BaseModel):
    """Demand simulation configuration"""
    group_size_probs: List[float] = [0.804, 0.153, 0.026, 0.011, 0.004, 0.002]
    service_hours: List[int] = [22, 23, 0, 1, 2, 3]
    holidays: List[bool] = [False] * 7
    intensity_scale: float = 1.0
    weeks: int = 30
    seed: int = 20190101
    destination_resamples: int = 100

    @field_validator("holidays")
    @classmethod
    def _seven_days(cls, value: List[bool]) -> List[bool]:
        if len(value) != 7:
            raise ValueError("holidays needs one flag per weekday")
        return value


class RegressionConfig(BaseModel):
    """GLM fitting configuration"""
    poisson_tol: float = 1e-8
    poisson_max_iter: int = 100
    ridge_rescue: float = 1e-10
    separation_ridge: float = 1e-3
    allow_ridge_fallback: bool = True
    multinomial_tol: float = 1e-6
    multinomial_max_iter: int = 500
    multinomial_penalty: float = 1e-6
    parallel: bool = False
    workers: int = 4


class RequestConfig(BaseModel):
    """Request derivation parameters, all times in minutes"""
    service_min: float = 0.75
    pickup_window_min: float = 25.0
    ride_factor: float = 2.0
    ride_slack_min: float = 10.0
    max_postpone_min: float = 10.0
    service_start_min: float = 0.0
    service_end_min: float = 480.0
    capacity: int = 6


class HeuristicConfig(BaseModel):
    """Feasible-path heuristic configuration"""
    enabled: bool = True
    rho_abs: int = Field(default=10, ge=1)
    rho_rel: float = Field(default=0.25, gt=0.0, le=1.0)
    omega1: float = Field(default=1.0, ge=0.0)
    omega2: float = Field(default=1.0, ge=0.0)
    proximity_aggregation: Literal["sum", "lexicographic"] = "sum"
    travel_leg: Literal["reverse", "path_order"] = "reverse"


class SolverConfig(BaseModel):
    """Subproblem solver configuration"""
    omega1: float = 1.0
    omega2: float = 1.0
    omega3: float = 100.0
    time_limit_s: float = 30.0
    node_limit: int = 0
    integrality_tol: float = 1e-6


class HorizonConfig(BaseModel):
    """Rolling horizon configuration"""
    delta_s: float = Field(default=45.0, gt=0.0)
    seed: int = 1


class FleetConfig(BaseModel):
    """Fleet sizing configuration"""
    requests_per_vehicle: float = 8.0
    min_vehicles: int = 1


class BusConfig(BaseModel):
    """Bus baseline configuration"""
    service_min: float = 0.75
    wait_cap_min: float = 120.0
    n_lines: int = 8
    headway_min: float = 30.0
    slowdown: float = 1.25
    dwell_min: float = 0.5
    seed: int = 11


class PipelineConfig(BaseModel):
    """Pipeline paths and scenario counts"""
    output_dir: str = "./output"
    peak_requests: float = 37.2
    log_weeks: int = 26
    workers: int = 1


class YamlSettingsSource(PydanticBaseSettingsSource):
    """Sections read from config.yaml"""

    def __init__(self, settings_cls, data: Dict[str, Any]):
        super().__init__(settings_cls)
        self.data = data

    def get_field_value(self, field: FieldInfo, field_name: str) -> Tuple[Any, str, bool]:
        return self.data.get(field_name), field_name, False

    def __call__(self) -> Dict[str, Any]:
        return {k: v for k, v in self.data.items() if k in self.settings_cls.model_fields and v is not None}


class AppConfig(BaseSettings):
    """Main application configuration"""
    model_config = SettingsConfigDict(
        env_prefix="RIDEPOOL_",
        env_nested_delimiter="__",
        env_file=".env",
        extra="ignore",
    )

    logging: LoggingConfig = LoggingConfig()
    network: NetworkConfig = NetworkConfig()
    demand: DemandConfig = DemandConfig()
    regression: RegressionConfig = RegressionConfig()
    requests: RequestConfig = RequestConfig()
    heuristic: HeuristicConfig = HeuristicConfig()
    solver: SolverConfig = SolverConfig()
    horizon: HorizonConfig = HorizonConfig()
    fleet: FleetConfig = FleetConfig()
    bus: BusConfig = BusConfig()
    pipeline: PipelineConfig = PipelineConfig()

    @classmethod
    def settings_customise_sources(
        cls, settings_cls, init_settings, env_settings, dotenv_settings, file_secret_settings
    ):
        # --set overrides, then environment, then config.yaml
        yaml_settings = YamlSettingsSource(settings_cls, _yaml_data.get())
        return init_settings, env_settings, dotenv_settings, yaml_settings, file_secret_settings

    @classmethod
    def from_yaml(cls, data: Dict[str, Any]) -> "AppConfig":
        token = _yaml_data.set(data)
        try:
            return cls()
        finally:
            _yaml_data.reset(token)


def load_config(config_path: str = "config.yaml") -> AppConfig:
    """Load configuration from YAML file"""
    config_file = Path(config_path)

    if config_file.exists():
        with open(config_file, "r", encoding="utf-8") as f:
            return AppConfig.from_yaml(yaml.safe_load(f) or {})

    return AppConfig()


def save_config(config: AppConfig, config_path: str = "config.yaml") -> None:
    """Save configuration to YAML file"""
    config_file = Path(config_path)
    config_file.parent.mkdir(parents=True, exist_ok=True)

    with open(config_file, "w", encoding="utf-8") as f:
        yaml.dump(config.model_dump(), f, default_flow_style=False, allow_unicode=True, sort_keys=True)


def apply_overrides(config: AppConfig, overrides: Iterable[str]) -> AppConfig:
    """Apply `section.key=value` overrides; values are parsed as YAML scalars"""
    data: Dict[str, Any] = config.model_dump()
    for item in overrides:
        if "=" not in item:
            raise ValueError(f"override must look like section.key=value, got {item!r}")
        dotted, raw = item.split("=", 1)
        keys = dotted.strip().split(".")
        target = data
        for key in keys[:-1]:
            if key not in target or not isinstance(target[key], dict):
                raise ValueError(f"unknown config section in override {dotted!r}")
            target = target[key]
        if keys[-1] not in target:
            raise ValueError(f"unknown config key in override {dotted!r}")
        target[keys[-1]] = yaml.safe_load(raw)
    return AppConfig(**data)


# Global configuration instance
config = load_config()
