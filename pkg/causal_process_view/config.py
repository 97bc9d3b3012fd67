"""
Configuration objects and loaders (JSON or TOML files).
"""

import json
import os
from dataclasses import dataclass, field, fields
from typing import Dict, List, Optional, Tuple

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

SEED_ENV_VAR = "CPV_SEED"

# Start column used when the descriptor names none and the header has it.
DEFAULT_START_COLUMN = "start_timestamp"


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


@dataclass(frozen=True)
class CsvDescriptor:
    """
    How to read an event log CSV.

    Attributes:
        case_column: Column holding the case identifier
        activity_column: Column holding the activity name
        timestamp_column: Column holding the completion timestamp
        timestamp_format: strptime pattern, or "ISO8601"
        delimiter: Field delimiter
        start_timestamp_column: Column with the activity start. None picks up a
            "start_timestamp" column when the header has one; "" disables it
        attribute_columns: Columns parsed as real-valued event attributes
    """

    case_column: str = "case_id"
    activity_column: str = "activity"
    timestamp_column: str = "timestamp"
    timestamp_format: str = "ISO8601"
    delimiter: str = ","
    start_timestamp_column: Optional[str] = None
    attribute_columns: Tuple[str, ...] = ()

    @classmethod
    def from_dict(cls, data: Dict) -> "CsvDescriptor":
        data = dict(data)
        if "attribute_columns" in data:
            data["attribute_columns"] = tuple(data["attribute_columns"])
        return _build(cls, data, "descriptor")


@dataclass(frozen=True)
class CausalConfig:
    """
    Settings of the pairwise causal discovery.

    Attributes:
        alpha_level: Significance level of the independence tests
        min_samples: Smallest number of cases a pair may be fitted on
        n_permutations: Permutations per independence test
        max_samples: Subsample pairs above this many cases (None keeps all)
        seed: Global seed of the permutation streams
        max_workers: Threads used to fit pairs
    """

    alpha_level: float = 0.05
    min_samples: int = 30
    n_permutations: int = 200
    max_samples: Optional[int] = None
    seed: int = 0
    max_workers: int = 1

    def __post_init__(self):
        if not 0 < self.alpha_level < 1:
            raise ConfigError(f"alpha_level must be in (0, 1), got {self.alpha_level}")
        if self.min_samples < 4:
            raise ConfigError(f"min_samples must be at least 4, got {self.min_samples}")
        if self.n_permutations < 1:
            raise ConfigError(f"n_permutations must be positive, got {self.n_permutations}")
        if self.max_workers < 1:
            raise ConfigError(f"max_workers must be positive, got {self.max_workers}")


@dataclass
class PipelineConfig:
    """
    Everything one CLI run needs.

    Exactly one of ``log_path`` and ``scenario`` must be set.
    """

    log_path: Optional[str] = None
    scenario: Optional[str] = None
    descriptor: CsvDescriptor = field(default_factory=CsvDescriptor)
    miner: str = "heuristic"
    threshold: float = 0.9
    frequency_floor: int = 1
    variants: Optional[List[str]] = None
    top_k: Optional[int] = None
    coverage: float = 0.95
    modality: Optional[str] = None
    alpha_level: float = 0.05
    n_permutations: int = 200
    min_samples: int = 30
    max_samples: Optional[int] = None
    max_workers: int = 1
    output_dir: str = "./cpv_output"
    base_name: str = "cpv"
    seed: Optional[int] = None
    n_cases: Optional[int] = None
    filter_swaps: Optional[Tuple[str, str]] = None

    def validate(self) -> "PipelineConfig":
        if (self.log_path is None) == (self.scenario is None):
            raise ConfigError("Exactly one input source is required: a log path or a scenario")
        if self.miner not in ("alpha", "heuristic"):
            raise ConfigError(f"Unknown miner '{self.miner}' (expected 'alpha' or 'heuristic')")
        if not 0 <= self.threshold <= 1:
            raise ConfigError(f"Dependency threshold must be in [0, 1], got {self.threshold}")
        if self.frequency_floor < 0:
            raise ConfigError(f"frequency_floor must be non-negative, got {self.frequency_floor}")
        if self.top_k is not None and self.top_k < 1:
            raise ConfigError(f"top_k must be at least 1, got {self.top_k}")
        if not 0 < self.coverage <= 1:
            raise ConfigError(f"coverage must be in (0, 1], got {self.coverage}")
        if not 0 < self.alpha_level < 1:
            raise ConfigError(f"alpha_level must be in (0, 1), got {self.alpha_level}")
        if self.filter_swaps is not None and len(self.filter_swaps) != 2:
            raise ConfigError("filter_swaps needs exactly two activity names")
        return self

    def resolved_seed(self) -> int:
        """Seed from the config, then from $CPV_SEED, then 0."""
        if self.seed is not None:
            return self.seed
        env_value = os.environ.get(SEED_ENV_VAR)
        if env_value:
            try:
                return int(env_value)
            except ValueError:
                raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got '{env_value}'") from None
        return 0

    def causal_config(self) -> CausalConfig:
        return CausalConfig(
            alpha_level=self.alpha_level,
            min_samples=self.min_samples,
            n_permutations=self.n_permutations,
            max_samples=self.max_samples,
            seed=self.resolved_seed(),
            max_workers=self.max_workers,
        )

    def to_dict(self) -> Dict:
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data["descriptor"] = {f.name: getattr(self.descriptor, f.name) for f in fields(CsvDescriptor)}
        data["descriptor"]["attribute_columns"] = list(self.descriptor.attribute_columns)
        if self.filter_swaps is not None:
            data["filter_swaps"] = list(self.filter_swaps)
        data["seed"] = self.resolved_seed()
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "PipelineConfig":
        data = dict(data)
        if "descriptor" in data:
            data["descriptor"] = CsvDescriptor.from_dict(data["descriptor"])
        if data.get("filter_swaps") is not None:
            data["filter_swaps"] = tuple(data["filter_swaps"])
        return _build(cls, data, "pipeline config")


def _build(cls, data: Dict, what: str):
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"Unknown {what} key(s): {', '.join(unknown)}")
    return cls(**data)


def read_config_file(path: str) -> Dict:
    """
    Read a JSON or TOML file into a dictionary.

    Args:
        path: File ending in .json or .toml

    Returns:
        Parsed mapping
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"Config file not found: {path}")

    extension = os.path.splitext(path)[1].lower()
    if extension == ".json":
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    elif extension == ".toml":
        with open(path, "rb") as f:
            data = tomllib.load(f)
    else:
        raise ConfigError(f"Config file must be .json or .toml, got '{path}'")

    if not isinstance(data, dict):
        raise ConfigError("Config file must contain a mapping at the top level")
    return data


def load_config(path: str) -> PipelineConfig:
    """Load a :class:`PipelineConfig` from a JSON or TOML file."""
    return PipelineConfig.from_dict(read_config_file(path))


def load_descriptor(path: str) -> CsvDescriptor:
    """Load a :class:`CsvDescriptor` from a JSON or TOML file."""
    data = read_config_file(path)
    return CsvDescriptor.from_dict(data.get("descriptor", data))
