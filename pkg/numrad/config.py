"""Configuration handling for numrad validation suites."""

import json
import logging
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

import yaml

from .bounds import BoundId, BoundParams, list_bounds, resolve_bound_id
from .ensembles import ENSEMBLE_KINDS, MAX_DIM, MIN_DIM
from .errors import ConfigError, NumradError
from .numrange import MIN_TOL

logger = logging.getLogger("numrad")

SEED_ENV_VAR = "NUMRAD_SEED"

DEFAULT_MASTER_SEED = 20240601
DEFAULT_TRIALS = 1000
DEFAULT_SUITE_TOL = 1e-9
DEFAULT_SUITE_GRID = 512

# Lemma, identity and oracle checks the suite can run beside the bounds
PROPERTY_CHECKS = {
    "lemma:young": "Scalar Young inequality with its r-power refinement",
    "lemma:holder": "Scalar Hölder inequality for non-negative tuples",
    "lemma:jensen": "Operator Jensen inequality for convex gauges",
    "lemma:mixed_cs": "Mixed Cauchy-Schwarz inequality",
    "lemma:gauge_mean": "Gauge mean inequality h(||(A+B)/2||) <= ||(h(A)+h(B))/2||",
    "identity:block": "Block numerical radius identities",
    "oracle:ellipse": "Theta sweep against the closed-form 2x2 ellipse",
    "oracle:rayleigh": "Theta sweep against multi-start Rayleigh ascent",
}

# Trials per property check when `property_trials` is unset
PROPERTY_TRIALS = {
    "lemma:young": 10000,
    "lemma:holder": 10000,
    "lemma:jensen": 10000,
    "lemma:mixed_cs": 10000,
    "lemma:gauge_mean": 10000,
    "identity:block": 500,
    "oracle:ellipse": 1000,
    "oracle:rayleigh": 500,
}

CONFIG_FILE_NAMES = [
    ".numrad.json",
    ".numrad.yaml",
    ".numrad.yml",
]


@dataclass
class SuiteConfig:
    """Configuration for a validation suite run."""

    # What to run
    bounds: List[str] = field(default_factory=lambda: ["all"])
    ensembles: List[str] = field(default_factory=lambda: list(ENSEMBLE_KINDS))
    properties: List[str] = field(default_factory=lambda: list(PROPERTY_CHECKS))

    # Sampling
    trials: int = DEFAULT_TRIALS
    property_trials: Optional[int] = None
    dim_min: int = 1
    dim_max: int = 8
    master_seed: int = DEFAULT_MASTER_SEED
    rescale: float = 5.0
    gauge_rescale: float = 1.0

    # Numerics
    tol: float = DEFAULT_SUITE_TOL
    grid: int = DEFAULT_SUITE_GRID

    # Hypothesis handling
    gate_hypotheses: bool = True
    respect_hypotheses: bool = True
    sample_params: bool = True
    params: Dict[str, Dict[str, Any]] = field(default_factory=dict)

    # Processing options
    jobs: int = 1

    # Output and debug options
    output_path: Optional[Path] = None
    verbose: bool = False
    log_file: Optional[str] = None

    def __post_init__(self):
        """Validate and normalize configuration after initialization."""
        if isinstance(self.output_path, str):
            self.output_path = Path(self.output_path)

        if isinstance(self.bounds, str):
            self.bounds = [b.strip() for b in self.bounds.split(",") if b.strip()]
        if isinstance(self.ensembles, str):
            self.ensembles = [e.strip() for e in self.ensembles.split(",") if e.strip()]

        for bound in self.bounds:
            if bound != "all":
                try:
                    resolve_bound_id(bound)
                except NumradError:
                    raise ConfigError(f"Invalid bound: {bound}. Run 'numrad list' for valid ids", field="bounds")

        for kind in self.ensembles:
            if kind not in ENSEMBLE_KINDS:
                raise ConfigError(
                    f"Invalid ensemble: {kind}. Must be one of: {', '.join(ENSEMBLE_KINDS)}", field="ensembles"
                )
        if not self.ensembles:
            raise ConfigError("At least one ensemble is required", field="ensembles")

        for prop in self.properties:
            if prop not in PROPERTY_CHECKS:
                raise ConfigError(
                    f"Invalid property check: {prop}. Must be one of: {', '.join(PROPERTY_CHECKS)}",
                    field="properties",
                )

        if self.trials < 1:
            raise ConfigError(f"trials must be at least 1, got {self.trials}", field="trials")
        if self.property_trials is not None and self.property_trials < 0:
            raise ConfigError(f"property_trials must be non-negative, got {self.property_trials}",
                              field="property_trials")
        if not MIN_DIM <= self.dim_min <= self.dim_max <= MAX_DIM:
            raise ConfigError(
                f"Dimensions must satisfy {MIN_DIM} <= dim_min <= dim_max <= {MAX_DIM}, "
                f"got {self.dim_min} and {self.dim_max}",
                field="dim_min" if self.dim_min < MIN_DIM or self.dim_min > self.dim_max else "dim_max",
            )
        if self.tol < MIN_TOL:
            raise ConfigError(f"tol must be at least {MIN_TOL}, got {self.tol}", field="tol")
        if self.grid < 8:
            raise ConfigError(f"grid must be at least 8, got {self.grid}", field="grid")
        if self.rescale <= 0:
            raise ConfigError(f"rescale must be positive, got {self.rescale}", field="rescale")
        if self.gauge_rescale <= 0:
            raise ConfigError(f"gauge_rescale must be positive, got {self.gauge_rescale}", field="gauge_rescale")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be at least 1, got {self.jobs}", field="jobs")

        for bound, literals in self.params.items():
            try:
                resolve_bound_id(bound)
            except NumradError:
                raise ConfigError(f"Invalid bound in params: {bound}", field=f"params.{bound}")
            if not isinstance(literals, Mapping):
                raise ConfigError(f"params for {bound} must be a mapping", field=f"params.{bound}")
            try:
                BoundParams.from_dict(literals)
            except NumradError as e:
                raise ConfigError(str(e), field=f"params.{bound}")

    def bound_ids(self) -> List[BoundId]:
        """Selected bounds in catalog order; ``all`` expands to the whole catalog."""
        if "all" in self.bounds:
            return [entry.id for entry in list_bounds()]
        selected = {resolve_bound_id(b) for b in self.bounds}
        return [entry.id for entry in list_bounds() if entry.id in selected]

    def bound_params(self, bound: Union[BoundId, str]) -> Optional[BoundParams]:
        """Parsed per-bound overrides, or None when the config has none."""
        bound_id = resolve_bound_id(bound)
        for key, literals in self.params.items():
            if resolve_bound_id(key) == bound_id:
                return BoundParams.from_dict(literals)
        return None

    def trials_for(self, prop: str) -> int:
        if self.property_trials is not None:
            return self.property_trials
        return PROPERTY_TRIALS[prop]

    def apply_env(self, environ: Optional[Mapping[str, str]] = None) -> "SuiteConfig":
        """Let ``NUMRAD_SEED`` override the master seed."""
        environ = os.environ if environ is None else environ
        value = environ.get(SEED_ENV_VAR)
        if value:
            try:
                self.master_seed = int(value)
            except ValueError:
                raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {value!r}", field=SEED_ENV_VAR)
            logger.debug(f"Master seed overridden from {SEED_ENV_VAR}: {self.master_seed}")
        return self

    def to_dict(self) -> Dict[str, Any]:
        """Convert config to dictionary, converting Path objects to strings."""
        config_dict = asdict(self)

        for key, value in config_dict.items():
            if isinstance(value, Path):
                config_dict[key] = str(value)

        return config_dict

    def save(self, path: Union[str, Path]) -> None:
        """Save configuration to a file."""
        config_path = Path(path) if isinstance(path, str) else path

        try:
            config_dict = self.to_dict()

            if config_path.suffix.lower() in ['.yaml', '.yml']:
                with open(config_path, 'w') as f:
                    yaml.safe_dump(config_dict, f, default_flow_style=False)
            else:
                with open(config_path, 'w') as f:
                    json.dump(config_dict, f, indent=2)

            logger.info(f"Configuration saved to {config_path}")
        except Exception as e:
            logger.error(f"Error saving configuration to {config_path}: {e}")
            raise

    @classmethod
    def from_dict(cls, config_dict: Mapping[str, Any]) -> 'SuiteConfig':
        """Create a configuration from a dictionary; unknown keys are rejected."""
        if not isinstance(config_dict, Mapping):
            raise ConfigError("Suite configuration must be a mapping at the top level")

        known = {f.name for f in fields(cls)}
        for key in config_dict:
            if key not in known:
                raise ConfigError(f"Unknown configuration key: {key}", field=str(key))

        config = dict(config_dict)
        if config.get('output_path') is not None:
            config['output_path'] = Path(config['output_path'])

        try:
            return cls(**config)
        except TypeError as e:
            raise ConfigError(f"Invalid configuration: {e}")

    @classmethod
    def load(cls, path: Union[str, Path]) -> 'SuiteConfig':
        """Load configuration from a JSON or YAML file."""
        config_path = Path(path) if isinstance(path, str) else path

        try:
            if not config_path.exists():
                raise FileNotFoundError(f"Configuration file not found: {config_path}")

            text = config_path.read_text(encoding="utf-8")
            if config_path.suffix.lower() in ['.yaml', '.yml']:
                try:
                    config_dict = yaml.safe_load(text)
                except yaml.YAMLError as e:
                    mark = getattr(e, "problem_mark", None)
                    raise ConfigError(
                        f"Invalid YAML in {config_path}: {getattr(e, 'problem', e)}",
                        line=mark.line + 1 if mark is not None else None,
                        column=mark.column + 1 if mark is not None else None,
                    )
            else:
                try:
                    config_dict = json.loads(text)
                except json.JSONDecodeError as e:
                    raise ConfigError(f"Invalid JSON in {config_path}: {e.msg}", line=e.lineno, column=e.colno)

            config = cls.from_dict(config_dict if config_dict is not None else {})
            logger.info(f"Configuration loaded from {config_path}")
            return config
        except Exception as e:
            logger.error(f"Error loading configuration from {config_path}: {e}")
            raise

    @classmethod
    def from_cli_args(cls, **kwargs) -> 'SuiteConfig':
        """Create configuration from command-line arguments."""
        # Filter out None values to allow defaults to take effect
        filtered_kwargs = {k: v for k, v in kwargs.items() if v is not None}

        if 'output' in filtered_kwargs:
            filtered_kwargs['output_path'] = filtered_kwargs.pop('output')
        if 'seed' in filtered_kwargs:
            filtered_kwargs['master_seed'] = filtered_kwargs.pop('seed')

        return cls(**filtered_kwargs)

    @staticmethod
    def find_config_file(directory: Union[str, Path] = ".") -> Optional[Path]:
        """Find a suite configuration file in ``directory``."""
        for name in CONFIG_FILE_NAMES:
            config_path = Path(directory) / name
            if config_path.exists():
                return config_path

        return None
