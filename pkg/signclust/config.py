#!/usr/bin/env python3
"""
Run Configuration Module

One flat set of run parameters shared by every command. Values resolve in
order of precedence: command-line flag, then the --config file (flat
key=value lines), then SIGNCLUST_<KEY> environment variables (a local .env
is loaded first), then the defaults below. Grid lists are comma-separated.
"""

import logging
import os
from dataclasses import dataclass, fields
from typing import Any, Dict, List, Optional

from dotenv import dotenv_values, find_dotenv, load_dotenv

from .construct import KernelParams
from .discrete import ClusterOptions
from .errors import ConfigError
from .grid import GridSpec
from .synth import PlantedConfig

logger = logging.getLogger(__name__)

ENV_PREFIX = "SIGNCLUST_"

_GRID_FIELDS = {
    'sigma_grid': 'sigma', 'thresh_grid': 'thresh', 'K_grid': 'K',
    'gamma_grid': 'gamma', 'beta_grid': 'beta', 'beta_ant_grid': 'beta_ant',
}


@dataclass
class RunConfig:
    """Parameters and file paths of a signclust run"""
    # graph construction
    sigma: float = 0.2
    thresh: float = 0.04
    gamma: float = 1.0
    beta: float = 1.0
    beta_ant: float = 1.0
    # clustering
    K: Optional[int] = None
    seed: int = 0
    restarts: int = 8
    max_iter: int = 100
    tol: float = 1e-7
    eig_tol: float = 1e-8
    jobs: int = 0
    # evaluation
    high_cut: float = 8.0
    permutations: int = 0
    # synthetic graphs
    n: int = 100
    p_in: float = 0.3
    p_out: float = 0.05
    frac_neg_out: float = 0.5
    w_low: float = 0.5
    w_high: float = 1.0
    k_min: Optional[int] = None
    k_max: Optional[int] = None
    # grids
    sigma_grid: Optional[List[float]] = None
    thresh_grid: Optional[List[float]] = None
    K_grid: Optional[List[int]] = None
    gamma_grid: Optional[List[float]] = None
    beta_grid: Optional[List[float]] = None
    beta_ant_grid: Optional[List[float]] = None
    # files
    embeddings: Optional[str] = None
    thesaurus: Optional[str] = None
    vocab: Optional[str] = None
    gold: Optional[str] = None
    simlex: Optional[str] = None
    graph: Optional[str] = None
    partition: Optional[str] = None

    @classmethod
    def resolve(cls, cli_values: Optional[Dict[str, Any]] = None,
                config_file: Optional[str] = None) -> "RunConfig":
        """
        Merge the configuration sources

        Args:
            cli_values: Parsed flags; None means "not given"
            config_file: Flat key=value file

        Returns:
            RunConfig with every value coerced to its field type
        """
        load_dotenv(find_dotenv(usecwd=True))
        known = {f.name: f for f in fields(cls)}
        raw: Dict[str, Any] = {}

        for name in known:
            value = os.environ.get(ENV_PREFIX + name.upper())
            if value is not None:
                raw[name] = value

        if config_file:
            if not os.path.exists(config_file):
                raise ConfigError(f"Config file not found: {config_file}")
            try:
                entries = dotenv_values(config_file)
            except UnicodeDecodeError:
                raise ConfigError("Config file is not valid UTF-8", {'file': config_file}) from None
            for key, value in entries.items():
                if key not in known:
                    raise ConfigError(f"Unknown config key '{key}'", {'file': config_file})
                if value is not None:
                    raw[key] = value
            logger.debug(f"⚙️ Loaded config file {config_file}")

        for key, value in (cli_values or {}).items():
            if key in known and value is not None:
                raw[key] = value

        return cls(**{key: _coerce(key, value) for key, value in raw.items()})

    def kernel_params(self) -> KernelParams:
        return KernelParams(self.sigma, self.thresh, self.gamma, self.beta, self.beta_ant).validate()

    def cluster_options(self) -> ClusterOptions:
        return ClusterOptions(restarts=self.restarts, max_iter=self.max_iter,
                              tol=self.tol, eig_tol=self.eig_tol).validate()

    def planted_config(self) -> PlantedConfig:
        return PlantedConfig(n=self.n, K=self.K if self.K is not None else 5, p_in=self.p_in,
                             p_out=self.p_out, frac_neg_out=self.frac_neg_out,
                             w_low=self.w_low, w_high=self.w_high, seed=self.seed).validate()

    def grid_spec(self) -> GridSpec:
        """Grid lists, falling back to the single configured value of each parameter"""
        values = {}
        for grid_name, scalar in _GRID_FIELDS.items():
            listed = getattr(self, grid_name)
            if listed is None:
                fallback = getattr(self, scalar)
                if fallback is None:
                    raise ConfigError(f"Set {grid_name} or {scalar} for the grid search")
                listed = [fallback]
            values[scalar] = list(listed)
        return GridSpec(**values).validate()

    def require(self, *names: str) -> None:
        missing = [name for name in names if getattr(self, name) is None]
        if missing:
            raise ConfigError(f"Missing required setting(s): {', '.join(missing)}")

    def effective_jobs(self) -> int:
        if self.jobs < 0:
            raise ConfigError(f"jobs must be >= 0, got {self.jobs}")
        return self.jobs or os.cpu_count() or 1

    def validate(self) -> "RunConfig":
        self.kernel_params()
        self.cluster_options()
        if self.K is not None and self.K < 1:
            raise ConfigError(f"K must be >= 1, got {self.K}")
        if not 0.0 < self.high_cut < 10.0:
            raise ConfigError(f"high_cut must lie in (0, 10), got {self.high_cut}")
        if self.permutations < 0:
            raise ConfigError(f"permutations must be >= 0, got {self.permutations}")
        self.effective_jobs()
        return self


_INT_FIELDS = {'K', 'seed', 'restarts', 'max_iter', 'jobs', 'permutations', 'n', 'k_min', 'k_max'}
_STR_FIELDS = {'embeddings', 'thesaurus', 'vocab', 'gold', 'simlex', 'graph', 'partition'}


def _coerce(name: str, value: Any) -> Any:
    """Convert string values from files and the environment to the field type"""
    if not isinstance(value, str):
        return value
    text = value.strip()
    try:
        if name in _GRID_FIELDS:
            kind = int if name == 'K_grid' else float
            return [kind(item) for item in text.split(',') if item.strip()]
        if name in _STR_FIELDS:
            return text
        if name in _INT_FIELDS:
            return int(text)
        return float(text)
    except ValueError:
        raise ConfigError(f"Invalid value for '{name}': {value!r}") from None
