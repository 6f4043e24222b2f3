"""
Run configuration for the command line front end.

Values are merged from, lowest to highest priority: the defaults below, a
JSON config file, the environment and explicit command line flags.
"""
import json
import logging
import os
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Dict, Mapping, Optional

from .backends.filesystem import FileSystemBackend
from .cache import RULE_CACHE_SIZE, TableCache
from .numerics.quadrature import QuadSpec
from .utils.validation import validate_order, validate_positive

logger = logging.getLogger(__name__)

TABLE_DIR_ENV = "SZEGO_BOREL_TABLE_DIR"
OUTPUT_FORMATS = ("csv", "json")


@dataclass(frozen=True)
class RunConfig:
    m: int = 2
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_evals: int = 2_000_000
    zero_count: int = 40
    table_dir: str = ".szego_borel"
    zero_table_path: Optional[str] = None
    output: str = "csv"
    jobs: int = 1
    rule_cache_size: int = RULE_CACHE_SIZE

    def __post_init__(self):
        validate_order(self.m)
        if self.output not in OUTPUT_FORMATS:
            raise ValueError(f"Unknown output format: {self.output}. Must be one of {OUTPUT_FORMATS}.")
        if isinstance(self.jobs, bool) or not isinstance(self.jobs, int) or self.jobs < 1:
            raise ValueError("jobs must be a positive integer")
        if isinstance(self.zero_count, bool) or not isinstance(self.zero_count, int) \
                or self.zero_count < 1:
            raise ValueError("zero_count must be a positive integer")
        if isinstance(self.rule_cache_size, bool) or not isinstance(self.rule_cache_size, int) \
                or self.rule_cache_size < 1:
            raise ValueError("rule_cache_size must be a positive integer")
        validate_positive("rel_tol", self.rel_tol)
        validate_positive("abs_tol", self.abs_tol, allow_zero=True)

    @property
    def quad_spec(self) -> QuadSpec:
        return QuadSpec(self.rel_tol, self.abs_tol, self.max_evals)

    def table_cache(self) -> TableCache:
        return TableCache(FileSystemBackend(self.table_dir))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _known(values: Mapping[str, Any], source: str) -> Dict[str, Any]:
    names = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(values) - names)
    if unknown:
        raise ValueError(f"Unknown config keys in {source}: {', '.join(unknown)}")
    return dict(values)


def load_config(path: Optional[str] = None, env: Optional[Mapping[str, str]] = None,
                overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """
    Build a RunConfig.

    Args:
        path: JSON file with a top-level object of RunConfig fields
        env: Environment mapping (os.environ by default)
        overrides: Explicit values; entries that are None are ignored

    Raises:
        ValueError: On unknown keys or invalid values
        OSError: If the config file cannot be read
    """
    config = RunConfig()
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as e:
                raise ValueError(f"Failed to parse config file {path}: {e}") from e
        if not isinstance(data, dict):
            raise ValueError(f"Config file {path} must hold a JSON object")
        config = replace(config, **_known(data, path))
        logger.info("loaded config from %s", path)
    env = os.environ if env is None else env
    if env.get(TABLE_DIR_ENV):
        config = replace(config, table_dir=env[TABLE_DIR_ENV])
    if overrides:
        given = {k: v for k, v in overrides.items() if v is not None}
        config = replace(config, **_known(given, "command line"))
    return config
