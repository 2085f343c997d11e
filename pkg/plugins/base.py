#!/usr/bin/env python3
"""Base plugin class for eikolab experiment plugins."""
from __future__ import annotations
import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

from config import CONFIG_DIR, ExperimentConfig
from config_utils import deep_merge, load_config_file
from plugins.shared_helpers import (
    PROBE_COLUMNS,
    parallel_map,
    print_error,
    write_csv,
    write_json_report,
)


class BasePlugin:
    """Base class for all experiment plugins.

    A plugin owns one experiment family: it reads its own defaults merged with
    ~/.eikolab/plugins/<name>.json, runs against an ExperimentConfig and keeps
    a machine-readable ``result`` dict.
    """

    def __init__(self, name: str, config: Optional[ExperimentConfig] = None):
        self.name = name
        self.experiment = config or ExperimentConfig()
        self.config_dir = CONFIG_DIR
        self.plugin_config_file = self.config_dir / "plugins" / f"{name}.json"
        self.config = self._load_config()
        self.logger = logging.getLogger(f"eikolab.{name}")
        self.result: Dict[str, Any] = {'plugin': name, 'success': False, 'outputs': []}
        self._started = time.perf_counter()

    def _load_config(self) -> Dict[str, Any]:
        """Plugin defaults merged with the optional plugin config file."""
        default_config = self.get_default_config()

        if self.plugin_config_file.exists():
            try:
                return deep_merge(default_config, load_config_file(self.plugin_config_file))
            except Exception as e:
                print(f"Warning: Failed to load config for {self.name}: {e}", file=sys.stderr)

        return default_config

    def get_default_config(self) -> Dict[str, Any]:
        """Get default configuration. Should be overridden by subclasses."""
        return {}

    def get_config(self, key: str, default: Any = None) -> Any:
        """Get configuration value using dot notation."""
        value: Any = self.config
        for k in key.split('.'):
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default
        return value if value is not None else default

    @property
    def output_dir(self) -> Path:
        return self.experiment.output_path

    def map(self, func, items: Iterable) -> List:
        """Run independent probes over the configured thread pool, in order."""
        return parallel_map(func, items, self.experiment.threads)

    def write_probe_csv(self, filename: str, rows: Iterable[Sequence[Any]],
                        header: Sequence[str] = PROBE_COLUMNS) -> Path:
        path = write_csv(self.output_dir / filename, header, rows)
        self.result['outputs'].append(str(path))
        return path

    def write_report(self, filename: Optional[str] = None) -> str:
        """Finalize ``result`` with the runtime and dump it (to a file when named)."""
        self.result['seconds'] = round(time.perf_counter() - self._started, 3)
        path = self.output_dir / filename if filename else None
        if path is not None:
            self.result['outputs'].append(str(path))
        return write_json_report(path, self.result)

    def log_info(self, message: str):
        self.logger.info(message)

    def log_error(self, message: str):
        self.logger.error(message)
        print_error(message)
