#!/usr/bin/env python3
"""Plugin management system for the eikolab CLI."""
from __future__ import annotations
import importlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from config_utils import save_json_config

logger = logging.getLogger(__name__)


@dataclass
class PluginMetadata:
    """Plugin metadata structure."""
    name: str
    enabled: bool
    module: str
    commands: List[str] = field(default_factory=list)
    description: str = ''

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PluginMetadata':
        """Create PluginMetadata from dictionary."""
        return cls(
            name=data.get('name', ''),
            enabled=data.get('enabled', False),
            module=data.get('module', ''),
            commands=data.get('commands', []),
            description=data.get('description', '')
        )

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            'name': self.name,
            'enabled': self.enabled,
            'module': self.module,
            'commands': self.commands,
            'description': self.description
        }


DEFAULT_PLUGINS: List[Dict[str, Any]] = [
    {
        "name": "fields",
        "enabled": True,
        "module": "plugins.field_tools",
        "commands": ["gen-field"],
        "description": "Jump, strip, vortex and smooth test fields"
    },
    {
        "name": "measures",
        "enabled": True,
        "module": "plugins.measures",
        "commands": ["production", "besov", "scaling"],
        "description": "Entropy production, Besov increments and mollification probes"
    },
    {
        "name": "interaction",
        "enabled": True,
        "module": "plugins.interaction_scans",
        "commands": ["delta-decay", "coercivity", "jk-quartic"],
        "description": "Xi coercivity, increment decay and Jin-Kohn quartic scans"
    },
    {
        "name": "cost",
        "enabled": True,
        "module": "plugins.cost_tools",
        "commands": ["cost-curve"],
        "description": "Jump cost c(s) against s^3/6"
    },
    {
        "name": "kinetic",
        "enabled": True,
        "module": "plugins.kinetic_tools",
        "commands": ["kinetic-check"],
        "description": "Kinetic residuals and duality checks"
    },
    {
        "name": "acceptance",
        "enabled": True,
        "module": "plugins.acceptance",
        "commands": ["verify-all"],
        "description": "Full acceptance suite with a pass/fail report"
    },
]


class PluginManager:
    """Singleton plugin registry for the eikolab CLI.

    The built-in plugins are always known; ~/.eikolab/plugins.json, when
    present, may disable some of them.
    """

    _instance = None

    def __new__(cls):
        """Ensure singleton instance."""
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance._initialized = False
        return cls._instance

    def __init__(self):
        if self._initialized:
            return

        self.config_dir = Path.home() / ".eikolab"
        self.plugins_file = self.config_dir / "plugins.json"
        self.plugins: Dict[str, PluginMetadata] = {}
        self._loaded_modules: Dict[str, Any] = {}
        self._initialized = True

    def _read_overrides(self) -> Dict[str, Dict[str, Any]]:
        if not self.plugins_file.exists():
            return {}
        try:
            with open(self.plugins_file, 'r') as f:
                data = json.load(f)
            return {p.get('name'): p for p in data.get('plugins', [])}
        except (OSError, json.JSONDecodeError) as e:
            logger.warning("could not read %s: %s", self.plugins_file, e)
            return {}

    def load_plugins(self) -> bool:
        """Register the built-in plugins and import the enabled modules.

        Returns:
            bool: True if every enabled module imported
        """
        overrides = self._read_overrides()
        ok = True
        for default in DEFAULT_PLUGINS:
            data = dict(default)
            if default['name'] in overrides:
                data['enabled'] = bool(overrides[default['name']].get('enabled', True))
            plugin = PluginMetadata.from_dict(data)
            self.plugins[plugin.name] = plugin

            if plugin.enabled and plugin.name not in self._loaded_modules:
                try:
                    self._loaded_modules[plugin.name] = importlib.import_module(plugin.module)
                except ImportError as e:
                    logger.warning("could not load plugin module '%s': %s", plugin.module, e)
                    ok = False
        return ok

    def is_plugin_enabled(self, plugin_name: str) -> bool:
        if plugin_name not in self.plugins:
            return False
        return self.plugins[plugin_name].enabled

    def enable_plugin(self, plugin_name: str) -> bool:
        if plugin_name not in self.plugins:
            return False
        self.plugins[plugin_name].enabled = True
        return self._save_plugins()

    def disable_plugin(self, plugin_name: str) -> bool:
        if plugin_name not in self.plugins:
            return False
        self.plugins[plugin_name].enabled = False
        return self._save_plugins()

    def list_plugins(self) -> List[PluginMetadata]:
        return list(self.plugins.values())

    def get_plugin_module(self, plugin_name: str) -> Optional[Any]:
        return self._loaded_modules.get(plugin_name)

    def register_plugin_commands(self, subparsers) -> None:
        """Let every enabled plugin module add its subcommands.

        Each module provides ``register_commands(subparsers)``.
        """
        for plugin_name, plugin in self.plugins.items():
            if not plugin.enabled:
                continue

            module = self._loaded_modules.get(plugin_name)
            if module is None:
                continue

            if hasattr(module, 'register_commands') and callable(module.register_commands):
                module.register_commands(subparsers)

    def _save_plugins(self) -> bool:
        """Save plugins.json to disk."""
        try:
            save_json_config(self.plugins_file, {
                "version": "1.0",
                "plugins": [p.to_dict() for p in self.plugins.values()]
            })
            return True
        except OSError as e:
            logger.error("could not save plugins.json: %s", e)
            return False
