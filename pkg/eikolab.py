#!/usr/bin/env python3
"""eikolab - numerical lab for entropy production and kinetic structure of the eikonal equation."""
from __future__ import annotations
import argparse
import json
import logging
import sys
from typing import List, NoReturn, Optional

from lab.errors import LabError
from plugin_manager import PluginManager
from plugins.shared_helpers import print_error, print_ok, setup_logging

logger = logging.getLogger('eikolab')

EXIT_USAGE = 1


class LabArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with exit code 1.

    argparse exits with 2 by default, which is the config-error code here.
    """

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        print_error(f"{self.prog}: {message}")
        sys.exit(EXIT_USAGE)


def cmd_plugin_list(args) -> int:
    """List all plugins and their status."""
    plugin_manager = PluginManager()
    plugin_manager.load_plugins()

    plugins = plugin_manager.list_plugins()
    if args.json:
        rows = [dict(p.to_dict(), loaded=plugin_manager.get_plugin_module(p.name) is not None)
                for p in plugins]
        print(json.dumps(rows, indent=2))
        return 0

    print("\n📦 Experiment Plugins:")
    print("=" * 70)
    for plugin in plugins:
        status = "✅ enabled" if plugin_manager.is_plugin_enabled(plugin.name) else "❌ disabled"
        loaded = "loaded" if plugin_manager.get_plugin_module(plugin.name) is not None else "not loaded"
        print(f"\n  {plugin.name} - {status}")
        print(f"  Description: {plugin.description}")
        print(f"  Module: {plugin.module} ({loaded})")
        print(f"  Commands: {', '.join(plugin.commands)}")
    print("\n" + "=" * 70)
    return 0


def cmd_plugin_enable(args) -> int:
    """Enable a plugin."""
    plugin_manager = PluginManager()
    plugin_manager.load_plugins()

    if plugin_manager.enable_plugin(args.name):
        print_ok(f"Plugin '{args.name}' enabled")
        return 0
    print_error(f"Plugin '{args.name}' not found")
    return EXIT_USAGE


def cmd_plugin_disable(args) -> int:
    """Disable a plugin."""
    plugin_manager = PluginManager()
    plugin_manager.load_plugins()

    if plugin_manager.disable_plugin(args.name):
        print_ok(f"Plugin '{args.name}' disabled")
        return 0
    print_error(f"Plugin '{args.name}' not found")
    return EXIT_USAGE


def build_parser(plugin_manager: PluginManager) -> argparse.ArgumentParser:
    parser = LabArgumentParser(
        prog='eikolab',
        description='Entropy production, Besov increments and kinetic checks for the eikonal equation',
        formatter_class=argparse.RawDescriptionHelpFormatter
    )

    subparsers = parser.add_subparsers(dest='command', help='Available commands',
                                       parser_class=LabArgumentParser)

    # Plugin management commands
    plugin_parser = subparsers.add_parser('plugin',
                                          help='Manage plugins',
                                          description='View and manage eikolab plugins')
    plugin_subparsers = plugin_parser.add_subparsers(dest='plugin_command', help='Plugin commands',
                                                     required=False, parser_class=LabArgumentParser)
    plugin_parser.set_defaults(func=cmd_plugin_list, json=False)

    plugin_list_parser = plugin_subparsers.add_parser('list', help='List all plugins')
    plugin_list_parser.add_argument('--json', action='store_true', help='Output as JSON')
    plugin_list_parser.set_defaults(func=cmd_plugin_list)

    plugin_enable_parser = plugin_subparsers.add_parser('enable', help='Enable a plugin')
    plugin_enable_parser.add_argument('name', help='Plugin name')
    plugin_enable_parser.set_defaults(func=cmd_plugin_enable)

    plugin_disable_parser = plugin_subparsers.add_parser('disable', help='Disable a plugin')
    plugin_disable_parser.add_argument('name', help='Plugin name')
    plugin_disable_parser.set_defaults(func=cmd_plugin_disable)

    # Register experiment commands from the plugins
    plugin_manager.register_plugin_commands(subparsers)
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """Parse argv, dispatch to the subcommand and map failures to exit codes."""
    plugin_manager = PluginManager()
    plugin_manager.load_plugins()

    parser = build_parser(plugin_manager)
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_USAGE

    setup_logging(getattr(args, 'verbose', False), getattr(args, 'debug', False))
    try:
        return int(args.func(args) or 0)
    except LabError as e:
        logger.debug("command '%s' failed", args.command, exc_info=True)
        print_error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except KeyboardInterrupt:
        print_error("interrupted")
        return 130


def main() -> NoReturn:
    """Main CLI entry point."""
    sys.exit(run())


if __name__ == '__main__':
    main()
