#!/usr/bin/env python3
"""Shared helpers for eikolab plugins: logging, parallelism and output files."""
from __future__ import annotations
import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, TypeVar

from config_utils import get_env_value

T = TypeVar('T')
R = TypeVar('R')

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_DATEFMT = '%Y-%m-%d %H:%M:%S'
THREADS_ENV = 'EIKONAL_LAB_THREADS'
FLOAT_FORMAT = '{:.10e}'
PROBE_COLUMNS = ('field_id', 'op', 'param', 'value', 'residual')

logger = logging.getLogger(__name__)


def setup_logging(verbose: bool = False, debug: bool = False) -> None:
    """Configure root logging once; WARNING by default."""
    level = logging.DEBUG if debug else logging.INFO if verbose else logging.WARNING
    logging.basicConfig(level=level, format=LOG_FORMAT, datefmt=LOG_DATEFMT, stream=sys.stderr)
    logging.getLogger().setLevel(level)


def print_ok(message: str) -> None:
    print(f"✅ {message}", file=sys.stderr)


def print_warning(message: str) -> None:
    print(f"⚠️  {message}", file=sys.stderr)


def print_error(message: str) -> None:
    print(f"❌ {message}", file=sys.stderr)


def thread_limit(requested: Optional[int] = None) -> int:
    """Worker count: explicit request, else EIKONAL_LAB_THREADS, else CPU count."""
    if requested is None:
        requested = get_env_value(THREADS_ENV, None, int)
    if requested is None:
        requested = os.cpu_count() or 1
    return max(1, int(requested))


def parallel_map(func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """Map over items with a thread pool; results keep the input order."""
    items = list(items)
    workers = min(thread_limit(threads), max(1, len(items)))
    if workers == 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))


def format_cell(value: Any) -> str:
    """Fixed textual form so identical runs give byte-identical files."""
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return FLOAT_FORMAT.format(value)
    if hasattr(value, 'item'):
        return format_cell(value.item())
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write rows with fixed float formatting and '\\n' line endings."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(value) for value in row])
    logger.info("wrote %s", path)
    return path


def write_json_report(path: Optional[Path], data: Dict[str, Any]) -> str:
    """Dump a report with sorted keys; returns the text and writes it when a path is given."""
    text = json.dumps(data, indent=2, sort_keys=True, default=_json_default)
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + '\n')
        logger.info("wrote %s", path)
    return text


def _json_default(value: Any) -> Any:
    if hasattr(value, 'tolist'):
        return value.tolist()
    if hasattr(value, 'item'):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


def common_parser() -> argparse.ArgumentParser:
    """Options shared by every experiment subcommand."""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--config', type=str, default=None,
                        help='Experiment config file (JSON or YAML)')
    parser.add_argument('--n', type=int, default=None, help='Grid size N (cells per side)')
    parser.add_argument('--margin', type=float, default=None,
                        help='Interior margin excluded from integrals')
    parser.add_argument('--seed', type=int, default=None, help='Random seed')
    parser.add_argument('--output-dir', type=str, default=None, help='Directory for CSV/JSON outputs')
    parser.add_argument('--threads', type=int, default=None,
                        help=f'Worker threads (default: ${THREADS_ENV} or CPU count)')
    parser.add_argument('--json', action='store_true', help='Print the summary as JSON on stdout')
    parser.add_argument('--verbose', action='store_true', help='Log progress (INFO)')
    parser.add_argument('--debug', action='store_true', help='Log details (DEBUG)')
    return parser


def cli_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Config keys explicitly set on the command line."""
    mapping = {'n': 'n', 'margin': 'margin', 'seed': 'seed', 'output_dir': 'output_dir',
               'threads': 'threads'}
    overrides = {}
    for attr, key in mapping.items():
        value = getattr(args, attr, None)
        if value is not None:
            overrides[key] = value
    return overrides
