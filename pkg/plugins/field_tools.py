#!/usr/bin/env python3
"""Test field generation plugin (gen-field)."""
from __future__ import annotations
import argparse
import math
from pathlib import Path
from typing import Optional, Sequence

from config import ExperimentConfig, load_experiment_config
from lab.entropy import JumpConfig
from lab.errors import DomainError
from lab.fields import (
    AngleField,
    make_jump_field,
    make_piecewise_field,
    make_smooth_field,
    make_vortex_field,
    read_field,
    write_field,
)
from plugins.base import BasePlugin
from plugins.shared_helpers import cli_overrides, common_parser, print_ok, print_warning

FIELD_KINDS = ('jump', 'piecewise', 'vortex', 'smooth')


def build_field(kind: str, n: int, length: float = 1.0, beta: float = math.pi / 4,
                rotation: float = 0.0, width: float = 0.25, slope: float = 2.0,
                center: Sequence[float] = (0.5, 0.5), sign: int = 1) -> AngleField:
    """Generate one of the named test fields on an N x N grid."""
    point = (center[0] * length, center[1] * length)
    if kind == 'jump':
        return make_jump_field(JumpConfig.symmetric(beta, rotation), point, n, length)
    if kind == 'piecewise':
        return make_piecewise_field(JumpConfig.symmetric(beta, rotation), width * length, point, n, length)
    if kind == 'vortex':
        return make_vortex_field(point, sign, n, length)
    if kind == 'smooth':
        return make_smooth_field(slope, n, length)
    raise DomainError(f"unknown field kind '{kind}' (expected one of {', '.join(FIELD_KINDS)})")


def field_id(grid_field: AngleField) -> str:
    return f"{grid_field.kind}-n{grid_field.n}"


def add_field_arguments(parser: argparse.ArgumentParser) -> None:
    """Options selecting an input field: a file, or generator parameters."""
    parser.add_argument('--field', type=str, default=None,
                        help='Read the field from a file written by gen-field')
    parser.add_argument('--kind', choices=FIELD_KINDS, default='jump',
                        help='Generated field kind when --field is not given (default: jump)')
    parser.add_argument('--beta', type=float, default=math.pi / 4,
                        help='Jump half-angle beta (default: pi/4)')
    parser.add_argument('--rotation', type=float, default=0.0,
                        help='Rotation of the jump normal (radians)')
    parser.add_argument('--width', type=float, default=0.25, help='Strip width for piecewise fields')
    parser.add_argument('--slope', type=float, default=2.0, help='Slope a of the smooth field theta = a x1')
    parser.add_argument('--center', type=float, nargs=2, default=(0.5, 0.5), metavar=('X1', 'X2'),
                        help='Jump point or vortex center, in units of L')
    parser.add_argument('--sign', type=int, choices=(1, -1), default=1, help='Vortex orientation')


def field_from_args(args: argparse.Namespace, config: ExperimentConfig) -> AngleField:
    """Load --field or generate --kind at the configured resolution."""
    path = getattr(args, 'field', None)
    if path:
        grid_field = read_field(Path(path))
        if grid_field.n != config.n:
            print_warning(f"field {path} has N={grid_field.n}; config N={config.n} ignored")
        return grid_field
    return build_field(args.kind, config.n, config.length, args.beta, args.rotation,
                       args.width, args.slope, args.center, args.sign)


class FieldGenerator(BasePlugin):
    """Writes generated fields in the binary + JSON sidecar format."""

    def __init__(self, config: Optional[ExperimentConfig] = None):
        super().__init__('fields', config)

    def generate(self, args: argparse.Namespace, output: Optional[str] = None) -> int:
        grid_field = field_from_args(args, self.experiment)
        target = Path(output) if output else self.output_dir / f"{field_id(grid_field)}.json"
        sidecar, data = write_field(grid_field, target)
        masked = int((~grid_field.valid).sum())
        self.result.update({
            'success': True,
            'field_id': field_id(grid_field),
            'kind': grid_field.kind,
            'n': grid_field.n,
            'masked_cells': masked,
            'outputs': [str(sidecar), str(data)],
        })
        print_ok(f"wrote {sidecar} ({grid_field.n}x{grid_field.n}, masked cells: {masked})")
        return 0


def cmd_gen_field(args) -> int:
    """Command handler for 'eikolab gen-field'."""
    config = load_experiment_config(args.config, cli_overrides(args), check_resolution=False)
    generator = FieldGenerator(config)
    exit_code = generator.generate(args, args.output)
    if args.json:
        print(generator.write_report())
    return exit_code


def register_commands(subparsers):
    """Register field commands with argparse."""
    gen_parser = subparsers.add_parser('gen-field', parents=[common_parser()],
                                       help='Generate a test field',
                                       description='Generate a jump, piecewise (strip), vortex or smooth '
                                                   'angle field and write it as JSON sidecar + float64 data')
    add_field_arguments(gen_parser)
    gen_parser.add_argument('--output', type=str, default=None,
                            help='Sidecar path (default: <output-dir>/<kind>-n<N>.json)')
    gen_parser.set_defaults(func=cmd_gen_field)
