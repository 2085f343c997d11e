#!/usr/bin/env python3
"""Kinetic formulation checks (kinetic-check)."""
from __future__ import annotations
import math
from pathlib import Path
from typing import Any, Dict, Optional

from config import ExperimentConfig, load_experiment_config
from lab.circlegeom import TrigPolynomial
from lab.fields import AngleField, Bump, read_field
from lab.kinetic import (
    LineSigma,
    compare_with_profile,
    duality_check,
    jump_config_of,
    kinetic_residual,
    low_mode_pairings,
    sigma_jump,
)
from lab.entropy import JumpConfig
from plugins.base import BasePlugin
from plugins.field_tools import build_field
from plugins.shared_helpers import cli_overrides, common_parser, print_ok, print_warning

# off the jump line so the layer is not cut symmetrically by the bump
JUMP_BUMP = Bump((0.55, 0.5), 0.25)
# off-center so the pairing is not zero by symmetry
VORTEX_BUMP = Bump((0.45, 0.52), 0.3)
RESIDUAL_MODE = TrigPolynomial.mode(2, 'sin')
DUALITY_SOURCE = TrigPolynomial.mode(2, 'cos')


class KineticChecks(BasePlugin):
    """sigma of a jump, kinetic residuals and the entropy/kinetic duality."""

    def __init__(self, config: Optional[ExperimentConfig] = None):
        super().__init__('kinetic', config)

    def get_default_config(self) -> Dict[str, Any]:
        return {'moment_samples': 1024}

    def run(self, beta: float, samples: Optional[int] = None, kinetic_out: Optional[str] = None,
            jump_field: Optional[AngleField] = None) -> int:
        """A given jump_field overrides beta with its own half-angle."""
        config = self.experiment
        samples = samples or config.angular_samples
        tolerances = config.tolerances
        moment_samples = int(self.get_config('moment_samples', 1024))

        if jump_field is None:
            jump_field = build_field('jump', config.n, config.length, beta=beta)
        jump = jump_config_of(jump_field)
        beta = jump.half_angle
        # S of a rotated jump is a shift of the symmetric one
        density = sigma_jump(JumpConfig.symmetric(beta), samples)
        target = Path(kinetic_out) if kinetic_out else self.output_dir / f"sigma-beta{beta:.4f}.csv"
        target.parent.mkdir(parents=True, exist_ok=True)
        density.to_csv(target)
        self.result['outputs'].append(str(target))
        sign, l1_error = compare_with_profile(density, beta)

        sigma = LineSigma.for_field(jump_field, samples)
        jump_residual = kinetic_residual(jump_field, sigma, JUMP_BUMP, RESIDUAL_MODE, moment_samples)
        low_modes = low_mode_pairings(jump_field, JUMP_BUMP, moment_samples)
        duality = duality_check(jump_field, DUALITY_SOURCE, JUMP_BUMP, samples=moment_samples,
                                margin=config.margin, sigma=sigma)

        vortex = build_field('vortex', config.n, config.length)
        vortex_residual = kinetic_residual(vortex, None, VORTEX_BUMP, RESIDUAL_MODE, moment_samples)

        self.result.update({
            'success': l1_error <= tolerances.kinetic_l1,
            'beta': beta,
            'samples': samples,
            'n': jump_field.n,
            'jump': jump.to_dict(),
            'profile_sign': sign,
            'profile_l1_error': l1_error,
            'sigma_l1_norm': density.l1_norm,
            'jump_residual': jump_residual,
            'vortex_residual': vortex_residual,
            'low_mode_pairings': list(low_modes),
            'duality': {
                'kinetic_side': duality.kinetic_side,
                'production_side': duality.production_side,
                'sigma_side': duality.sigma_side,
                'relative_discrepancy': duality.relative_discrepancy,
            },
        })
        if max(abs(v) for v in low_modes) > tolerances.low_mode:
            print_warning(f"kinetic-check: low-mode pairings {low_modes} above tolerance")
        if not self.result['success']:
            print_warning(f"kinetic-check: sigma differs from g_beta by {l1_error:.3e} in L1")
            return 4
        print_ok(f"kinetic-check: sigma = {'+' if sign > 0 else '-'}g_beta (L1 error {l1_error:.2e})")
        return 0


def cmd_kinetic_check(args) -> int:
    """Command handler for 'eikolab kinetic-check'."""
    config = load_experiment_config(args.config, cli_overrides(args))
    checks = KineticChecks(config)
    jump_field = read_field(Path(args.field)) if args.field else None
    exit_code = checks.run(args.beta, args.samples, args.kinetic_out, jump_field)
    report = checks.write_report('kinetic-check.json')
    if args.json:
        print(report)
    return exit_code


def register_commands(subparsers):
    """Register kinetic commands with argparse."""
    kinetic_parser = subparsers.add_parser('kinetic-check', parents=[common_parser()],
                                           help='Kinetic measure of a jump and kinetic residuals',
                                           description='sigma of a symmetric jump against g_beta, residuals of the '
                                                       'kinetic equation on jump and vortex fields, and the duality '
                                                       'with the entropy production of Phi_{cos 2t}')
    kinetic_parser.add_argument('--beta', type=float, default=math.pi / 4,
                                help='Jump half-angle beta (default: pi/4)')
    kinetic_parser.add_argument('--field', type=str, default=None,
                                help='Jump field written by gen-field (overrides --beta)')
    kinetic_parser.add_argument('--samples', type=int, default=None,
                                help='Angular samples M for sigma (default: config angular_samples)')
    kinetic_parser.add_argument('--kinetic-out', type=str, default=None,
                                help='CSV path for the kinetic density (columns s,S)')
    kinetic_parser.set_defaults(func=cmd_kinetic_check)
