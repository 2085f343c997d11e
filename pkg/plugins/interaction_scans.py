#!/usr/bin/env python3
"""Xi scans: increment decay, cubic coercivity and the Jin-Kohn quartic bound."""
from __future__ import annotations
import math
from typing import Any, Dict, Optional

import numpy as np

from config import ExperimentConfig, load_experiment_config
from lab.interaction import (
    coercivity_ratio,
    coercivity_scan,
    delta_field_integral,
    jk_immersion_check,
    jk_quartic_ratio_closed_form,
    jk_quartic_scan,
    quartic_increment_integral,
    xi_profile,
)
from lab.production import fit_exponent
from plugins.base import BasePlugin
from plugins.field_tools import add_field_arguments, field_from_args, field_id
from plugins.shared_helpers import cli_overrides, common_parser, print_ok


class InteractionScans(BasePlugin):
    """Closed-form Xi scans and field integrals of Xi over increments."""

    def __init__(self, config: Optional[ExperimentConfig] = None):
        super().__init__('interaction', config)

    def get_default_config(self) -> Dict[str, Any]:
        return {'coercivity': {'samples': 10_000}, 'quartic': {'pairs': 100_000}}

    def delta_decay(self, grid_field) -> int:
        """h -> integral of Xi(m(x + h e1), m(x)) with its fitted exponent."""
        fid = field_id(grid_field)
        hs = self.experiment.hs
        margin = self.experiment.margin
        values = self.map(lambda h: delta_field_integral(grid_field, h, (1.0, 0.0), margin), hs)
        rows = [[fid, 'delta', h, v, None] for h, v in zip(hs, values)]
        self.result.update({'success': True, 'field_id': fid, 'hs': list(hs), 'values': values})
        if len(hs) >= 3 and min(values) > 0.0:
            fit = fit_exponent(zip(hs, values))
            rows.append([fid, 'delta-fit', None, fit.slope, fit.residual])
            self.result['exponent'] = fit.slope
        self.write_probe_csv(f"delta-decay-{fid}.csv", rows)
        print_ok(f"delta-decay: {len(hs)} increments on {fid}")
        return 0

    def coercivity(self, samples: Optional[int] = None) -> int:
        """Curve (beta, Xi, ratio) and the empirical coercivity constant."""
        samples = samples or int(self.get_config('coercivity.samples', 10_000))
        minimum, argmin = coercivity_scan(samples)
        beta = 0.5 * math.pi * np.arange(1, samples + 1) / samples
        ratios = coercivity_ratio(beta)
        rows = ([float(b), xi_profile(float(b)).value, float(r)] for b, r in zip(beta, ratios))
        self.write_probe_csv('coercivity.csv', rows, header=('beta', 'xi', 'ratio'))
        self.result.update({
            'success': minimum >= self.experiment.tolerances.coercivity_floor,
            'samples': samples,
            'min_ratio': minimum,
            'argmin_beta': argmin,
            'ratio_at_half_pi': float(ratios[-1]),
        })
        print_ok(f"coercivity: min ratio {minimum:.6f} at beta={argmin:.6f}")
        return 0 if self.result['success'] else 4

    def jk_quartic(self, pairs: Optional[int] = None, grid_field=None) -> int:
        """Scan of det(X - Y) / |X - Y|^4 on K, plus quartic increments of a field."""
        pairs = pairs or int(self.get_config('quartic.pairs', 100_000))
        scan = jk_quartic_scan(pairs)
        self.result.update({
            'success': scan.positive,
            'pairs': scan.pairs,
            'minimum': scan.minimum,
            'argmin_separation': scan.argmin_separation,
            'closed_form_at_argmin': jk_quartic_ratio_closed_form(scan.argmin_separation),
            'immersion_min_speed': jk_immersion_check(),
        })
        if grid_field is not None:
            fid = field_id(grid_field)
            hs = self.experiment.hs
            margin = self.experiment.margin
            values = self.map(lambda h: quartic_increment_integral(grid_field, h, margin), hs)
            rows = [[fid, 'quartic-increment', h, v, None] for h, v in zip(hs, values)]
            if len(hs) >= 3 and min(values) > 0.0:
                fit = fit_exponent(zip(hs, values))
                rows.append([fid, 'quartic-increment-fit', None, fit.slope, fit.residual])
                self.result['increment_exponent'] = fit.slope
            self.write_probe_csv(f"jk-quartic-{fid}.csv", rows)
        print_ok(f"jk-quartic: min ratio {scan.minimum:.6g} over {scan.pairs} pairs")
        return 0 if scan.positive else 4


def cmd_delta_decay(args) -> int:
    """Command handler for 'eikolab delta-decay'."""
    config = load_experiment_config(args.config, cli_overrides(args))
    scans = InteractionScans(config)
    exit_code = scans.delta_decay(field_from_args(args, config))
    report = scans.write_report('delta-decay.json')
    if args.json:
        print(report)
    return exit_code


def cmd_coercivity(args) -> int:
    """Command handler for 'eikolab coercivity'."""
    config = load_experiment_config(args.config, cli_overrides(args), check_resolution=False)
    scans = InteractionScans(config)
    exit_code = scans.coercivity(args.samples)
    report = scans.write_report('coercivity.json')
    if args.json:
        print(report)
    return exit_code


def cmd_jk_quartic(args) -> int:
    """Command handler for 'eikolab jk-quartic'."""
    config = load_experiment_config(args.config, cli_overrides(args))
    scans = InteractionScans(config)
    exit_code = scans.jk_quartic(args.pairs, field_from_args(args, config))
    report = scans.write_report('jk-quartic.json')
    if args.json:
        print(report)
    return exit_code


def register_commands(subparsers):
    """Register interaction commands with argparse."""
    delta_parser = subparsers.add_parser('delta-decay', parents=[common_parser()],
                                         help='Integral of Xi over increments as a function of h',
                                         description='Integral over U of Xi(m(x + h e1), m(x)) for the '
                                                     'configured h values, with the fitted exponent')
    add_field_arguments(delta_parser)
    delta_parser.set_defaults(func=cmd_delta_decay)

    coercivity_parser = subparsers.add_parser('coercivity', parents=[common_parser()],
                                              help='Scan Xi / |m1 - m2|^3 over the half-angle',
                                              description='Closed-form Xi against (2 sin beta)^3 on a K-point grid')
    coercivity_parser.add_argument('--samples', type=int, default=None,
                                   help='Grid size K (default: 10000, minimum 100)')
    coercivity_parser.set_defaults(func=cmd_coercivity)

    quartic_parser = subparsers.add_parser('jk-quartic', parents=[common_parser()],
                                           help='Quartic lower bound on the Jin-Kohn set',
                                           description='Minimum of det(X - Y) / |X - Y|^4 over sampled pairs, '
                                                       'plus quartic increments of a field')
    add_field_arguments(quartic_parser)
    quartic_parser.add_argument('--pairs', type=int, default=None,
                                help='Number of sampled pairs (default: 100000, minimum 10000)')
    quartic_parser.set_defaults(func=cmd_jk_quartic)
