#!/usr/bin/env python3
"""Jump cost curve plugin (cost-curve)."""
from __future__ import annotations
from typing import Optional

from config import ExperimentConfig, load_experiment_config
from lab.cost import cost_curve, cost_quadrature, mass_strictness_check
from plugins.base import BasePlugin
from plugins.shared_helpers import cli_overrides, common_parser, print_ok


class CostCurve(BasePlugin):
    """Table of c(s) against s^3/6 on a half-angle grid."""

    def __init__(self, config: Optional[ExperimentConfig] = None):
        super().__init__('cost', config)

    def run(self, samples: int) -> int:
        points = cost_curve(samples)
        rows = [[p.s, p.c_value, p.cubic_bound] for p in points]
        self.write_probe_csv('cost-curve.csv', rows, header=('s', 'c', 's3_over_6'))

        violations = [p.s for p in points if p.c_value <= p.cubic_bound]
        top = points[-1]
        twice_cost, cubic, margin = mass_strictness_check(top.beta)
        self.result.update({
            'success': not violations,
            'samples': samples,
            'c_at_two': top.c_value,
            'c_at_two_quadrature': cost_quadrature(top.beta),
            'min_strictness': min(p.strictness for p in points),
            'violations': violations,
            'mass_margin_at_half_pi': margin,
            'twice_cost_at_half_pi': twice_cost,
            'cubic_at_half_pi': cubic,
        })
        if violations:
            self.log_error(f"cost-curve: c(s) <= s^3/6 at {len(violations)} points")
            return 4
        print_ok(f"cost-curve: {samples} rows, c(2) = {top.c_value:.6f}")
        return 0


def cmd_cost_curve(args) -> int:
    """Command handler for 'eikolab cost-curve'."""
    config = load_experiment_config(args.config, cli_overrides(args), check_resolution=False)
    curve = CostCurve(config)
    exit_code = curve.run(args.samples)
    report = curve.write_report('cost-curve.json')
    if args.json:
        print(report)
    return exit_code


def register_commands(subparsers):
    """Register cost commands with argparse."""
    cost_parser = subparsers.add_parser('cost-curve', parents=[common_parser()],
                                        help='Tabulate the jump cost c(s)',
                                        description='CSV of (s, c(s), s^3/6) on beta_k = k pi / (2 samples); '
                                                    'fails with exit code 4 if c(s) <= s^3/6 anywhere')
    cost_parser.add_argument('--samples', '--cost-curve', dest='samples', type=int, default=100,
                             help='Number of rows (default: 100)')
    cost_parser.set_defaults(func=cmd_cost_curve)
