#!/usr/bin/env python3
"""Entropy production, Besov and mollification-scaling experiments."""
from __future__ import annotations
import math
from typing import Any, Dict, List, Optional

from config import ExperimentConfig, load_experiment_config
from lab.circlegeom import UnitVec
from lab.entropy import Entropy, entropy_dictionary, jin_kohn
from lab.fields import AngleField, line_length_in_window
from lab.production import (
    LUB_BLOCKS_PER_RADIUS,
    FitResult,
    besov_seminorm,
    defect_probe,
    fit_exponent,
    grad_cubed_probe,
    lub_measure,
    production_family,
    resolved_lub_measure,
)
from plugins.base import BasePlugin
from plugins.field_tools import add_field_arguments, field_from_args, field_id
from plugins.shared_helpers import cli_overrides, common_parser, print_ok


def jin_kohn_frames(count: int) -> List[Entropy]:
    """Jin-Kohn entropies for frames alpha_k = k (pi/2) / count; quarter turns repeat up to sign."""
    return [jin_kohn(0.5 * math.pi * k / count) for k in range(count)]


def jump_length(grid_field: AngleField, margin: float) -> Optional[float]:
    """Length of the jump line inside the interior window, for generated jump fields."""
    meta = grid_field.meta
    if grid_field.kind != 'jump' or 'jump' not in meta:
        return None
    normal = UnitVec(*meta['jump']['normal'])
    point = tuple(meta.get('point', (0.5, 0.5)))
    return line_length_in_window(point, normal, grid_field.length, margin)


def _fit_row(fid: str, op: str, fit: FitResult) -> List[Any]:
    return [fid, op, None, fit.slope, fit.residual]


class MeasureProbes(BasePlugin):
    """Probes of a single field: productions, N_t curves and scaling exponents."""

    def __init__(self, grid_field: AngleField, config: Optional[ExperimentConfig] = None):
        super().__init__('measures', config)
        self.field = grid_field
        self.field_id = field_id(grid_field)

    def get_default_config(self) -> Dict[str, Any]:
        return {'production': {'epsilon_cells': 4.0, 'frames': 64}}

    def production(self, epsilon: Optional[float] = None, frames: Optional[int] = None) -> int:
        """TV of the productions of every dictionary entropy, their lub and the Jin-Kohn lub."""
        config = self.experiment
        margin = config.margin
        if epsilon is None:
            epsilon = self.get_config('production.epsilon_cells', 4.0) * self.field.spacing
        frames = frames or int(self.get_config('production.frames', 64))

        dictionary = entropy_dictionary(config.dictionary_size, config.dictionary_random, config.seed)
        measures = production_family(self.field, dictionary, epsilon, margin)
        frame_measures = production_family(self.field, jin_kohn_frames(frames), epsilon, margin)
        radius = max(1, int(round(epsilon / self.field.spacing)))
        lub = resolved_lub_measure(measures, radius)
        jk_lub = resolved_lub_measure(frame_measures, radius)
        jk_cellwise = lub_measure(frame_measures)

        rows = [[self.field_id, f"production:{i}:{m.label}", epsilon, m.total_variation, None]
                for i, m in enumerate(measures)]
        rows.append([self.field_id, 'lub-dictionary', epsilon, lub.total_variation, None])
        rows.append([self.field_id, 'lub-jin-kohn', epsilon, jk_lub.total_variation, None])
        rows.append([self.field_id, 'lub-jin-kohn-cellwise', epsilon, jk_cellwise.total_variation, None])
        self.write_probe_csv(f"production-{self.field_id}.csv", rows)

        length = jump_length(self.field, margin)
        self.result.update({
            'success': True,
            'field_id': self.field_id,
            'epsilon': epsilon,
            'dictionary_size': len(dictionary),
            'masked_cells': measures[0].masked_cells if measures else 0,
            'tv_max': max(m.total_variation for m in measures),
            'lub_dictionary_tv': lub.total_variation,
            'lub_block': LUB_BLOCKS_PER_RADIUS * radius,
            'lub_jin_kohn_tv': jk_lub.total_variation,
            'lub_jin_kohn_cellwise_tv': jk_cellwise.total_variation,
            'jump_length': length,
        })
        if length:
            self.result['lub_jin_kohn_per_length'] = jk_lub.total_variation / length
        print_ok(f"production: {len(dictionary)} entropies, lub TV {lub.total_variation:.6g}")
        return 0

    def besov(self) -> int:
        """N_t over the configured t values, with its fitted exponent."""
        ts = self.experiment.ts
        margin = self.experiment.margin
        values = self.map(lambda t: besov_seminorm(self.field, t, margin), ts)
        rows = [[self.field_id, 'besov', t, v, None] for t, v in zip(ts, values)]
        self.result.update({'success': True, 'field_id': self.field_id,
                            'ts': list(ts), 'values': values})
        positive = [(t, v) for t, v in zip(ts, values) if v > 0.0]
        if len(positive) >= 3:
            fit = fit_exponent(positive)
            rows.append(_fit_row(self.field_id, 'besov-fit', fit))
            self.result['exponent'] = fit.slope
        if min(values) > 0.0:
            self.result['max_over_min'] = max(values) / min(values)
        self.write_probe_csv(f"besov-{self.field_id}.csv", rows)
        print_ok(f"besov: {len(ts)} values of N_t")
        return 0

    def scaling(self) -> int:
        """grad-cubed and defect probes over the configured epsilons, with fitted exponents."""
        epsilons = self.experiment.epsilons
        margin = self.experiment.margin
        grads = self.map(lambda eps: grad_cubed_probe(self.field, eps, margin), epsilons)
        defects = self.map(lambda eps: defect_probe(self.field, eps, margin), epsilons)
        rows = [[self.field_id, 'grad-cubed', eps, g, None] for eps, g in zip(epsilons, grads)]
        rows += [[self.field_id, 'defect', eps, d, None] for eps, d in zip(epsilons, defects)]
        self.result.update({'success': True, 'field_id': self.field_id, 'epsilons': list(epsilons),
                            'grad_cubed': grads, 'defect': defects})
        for op, values in (('grad-cubed', grads), ('defect', defects)):
            if min(values) > 0.0 and len(values) >= 3:
                fit = fit_exponent(zip(epsilons, values))
                rows.append(_fit_row(self.field_id, f"{op}-fit", fit))
                self.result[f"{op.replace('-', '_')}_exponent"] = fit.slope
        self.write_probe_csv(f"scaling-{self.field_id}.csv", rows)
        print_ok(f"scaling: {len(epsilons)} mollification scales")
        return 0


def _probes(args) -> MeasureProbes:
    config = load_experiment_config(args.config, cli_overrides(args))
    return MeasureProbes(field_from_args(args, config), config)


def cmd_production(args) -> int:
    """Command handler for 'eikolab production'."""
    probes = _probes(args)
    exit_code = probes.production(args.epsilon, args.frames)
    report = probes.write_report(f"production-{probes.field_id}.json")
    if args.json:
        print(report)
    return exit_code


def cmd_besov(args) -> int:
    """Command handler for 'eikolab besov'."""
    probes = _probes(args)
    exit_code = probes.besov()
    report = probes.write_report(f"besov-{probes.field_id}.json")
    if args.json:
        print(report)
    return exit_code


def cmd_scaling(args) -> int:
    """Command handler for 'eikolab scaling'."""
    probes = _probes(args)
    exit_code = probes.scaling()
    report = probes.write_report(f"scaling-{probes.field_id}.json")
    if args.json:
        print(report)
    return exit_code


def register_commands(subparsers):
    """Register measure commands with argparse."""
    production_parser = subparsers.add_parser('production', parents=[common_parser()],
                                              help='Entropy production over the entropy dictionary',
                                              description='Total variation of div Phi(m_eps) for every '
                                                          'dictionary entropy, plus least upper bounds')
    add_field_arguments(production_parser)
    production_parser.add_argument('--epsilon', type=float, default=None,
                                   help='Mollification radius (default: 4 grid spacings)')
    production_parser.add_argument('--frames', type=int, default=None,
                                   help='Number of Jin-Kohn frames in the lub (default: 64)')
    production_parser.set_defaults(func=cmd_production)

    besov_parser = subparsers.add_parser('besov', parents=[common_parser()],
                                         help='N_t curve of a field',
                                         description='Normalized cubic increments N_t over the configured t values')
    add_field_arguments(besov_parser)
    besov_parser.set_defaults(func=cmd_besov)

    scaling_parser = subparsers.add_parser('scaling', parents=[common_parser()],
                                           help='Mollification scaling probes',
                                           description='Integrals of |grad m_eps|^3 and (1-|m_eps|^2)^(3/2) '
                                                       'over the configured epsilons, with fitted exponents')
    add_field_arguments(scaling_parser)
    scaling_parser.set_defaults(func=cmd_scaling)
