import argparse
import json
import logging
import os
import sys
from typing import List, Optional

from gossipsim.config import Config, configure_logging
from gossipsim.exceptions import ConfigError
from gossipsim.Services.Metrics.analysis import analytical_estimate
from gossipsim.Services.presets import PRESETS
from gossipsim.Services.scenario_service import ScenarioService, load_config
from gossipsim.Services.sweep_service import SweepService

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INCOMPLETE = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='gossipsim', description='GossipSub large-message simulator')
    parser.add_argument('--log-level', default=Config.LOG_LEVEL)
    sub = parser.add_subparsers(dest='command', required=True)

    run = sub.add_parser('run', help='run one scenario')
    run.add_argument('--config', required=True, help='scenario JSON (a summary.json works too)')
    run.add_argument('--seed', type=int)
    run.add_argument('--out', default=None, help='output directory (default: $GOSSIPSIM_OUTPUT_DIR/<name>)')
    run.add_argument('--override', nargs='*', default=[], metavar='KEY=VALUE')
    run.add_argument('--edges', action='store_true', help='also write edges.txt')

    sweep = sub.add_parser('sweep', help='run a preset or a list of scenarios')
    source = sweep.add_mutually_exclusive_group(required=True)
    source.add_argument('--preset', choices=sorted(PRESETS))
    source.add_argument('--configs', nargs='+', help='scenario JSON files')
    sweep.add_argument('--out', required=True)
    sweep.add_argument('--jobs', type=int, default=Config.SWEEP_JOBS)
    sweep.add_argument('--override', nargs='*', default=[], metavar='KEY=VALUE')
    sweep.add_argument('--table4-publishers', action='store_true',
                       help='scenario 3 with 20..100 publishers instead of 22..102')

    estimate = sub.add_parser('estimate', help='closed-form latency estimates')
    estimate.add_argument('--size', type=float, required=True, help='message size in bytes')
    estimate.add_argument('--rate', type=float, required=True, help='bandwidth in Mbps')
    estimate.add_argument('--latency', type=float, required=True, help='link latency in ms')
    estimate.add_argument('--nodes', type=int, required=True)
    estimate.add_argument('--degree', type=int, required=True)
    estimate.add_argument('--fragments', type=int, default=1)
    return parser


def _run(args) -> int:
    overrides = list(args.override)
    if args.edges:
        overrides.append('emit_edges=true')
    config = load_config(args.config, overrides, args.seed)
    out_dir = args.out or os.path.join(Config.OUTPUT_DIR, config.name)
    result = ScenarioService().run(config, out_dir)
    print(json.dumps({k: v for k, v in result.summary.items() if k != 'config'}, indent=2, sort_keys=True))
    return EXIT_OK if result.complete else EXIT_INCOMPLETE


def _read_configs(paths: List[str]) -> List[dict]:
    configs = []
    for path in paths:
        try:
            with open(path, encoding='utf-8') as f:
                configs.append(json.load(f))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError('configs', f'{path}: {e}') from e
    return configs


def _sweep(args) -> int:
    service = SweepService(jobs=args.jobs)
    configs = _read_configs(args.configs) if args.configs else None
    cells = service.cells(args.preset, configs, args.override, args.table4_publishers)
    combined = service.run(cells, args.out)
    columns = [c for c in ('cell', 'status', 'mean_l100_ms', 'bytes_total') if c in combined.columns]
    print(combined[columns].to_string(index=False))
    return EXIT_OK if (combined['status'] == 'ok').all() else EXIT_INCOMPLETE


def _estimate(args) -> int:
    result = analytical_estimate(args.size, args.rate, args.latency, args.nodes, args.degree, args.fragments)
    print(f'H = {result.hops}')
    print(f'tau_tx = {result.tau_tx_ms:g} ms')
    print(f'baseline = {result.baseline_ms:g} ms')
    print(f'fragmented (n={args.fragments}) = {result.fragmented_ms:g} ms')
    print('stagger growth:')
    print(f'{"round":>5} {"new":>10} {"covered":>10} {"elapsed_ms":>12}')
    for row in result.stagger_table:
        print(f'{row.round:>5} {row.new_peers:>10} {row.cumulative:>10} {row.elapsed_ms:>12g}')
    return EXIT_OK


COMMANDS = {'run': _run, 'sweep': _sweep, 'estimate': _estimate}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        logger.error('Configuration error in %s: %s', e.field, e.message)
        print(f'error: {e}', file=sys.stderr)
        return EXIT_CONFIG


if __name__ == '__main__':
    sys.exit(main())
