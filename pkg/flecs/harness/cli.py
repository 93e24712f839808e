# MIT License: Copyright (c) 2022 flecs-kit developers

import sys
import logging
import argparse
import dataclasses
from typing import Optional, List

from flecs.errors import ConfigError, DataError, DimensionError, NumericError
from flecs.harness.config import RunConfig, load_config, SYNTHETIC
from flecs.harness.driver import VARIANTS, run, compare, build_shards, load_dataset
from flecs.harness.selftest import CheckResult, check_gradients, run_selftest
from flecs.harness.trace import write_trace, write_comparison, save_csv
from flecs.protocol.bits import uplink_breakdown, baseline_uplink_bits, downlink_bits

#: The exit codes of the command line interface.
EXIT_SUCCESS = 0
EXIT_CONFIG_ERROR = 1
EXIT_DATA_ERROR = 2
EXIT_NUMERIC_ERROR = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='flecs', description="Compressed second-order federated optimization simulator"
    )
    subparsers = parser.add_subparsers(dest='command', required=True)

    def add_config_command(name: str, help_text: str) -> argparse.ArgumentParser:
        subparser = subparsers.add_parser(name, help=help_text)
        subparser.add_argument('config', help="The configuration file.")
        subparser.add_argument('--seed', type=int, default=None, help="Override the seed of the configuration.")
        subparser.add_argument('--rounds', type=int, default=None, help="Override the number of rounds.")
        subparser.add_argument('--verbose', action='store_true', help="Whether to enable verbose mode.")
        return subparser

    run_parser = add_config_command('run', "Run a simulation and write its trace.")
    run_parser.add_argument('--out', default=None, help="The output CSV filepath. Defaults to the standard output.")
    compare_parser = add_config_command('compare', "Run several variants and write their merged traces.")
    compare_parser.add_argument(
        '--variants', default='cgd,flecs', help="Comma-separated variants among {}.".format(', '.join(VARIANTS))
    )
    compare_parser.add_argument(
        '--out', default=None, help="The output CSV filepath. Defaults to the standard output."
    )
    add_config_command('gradcheck', "Check the local oracles against finite differences.")
    add_config_command('bits', "Print the per-round, per-node communication cost.")

    selftest_parser = subparsers.add_parser('selftest', help="Run the statistical self-check suites.")
    selftest_parser.add_argument('--seed', type=int, default=42, help="The seed value to use.")
    selftest_parser.add_argument('--draws', type=int, default=100_000, help="The number of draws per check.")
    selftest_parser.add_argument('--verbose', action='store_true', help="Whether to enable verbose mode.")
    return parser


def _load(args: argparse.Namespace) -> RunConfig:
    config = load_config(args.config)
    overrides = dict()
    if args.seed is not None:
        overrides['seed'] = args.seed
    if args.rounds is not None:
        overrides['rounds'] = args.rounds
    if args.verbose:
        overrides['verbose'] = True
    return dataclasses.replace(config, **overrides).validate()


def _emit(text: str, filepath: Optional[str]):
    if filepath is None:
        sys.stdout.write(text)
    else:
        save_csv(text, filepath)


def _report(results: List[CheckResult]) -> int:
    for result in results:
        print("{} {}: {}".format('PASS' if result.passed else 'FAIL', result.name, result.detail))
    return EXIT_SUCCESS if all(r.passed for r in results) else EXIT_NUMERIC_ERROR


def format_bits(config: RunConfig, d: int) -> str:
    """
    Format the per-round, per-node communication cost of a configuration.

    :param config: The configuration.
    :param d: The number of parameters.
    :return: The cost breakdown, one 'name = value' line per term.
    """
    m = config.memory
    breakdown = uplink_breakdown(d, m, config.grad_spec, config.hess_spec, config.float_bits)
    lines = [
        'd = {}'.format(d),
        'm = {}'.format(m),
        'uplink gradient bits = {}'.format(breakdown.gradient),
        'uplink hessian bits = {}'.format(breakdown.hessian),
        'uplink curvature bits = {}'.format(breakdown.curvature),
        'uplink bits (cgd) = {}'.format(breakdown.total),
        'uplink bits (flecs) = {}'.format(baseline_uplink_bits(d, m, config.hess_spec, config.float_bits)),
        'downlink bits = {}'.format(downlink_bits(d, m, config.float_bits))
    ]
    return '\n'.join(lines) + '\n'


def execute(args: argparse.Namespace) -> int:
    if args.command == 'selftest':
        return _report(run_selftest(draws=args.draws, random_state=args.seed))

    config = _load(args)
    if args.command == 'run':
        _emit(write_trace(run(config)), args.out)
    elif args.command == 'compare':
        variants = [v.strip() for v in args.variants.split(',') if v.strip()]
        _emit(write_comparison(compare(config, variants)), args.out)
    elif args.command == 'gradcheck':
        return _report(check_gradients(build_shards(config), random_state=config.seed))
    elif args.command == 'bits':
        d = config.synthetic_dim if config.dataset == SYNTHETIC else load_dataset(config).dim
        sys.stdout.write(format_bits(config, d))
    return EXIT_SUCCESS


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run the command line interface.

    :param argv: The command line arguments. If None they are taken from sys.argv.
    :return: The exit code, i.e. 0 on success, 1 on configuration errors, 2 on data errors
             and 3 on numeric failures.
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s'
    )
    try:
        return execute(args)
    except (ConfigError, DimensionError) as e:
        print("Configuration error: {}".format(e), file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except DataError as e:
        print("Data error: {}".format(e), file=sys.stderr)
        return EXIT_DATA_ERROR
    except NumericError as e:
        print("Numeric failure: {}".format(e), file=sys.stderr)
        return EXIT_NUMERIC_ERROR
