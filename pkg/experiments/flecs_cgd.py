import os
import time
import json
import logging
import argparse
import dataclasses

from flecs.harness import RunConfig, VARIANTS, compare, write_comparison, save_csv
from flecs.optim import TRUNCATED, FEDSONIA

from experiments.datasets import LIBSVM_DATASETS, dataset_filepath, dataset_n_features
from experiments.utils import summarize_traces


if __name__ == '__main__':
    # Parse the arguments
    parser = argparse.ArgumentParser(
        description="Compressed gradients (FLECS-CGD) against uncompressed gradients (FLECS) experiments"
    )
    parser.add_argument(
        'dataset', choices=list(LIBSVM_DATASETS) + ['synthetic'], help="The dataset."
    )
    parser.add_argument(
        '--memory', type=int, nargs='+', default=[1, 2, 4, 8], help="The memory sizes to sweep."
    )
    parser.add_argument(
        '--direction', choices=[TRUNCATED, FEDSONIA], nargs='+', default=[TRUNCATED, FEDSONIA],
        help="The search directions to sweep."
    )
    parser.add_argument(
        '--n-workers', type=int, default=10, help="The number of workers."
    )
    parser.add_argument(
        '--levels', type=int, default=64, help="The number of random dithering levels."
    )
    parser.add_argument(
        '--reg-mu', type=float, default=1e-3, help="The L2 regularization coefficient."
    )
    parser.add_argument(
        '--rounds', type=int, default=100, help="The number of rounds."
    )
    parser.add_argument(
        '--n-thresholds', type=int, default=5, help="The number of objective thresholds of the summary."
    )
    parser.add_argument(
        '--n-jobs', type=int, default=0, help="The number of parallel jobs for worker rounds. 0 disables it."
    )
    parser.add_argument(
        '--seed', type=int, default=42, help="The seed value to use."
    )
    parser.add_argument(
        '--no-verbose', dest='verbose', action='store_false', help="Whether to disable verbose mode."
    )
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)

    # Build the base configuration
    config = RunConfig(
        n_workers=args.n_workers, grad_levels=args.levels, hess_levels=args.levels, reg_mu=args.reg_mu,
        rounds=args.rounds, seed=args.seed, n_jobs=args.n_jobs, record_time=True, verbose=args.verbose
    )
    if args.dataset != 'synthetic':
        config = dataclasses.replace(
            config, dataset=dataset_filepath('datasets', args.dataset), n_features=dataset_n_features(args.dataset)
        )

    # Create the results directory
    identifier = time.strftime("%Y%m%d-%H%M%S")
    directory = os.path.join('flecs-cgd', args.dataset, identifier)
    os.makedirs(directory, exist_ok=True)
    results_filepath = os.path.join(directory, 'results.json')

    # Sweep the memory sizes and the search directions
    results = dict()
    for direction in args.direction:
        for memory in args.memory:
            run_config = dataclasses.replace(config, memory=memory, direction=direction).validate()
            start_time = time.perf_counter()
            traces = compare(run_config, list(VARIANTS))
            elapsed_time = time.perf_counter() - start_time

            name = '{}-m{}'.format(direction, memory)
            save_csv(write_comparison(traces), os.path.join(directory, '{}.csv'.format(name)))
            results[name] = {
                'summary': summarize_traces(traces, args.n_thresholds),
                'elapsed_time': elapsed_time,
                'config': run_config.to_text()
            }

    # Save the results
    results['settings'] = args.__dict__
    with open(results_filepath, 'w') as f:
        json.dump(results, f, indent=4)
