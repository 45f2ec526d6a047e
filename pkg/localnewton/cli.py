'''
Command-line front end::

    python -m localnewton run --algo adaptive --train data/w8a --test data/w8a.t --k 100 --l0 3
    python -m localnewton compare --train data/w8a --algos adaptive,giant --max-rounds 60
    python -m localnewton theory --train data/synth --k 10 --trials 500 --progress
    python -m localnewton gen-synth --n 1000 --d 20 --margin .1 --out data/synth

Every ``ExperimentConfig`` field is a flag (``--max-rounds 9`` and
``--max_rounds 9`` both work). ``--config FILE`` reads ``key=value`` lines
first; flags given on the command line override them.

Exit codes: 0 on success, 2 for configuration and dataset errors, 3 for
solver failures. Errors are printed to standard error.
'''

from __future__ import print_function
import argparse
import logging
import os
import sys

import numpy as np

from .data import make_synthetic, write_libsvm, TASKS
from .exceptions import ConfigError, DatasetError, LocalNewtonError
from .harness import (FIELDS, ExperimentConfig, build, compare, load_config, output_name,
    run_experiment, run_meta)
from .metrics import write_combined_csv
from . import theory

_skip = None
_skip = set(globals()) - set(['__doc__'])

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

def _add_config_flags(parser):
    parser.add_argument('--config', help="key=value file read before the flags")
    for name, (parse, default) in FIELDS.items():
        flags = ['--' + name]
        if '_' in name:
            flags.append('--' + name.replace('_', '-'))
        kwargs = dict(dest=name, default=None, help="default: %s"%(default,))
        if isinstance(default, bool):
            kwargs.update(nargs='?', const='true')
        parser.add_argument(*flags, **kwargs)

def _add_common_flags(parser):
    parser.add_argument('--verbose', '-v', action='count', default=0,
        help="log progress (-vv for every round)")
    parser.add_argument('--progress', action='store_true',
        help="show a progress line for long trial loops")

def make_parser():
    parser = argparse.ArgumentParser(prog='localnewton',
        description="LocalNewton and baselines on a simulated cluster")
    subs = parser.add_subparsers(dest='command')
    subs.required = True

    run = subs.add_parser('run', allow_abbrev=False, help="run one algorithm and write its metrics CSV")
    _add_config_flags(run)
    _add_common_flags(run)

    cmp = subs.add_parser('compare', allow_abbrev=False, help="rounds to a target loss for several algorithms")
    _add_config_flags(cmp)
    _add_common_flags(cmp)

    th = subs.add_parser('theory', allow_abbrev=False, help="empirical checks of the convergence analysis")
    _add_config_flags(th)
    _add_common_flags(th)
    th.add_argument('--epsilon', type=float, default=.5)
    th.add_argument('--epsilon1', type=float, default=.25)
    th.add_argument('--delta-prob', dest='delta_prob', type=float, default=.1)
    th.add_argument('--trials', type=int, default=200)
    th.add_argument('--error-floor', dest='error_floor', action='store_true',
        help="also measure the least-squares error floor on synthetic data")
    th.add_argument('--floor-k', dest='floor_k', type=int, default=8)
    th.add_argument('--floor-seeds', dest='floor_seeds', type=int, default=10)
    th.add_argument('--floor-s', dest='floor_s', default='32,64,128,256,512,1024')

    gen = subs.add_parser('gen-synth', allow_abbrev=False, help="write a synthetic LIBSVM dataset")
    _add_common_flags(gen)
    gen.add_argument('--n', type=int, required=True)
    gen.add_argument('--d', type=int, required=True)
    gen.add_argument('--task', choices=TASKS, default='logistic')
    gen.add_argument('--seed', type=int, default=0)
    gen.add_argument('--margin', type=float, default=0.0,
        help="redraw points closer than this to the separating hyperplane")
    gen.add_argument('--noise', type=float, default=None)
    gen.add_argument('--out', required=True)
    return parser

def resolve_config(args):
    '''
    Config-file values overridden by the flags that were given.
    '''
    values = load_config(args.config) if args.config else {}
    for name in FIELDS:
        value = getattr(args, name, None)
        if value is not None:
            values[name] = value
    return ExperimentConfig(**values)

def _output_path(cfg, name):
    try:
        if not os.path.isdir(cfg.output_dir):
            os.makedirs(cfg.output_dir)
    except OSError as err:
        raise ConfigError("Cannot create output directory %r: %s"%(cfg.output_dir, err))
    return os.path.join(cfg.output_dir, name)

def cmd_run(args):
    cfg = resolve_config(args)
    experiment = build(cfg)
    path = _output_path(cfg, output_name(cfg))
    metrics = run_experiment(cfg, path, experiment)
    last = metrics.final
    if last is not None:
        print("%s: %d rounds, train loss %.6g, grad norm %.3g -> %s"%(
            cfg.algo, last.round, last.train_loss, last.grad_norm, path))
    for round, description in metrics.events:
        log.info("round %d: %s", round, description)
    return EXIT_OK

def cmd_compare(args):
    cfg = resolve_config(args)
    experiment = build(cfg)
    target, results = compare(cfg, experiment=experiment)
    print("target train loss %.6g"%(target,))
    print("%-12s %8s %8s %10s"%('algo', 'rounds', 'ratio', 'train acc'))
    for item in results:
        print("%-12s %8s %8s %10s"%(item.algo,
            '—' if item.rounds is None else item.rounds,
            '—' if item.ratio is None else '%.3f'%item.ratio,
            '' if item.train_accuracy is None else '%.4f'%item.train_accuracy))
    meta = run_meta(cfg.replace(algo=results[0].algo), experiment)
    meta.pop('algo')
    meta['target_loss'] = target
    path = _output_path(cfg, 'compare_%s_%d.csv'%(cfg.dataset_name, cfg.seed))
    write_combined_csv(path, [(item.algo, item.metrics) for item in results], meta)
    print("-> %s"%(path,))
    return EXIT_OK

def _write_rows(path, rows):
    with open(path, 'w') as out:
        out.write('check,s,trial,value\n')
        for check, s, trial, value in rows:
            out.write('%s,%d,%d,%.17g\n'%(check, s, trial, value))

def cmd_theory(args):
    if args.trials < 1:
        raise ConfigError("--trials must be at least 1, you provided %d"%(args.trials,))
    cfg = resolve_config(args)
    experiment = build(cfg)
    report = theory.theory_report(experiment.model, experiment.partition, args.epsilon,
        args.epsilon1, args.delta_prob, args.trials, cfg.seed, cfg.beta, args.progress)
    print("Gamma and the bounds are measured at w = 0")
    for line in report.lines():
        print(line)
    path = _output_path(cfg, 'theory_%s_%d.csv'%(cfg.dataset_name, cfg.seed))
    _write_rows(path, report.rows)
    if args.error_floor:
        try:
            s_values = [int(s) for s in args.floor_s.split(',')]
        except ValueError:
            raise ConfigError("--floor-s must be a comma-separated list of integers")
        s_values, gaps, params, loss_slope, param_slope, rho = theory.summarize_error_floor(
            args.floor_k, s_values, range(args.floor_seeds))
        for s, gap, pgap in zip(s_values, gaps, params):
            print("error floor s=%d: loss gap %.6g, parameter gap %.6g"%(s, gap, pgap))
        print("log-log slope: loss gap %.3f, parameter gap %.3f, spearman %.3f"%(
            loss_slope, param_slope, rho))
    print("-> %s"%(path,))
    return EXIT_OK

def cmd_gen_synth(args):
    ds, w_true = make_synthetic(args.n, args.d, args.task, args.seed, args.noise, args.margin)
    with open(args.out, 'wb') as out:
        write_libsvm(ds, out)
    print("n=%d d=%d task=%s seed=%d margin=%s noise=%s |w_true|=%.6g -> %s"%(
        args.n, args.d, args.task, args.seed, args.margin,
        '' if args.noise is None else args.noise, float(np.linalg.norm(w_true)), args.out))
    return EXIT_OK

COMMANDS = {
    'run': cmd_run,
    'compare': cmd_compare,
    'theory': cmd_theory,
    'gen-synth': cmd_gen_synth,
}

def main(argv=None):
    '''
    Entry point; returns the process exit code.
    '''
    args = make_parser().parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.DEBUG if args.verbose > 1 else logging.INFO,
            format='%(asctime)s %(name)s %(levelname)s %(message)s')
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, DatasetError) as err:
        print("error: %s"%(err,), file=sys.stderr)
        return EXIT_CONFIG
    except LocalNewtonError as err:
        print("error: %s"%(err,), file=sys.stderr)
        return EXIT_RUNTIME
    except (IOError, OSError) as err:
        print("error: %s"%(err,), file=sys.stderr)
        return EXIT_CONFIG

__all__ = [k for k, v in globals().items() if getattr(v, '__doc__', None) and k not in _skip and not k.startswith('_')]
__all__.sort()
