'''
Experiment configuration and execution.

An ``ExperimentConfig`` names the algorithm, the dataset files and every
solver knob. It can be built from keyword arguments, from a flat
``key=value`` file, or from command-line flags (see ``localnewton.cli``)::

    cfg = ExperimentConfig(algo='adaptive', train='w8a.gz', k=100, l0=3)
    metrics = run_experiment(cfg, 'out/adaptive_w8a_0.csv')

Config files hold one ``key=value`` per line; blank lines and lines starting
with ``#`` are ignored, and unknown keys are errors::

    algo=giant
    train=data/w8a
    test=data/w8a.t
    max_rounds=90

Defaults follow the published protocol: K = 100 workers and gamma = 1/n.
``threads`` and ``output_dir`` only change how a run executes, never what it
computes, so they are left out of the config hash and the CSV meta lines.
'''

from collections import namedtuple, OrderedDict
import io
import logging
import os

import numpy as np

from .adaptive import run_adaptive
from .baselines import SgdConfig, run_bfgs, run_giant, run_local_sgd
from .data import detect_profile, expand_pairwise, load_libsvm, partition_uniform
from .exceptions import ConfigError, LocalNewtonError, RunError
from .fabric import Cluster
from .local import SyncSchedule, run_localnewton
from .metrics import CsvSink, RunMetrics, accuracy
from .newton import CgConfig, LineSearchConfig
from .objective import ObjectiveModel, estimate_bounds
from . import util

_skip = None
_skip = set(globals()) - set(['__doc__'])

log = logging.getLogger(__name__)

ALGOS = ('localnewton', 'adaptive', 'giant', 'local_sgd', 'bfgs')
OBJECTIVES = {'logistic': 'logistic_l2', 'least_squares': 'least_squares'}

def _bool(value):
    if isinstance(value, bool):
        return value
    value = str(value).strip().lower()
    if value in ('1', 'true', 'yes', 'on'):
        return True
    if value in ('0', 'false', 'no', 'off'):
        return False
    raise ValueError(value)

def _names(value):
    if isinstance(value, (list, tuple)):
        return tuple(value)
    return tuple(v.strip() for v in str(value).split(',') if v.strip())

# name -> (parser, default)
FIELDS = OrderedDict([
    ('algo', (str, 'localnewton')),
    ('train', (str, None)),
    ('test', (str, None)),
    ('task', (str, 'logistic')),
    ('d', (int, None)),
    ('expand', (_bool, False)),
    ('k', (int, 100)),
    ('l', (int, 1)),
    ('l0', (int, 3)),
    ('delta', (float, None)),
    ('gamma', (float, None)),
    ('seed', (int, 0)),
    ('max_rounds', (int, 30)),
    ('beta', (float, .1)),
    ('alpha_init', (float, 1.0)),
    ('shrink', (float, .5)),
    ('max_backtracks', (int, 50)),
    ('alpha_cap', (_bool, False)),
    ('cg_tol', (float, 1e-8)),
    ('cg_max_iters', (int, None)),
    ('sgd_step', (float, None)),
    ('sgd_batch', (int, 1)),
    ('sgd_epochs', (int, 1)),
    ('bfgs_step', (float, None)),
    ('algos', (_names, None)),
    ('target_loss', (float, None)),
    ('threads', (int, None)),
    ('output_dir', (str, '.')),
])
EXECUTION_FIELDS = ('threads', 'output_dir')

class ExperimentConfig(namedtuple('ExperimentConfig', list(FIELDS))):
    '''
    Every knob of one run. Values given as strings (from files or flags) are
    parsed to the field's type; an empty string means "unset".
    '''
    __slots__ = ()
    def __new__(cls, **kwargs):
        unknown = set(kwargs) - set(FIELDS)
        if unknown:
            raise ConfigError("Unknown config keys: %s"%(', '.join(sorted(unknown)),))
        values = []
        for name, (parse, default) in FIELDS.items():
            value = kwargs.get(name, default)
            if isinstance(value, str) and parse is not str:
                value = value.strip() or None
            if value is not None:
                try:
                    value = parse(value)
                except (TypeError, ValueError):
                    raise ConfigError("Invalid value %r for %s"%(kwargs.get(name), name))
            values.append(value)
        self = super(ExperimentConfig, cls).__new__(cls, *values)
        self._validate()
        return self

    def _validate(self):
        if self.algo not in ALGOS:
            raise ConfigError("Unknown algorithm %r, expected one of %s"%(self.algo, ', '.join(ALGOS)))
        if self.task not in OBJECTIVES:
            raise ConfigError("Unknown task %r, expected one of %s"%(self.task, ', '.join(OBJECTIVES)))
        if self.k < 1:
            raise ConfigError("K must be at least 1, you provided %r"%(self.k,))
        if self.l < 1 or self.l0 < 1:
            raise ConfigError("L and L0 must be at least 1")
        if self.gamma is not None and not self.gamma >= 0:
            raise ConfigError("gamma must be >= 0, you provided %r"%(self.gamma,))
        if self.seed < 0:
            raise ConfigError("The seed must be >= 0, you provided %r"%(self.seed,))
        if self.max_rounds < 1:
            raise ConfigError("max_rounds must be at least 1")
        for name in self.algos or ():
            if name not in ALGOS:
                raise ConfigError("Unknown algorithm %r in algos"%(name,))

    def replace(self, **kwargs):
        data = self._asdict()
        data.update(kwargs)
        return ExperimentConfig(**data)

    def experiment_items(self):
        return [(k, v) for k, v in self._asdict().items() if k not in EXECUTION_FIELDS]

    @property
    def config_hash(self):
        return util.config_hash(self.experiment_items())

    @property
    def dataset_name(self):
        return os.path.basename(self.train).split('.')[0] if self.train else 'none'

    def line_search(self):
        return LineSearchConfig(self.beta, self.alpha_init, self.shrink, self.max_backtracks)

    def cg(self):
        return CgConfig(self.cg_tol, self.cg_max_iters)

def parse_config_text(text):
    '''
    Parses flat ``key=value`` text into a dict of strings. Keys may use dashes
    in place of underscores.
    '''
    items = OrderedDict()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        key, sep, value = line.partition('=')
        if not sep:
            raise ConfigError("line %d: expected key=value, got %r"%(lineno, line))
        key = key.strip().replace('-', '_')
        if key not in FIELDS:
            raise ConfigError("line %d: unknown config key %r"%(lineno, key))
        items[key] = value.strip()
    return items

def load_config(path):
    try:
        with io.open(path, 'r', encoding='utf-8') as inp:
            return parse_config_text(inp.read())
    except (IOError, OSError) as err:
        raise ConfigError("Cannot read config file %r: %s"%(path, err))

class Experiment(namedtuple('Experiment', 'model partition test profile')):
    '''
    A loaded problem: the objective over the training set, its partition,
    the optional test set and the matching dataset profile (or None).
    '''
    __slots__ = ()

def build(cfg):
    '''
    Loads the datasets named by ``cfg``, applies feature expansion, and
    partitions the training set. gamma defaults to 1/n. Datasets whose
    profile calls for pairwise expansion (covtype) are expanded even when
    ``cfg.expand`` is off, unless the file already has the expanded width.
    '''
    if not cfg.train:
        raise ConfigError("A training dataset is required (train=...)")
    classification = cfg.task == 'logistic'
    train = load_libsvm(cfg.train, cfg.d, classification)
    test = load_libsvm(cfg.test, train.d, classification) if cfg.test else None
    profile = detect_profile(cfg.train)
    expand = cfg.expand
    if profile is not None:
        if profile.expand and not expand and train.d < profile.d:
            log.info("%s: expanding %d features pairwise", profile.name, train.d)
            expand = True
        if train.n != profile.n or (test is not None and test.n != profile.test_n):
            log.info("%s: loaded %d train and %s test rows, the published split is %d and %d",
                profile.name, train.n, test.n if test is not None else "no", profile.n, profile.test_n)
    if expand:
        train = expand_pairwise(train)
        test = expand_pairwise(test) if test is not None else None
    gamma = 1.0 / train.n if cfg.gamma is None else cfg.gamma
    model = ObjectiveModel(train, OBJECTIVES[cfg.task], gamma)
    partition = partition_uniform(train.n, cfg.k, cfg.seed)
    return Experiment(model, partition, test, profile)

def run_meta(cfg, experiment):
    meta = OrderedDict([
        ('algo', cfg.algo),
        ('dataset', cfg.dataset_name),
        ('K', cfg.k),
        ('seed', cfg.seed),
        ('config_hash', cfg.config_hash),
        ('n', experiment.model.dataset.n),
        ('d', experiment.model.d),
        ('gamma', experiment.model.gamma),
    ])
    for k, v in cfg.experiment_items():
        meta.setdefault(k, v)
    return meta

def _sgd_config(cfg, experiment):
    step = cfg.sgd_step
    if step is None and experiment.profile is not None:
        step = experiment.profile.sgd_step(experiment.partition.shard_size)
    if step is None:
        raise ConfigError("local_sgd needs sgd_step for datasets without a known profile")
    return SgdConfig(step, cfg.sgd_batch, cfg.sgd_epochs)

def _bfgs_step(cfg, experiment):
    if cfg.bfgs_step is not None:
        return cfg.bfgs_step
    if experiment.profile is not None:
        return experiment.profile.bfgs_step
    return 1.0

def execute(cfg, experiment, metrics):
    '''
    Runs ``cfg.algo`` on an already built Experiment, appending to
    ``metrics``. Solver failures are re-raised as RunError with the last
    completed round.
    '''
    model, partition, test = experiment.model, experiment.partition, experiment.test
    ls = cfg.line_search()
    cg = cfg.cg()
    w0 = np.zeros(model.d)
    with Cluster(model, partition, cfg.threads) as cluster:
        try:
            if cfg.alpha_cap:
                ls = ls.with_cap(estimate_bounds(cluster.global_model, [w0], seed=cfg.seed))
            if cfg.algo == 'localnewton':
                sched = SyncSchedule.for_rounds(cfg.l, cfg.max_rounds)
                run_localnewton(model, partition, sched, ls, cg, w0, test,
                    metrics=metrics, cluster=cluster)
            elif cfg.algo == 'adaptive':
                run_adaptive(model, partition, cfg.l0, cfg.delta, ls, cg, w0, cfg.max_rounds,
                    test, metrics=metrics, cluster=cluster)
            elif cfg.algo == 'giant':
                run_giant(model, partition, ls, cg, w0, cfg.max_rounds, test,
                    metrics=metrics, cluster=cluster)
            elif cfg.algo == 'local_sgd':
                run_local_sgd(model, partition, _sgd_config(cfg, experiment), w0, cfg.max_rounds,
                    cfg.seed, test, metrics=metrics, cluster=cluster)
            else:
                run_bfgs(model, partition, ls, _bfgs_step(cfg, experiment), w0, cfg.max_rounds,
                    test, metrics=metrics, cluster=cluster)
        except ConfigError:
            raise
        except LocalNewtonError as err:
            raise RunError(metrics.rows[-1].round if metrics.rows else 0, err)
    return metrics

def output_name(cfg):
    return '%s_%s_%d.csv'%(cfg.algo, cfg.dataset_name, cfg.seed)

def run_experiment(cfg, out=None, experiment=None):
    '''
    Builds (unless ``experiment`` is given) and runs one experiment. With
    ``out`` (a path or a text file) rows are streamed there as CSV. Returns
    the RunMetrics; the same config and seed always give the same bits.
    '''
    experiment = experiment or build(cfg)
    meta = run_meta(cfg, experiment)
    sink = CsvSink(out, meta) if out is not None else None
    metrics = RunMetrics(meta, sink)
    log.info("running %s on %s (K=%d, seed=%d)", cfg.algo, cfg.dataset_name, cfg.k, cfg.seed)
    try:
        execute(cfg, experiment, metrics)
    finally:
        if sink is not None:
            sink.close()
    return metrics

class Comparison(namedtuple('Comparison', 'algo rounds ratio train_accuracy metrics')):
    '''
    Rounds-to-target of one algorithm (None if never reached) and its ratio to
    the slowest algorithm that did reach the target.
    '''
    __slots__ = ()

def compare(cfg, algos=None, target_loss=None, experiment=None):
    '''
    Runs every algorithm in ``algos`` on the same partition and seed and
    reports rounds to reach ``target_loss`` (default: the dataset profile's
    published target).
    '''
    algos = algos or cfg.algos
    if not algos or len(algos) < 2:
        raise ConfigError("compare needs at least two algorithms")
    experiment = experiment or build(cfg)
    if target_loss is None:
        target_loss = cfg.target_loss
    if target_loss is None and experiment.profile is not None:
        target_loss = experiment.profile.target_loss
    if target_loss is None:
        raise ConfigError("compare needs target_loss for datasets without a published target")
    runs = []
    for algo in algos:
        metrics = run_experiment(cfg.replace(algo=algo), experiment=experiment)
        runs.append((algo, metrics.rounds_to(target_loss), metrics))
    reached = [r for _, r, _ in runs if r is not None]
    worst = max(reached) if reached else None
    train = experiment.model.dataset
    out = []
    for algo, rounds, metrics in runs:
        acc = accuracy(metrics.w_final, train) if train.classification else None
        ratio = rounds / float(worst) if rounds is not None else None
        out.append(Comparison(algo, rounds, ratio, acc, metrics))
    return target_loss, out

__all__ = [k for k, v in globals().items() if getattr(v, '__doc__', None) and k not in _skip and not k.startswith('_')]
__all__.sort()
