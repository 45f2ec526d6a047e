'''
LocalNewton: every worker takes L damped Newton steps on its own shard, then
the master averages the K local models and broadcasts the average.

Round r starts from the average taken after (r-1) blocks of L local steps;
the first round starts from ``w0`` on every worker, which costs nothing since
all workers already agree. Each average is one communication round, so a run
of T local iterations costs ceil(T / L) rounds.
'''

from collections import namedtuple
import math
import warnings

import numpy as np

from .exceptions import ConfigError, LocalNewtonError, LossIncreaseWarning, WorkerError
from .fabric import Cluster
from .metrics import Evaluator, RunMetrics
from .newton import CgConfig, LineSearchConfig, armijo_backtrack, cg_solve, negligible_decrease
from . import util

_skip = None
_skip = set(globals()) - set(['__doc__'])

PHASE = 'localnewton'

class WorkerState(namedtuple('WorkerState', 'worker_id shard w last_grad_norm last_alpha cg_iters')):
    '''
    A worker's shard indices and local iterate, plus what its last step saw:
    the local gradient norm, the accepted step size and the CG iterations.
    '''
    __slots__ = ()

    @classmethod
    def start(cls, worker_id, shard, w0):
        return cls(worker_id, shard, np.array(w0, dtype=float), None, None, 0)

class SyncSchedule(namedtuple('SyncSchedule', 'L T')):
    '''
    Average every ``L`` local iterations over a horizon of ``T`` local
    iterations. The sync set is {0, L, 2L, ...} within [0, T].
    '''
    __slots__ = ()
    def __new__(cls, L, T):
        L = int(L)
        T = int(T)
        if L < 1:
            raise ConfigError("L must be at least 1, you provided %r"%(L,))
        if T < 0:
            raise ConfigError("The horizon T cannot be negative, you provided %r"%(T,))
        return super(SyncSchedule, cls).__new__(cls, L, T)

    @classmethod
    def for_rounds(cls, L, rounds):
        return cls(L, L * int(rounds))

    @property
    def sync_set(self):
        return tuple(range(0, self.T + 1, self.L))

    @property
    def rounds(self):
        return int(math.ceil(self.T / float(self.L)))

    def blocks(self):
        'Local steps taken in each round; only the last can be short'
        full, rest = divmod(self.T, self.L)
        return [self.L] * full + ([rest] if rest else [])

def local_newton_step(model, state, ls=None, cg=None, local_model=None):
    '''
    One Newton step on the worker's shard objective f^k:

        g = grad f^k(w), p = H^k(w)^-1 g by CG, alpha by Armijo on f^k,
        w' = w - alpha p

    A zero local gradient, or one whose predicted decrease is lost in the
    rounding of f^k, leaves ``w`` untouched. ``local_model`` (``model``
    restricted to the shard) can be passed to skip the row gather.
    '''
    ls = ls or LineSearchConfig()
    cg = cg or CgConfig()
    local = local_model if local_model is not None else model.restrict(state.shard)
    w = state.w
    try:
        g = local.gradient(w)
        gnorm = float(np.linalg.norm(g))
        if gnorm == 0:
            return state._replace(last_grad_norm=0.0, last_alpha=0.0, cg_iters=0)
        p, _, iters = cg_solve(local.hessian_operator(w), g, cg)
        f0 = local.value(w)
        if negligible_decrease(p.dot(g), f0):
            return state._replace(last_grad_norm=gnorm, last_alpha=0.0, cg_iters=iters)
        alpha = armijo_backtrack(local.value, w, p, g, ls, f0)
    except LocalNewtonError as err:
        if isinstance(err, WorkerError):
            raise
        raise WorkerError(state.worker_id, err)
    w_new = w - alpha * p
    if not np.all(np.isfinite(w_new)):
        raise WorkerError(state.worker_id, "local iterate became non-finite")
    return state._replace(w=w_new, last_grad_norm=gnorm, last_alpha=alpha, cg_iters=iters)

def average_models(states):
    '''
    Arithmetic mean of the workers' iterates, reduced pairwise in ascending
    worker id.
    '''
    states = sorted(states, key=lambda s: s.worker_id)
    if not states:
        raise ValueError("Cannot average zero models")
    shape = states[0].w.shape
    for s in states:
        if s.w.shape != shape:
            raise ValueError("Worker %d holds a model of shape %r, expected %r"%(
                s.worker_id, s.w.shape, shape))
    return util.ordered_mean([s.w for s in states])

def init_workers(partition, w0):
    return [WorkerState.start(k, shard, w0) for k, shard in enumerate(partition.shards)]

def localnewton_round(cluster, states, w_bar, steps, ls, cg):
    '''
    Broadcasts ``w_bar``, runs ``steps`` local Newton steps on every worker,
    averages and charges one round. Returns ``(new_w_bar, states)``; all
    returned states hold the new average.
    '''
    def work(k, local, state):
        state = state._replace(w=w_bar.copy())
        for _ in range(steps):
            state = local_newton_step(cluster.model, state, ls, cg, local)
        return state
    states = cluster.map(work, states)
    w_bar = average_models(states)
    cluster.charge()
    return w_bar, [s._replace(w=w_bar.copy()) for s in states]

def _check_increase(prev, now, round):
    if prev is not None and now > prev:
        warnings.warn("round %d: training loss went up by %.3g"%(round, now - prev),
            LossIncreaseWarning, stacklevel=3)

def run_localnewton(model, partition, sched, ls=None, cg=None, w0=None, test=None,
        threads=None, metrics=None, cluster=None):
    '''
    Runs LocalNewton for ``sched.T`` local iterations with averaging every
    ``sched.L``, recording one metrics row per sync. Returns the RunMetrics;
    the last average is ``metrics.w_final``.
    '''
    ls = ls or LineSearchConfig()
    cg = cg or CgConfig()
    w0 = np.zeros(model.d) if w0 is None else np.array(w0, dtype=float)
    if not np.all(np.isfinite(w0)):
        raise ConfigError("The initial iterate must be finite")
    metrics = metrics if metrics is not None else RunMetrics({'algo': PHASE})
    own = cluster is None
    cluster = cluster or Cluster(model, partition, threads)
    try:
        evaluate = Evaluator(cluster.global_model, None, test)
        states = init_workers(partition, w0)
        w_bar = w0
        done = 0
        prev = None
        for steps in sched.blocks():
            w_bar, states = localnewton_round(cluster, states, w_bar, steps, ls, cg)
            done += steps
            row = metrics.record(evaluate, w_bar, cluster.rounds, done, sched.L, PHASE)
            _check_increase(prev, row.train_loss, row.round)
            prev = row.train_loss
    finally:
        if own:
            cluster.close()
    metrics.w_final = w_bar
    return metrics

__all__ = [k for k, v in globals().items() if getattr(v, '__doc__', None) and k not in _skip and not k.startswith('_')]
__all__.sort()
