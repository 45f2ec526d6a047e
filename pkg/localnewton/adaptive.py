'''
Adaptive LocalNewton: the master watches f(w_bar) after every sync. When the
loss went down by less than ``delta`` since the previous sync it lowers L by
one; when that happens at L = 1 it switches to GIANT for the rest of the
budget, starting from the current average.
'''

from collections import namedtuple
import logging

import numpy as np

from .baselines import run_giant
from .exceptions import ConfigError
from .fabric import Cluster
from .local import PHASE as LOCAL, init_workers, localnewton_round
from .metrics import Evaluator, RunMetrics
from .newton import CgConfig, LineSearchConfig

_skip = None
_skip = set(globals()) - set(['__doc__'])

log = logging.getLogger(__name__)

GIANT = 'giant'
DELTA_REL = 1e-4

class AdaptiveState(namedtuple('AdaptiveState', 'L_current f_prev delta phase')):
    '''
    Controller state. L only ever goes down, and once ``phase`` is 'giant' it
    stays there.
    '''
    __slots__ = ()

def adapt(state, f_now):
    '''
    Returns the controller state after observing the loss ``f_now`` at a
    sync: insufficient decrease (f_prev - f_now < delta) lowers L, or switches
    to GIANT at L = 1. ``f_prev`` always becomes ``f_now``.
    '''
    L, phase = state.L_current, state.phase
    if phase != GIANT and state.f_prev - f_now < state.delta:
        if L == 1:
            phase = GIANT
        else:
            L -= 1
    return AdaptiveState(L, f_now, state.delta, phase)

def run_adaptive(model, partition, L0=3, delta=None, ls=None, cg=None, w0=None, budget=30,
        test=None, threads=None, metrics=None, cluster=None):
    '''
    Runs Adaptive LocalNewton for ``budget`` communication rounds. ``delta``
    defaults to 1e-4 * f(w0). Every L change and the GIANT switch are
    recorded in ``metrics.events``.
    '''
    if int(L0) < 1:
        raise ConfigError("L0 must be at least 1, you provided %r"%(L0,))
    ls = ls or LineSearchConfig()
    cg = cg or CgConfig()
    w_bar = np.zeros(model.d) if w0 is None else np.array(w0, dtype=float)
    metrics = metrics if metrics is not None else RunMetrics({'algo': 'adaptive'})
    own = cluster is None
    cluster = cluster or Cluster(model, partition, threads)
    try:
        evaluate = Evaluator(cluster.global_model, None, test)
        f0 = cluster.global_model.value(w_bar)
        if delta is None:
            delta = DELTA_REL * f0
        if not delta > 0:
            raise ConfigError("delta must be positive, got %r"%(delta,))
        metrics.meta.setdefault('delta', delta)
        state = AdaptiveState(int(L0), f0, float(delta), LOCAL)
        states = init_workers(partition, w_bar)
        limit = cluster.rounds + budget
        iters = 0
        while cluster.rounds < limit:
            if state.phase == GIANT:
                run_giant(model, partition, ls, cg, w_bar, limit - cluster.rounds, test,
                    metrics=metrics, cluster=cluster, L=1, start_iters=iters)
                w_bar = metrics.w_final
                break
            w_bar, states = localnewton_round(cluster, states, w_bar, state.L_current, ls, cg)
            iters += state.L_current
            row = metrics.record(evaluate, w_bar, cluster.rounds, iters, state.L_current, LOCAL)
            log.debug("round %d: loss %.10g at L=%d", row.round, row.train_loss, state.L_current)
            new = adapt(state, row.train_loss)
            if new.phase != state.phase:
                metrics.event(row.round, 'switch to giant')
                log.info("round %d: switching to GIANT", row.round)
            elif new.L_current != state.L_current:
                metrics.event(row.round, 'L %d -> %d'%(state.L_current, new.L_current))
                log.info("round %d: L %d -> %d", row.round, state.L_current, new.L_current)
            state = new
    finally:
        if own:
            cluster.close()
    metrics.w_final = w_bar
    metrics.adaptive_state = state
    return metrics

__all__ = [k for k, v in globals().items() if getattr(v, '__doc__', None) and k not in _skip and not k.startswith('_')]
__all__.sort()
