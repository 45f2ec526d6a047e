'''
Baselines run over the same Cluster and metrics as LocalNewton, so rounds
can be compared one for one.

Round accounting:

    * GIANT - 3 rounds per iteration (gradient, direction, line search)
    * Local SGD - 1 round per averaging (one local epoch per round by default)
    * BFGS - 1 round per iteration (gradient aggregation)
'''

from collections import namedtuple
import warnings

import numpy as np

from .exceptions import (ConfigError, DescentDirectionError, DivergenceError,
    LineSearchWarning)
from .fabric import Cluster
from .local import average_models, init_workers
from .metrics import Evaluator, RunMetrics
from .newton import CgConfig, LineSearchConfig, backtrack, cg_solve, negligible_decrease
from . import util

_skip = None
_skip = set(globals()) - set(['__doc__'])

GIANT_ROUNDS = 3
GIANT_CANDIDATES = tuple(2.0 ** -i for i in range(10))

def giant_iteration(model, partition, w, ls=None, cg=None, cluster=None):
    '''
    One GIANT iteration from ``w``:

        1. the master averages the shard gradients into g
        2. every worker solves H^k p^k = g by CG; the master averages the p^k
        3. the master broadcasts the step grid {1, 1/2, ..., 2^-9}, workers
           return f^k(w - alpha p) for each, and the master keeps the largest
           alpha satisfying Armijo on the global objective

    Returns ``(w_new, 3)``. When no candidate passes, the smallest one is used
    and a LineSearchWarning is issued.
    '''
    ls = ls or LineSearchConfig()
    cg = cg or CgConfig()
    w = np.asarray(w, dtype=float)
    own = cluster is None
    cluster = cluster or Cluster(model, partition)
    try:
        K = cluster.K
        first = cluster.map(lambda k, local, _: (local.gradient(w), local.value(w)), [None] * K)
        g = cluster.mean([gk for gk, _ in first])
        f_w = float(cluster.mean([np.array(fk) for _, fk in first]))
        if not np.any(g):
            cluster.charge(GIANT_ROUNDS)
            return w.copy(), GIANT_ROUNDS

        dirs = cluster.map(lambda k, local, _: cg_solve(local.hessian_operator(w), g, cg)[0], [None] * K)
        p = cluster.mean(dirs)
        slope = float(p.dot(g))
        if negligible_decrease(slope, f_w):
            cluster.charge(GIANT_ROUNDS)
            return w.copy(), GIANT_ROUNDS
        if not slope > 0:
            raise DescentDirectionError("GIANT direction is not a descent direction (p.g = %r)"%(slope,))

        trials = cluster.map(lambda k, local, _: np.array(
            [local.value(w - a * p) for a in GIANT_CANDIDATES]), [None] * K)
        f_trials = cluster.mean(trials)
        cluster.charge(GIANT_ROUNDS)
    finally:
        if own:
            cluster.close()

    for alpha, f_new in zip(GIANT_CANDIDATES, f_trials):
        if f_new <= f_w - alpha * ls.beta * slope:
            break
    else:
        alpha = GIANT_CANDIDATES[-1]
        warnings.warn("No GIANT step candidate passed the Armijo test, using %r"%(alpha,),
            LineSearchWarning, stacklevel=2)
    return w - alpha * p, GIANT_ROUNDS

def run_giant(model, partition, ls=None, cg=None, w0=None, max_rounds=30, test=None,
        threads=None, metrics=None, cluster=None, L=1, start_iters=0):
    '''
    Runs GIANT iterations while another full iteration fits in
    ``max_rounds`` rounds (counted from the cluster's current round), one
    metrics row per iteration. ``L`` and ``start_iters`` only label the rows.
    '''
    w = np.zeros(model.d) if w0 is None else np.array(w0, dtype=float)
    metrics = metrics if metrics is not None else RunMetrics({'algo': 'giant'})
    own = cluster is None
    cluster = cluster or Cluster(model, partition, threads)
    try:
        evaluate = Evaluator(cluster.global_model, None, test)
        limit = cluster.rounds + max_rounds
        iters = start_iters
        while cluster.rounds + GIANT_ROUNDS <= limit:
            w, _ = giant_iteration(model, partition, w, ls, cg, cluster)
            iters += 1
            metrics.record(evaluate, w, cluster.rounds, iters, L, 'giant')
    finally:
        if own:
            cluster.close()
    metrics.w_final = w
    return metrics

class SgdConfig(namedtuple('SgdConfig', 'step_size batch_size epochs_per_round')):
    '''
    Fixed-step local SGD: ``epochs_per_round`` passes over the shard in
    mini-batches of ``batch_size`` between averagings.
    '''
    __slots__ = ()
    def __new__(cls, step_size, batch_size=1, epochs_per_round=1):
        if step_size is None or not (np.isfinite(step_size) and step_size > 0):
            raise ConfigError("The SGD step size must be finite and positive, you provided %r"%(step_size,))
        if int(batch_size) < 1 or int(epochs_per_round) < 1:
            raise ConfigError("SGD batch size and epochs per round must be at least 1")
        return super(SgdConfig, cls).__new__(cls, float(step_size), int(batch_size), int(epochs_per_round))

def local_sgd_round(model, partition, states, cfg, seed=0, round_index=0, cluster=None):
    '''
    Every worker runs ``cfg.epochs_per_round`` epochs of mini-batch SGD over a
    seeded permutation of its shard, then the master averages (one round).
    Returns the new states, all holding the average.
    '''
    own = cluster is None
    cluster = cluster or Cluster(model, partition)
    def work(k, local, state):
        w = state.w.copy()
        s = local.dataset.n
        for epoch in range(cfg.epochs_per_round):
            order = util.rng_stream(seed, 'sgd', round_index, k, epoch).permutation(s)
            for start in range(0, s, cfg.batch_size):
                w -= cfg.step_size * local.gradient(w, order[start:start + cfg.batch_size])
            if not np.all(np.isfinite(w)):
                raise DivergenceError("SGD diverged on worker %d in epoch %d"%(k, epoch))
        return state._replace(w=w)
    try:
        states = cluster.map(work, states)
        w_bar = average_models(states)
        cluster.charge()
    finally:
        if own:
            cluster.close()
    return [s._replace(w=w_bar.copy()) for s in states]

def run_local_sgd(model, partition, cfg, w0=None, max_rounds=30, seed=0, test=None,
        threads=None, metrics=None, cluster=None):
    w0 = np.zeros(model.d) if w0 is None else np.array(w0, dtype=float)
    metrics = metrics if metrics is not None else RunMetrics({'algo': 'local_sgd'})
    own = cluster is None
    cluster = cluster or Cluster(model, partition, threads)
    try:
        evaluate = Evaluator(cluster.global_model, None, test)
        states = init_workers(partition, w0)
        for r in range(max_rounds):
            states = local_sgd_round(model, partition, states, cfg, seed, r, cluster)
            metrics.record(evaluate, states[0].w, cluster.rounds, (r + 1) * cfg.epochs_per_round,
                1, 'local_sgd')
    finally:
        if own:
            cluster.close()
    metrics.w_final = states[0].w
    return metrics

CURVATURE_RESET = 1e-12

class BfgsState(namedtuple('BfgsState', 'inverse_hessian_approx prev_w prev_grad')):
    '''
    Inverse-Hessian approximation plus the iterate and gradient the next
    update starts from.
    '''
    __slots__ = ()

    @classmethod
    def start(cls, model, w0, subset=None):
        w0 = np.array(w0, dtype=float)
        return cls(np.eye(len(w0)), w0, model.gradient(w0, subset))

def exact_step_rule(model, subset=None):
    '''
    Exact line search for quadratic objectives: alpha = p.g / p.H p.
    '''
    def rule(w, p, g):
        return float(p.dot(g) / p.dot(model.hessian_vec(w, p, subset)))
    return rule

def bfgs_iteration(model, full_index_set, state, ls=None, initial_step=None, step_rule=None):
    '''
    One full-gradient BFGS iteration: p = H g, alpha by Armijo backtracking
    starting from ``initial_step`` (the tuned step, may exceed 1) unless a
    ``step_rule(w, p, g)`` is given, then the standard inverse update. The
    approximation resets to the identity when s.y <= 1e-12 ||s|| ||y||.
    '''
    ls = ls or LineSearchConfig()
    subset = full_index_set
    w, g, h = state.prev_w, state.prev_grad, state.inverse_hessian_approx
    if not np.any(g):
        return state
    p = h.dot(g)
    if not p.dot(g) > 0:
        h = np.eye(len(w))
        p = g.copy()
    f0 = model.value(w, subset)
    if negligible_decrease(p.dot(g), f0):
        return state
    if step_rule is not None:
        alpha = step_rule(w, p, g)
    else:
        f = lambda v: model.value(v, subset)
        alpha = backtrack(f, w, p, g, ls.beta, initial_step or ls.alpha_init, ls.shrink,
            ls.max_backtracks, f0=f0)
    w_new = w - alpha * p
    if not np.all(np.isfinite(w_new)):
        raise DivergenceError("BFGS iterate became non-finite")
    g_new = model.gradient(w_new, subset)
    s = w_new - w
    y = g_new - g
    sy = float(s.dot(y))
    if sy <= CURVATURE_RESET * np.linalg.norm(s) * np.linalg.norm(y):
        h = np.eye(len(w))
    else:
        rho = 1.0 / sy
        left = np.eye(len(w)) - rho * np.outer(s, y)
        h = left.dot(h).dot(left.T) + rho * np.outer(s, s)
        h = .5 * (h + h.T)
    return BfgsState(h, w_new, g_new)

def run_bfgs(model, partition, ls=None, initial_step=None, w0=None, max_rounds=30, test=None,
        threads=None, metrics=None, cluster=None):
    w0 = np.zeros(model.d) if w0 is None else np.array(w0, dtype=float)
    metrics = metrics if metrics is not None else RunMetrics({'algo': 'bfgs'})
    own = cluster is None
    cluster = cluster or Cluster(model, partition, threads)
    try:
        central = cluster.global_model
        evaluate = Evaluator(central, None, test)
        state = BfgsState.start(central, w0)
        for it in range(max_rounds):
            state = bfgs_iteration(central, None, state, ls, initial_step)
            cluster.charge()
            metrics.record(evaluate, state.prev_w, cluster.rounds, it + 1, 1, 'bfgs')
    finally:
        if own:
            cluster.close()
    metrics.w_final = state.prev_w
    return metrics

__all__ = [k for k, v in globals().items() if getattr(v, '__doc__', None) and k not in _skip and not k.startswith('_')]
__all__.sort()
