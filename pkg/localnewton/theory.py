'''
Empirical checks of the analysis behind LocalNewton.

    * ``required_sample_size`` / ``check_hessian_concentration`` - with enough
      samples per worker, local Hessians stay within [(1-eps) kappa, (1+eps) M]
    * ``check_gradient_deviation`` - ||g^S - g|| shrinks like 1/sqrt(s) and
      stays below ``eta_bound``
    * ``check_descent_lemma`` - with the capped step, every worker's local
      loss drops by at least psi ||g^k||^2
    * ``measure_error_floor`` - on unregularized least squares LocalNewton
      stalls at a gap that shrinks with the shard size

The bounds are probabilistic, so checks report rates and statistics; the
``exceeds_rate`` helper turns a failure count into a pass/fail decision with a
one-sided binomial test. Gamma is measured over the probe iterates actually
used, not over all of parameter space.
'''

from collections import namedtuple
import math

import numpy as np
from scipy import linalg, stats

from .data import Partition, make_synthetic, partition_uniform
from .exceptions import BoundsError, ConfigError, SingularSystemError, SolverError
from .fabric import Cluster
from .local import WorkerState, init_workers, local_newton_step, localnewton_round
from .newton import CgConfig, LineSearchConfig, alpha_star as _alpha_star
from .objective import ObjectiveModel, estimate_bounds
from . import util

_skip = None
_skip = set(globals()) - set(['__doc__'])

MAX_EIGEN_DIM = 500

def eta_bound(s, delta_prob, Gamma):
    '''
    Deviation scale (1 + sqrt(2 log(1/delta))) Gamma / sqrt(s).
    '''
    return (1 + math.sqrt(2 * math.log(1.0 / delta_prob))) * Gamma / math.sqrt(s)

class TheoryParams(namedtuple('TheoryParams', '''epsilon epsilon1 delta_prob s beta K
        kappa M B Gamma alpha_star psi eta rho1 rho2 C1 C2 C_local_a C_local_b G''')):
    '''
    Tolerances plus every constant derived from them. Build with
    ``TheoryParams.derive()``, which recomputes:

        psi = alpha* beta / (M (1 + eps))
        eta = eta_bound(s, delta, Gamma)
        C1 = (1 - eps) psi / 2 - eps1 / (kappa (1 - eps)),  C2 = psi (1 - eps) / 2
        rho_i = 1 - 2 kappa C_i
        C_local_a = psi - (M - kappa (1 - eps)^2) / (2 K kappa^2 (1 - eps)^2)
        C_local_b = psi (1 - eps)^3 / 2

    The two ``C_local`` values are both stated for the L-step result; both
    are kept and reported.
    '''
    __slots__ = ()

    @classmethod
    def derive(cls, bounds, epsilon, epsilon1, delta_prob, s, beta, K=1, alpha_star=None, G=None):
        if not 0 < epsilon <= .5:
            raise ConfigError("epsilon must be in (0, 1/2], you provided %r"%(epsilon,))
        if not 0 < epsilon1 < .5:
            raise ConfigError("epsilon1 must be in (0, 1/2), you provided %r"%(epsilon1,))
        if not 0 < delta_prob < 1:
            raise ConfigError("delta must be in (0, 1), you provided %r"%(delta_prob,))
        if int(s) < 1 or int(K) < 1:
            raise ConfigError("s and K must be at least 1")
        kappa, M = bounds.kappa, bounds.M
        if not kappa > 0:
            raise BoundsError("The derived constants need kappa > 0, got %r"%(kappa,))
        a = _alpha_star(bounds, beta) if alpha_star is None else alpha_star
        psi = a * beta / (M * (1 + epsilon))
        if not psi > 0:
            raise BoundsError("psi must be positive, got %r"%(psi,))
        eta = eta_bound(s, delta_prob, bounds.Gamma)
        C1 = (1 - epsilon) * psi / 2 - epsilon1 / (kappa * (1 - epsilon))
        C2 = psi * (1 - epsilon) / 2
        one = (1 - epsilon) ** 2
        C_a = psi - (M - kappa * one) / (2 * K * kappa ** 2 * one)
        C_b = psi * (1 - epsilon) ** 3 / 2
        return cls(epsilon, epsilon1, delta_prob, int(s), beta, int(K), kappa, M, bounds.B,
            bounds.Gamma, a, psi, eta, 1 - 2 * kappa * C1, 1 - 2 * kappa * C2, C1, C2, C_a, C_b, G)

    @property
    def floor_l1(self):
        'Additive error floor of a single local step between syncs'
        return self.floor_for(1)

    def floor_for(self, L):
        return self.eta * L * self.Gamma / (self.kappa * (1 - self.epsilon))

def required_sample_size(bounds, epsilon, delta_prob, d, K=1, T=1):
    '''
    ceil(4B / (kappa eps^2) * log(2 d K T / delta)). K = T = 1 is the
    single-worker bound; K > 1 covers all workers at once and T > 1 all
    iterations.
    '''
    if not bounds.kappa > 0:
        raise BoundsError("The sample-size bound needs kappa > 0")
    return int(math.ceil(4 * bounds.B / (bounds.kappa * epsilon ** 2)
        * math.log(2.0 * d * K * T / delta_prob)))

def gradient_sample_size(Gamma, epsilon1, G, delta_prob, d, T=1):
    '''
    ceil(Gamma^2 / (eps1^2 G^2) * log(d T / delta)), the shard size that keeps
    local gradients aligned with the global one.
    '''
    if not G > 0:
        raise BoundsError("The gradient sample-size bound needs G > 0")
    return int(math.ceil(Gamma ** 2 / (epsilon1 ** 2 * G ** 2) * math.log(float(d) * T / delta_prob)))

def chernoff_failure_bound(bounds, epsilon, s, d):
    '''
    The matrix-Chernoff tail sum before simplification:

        d [e^-eps / (1-eps)^(1-eps)]^(s kappa / B) + d [e^eps / (1+eps)^(1+eps)]^(s M / B)
    '''
    low = -epsilon - (1 - epsilon) * math.log(1 - epsilon)
    high = epsilon - (1 + epsilon) * math.log(1 + epsilon)
    return d * math.exp(low * s * bounds.kappa / bounds.B) + d * math.exp(high * s * bounds.M / bounds.B)

def min_shard_gradient_norm(model, partition, w):
    'G = min_k ||g^k(w)||'
    return min(float(np.linalg.norm(model.gradient(w, shard))) for shard in partition.shards)

def exceeds_rate(failures, trials, rate, confidence=.99):
    '''
    True when ``failures`` out of ``trials`` is significantly above ``rate``
    (one-sided binomial test at ``confidence``).
    '''
    if failures == 0:
        return False
    return stats.binom.sf(failures - 1, trials, rate) < 1 - confidence

def _check_trials(trials):
    if int(trials) < 1:
        raise ConfigError("trials must be at least 1, you provided %r"%(trials,))

def _subsets(n, s, trials, rng):
    for _ in range(trials):
        yield np.sort(rng.choice(n, size=s, replace=False))

def iter_hessian_concentration(model, w, s, trials, epsilon, seed, bounds=None):
    '''
    Yields ``(done, trials, (lam_min, lam_max, failed))`` per subset draw; see
    ``check_hessian_concentration()``.
    '''
    _check_trials(trials)
    if model.d > MAX_EIGEN_DIM:
        raise ConfigError("Dense eigensolves are limited to d <= %d, got %d"%(MAX_EIGEN_DIM, model.d))
    n = model.dataset.n
    if not 1 <= s <= n:
        raise ConfigError("Subset size must be in [1, %d], you provided %r"%(n, s))
    bounds = bounds or estimate_bounds(model, [w], seed=seed)
    low = (1 - epsilon) * bounds.kappa
    high = (1 + epsilon) * bounds.M
    rng = util.rng_stream(seed, 'hessian-concentration', s)
    for i, idx in enumerate(_subsets(n, s, trials, rng)):
        try:
            eig = linalg.eigvalsh(model.explicit_hessian(w, None if s == n else idx))
        except (linalg.LinAlgError, ValueError) as err:
            raise SolverError("Eigensolver failed on trial %d: %s"%(i, err))
        failed = bool(eig[0] < low or eig[-1] > high)
        yield i + 1, trials, (float(eig[0]), float(eig[-1]), failed)

def hessian_concentration_trials(model, w, s, trials, epsilon, seed, bounds=None):
    return [item for _, _, item in iter_hessian_concentration(model, w, s, trials, epsilon, seed, bounds)]

def check_hessian_concentration(model, w, s, trials, epsilon, seed, bounds=None):
    '''
    Draws ``trials`` uniform subsets of size ``s`` without replacement and
    returns the fraction whose subsampled Hessian at ``w`` has an eigenvalue
    below (1-eps) kappa or above (1+eps) M. ``bounds`` defaults to
    ``estimate_bounds(model, [w])``.
    '''
    results = hessian_concentration_trials(model, w, s, trials, epsilon, seed, bounds)
    return sum(failed for _, _, failed in results) / float(len(results))

class DeviationStats(namedtuple('DeviationStats', 's mean_dev quantile95_dev')):
    __slots__ = ()

def gradient_deviation_trials(model, w, s, trials, seed):
    '''
    ||g^S(w) - g(w)|| for ``trials`` uniform subsets of size ``s``. When s is
    the whole dataset the sample is the population and every deviation is 0.
    '''
    _check_trials(trials)
    n = model.dataset.n
    if not 1 <= s <= n:
        raise ConfigError("Subset size must be in [1, %d], you provided %r"%(n, s))
    g = model.gradient(w)
    if s == n:
        return np.zeros(trials)
    rng = util.rng_stream(seed, 'gradient-deviation', s)
    return np.array([np.linalg.norm(model.gradient(w, idx) - g) for idx in _subsets(n, s, trials, rng)])

def check_gradient_deviation(model, w, s_values, trials, seed):
    '''
    Returns a DeviationStats (mean and 95th percentile of ||g^S - g||) for
    every subset size in ``s_values``.
    '''
    out = []
    for s in s_values:
        devs = gradient_deviation_trials(model, w, s, trials, seed)
        out.append(DeviationStats(int(s), float(np.mean(devs)), float(np.quantile(devs, .95))))
    return out

def loglog_slope(xs, ys):
    'Least-squares slope of log(ys) against log(xs)'
    return float(stats.linregress(np.log(xs), np.log(ys)).slope)

class DescentCheck(namedtuple('DescentCheck', 'worker_id decrease psi_bound margin ok')):
    '''
    One worker's local-loss decrease after a capped Newton step against
    psi ||g^k||^2; ``margin`` is decrease - psi_bound.
    '''
    __slots__ = ()

def check_descent_lemma(model, partition, w, ls_with_cap, cg=None, epsilon=.5, bounds=None, psi=None):
    '''
    Takes one local Newton step per worker from ``w`` with a capped line
    search and compares each local decrease with psi ||g^k||^2, where
    psi = alpha* beta / (M (1 + eps)). Failures are reported, not raised.
    '''
    if ls_with_cap.alpha_star_cap is None:
        raise ConfigError("The descent check needs a line search with alpha_star_cap set")
    cg = cg or CgConfig()
    w = np.asarray(w, dtype=float)
    if psi is None:
        bounds = bounds or estimate_bounds(model, [w])
        psi = ls_with_cap.alpha_star_cap * ls_with_cap.beta / (bounds.M * (1 + epsilon))
    out = []
    for k, shard in enumerate(partition.shards):
        local = model.restrict(shard)
        before = local.value(w)
        state = local_newton_step(model, WorkerState.start(k, shard, w), ls_with_cap, cg, local)
        decrease = before - local.value(state.w)
        bound = psi * (state.last_grad_norm or 0.0) ** 2
        out.append(DescentCheck(k, decrease, bound, decrease - bound, decrease >= bound))
    return out

class ErrorFloorPoint(namedtuple('ErrorFloorPoint', 's gap param_gap rounds')):
    '''
    Loss gap f(w_bar) - f(w*) and parameter gap ||w_bar - w*|| at stagnation
    for shard size ``s``, and the rounds it took to stagnate.
    '''
    __slots__ = ()

def _least_squares_optimum(model):
    x, y = model.dataset.features, model.dataset.labels
    try:
        return linalg.solve(x.T.dot(x), x.T.dot(y), assume_a='pos')
    except (linalg.LinAlgError, ValueError) as err:
        raise SingularSystemError("Normal equations are singular: %s"%(err,))

def error_floor_point(model, partition, L=2, max_rounds=100, tol=1e-12, cg=None, ls=None):
    '''
    Runs LocalNewton on an unregularized least-squares ``model`` until the
    loss changes by less than ``tol`` between rounds and measures the gap to
    the normal-equations solution over the union of the shards.
    '''
    if model.kind != 'least_squares' or model.gamma != 0:
        raise ConfigError("Error floors are measured on unregularized least squares")
    if L < 2:
        raise ConfigError("Error floors need L >= 2, you provided %r"%(L,))
    cg = cg or CgConfig(1e-12)
    ls = ls or LineSearchConfig()
    with Cluster(model, partition, threads=1) as cluster:
        union = cluster.global_model
        w_star = _least_squares_optimum(union)
        w_bar = np.zeros(model.d)
        states = init_workers(partition, w_bar)
        prev = None
        for _ in range(max_rounds):
            w_bar, states = localnewton_round(cluster, states, w_bar, L, ls, cg)
            f = union.value(w_bar)
            if prev is not None and abs(prev - f) < tol:
                break
            prev = f
        rounds = cluster.rounds
    gap = union.value(w_bar) - union.value(w_star)
    return ErrorFloorPoint(partition.shard_size, gap, float(np.linalg.norm(w_bar - w_star)), rounds)

def identical_shards(ds, K, s):
    '''
    A dataset made of K copies of its first s rows, with each copy as one
    shard.
    '''
    block = ds.take(np.arange(s))
    tiled = block.take(np.tile(np.arange(s), K))
    shards = tuple(np.arange(k * s, (k + 1) * s) for k in range(K))
    return tiled, Partition(shards, K, s, np.arange(0))

def measure_error_floor(K, s_values, seed, d=5, noise=1.0, L=2, identical=False, max_rounds=100):
    '''
    For every shard size s, draws K*s samples from one least-squares
    generating distribution (Gaussian features, noisy linear targets),
    partitions them uniformly, runs LocalNewton to stagnation and returns
    ErrorFloorPoints. With ``identical=True`` every shard holds the same
    samples, which makes the floor vanish.
    '''
    out = []
    for s in s_values:
        ds = make_synthetic(K * s, d, 'least_squares', seed, noise)[0]
        if identical:
            ds, partition = identical_shards(ds, K, s)
        else:
            partition = partition_uniform(ds.n, K, seed)
        model = ObjectiveModel(ds, 'least_squares', 0.0)
        out.append(error_floor_point(model, partition, L, max_rounds))
    return out

def summarize_error_floor(K, s_values, seeds, **kwargs):
    '''
    Averages ``measure_error_floor`` over ``seeds``. Returns ``(s_values,
    mean_gaps, mean_param_gaps, loss_slope, param_slope, spearman_rho)``.
    '''
    runs = [measure_error_floor(K, s_values, seed, **kwargs) for seed in seeds]
    gaps = np.mean([[p.gap for p in run] for run in runs], axis=0)
    params = np.mean([[p.param_gap for p in run] for run in runs], axis=0)
    rho = stats.spearmanr(s_values, -gaps)[0]
    return (list(s_values), gaps, params, loglog_slope(s_values, gaps),
        loglog_slope(s_values, params), float(rho))

class TheoryReport(namedtuple('TheoryReport', 'params required_s gradient_s chernoff failure_rate deviations descent rows')):
    '''
    Everything ``theory_report()`` measured. ``rows`` holds the raw per-trial
    values as ``(check, s, trial, value)`` tuples for CSV output.
    '''
    __slots__ = ()

    def lines(self):
        p = self.params
        out = [
            'kappa=%.6g M=%.6g B=%.6g Gamma=%.6g G=%s'%(p.kappa, p.M, p.B, p.Gamma,
                '%.6g'%p.G if p.G is not None else ''),
            'alpha*=%.6g psi=%.6g eta=%.6g'%(p.alpha_star, p.psi, p.eta),
            'C1=%.6g C2=%.6g rho1=%.6g rho2=%.6g'%(p.C1, p.C2, p.rho1, p.rho2),
            'C_local_a=%.6g C_local_b=%.6g'%(p.C_local_a, p.C_local_b),
            'floor(L=1)=%.6g'%p.floor_l1,
            'required s (Hessian)=%d, shard size=%d'%(self.required_s, p.s),
            'required s (gradient)=%s'%('' if self.gradient_s is None else self.gradient_s),
            'Chernoff failure bound at s=%d: %.6g'%(p.s, self.chernoff),
        ]
        if self.failure_rate is not None:
            out.append('Hessian concentration failure rate at s=%d: %.4f'%(p.s, self.failure_rate))
        for dev in self.deviations:
            out.append('gradient deviation s=%d: mean=%.6g q95=%.6g eta=%.6g'%(
                dev.s, dev.mean_dev, dev.quantile95_dev, eta_bound(dev.s, .05, p.Gamma)))
        failed = [c.worker_id for c in self.descent if not c.ok]
        out.append('capped descent: %d of %d workers failed%s'%(len(failed), len(self.descent),
            (' (%s)'%', '.join(map(str, failed))) if failed else ''))
        return out

def theory_report(model, partition, epsilon=.5, epsilon1=.25, delta_prob=.1, trials=200,
        seed=0, beta=.1, progress=False):
    '''
    Runs every check at w = 0 on a built problem: curvature bounds, the
    derived constants, sample-size bounds, Hessian concentration at the shard
    size (skipped past ``MAX_EIGEN_DIM``), gradient deviation at powers of two
    up to n, and the capped descent check on every worker.
    '''
    _check_trials(trials)
    w = np.zeros(model.d)
    bounds = estimate_bounds(model, [w], seed=seed)
    G = min_shard_gradient_norm(model, partition, w)
    params = TheoryParams.derive(bounds, epsilon, epsilon1, delta_prob, partition.shard_size,
        beta, partition.worker_count, G=G)
    required = required_sample_size(bounds, epsilon, delta_prob, model.d, partition.worker_count)
    grad_s = gradient_sample_size(bounds.Gamma, epsilon1, G, delta_prob, model.d) if G > 0 else None
    chernoff = chernoff_failure_bound(bounds, epsilon, partition.shard_size, model.d)
    rows = []

    rate = None
    if model.d <= MAX_EIGEN_DIM:
        job = _accumulate(iter_hessian_concentration(model, w, partition.shard_size, trials,
            epsilon, seed, bounds))
        results = util.show_progress(job) if progress else list(job)[-1][2]
        rate = sum(f for _, _, f in results) / float(len(results))
        for i, (low, high, failed) in enumerate(results):
            rows.append(('hessian_min', partition.shard_size, i, low))
            rows.append(('hessian_max', partition.shard_size, i, high))

    s_values = [2 ** i for i in range(int(math.log(model.dataset.n, 2)) + 1)]
    deviations = []
    for s in s_values:
        devs = gradient_deviation_trials(model, w, s, trials, seed)
        deviations.append(DeviationStats(s, float(np.mean(devs)), float(np.quantile(devs, .95))))
        rows.extend(('gradient', s, i, float(v)) for i, v in enumerate(devs))

    ls = LineSearchConfig(beta=beta).with_cap(bounds)
    descent = check_descent_lemma(model, partition, w, ls, epsilon=epsilon, psi=params.psi)
    rows.extend(('descent_margin', partition.shard_size, c.worker_id, c.margin) for c in descent)
    return TheoryReport(params, required, grad_s, chernoff, rate, deviations, descent, rows)

def _accumulate(job):
    seen = []
    for done, total, item in job:
        seen.append(item)
        yield done, total, seen

__all__ = [k for k, v in globals().items() if getattr(v, '__doc__', None) and k not in _skip and not k.startswith('_')]
__all__.sort()
