'''
Newton-step building blocks: truncated conjugate gradients for H p = g, and
Armijo backtracking for the sufficient-decrease condition

    f(w - alpha p) <= f(w) - alpha * beta * p.g

Both are stateless and work on any callables, so the same code serves a
worker's shard objective, GIANT's global objective and BFGS.
'''

from collections import namedtuple

import numpy as np

from .exceptions import (BoundsError, CGError, ConfigError,
    DescentDirectionError, LineSearchError)

_skip = None
_skip = set(globals()) - set(['__doc__'])

CG_MAX_ITERS = 250
NEGLIGIBLE_DECREASE = 1e-13

class CgConfig(namedtuple('CgConfig', 'tol max_iters')):
    '''
    Stop conjugate gradients once ||H p - g|| <= tol ||g||, or after
    ``max_iters`` iterations (default ``min(d, 250)``).
    '''
    __slots__ = ()
    def __new__(cls, tol=1e-8, max_iters=None):
        if not 0 < tol < 1:
            raise ConfigError("CG tolerance must be in (0, 1), you provided %r"%(tol,))
        if max_iters is not None and int(max_iters) < 1:
            raise ConfigError("CG needs max_iters >= 1, you provided %r"%(max_iters,))
        return super(CgConfig, cls).__new__(cls, float(tol),
            None if max_iters is None else int(max_iters))

    def iters_for(self, d):
        return self.max_iters if self.max_iters is not None else min(d, CG_MAX_ITERS)

class LineSearchConfig(namedtuple('LineSearchConfig',
        'beta alpha_init shrink max_backtracks alpha_star_cap')):
    '''
    Armijo parameters. ``beta`` is in (0, 1/2], the first trial step is
    ``alpha_init`` (at most 1), and each rejection multiplies the step by
    ``shrink``. ``alpha_star_cap``, when set, bounds every trial step from
    above.
    '''
    __slots__ = ()
    def __new__(cls, beta=.1, alpha_init=1.0, shrink=.5, max_backtracks=50, alpha_star_cap=None):
        if not 0 < beta <= .5:
            raise ConfigError("Armijo beta must be in (0, 1/2], you provided %r"%(beta,))
        if not 0 < alpha_init <= 1:
            raise ConfigError("The initial trial step must be in (0, 1], you provided %r"%(alpha_init,))
        if not 0 < shrink < 1:
            raise ConfigError("The backtracking factor must be in (0, 1), you provided %r"%(shrink,))
        if int(max_backtracks) < 0:
            raise ConfigError("max_backtracks cannot be negative, you provided %r"%(max_backtracks,))
        if alpha_star_cap is not None and not 0 < alpha_star_cap <= 1:
            raise ConfigError("The step cap must be in (0, 1], you provided %r"%(alpha_star_cap,))
        return super(LineSearchConfig, cls).__new__(cls, float(beta), float(alpha_init),
            float(shrink), int(max_backtracks),
            None if alpha_star_cap is None else float(alpha_star_cap))

    def with_cap(self, bounds, rule='standard', epsilon=None):
        '''
        Returns a copy capped by ``alpha_star(bounds, beta)`` (``rule='standard'``)
        or by ``alpha_star_alt(bounds, beta, epsilon)`` (``rule='alternative'``).
        '''
        if rule == 'standard':
            cap = alpha_star(bounds, self.beta)
        elif rule == 'alternative':
            if epsilon is None:
                raise ConfigError("The alternative step cap needs epsilon")
            cap = alpha_star_alt(bounds, self.beta, epsilon)
        else:
            raise ConfigError("Unknown step-cap rule %r"%(rule,))
        return LineSearchConfig(self.beta, self.alpha_init, self.shrink,
            self.max_backtracks, cap)

def cg_solve(hvp, g, cfg=None):
    '''
    Solves H p = g with conjugate gradients from p = 0, where ``hvp(v)``
    returns H v for a symmetric positive definite H.

    Returns ``(p, residual, iters)`` where ``residual`` is ||H p - g|| as
    tracked by the CG recurrence. A zero ``g`` returns ``(0, 0.0, 0)``.
    '''
    cfg = cfg or CgConfig()
    g = np.asarray(g, dtype=float)
    p = np.zeros_like(g)
    rs = float(g.dot(g))
    if not np.isfinite(rs):
        raise CGError("CG was given a non-finite right-hand side")
    if rs == 0:
        return p, 0.0, 0
    target = cfg.tol * np.sqrt(rs)
    r = g.copy()
    direction = r.copy()
    iters = 0
    limit = cfg.iters_for(len(g))
    while iters < limit:
        hd = hvp(direction)
        curv = float(direction.dot(hd))
        if not np.isfinite(curv):
            raise CGError("CG met a non-finite Hessian product at iteration %d"%(iters + 1))
        if curv <= 0:
            raise CGError("CG met non-positive curvature %r at iteration %d"%(curv, iters + 1))
        step = rs / curv
        p += step * direction
        r -= step * hd
        iters += 1
        rs_new = float(r.dot(r))
        if not np.isfinite(rs_new):
            raise CGError("CG residual became non-finite at iteration %d"%iters)
        if np.sqrt(rs_new) <= target:
            rs = rs_new
            break
        direction = r + (rs_new / rs) * direction
        rs = rs_new
    return p, float(np.sqrt(rs)), iters

def backtrack(f_eval, w, p, g, beta, alpha_init, shrink, max_backtracks, cap=None, f0=None):
    '''
    Armijo backtracking without the (0, 1] restriction on ``alpha_init``;
    ``armijo_backtrack()`` is the checked entry point.
    '''
    w = np.asarray(w, dtype=float)
    slope = float(np.dot(p, g))
    if not slope > 0:
        raise DescentDirectionError("Line search needs p.g > 0, got %r"%(slope,))
    f0 = f_eval(w) if f0 is None else f0
    alpha = min(alpha_init, cap) if cap is not None else alpha_init
    for _ in range(max_backtracks + 1):
        trial = f_eval(w - alpha * p)
        if trial <= f0 - alpha * beta * slope:
            return alpha
        last = alpha
        alpha *= shrink
    raise LineSearchError("No step satisfied the Armijo condition after %d backtracks (last alpha %r)"%(
        max_backtracks, last), last)

def negligible_decrease(slope, f0):
    'True when a predicted decrease p.g is below the rounding of f0'
    return abs(slope) <= NEGLIGIBLE_DECREASE * abs(f0)

def armijo_backtrack(f_eval, w, p, g, cfg=None, f0=None):
    '''
    Returns ``alpha_init * shrink**k`` for the smallest k >= 0 where
    ``f_eval(w - alpha p) <= f_eval(w) - alpha * beta * p.g``, never above
    ``cfg.alpha_star_cap`` when one is set. Pass ``f0`` if ``f_eval(w)`` is
    already known.
    '''
    cfg = cfg or LineSearchConfig()
    return backtrack(f_eval, w, p, g, cfg.beta, cfg.alpha_init, cfg.shrink,
        cfg.max_backtracks, cfg.alpha_star_cap, f0)

def _check_beta(beta):
    if not 0 < beta <= .5:
        raise ConfigError("Armijo beta must be in (0, 1/2], you provided %r"%(beta,))

def alpha_star(bounds, beta):
    '''
    The step cap min{(1-beta) kappa/M, 2 beta kappa^2 / (3M (M - kappa/4))},
    clamped to at most 1.
    '''
    _check_beta(beta)
    kappa, M = bounds.kappa, bounds.M
    if M <= kappa / 4.:
        raise BoundsError("The step cap needs M > kappa/4, got kappa=%r M=%r"%(kappa, M))
    first = (1 - beta) * kappa / M
    second = 2 * beta * kappa ** 2 / (3 * M * (M - kappa / 4.))
    return min(first, second, 1.0)

def alpha_star_alt(bounds, beta, epsilon):
    '''
    The alternative sufficient cap 2(1-beta) kappa (1-epsilon) / (M (1+epsilon)),
    clamped to at most 1.
    '''
    _check_beta(beta)
    if not 0 < epsilon <= .5:
        raise ConfigError("epsilon must be in (0, 1/2], you provided %r"%(epsilon,))
    if bounds.M <= 0:
        raise BoundsError("The step cap needs M > 0, got %r"%(bounds.M,))
    return min(2 * (1 - beta) * bounds.kappa * (1 - epsilon) / (bounds.M * (1 + epsilon)), 1.0)

__all__ = [k for k, v in globals().items() if getattr(v, '__doc__', None) and k not in _skip and not k.startswith('_')]
__all__.sort()
