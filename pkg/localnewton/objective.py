'''
Loss models over a Dataset: L2-regularized logistic regression and linear
least squares.

Every evaluator takes an optional ``subset`` of row indices and averages the
per-sample data term over it; the ``(gamma/2)||w||^2`` regularizer is added
once per evaluation, never per sample. With that convention the full-data
objective is exactly the shard-size-weighted mean of the shard objectives::

    model = ObjectiveModel(dataset, 'logistic_l2', gamma=1. / dataset.n)
    model.value(w)                  # f(w)
    model.value(w, shard)           # f^k(w)
    model.hessian_vec(w, v, shard)  # H^k(w) v

For repeated work on one shard, ``model.restrict(shard)`` builds a model whose
dataset holds only that shard's rows, so later calls skip the row gather.
'''

from collections import namedtuple

import numpy as np
from scipy import linalg
from scipy.special import expit

from .exceptions import BoundsError, ConfigError, DatasetError
from . import util

_skip = None
_skip = set(globals()) - set(['__doc__'])

KINDS = ('logistic_l2', 'least_squares')

class CurvatureBounds(namedtuple('CurvatureBounds', 'kappa M B Gamma')):
    '''
    Strong convexity ``kappa``, smoothness ``M``, per-sample Hessian bound
    ``B`` and per-sample gradient-norm bound ``Gamma`` (measured over the
    probe iterates it was estimated from).
    '''
    __slots__ = ()
    def __new__(cls, kappa, M, B, Gamma):
        vals = (kappa, M, B, Gamma)
        if not all(np.isfinite(v) for v in vals):
            raise BoundsError("Curvature bounds must be finite, got %r"%(vals,))
        if kappa < 0 or kappa > M:
            raise BoundsError("Need 0 <= kappa <= M, got kappa=%r M=%r"%(kappa, M))
        return super(CurvatureBounds, cls).__new__(cls, float(kappa), float(M), float(B), float(Gamma))

class ObjectiveModel(object):
    '''
    ``kind`` is one of 'logistic_l2' or 'least_squares'; ``gamma`` >= 0 is the
    L2 weight. Logistic models need -1/+1 labels.
    '''
    __slots__ = 'kind', 'dataset', 'gamma'
    def __init__(self, dataset, kind='logistic_l2', gamma=0.0):
        if kind not in KINDS:
            raise ConfigError("Unknown objective %r, expected one of %r"%(kind, list(KINDS)))
        gamma = float(gamma)
        if not (gamma >= 0 and np.isfinite(gamma)):
            raise ConfigError("The regularization weight must be finite and >= 0, you provided %r"%(gamma,))
        if kind == 'logistic_l2' and not dataset.classification:
            raise ConfigError("Logistic regression needs a classification dataset")
        self.kind = kind
        self.dataset = dataset
        self.gamma = gamma

    @property
    def d(self):
        return self.dataset.d

    def __repr__(self):
        return '<ObjectiveModel %s gamma=%r %r>'%(self.kind, self.gamma, self.dataset)

    def _rows(self, subset):
        ds = self.dataset
        if subset is None:
            if not ds.n:
                raise DatasetError("Cannot evaluate an objective over an empty dataset")
            return ds.features, ds.labels
        subset = np.asarray(subset, dtype=np.intp)
        if not subset.size:
            raise DatasetError("Cannot evaluate an objective over an empty subset")
        return ds.features[subset], ds.labels[subset]

    def restrict(self, subset):
        '''
        Returns a model over only the ``subset`` rows (or ``self`` when the
        subset is every row in order).
        '''
        if subset is None:
            return self
        subset = np.asarray(subset, dtype=np.intp)
        if subset.size == self.dataset.n and np.array_equal(subset, np.arange(subset.size)):
            return self
        if not subset.size:
            raise DatasetError("Cannot restrict a model to an empty subset")
        return ObjectiveModel(self.dataset.take(subset), self.kind, self.gamma)

    def _reg_value(self, w):
        return .5 * self.gamma * w.dot(w) if self.gamma else 0.0

    def value(self, w, subset=None):
        w = np.asarray(w, dtype=float)
        x, y = self._rows(subset)
        if self.kind == 'logistic_l2':
            loss = np.mean(np.logaddexp(0.0, -y * x.dot(w)))
        else:
            r = y - x.dot(w)
            loss = r.dot(r) / len(r)
        return float(loss + self._reg_value(w))

    def _coefficients(self, w, x, y):
        # per-sample derivative of the data term with respect to x_j . w
        if self.kind == 'logistic_l2':
            return -y * expit(-y * x.dot(w))
        return -2.0 * (y - x.dot(w))

    def gradient(self, w, subset=None):
        w = np.asarray(w, dtype=float)
        x, y = self._rows(subset)
        g = x.T.dot(self._coefficients(w, x, y)) / len(y)
        if self.gamma:
            g += self.gamma * w
        return g

    def _curvature(self, w, x, y):
        if self.kind == 'logistic_l2':
            z = y * x.dot(w)
            return expit(z) * expit(-z)
        return np.full(len(y), 2.0)

    def hessian_operator(self, w, subset=None):
        '''
        Returns ``hvp(v)`` computing H(w) v over the subset, with the per-sample
        curvature weights computed once up front.
        '''
        w = np.asarray(w, dtype=float)
        x, y = self._rows(subset)
        weights = self._curvature(w, x, y) / len(y)
        gamma = self.gamma
        def hvp(v):
            out = x.T.dot(weights * x.dot(v))
            if gamma:
                out += gamma * v
            return out
        return hvp

    def hessian_vec(self, w, v, subset=None):
        return self.hessian_operator(w, subset)(np.asarray(v, dtype=float))

    def explicit_hessian(self, w, subset=None):
        w = np.asarray(w, dtype=float)
        x, y = self._rows(subset)
        weights = self._curvature(w, x, y) / len(y)
        h = x.T.dot(x * weights[:, None])
        h = .5 * (h + h.T)
        h[np.diag_indices_from(h)] += self.gamma
        return h

    def sample_gradient_norms(self, w, subset=None):
        '''
        ||grad f_j(w)|| for every sample j, each f_j carrying the full
        regularizer.
        '''
        w = np.asarray(w, dtype=float)
        x, y = self._rows(subset)
        c = self._coefficients(w, x, y)
        sq = c * c * np.einsum('ij,ij->i', x, x)
        if self.gamma:
            sq += 2 * self.gamma * c * x.dot(w) + self.gamma ** 2 * w.dot(w)
        return np.sqrt(np.maximum(sq, 0.0))

    def sample_hessian_bound(self):
        'max_j of the largest eigenvalue of the per-sample Hessian, regularizer included'
        x = self.dataset.features
        peak = .25 if self.kind == 'logistic_l2' else 2.0
        return self.gamma + peak * float(np.max(np.einsum('ij,ij->i', x, x)))

def _power_iteration(op, d, rng, tol, max_iters):
    v = rng.standard_normal(d)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iters):
        hv = op(v)
        nrm = np.linalg.norm(hv)
        if not np.isfinite(nrm):
            raise BoundsError("Power iteration produced a non-finite value")
        if nrm == 0:
            return 0.0
        new = float(v.dot(hv))
        v = hv / nrm
        if abs(new - lam) <= tol * abs(new):
            return new
        lam = new
    return lam

def estimate_bounds(model, probe_iterates, tol=1e-6, max_iters=1000, seed=0):
    '''
    Estimates CurvatureBounds for ``model`` from a nonempty list of probe
    iterates:

        * kappa = gamma for logistic (the data term is PSD); for least squares
          gamma plus the smallest eigenvalue of the data Hessian
        * M = gamma + the largest data-Hessian eigenvalue over the probes, by
          power iteration to relative tolerance ``tol``
        * B = gamma + max_j of the per-sample Hessian bound
        * Gamma = max over probes and samples of ||grad f_j||
    '''
    probes = [np.asarray(w, dtype=float) for w in probe_iterates]
    if not probes:
        raise BoundsError("Need at least one probe iterate to estimate bounds")
    gamma = model.gamma
    d = model.d
    rng = util.rng_stream(seed, 'power-iteration')

    top = 0.0
    for w in probes:
        hvp = model.hessian_operator(w)
        op = (lambda v: hvp(v) - gamma * v) if gamma else hvp
        top = max(top, _power_iteration(op, d, rng, tol, max_iters))
        if model.kind == 'least_squares':
            # constant Hessian
            break

    kappa = gamma
    if model.kind == 'least_squares':
        low = linalg.eigvalsh(model.explicit_hessian(probes[0]), subset_by_index=[0, 0])[0]
        if not np.isfinite(low):
            raise BoundsError("Eigensolver produced a non-finite value")
        kappa = max(float(low), gamma)
    M = gamma + top
    B = model.sample_hessian_bound()
    Gamma = max(float(np.max(model.sample_gradient_norms(w))) for w in probes)
    return CurvatureBounds(min(kappa, M), M, max(B, M), Gamma)

__all__ = [k for k, v in globals().items() if getattr(v, '__doc__', None) and k not in _skip and not k.startswith('_')]
__all__.sort()
