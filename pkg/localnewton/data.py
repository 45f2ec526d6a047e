'''
Datasets, LIBSVM text I/O, feature expansion and worker partitioning.

Everything is stored densely. Labels of classification datasets are always
-1/+1 after loading, whatever the file used (0/1 or -1/+1): anything <= 0
becomes -1, anything > 0 becomes +1.
'''

from __future__ import print_function
from collections import namedtuple
import gzip
import io
import math
import os

import numpy as np

from .exceptions import DatasetError, ParseError
from . import util

_skip = None
_skip = set(globals()) - set(['__doc__'])

class Dataset(object):
    '''
    A dense design matrix ``features`` (n x d) and its ``labels`` (length n).
    Pass ``classification=False`` for real-valued (least-squares) targets.
    '''
    __slots__ = 'features', 'labels', 'classification', 'name'
    def __init__(self, features, labels, classification=True, name=None):
        features = np.array(features, dtype=float, ndmin=2, copy=True)
        labels = np.array(labels, dtype=float, ndmin=1, copy=True)
        if features.ndim != 2:
            raise DatasetError("Features must be a matrix, got %d dimensions"%features.ndim)
        if features.shape[0] != labels.shape[0]:
            raise DatasetError("Feature rows (%d) and labels (%d) disagree"%(
                features.shape[0], labels.shape[0]))
        if not np.all(np.isfinite(features)) or not np.all(np.isfinite(labels)):
            raise DatasetError("Datasets cannot contain non-finite values")
        if classification and labels.size and not np.all(np.abs(labels) == 1):
            raise DatasetError("Classification labels must all be -1 or +1")
        features.setflags(write=False)
        labels.setflags(write=False)
        self.features = features
        self.labels = labels
        self.classification = classification
        self.name = name

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def d(self):
        return self.features.shape[1]

    def take(self, indices):
        'Returns a new Dataset holding only the given rows, in the given order'
        indices = np.asarray(indices, dtype=np.intp)
        return Dataset(self.features[indices], self.labels[indices],
            self.classification, self.name)

    def __repr__(self):
        return '<Dataset %s n=%d d=%d>'%(self.name or '?', self.n, self.d)

def _normalize_label(value):
    return 1.0 if value > 0 else -1.0

def parse_libsvm(text, d_hint=None, classification=True, name=None):
    '''
    Parses LIBSVM text (``bytes``, ``str``, or a file-like object yielding
    either) into a dense Dataset.

    Every nonempty line is ``<label> <idx>:<val> ...`` with 1-based, strictly
    increasing indices. Missing indices are 0.0. The dimension is the largest
    index seen, or ``d_hint`` when given (in which case larger indices are an
    error). Anything after a ``#`` on a line is ignored.
    '''
    if isinstance(text, (bytes, str)):
        lines = text.splitlines()
    else:
        lines = text

    labels = []
    rows = []
    seen_d = 0
    for lineno, line in enumerate(lines, 1):
        if isinstance(line, bytes):
            try:
                line = line.decode('utf-8')
            except UnicodeDecodeError as err:
                raise ParseError("line %d: invalid UTF-8 (%s)"%(lineno, err.reason), lineno, line[err.start:err.end])
        line = line.partition('#')[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            label = float(parts[0])
        except ValueError:
            raise ParseError("line %d: invalid label %r"%(lineno, parts[0]), lineno, parts[0])
        if not math.isfinite(label):
            raise ParseError("line %d: non-finite label %r"%(lineno, parts[0]), lineno, parts[0])

        idx = []
        vals = []
        last = 0
        for tok in parts[1:]:
            si, sep, sv = tok.partition(':')
            try:
                if not sep:
                    raise ValueError(tok)
                i = int(si)
                v = float(sv)
            except ValueError:
                raise ParseError("line %d: malformed token %r"%(lineno, tok), lineno, tok)
            if i <= last:
                raise ParseError("line %d: index %d is not strictly increasing (after %d)"%(
                    lineno, i, last), lineno, tok)
            if d_hint is not None and i > d_hint:
                raise ParseError("line %d: index %d is larger than the dimension %d"%(
                    lineno, i, d_hint), lineno, tok)
            if not math.isfinite(v):
                raise ParseError("line %d: non-finite value in %r"%(lineno, tok), lineno, tok)
            last = i
            idx.append(i - 1)
            vals.append(v)
        seen_d = max(seen_d, last)
        labels.append(_normalize_label(label) if classification else label)
        rows.append((idx, vals))

    d = seen_d if d_hint is None else int(d_hint)
    features = np.zeros((len(rows), d))
    for r, (idx, vals) in enumerate(rows):
        features[r, idx] = vals
    return Dataset(features, labels, classification, name)

def load_libsvm(path, d_hint=None, classification=True):
    '''
    Reads a LIBSVM file from disk; files ending in ``.gz`` are decompressed.
    The dataset is named after the file stem (``w8a.t.gz`` -> ``w8a``).
    '''
    opener = gzip.open if path.endswith('.gz') else io.open
    try:
        with opener(path, 'rb') as inp:
            data = inp.read()
    except (IOError, OSError) as err:
        raise DatasetError("Cannot read dataset %r: %s"%(path, err))
    return parse_libsvm(data, d_hint, classification, dataset_stem(path))

def dataset_stem(path):
    return os.path.basename(path).split('.')[0]

def write_libsvm(ds, out):
    '''
    Writes a Dataset as LIBSVM text to a binary or text file object. Zeros are
    omitted and values are printed with 17 significant digits, so parsing the
    output gives back exactly the same features and labels.
    '''
    chunks = []
    for x, y in zip(ds.features, ds.labels):
        nz = np.flatnonzero(x)
        label = ('%+d'%int(y)) if ds.classification else '%.17g'%y
        chunks.append(' '.join([label] + ['%d:%.17g'%(i + 1, x[i]) for i in nz]) + '\n')
    text = ''.join(chunks)
    if isinstance(out, io.TextIOBase):
        out.write(text)
    else:
        out.write(text.encode('utf-8'))

def expand_pairwise(ds, max_dim=None):
    '''
    Replaces every row x with all d*d ordered products x_i * x_j, row-major
    (i outer, j inner), so d=54 becomes 2916.
    '''
    max_dim = util.get_max_dim() if max_dim is None else max_dim
    d = ds.d
    if d < 1:
        raise DatasetError("Cannot expand a dataset with no features")
    if d * d > max_dim:
        raise DatasetError("Pairwise expansion of d=%d gives %d features, over the cap of %d"%(
            d, d * d, max_dim))
    x = ds.features
    expanded = np.einsum('ni,nj->nij', x, x).reshape(ds.n, d * d)
    return Dataset(expanded, ds.labels, ds.classification, ds.name)

class Partition(namedtuple('Partition', 'shards worker_count shard_size dropped')):
    '''
    K disjoint index arrays of identical size s = floor(n/K). Indices left
    over by the floor (at most K-1 of them) are in ``dropped``.
    '''
    __slots__ = ()

    def union(self):
        'All retained indices, sorted'
        return np.sort(np.concatenate(self.shards))

def partition_uniform(n, K, seed):
    '''
    Shuffles range(n) with the seeded generator and cuts it into K consecutive
    blocks of size floor(n/K). Each shard is returned sorted.
    '''
    n = int(n)
    K = int(K)
    if K < 1:
        raise DatasetError("Need at least one worker, you provided K=%d"%K)
    if n < K:
        raise DatasetError("Cannot split %d samples across %d workers"%(n, K))
    perm = util.rng_stream(seed, 'partition').permutation(n)
    s = n // K
    shards = tuple(np.sort(perm[k*s:(k+1)*s]) for k in range(K))
    for shard in shards:
        shard.setflags(write=False)
    return Partition(shards, K, s, np.sort(perm[K*s:]))

def make_synthetic(n, d, task='logistic', seed=0, noise=None, margin=0.0):
    '''
    Gaussian features and a ground-truth weight vector drawn once from the
    seed. For ``task='logistic'`` labels are sign(w.x + noise); with
    ``margin > 0`` points closer than ``margin`` to the separating hyperplane
    are redrawn, and no noise is added, so the result is separable with that
    margin. For ``task='least_squares'`` targets are X w + noise.

    Returns ``(dataset, w_true)``.
    '''
    n = int(n)
    d = int(d)
    if n < 1 or d < 1:
        raise DatasetError("Synthetic datasets need n >= 1 and d >= 1, got n=%d d=%d"%(n, d))
    if task not in TASKS:
        raise DatasetError("Unknown task %r, expected one of %r"%(task, list(TASKS)))
    rng = util.rng_stream(seed, 'synthetic', task)
    w_true = rng.standard_normal(d) / math.sqrt(d)
    if task == 'least_squares':
        noise = 0.1 if noise is None else noise
        x = rng.standard_normal((n, d))
        y = x.dot(w_true) + noise * rng.standard_normal(n)
        return Dataset(x, y, False, 'synthetic'), w_true

    noise = (0.0 if margin > 0 else 0.5) if noise is None else noise
    scale = np.linalg.norm(w_true)
    x = rng.standard_normal((n, d))
    if margin > 0:
        keep = np.abs(x.dot(w_true)) / scale >= margin
        while not keep.all():
            x[~keep] = rng.standard_normal((int((~keep).sum()), d))
            keep = np.abs(x.dot(w_true)) / scale >= margin
    z = x.dot(w_true) + noise * rng.standard_normal(n)
    y = np.where(z >= 0, 1.0, -1.0)
    ds = Dataset(x, y, True, 'synthetic')
    if margin > 0 and not np.all(y * x.dot(w_true) / scale >= margin):
        raise DatasetError("Generated dataset is not separable with margin %r"%(margin,))
    return ds, w_true

TASKS = ('logistic', 'least_squares')

class DatasetProfile(namedtuple('DatasetProfile',
        'name n d test_n expand sgd_numerator bfgs_step target_loss')):
    '''
    Published shape and tuned hyperparameters of a benchmark dataset. The Local
    SGD step is ``sgd_numerator / s`` for shard size s; ``target_loss`` is the
    training loss used for rounds-to-target comparisons (None if unpublished).
    '''
    __slots__ = ()

    def sgd_step(self, shard_size):
        return self.sgd_numerator / float(shard_size)

PROFILES = dict((p.name, p) for p in [
    DatasetProfile('w8a', 48000, 300, 15000, False, 10., 100., .19),
    DatasetProfile('covtype', 500000, 2916, 81000, True, 10., 1., .65),
    DatasetProfile('epsilon', 400000, 2000, 100000, False, 500., 10., .3),
    DatasetProfile('a9a', 32000, 123, 16000, False, 10., 1., None),
    DatasetProfile('ijcnn1', 49000, 22, 91000, False, 100., 10., None),
])

def detect_profile(name_or_path):
    '''
    Returns the DatasetProfile matching a dataset name or file path (by stem,
    case-insensitive), or None.
    '''
    if not name_or_path:
        return None
    return PROFILES.get(dataset_stem(name_or_path).lower())

__all__ = [k for k, v in globals().items() if getattr(v, '__doc__', None) and k not in _skip and not k.startswith('_')]
__all__.sort()
