'''
Per-round run records and their CSV form.

A run produces one ``MetricsRow`` per charged synchronization of the
algorithm (one per LocalNewton sync, one per GIANT iteration, ...). ``round``
is the cumulative number of communication rounds when the row was taken, so
GIANT rows read 3, 6, 9, ...

CSV files start with ``# key=value`` lines for the run's meta data, then the
header ``round,local_iters,train_loss,test_acc,grad_norm,L,phase`` and one row
per record. Reals are printed with 17 significant digits, files are UTF-8
with LF line endings, and every row is flushed as soon as it is recorded so an
interrupted run leaves a valid prefix.
'''

from collections import namedtuple, OrderedDict
import io

import numpy as np

from .exceptions import DatasetError, DivergenceError
from . import util

_skip = None
_skip = set(globals()) - set(['__doc__'])

CSV_COLUMNS = ('round', 'local_iters', 'train_loss', 'test_acc', 'grad_norm', 'L', 'phase')

class MetricsRow(namedtuple('MetricsRow', 'round local_iters train_loss test_acc grad_norm L phase')):
    '''
    One record; ``test_acc`` is None when the run has no test set.
    '''
    __slots__ = ()

    def to_csv(self):
        acc = '' if self.test_acc is None else '%.17g'%self.test_acc
        return '%d,%d,%.17g,%s,%.17g,%d,%s'%(self.round, self.local_iters,
            self.train_loss, acc, self.grad_norm, self.L, self.phase)

def accuracy(w, test):
    '''
    Fraction of ``test`` samples with sign(w.x) == y, where sign(0) is +1.
    '''
    if not test.n:
        raise DatasetError("Cannot measure accuracy on an empty dataset")
    w = np.asarray(w, dtype=float)
    if w.shape != (test.d,):
        raise DatasetError("Weights of dimension %d do not match %d test features"%(w.size, test.d))
    pred = np.where(test.features.dot(w) >= 0, 1.0, -1.0)
    return float(np.mean(pred == test.labels))

class Evaluator(object):
    '''
    Computes (train loss, test accuracy, gradient norm) at an averaged
    iterate. Training quantities use ``model`` restricted to ``subset``
    (normally the union of the shards); accuracy is None without ``test``.
    '''
    __slots__ = 'model', 'test'
    def __init__(self, model, subset=None, test=None):
        self.model = model.restrict(subset)
        self.test = test

    def __call__(self, w):
        loss = self.model.value(w)
        gnorm = float(np.linalg.norm(self.model.gradient(w)))
        acc = accuracy(w, self.test) if self.test is not None else None
        return loss, acc, gnorm

class CsvSink(object):
    '''
    Writes meta lines and the header on creation, then one flushed line per
    row. Pass a path or an open text file.
    '''
    def __init__(self, out, meta=None):
        self._own = isinstance(out, str)
        self.out = io.open(out, 'w', encoding='utf-8', newline='\n') if self._own else out
        for k, v in (meta or {}).items():
            self.out.write('# %s=%s\n'%(k, util.format_value(v)))
        self.out.write(','.join(CSV_COLUMNS) + '\n')
        self.out.flush()

    def write(self, row):
        self.out.write(row.to_csv() + '\n')
        self.out.flush()

    def close(self):
        if self._own:
            self.out.close()

class RunMetrics(object):
    '''
    Append-only rows plus ``meta`` (algorithm, dataset, K, seed, config hash,
    ...) and ``events`` - ``(round, description)`` pairs for every L change and
    phase switch.
    '''
    def __init__(self, meta=None, sink=None):
        self.rows = []
        self.meta = OrderedDict(meta or ())
        self.events = []
        self.sink = sink
        self.w_final = None

    def append(self, round, local_iters, train_loss, test_acc, grad_norm, L, phase):
        if self.rows and round <= self.rows[-1].round:
            raise ValueError("Rounds must strictly increase, got %d after %d"%(round, self.rows[-1].round))
        reals = [train_loss, grad_norm] + ([] if test_acc is None else [test_acc])
        if not all(np.isfinite(v) for v in reals):
            raise DivergenceError("round %d: non-finite metrics %r"%(round, reals))
        row = MetricsRow(int(round), int(local_iters), float(train_loss),
            None if test_acc is None else float(test_acc), float(grad_norm), int(L), phase)
        self.rows.append(row)
        if self.sink is not None:
            self.sink.write(row)
        return row

    def record(self, evaluate, w, round, local_iters, L, phase):
        'Evaluates ``w`` with an Evaluator and appends the row'
        loss, acc, gnorm = evaluate(w)
        return self.append(round, local_iters, loss, acc, gnorm, L, phase)

    def event(self, round, description):
        self.events.append((round, description))

    def rounds_to(self, target_loss):
        'First recorded round whose training loss is <= target_loss, or None'
        for row in self.rows:
            if row.train_loss <= target_loss:
                return row.round
        return None

    @property
    def final(self):
        return self.rows[-1] if self.rows else None

    def to_csv(self):
        out = io.StringIO()
        sink = CsvSink(out, self.meta)
        for row in self.rows:
            sink.write(row)
        return out.getvalue()

def write_combined_csv(out, runs, meta=None):
    '''
    Writes several runs into one CSV with a leading ``algo`` column. ``runs``
    is a sequence of ``(algo, RunMetrics)`` pairs; ``out`` a path or an open
    text file.
    '''
    own = isinstance(out, str)
    out = io.open(out, 'w', encoding='utf-8', newline='\n') if own else out
    try:
        for k, v in (meta or {}).items():
            out.write('# %s=%s\n'%(k, util.format_value(v)))
        out.write(','.join(('algo',) + CSV_COLUMNS) + '\n')
        for algo, metrics in runs:
            for row in metrics.rows:
                out.write('%s,%s\n'%(algo, row.to_csv()))
    finally:
        if own:
            out.close()

def read_csv(path):
    '''
    Reads a metrics CSV back into ``(meta, rows)``; meta values stay strings.
    '''
    meta = OrderedDict()
    rows = []
    with io.open(path, 'r', encoding='utf-8') as inp:
        for line in inp:
            line = line.rstrip('\n')
            if line.startswith('# '):
                k, _, v = line[2:].partition('=')
                meta[k] = v
            elif line and not line.startswith('round,'):
                r, li, loss, acc, gn, L, phase = line.split(',')
                rows.append(MetricsRow(int(r), int(li), float(loss),
                    float(acc) if acc else None, float(gn), int(L), phase))
    return meta, rows

__all__ = [k for k, v in globals().items() if getattr(v, '__doc__', None) and k not in _skip and not k.startswith('_')]
__all__.sort()
