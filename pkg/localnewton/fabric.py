'''
The simulated master/worker fabric.

A ``Cluster`` owns one restricted objective per shard, a thread pool for
running worker computations inside a round, and the communication-round
counter. Worker results always come back in worker order and are reduced in
that order, so a run gives the same bits with 1 thread or 64::

    with Cluster(model, partition, threads=4) as cluster:
        grads = cluster.map(lambda k, local, _: local.gradient(w), [None] * cluster.K)
        g = cluster.mean(grads)
        cluster.charge()
'''

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .exceptions import LocalNewtonError, WorkerError
from . import util

_skip = None
_skip = set(globals()) - set(['__doc__'])

class Cluster(object):
    '''
    K simulated workers over ``partition``; ``rounds`` counts every
    master<->workers synchronization charged so far.
    '''
    def __init__(self, model, partition, threads=None):
        self.model = model
        self.partition = partition
        self.local_models = [model.restrict(shard) for shard in partition.shards]
        self.union = partition.union()
        self.global_model = model.restrict(self.union)
        self.threads = util.get_thread_count() if threads is None else int(threads)
        self.rounds = 0
        self._pool = None

    @property
    def K(self):
        return self.partition.worker_count

    def map(self, fn, items):
        '''
        Calls ``fn(worker_id, local_model, item)`` for the k-th item of
        ``items`` on worker k and returns the results in worker order.
        Failures are re-raised as WorkerError naming the lowest failing
        worker.
        '''
        items = list(items)
        def call(k):
            try:
                return fn(k, self.local_models[k], items[k])
            except WorkerError:
                raise
            except (LocalNewtonError, ArithmeticError, ValueError, np.linalg.LinAlgError) as err:
                raise WorkerError(k, err)
        if self.threads <= 1 or len(items) <= 1:
            return [call(k) for k in range(len(items))]
        if self._pool is None:
            self._pool = ThreadPoolExecutor(max_workers=self.threads)
        return list(self._pool.map(call, range(len(items))))

    def mean(self, vectors):
        'Ordered pairwise mean of per-worker vectors'
        return util.ordered_mean(vectors)

    def charge(self, rounds=1):
        self.rounds += rounds
        return self.rounds

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *args, **kwargs):
        self.close()

__all__ = [k for k, v in globals().items() if getattr(v, '__doc__', None) and k not in _skip and not k.startswith('_')]
__all__.sort()
