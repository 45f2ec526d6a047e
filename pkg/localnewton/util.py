'''
localnewton - local second-order optimization on a simulated cluster

Released under the LGPL license version 2.1 and version 3 (you can choose
which you'd like to be bound under).

Changing process-wide settings
==============================

There are two settings that apply to every run unless a run overrides them.

1. The number of threads used to execute simulated workers inside one
   communication round. Results do not depend on it (reductions always run in
   worker order), only wall-clock time does. Set it from the environment::

    LOCALNEWTON_THREADS=8 python -m localnewton run ...

   or from Python::

    from localnewton import util

    util.set_thread_count(8)

2. The largest feature dimension that ``data.expand_pairwise()`` is allowed to
   produce, from ``LOCALNEWTON_MAX_DIM`` or ``util.set_max_dim()``.

Random streams
==============

Every random draw in the package comes from ``rng_stream(seed, *tags)``. One
user seed fans out into independent counter-based generators, one per purpose
tag, so adding a new consumer of randomness never shifts the numbers another
consumer sees::

    shuffle = rng_stream(seed, 'partition')
    perm = rng_stream(seed, 'sgd', round_index, worker_id)

'''

from __future__ import print_function
from hashlib import sha1
from itertools import chain
import os
import time

import numpy as np

from .exceptions import ConfigError

_skip = None
_skip = set(globals()) - set(['__doc__'])

THREADS = int(os.environ.get('LOCALNEWTON_THREADS', '1') or 1)
MAX_DIM = int(os.environ.get('LOCALNEWTON_MAX_DIM', '4096') or 4096)

def set_thread_count(threads):
    '''
    Update the default worker thread-pool size for runs that don't pass their
    own.
    '''
    global THREADS
    threads = int(threads)
    if threads < 1:
        raise ConfigError("Thread count must be at least 1, you provided %r"%(threads,))
    THREADS = threads

def get_thread_count():
    return THREADS

def set_max_dim(max_dim):
    '''
    Update the largest feature dimension feature expansion may produce.
    '''
    global MAX_DIM
    max_dim = int(max_dim)
    if max_dim < 1:
        raise ConfigError("Dimension cap must be at least 1, you provided %r"%(max_dim,))
    MAX_DIM = max_dim

def get_max_dim():
    return MAX_DIM

def _tag_key(tag):
    if isinstance(tag, (int, np.integer)):
        return int(tag)
    return int(sha1(str(tag).encode('utf-8')).hexdigest()[:8], 16)

def rng_stream(seed, *tags):
    '''
    Returns a ``numpy.random.Generator`` for the (seed, tags...) purpose. Same
    inputs, same stream, on every platform.
    '''
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_tag_key(t) for t in tags))
    return np.random.Generator(np.random.Philox(ss))

def pairwise_sum(vectors):
    '''
    Sums a sequence of equal-shape arrays by recursive halving, in the order
    given. The result only depends on the order of ``vectors``.
    '''
    vectors = list(vectors)
    if not vectors:
        raise ValueError("Cannot sum an empty sequence")
    while len(vectors) > 1:
        nxt = [vectors[i] + vectors[i+1] for i in range(0, len(vectors) - 1, 2)]
        if len(vectors) % 2:
            nxt.append(vectors[-1])
        vectors = nxt
    return np.array(vectors[0], dtype=float)

def ordered_mean(vectors):
    vectors = list(vectors)
    return pairwise_sum(vectors) / len(vectors)

def config_hash(items):
    '''
    SHA-1 over the sorted ``key=value`` lines of a mapping or of (key, value)
    pairs. Changes iff any value changes.
    '''
    if hasattr(items, 'items'):
        items = items.items()
    lines = sorted('%s=%s'%(k, format_value(v)) for k, v in items)
    return sha1('\n'.join(lines).encode('utf-8')).hexdigest()

def format_value(value):
    '''
    The text form used for config files, meta headers and hashing. Floats get
    17 significant digits so that they round-trip.
    '''
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, (float, np.floating)):
        return '%.17g'%value
    if isinstance(value, (list, tuple)):
        return ','.join(format_value(v) for v in value)
    return str(value)

def show_progress(job):
    '''
    Prints the progress of an iterator of ``(done, total[, item])`` tuples, as
    yielded by the ``iter_*`` variants of the theory checks, and returns the
    ``item`` of the last tuple (``None`` if no tuple carried one).

    Usage example::

        lam_min, lam_max, failed = util.show_progress(
            theory.iter_hessian_concentration(model, w, 200, 500, .5, 1))
    '''
    start = time.time()
    last_print = 0
    last_line = 0
    result = None
    for item in chain(job, [(1, 1)]):
        prog, total = item[:2]
        if len(item) > 2:
            result = item[2]
        # Only print a line when we start, finish, or every .1 seconds
        if (time.time() - last_print) > .1 or prog >= total:
            delta = (time.time() - start) or .0001
            line = "%.1f%% complete, %.1f seconds elapsed, %.1f seconds remaining"%(
                100. * prog / (total or 1), delta, total * delta / (prog or 1) - delta)
            length = len(line)
            # pad the line out with spaces just in case our line got shorter
            line += max(last_line - length, 0) * ' '
            print(line, end="\r")
            last_line = length
            last_print = time.time()
    print()
    return result

__all__ = [k for k, v in globals().items() if getattr(v, '__doc__', None) and k not in _skip and not k.startswith('_')]
__all__.sort()
