'''
localnewton - local second-order optimization with model averaging

Released under the LGPL license version 2.1 and version 3 (you can choose
which you'd like to be bound under).

What
====

LocalNewton trains a model across K workers that each hold a shard of the
data. Every worker takes L damped Newton steps on its own shard (conjugate
gradient for the direction, Armijo backtracking on the local loss for the
step), then the master averages the local models. Each average is one
communication round, so doing more work locally means fewer rounds.

Adaptive LocalNewton starts with a larger L, lowers it by one whenever the
global loss stops going down by at least ``delta`` between syncs, and falls
back to GIANT once L reaches 1.

Everything runs in one process on a simulated cluster that counts
communication rounds exactly. Results only depend on the config and the seed,
not on the number of threads used to execute workers.

What is available
=================

Algorithms:

* LocalNewton with a fixed sync period L
* Adaptive LocalNewton
* GIANT (3 rounds per iteration)
* Local SGD with periodic averaging
* full-gradient BFGS (1 round per iteration)

Objectives:

* L2-regularized logistic regression on +/-1 labels
* least squares, optionally ridge-regularized

Theory checks:

* curvature bound estimation (kappa, M, B, Gamma) and derived constants
* Hessian concentration failure rates against the sample-size bound
* gradient deviation against its 1/sqrt(s) bound
* the per-worker descent guarantee with a capped step
* the least-squares error floor and its decay with the shard size

Getting started
===============

1. Make sure you have Python 3.6 or later, numpy and scipy installed
2. Get a dataset in LIBSVM format (``w8a``, ``covtype``, ``epsilon``, ... or
   ``python -m localnewton gen-synth --n 4000 --d 20 --out synth``)
3. Run an algorithm::

    python -m localnewton run --algo adaptive --train w8a --test w8a.t --k 100 --l0 3

   which writes ``adaptive_w8a_0.csv`` with one row per communication round.

4. Or drive it from Python::

    from localnewton import data, objective, local

    ds = data.load_libsvm('w8a')
    model = objective.ObjectiveModel(ds, 'logistic_l2', gamma=1. / ds.n)
    partition = data.partition_uniform(ds.n, K=100, seed=0)
    metrics = local.run_localnewton(model, partition, local.SyncSchedule.for_rounds(2, 30))
    print(metrics.final)

Settings for worker threads and the feature-expansion cap are in
``localnewton.util``.
'''

_skip = None
_skip = set(globals()) - set('__doc__')

from .adaptive import AdaptiveState, adapt, run_adaptive
from .baselines import (BfgsState, SgdConfig, bfgs_iteration, giant_iteration,
    local_sgd_round, run_bfgs, run_giant, run_local_sgd)
from .data import (Dataset, DatasetProfile, Partition, PROFILES, expand_pairwise,
    load_libsvm, make_synthetic, parse_libsvm, partition_uniform, write_libsvm)
from .exceptions import (LocalNewtonError, DatasetError, ParseError, ConfigError,
    SolverError, CGError, LineSearchError, DescentDirectionError, DivergenceError,
    SingularSystemError, WorkerError, BoundsError, RunError, LocalNewtonWarning,
    LineSearchWarning, LossIncreaseWarning)
from .fabric import Cluster
from .harness import ExperimentConfig, compare, run_experiment
from .local import SyncSchedule, WorkerState, average_models, local_newton_step, run_localnewton
from .metrics import MetricsRow, RunMetrics, accuracy
from .newton import (CgConfig, LineSearchConfig, alpha_star, alpha_star_alt,
    armijo_backtrack, cg_solve)
from .objective import CurvatureBounds, ObjectiveModel, estimate_bounds
from .theory import (TheoryParams, check_descent_lemma, check_gradient_deviation,
    check_hessian_concentration, measure_error_floor, required_sample_size)

VERSION = '0.1.0'

__all__ = [x for x in set(globals()) if x not in _skip and not x.startswith('_')]
__all__.sort()
