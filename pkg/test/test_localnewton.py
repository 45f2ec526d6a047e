'''
localnewton - local second-order optimization with model averaging

Released under the LGPL license version 2.1 and version 3 (you can choose
which you'd like to be bound under).
'''

from __future__ import print_function
from contextlib import redirect_stderr, redirect_stdout
import gzip
import io
import math
import os
import shutil
import sys
import tempfile
import unittest
import warnings

import numpy as np
from scipy import linalg

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), '..'))

from localnewton import cli, theory, util
from localnewton.adaptive import GIANT, AdaptiveState, adapt, run_adaptive
from localnewton.baselines import (GIANT_CANDIDATES, BfgsState, SgdConfig, bfgs_iteration,
    exact_step_rule, giant_iteration, local_sgd_round, run_bfgs, run_giant, run_local_sgd)
from localnewton.data import (Dataset, Partition, detect_profile, expand_pairwise, load_libsvm,
    make_synthetic, parse_libsvm, partition_uniform, write_libsvm)
from localnewton.exceptions import *
from localnewton.fabric import Cluster
from localnewton.harness import ExperimentConfig, build, compare, parse_config_text, run_experiment
from localnewton.local import (SyncSchedule, WorkerState, average_models, init_workers,
    local_newton_step, localnewton_round, run_localnewton)
from localnewton.metrics import RunMetrics, accuracy, read_csv
from localnewton.newton import (CgConfig, LineSearchConfig, alpha_star, alpha_star_alt,
    armijo_backtrack, cg_solve)
from localnewton.objective import CurvatureBounds, ObjectiveModel, estimate_bounds

def rel_err(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)

def logistic_problem(n=400, d=5, K=4, seed=0, gamma=.01):
    ds = make_synthetic(n, d, 'logistic', seed)[0]
    return ObjectiveModel(ds, 'logistic_l2', gamma), partition_uniform(n, K, seed)

def least_squares_problem(n=200, d=5, K=4, seed=0, gamma=0.0):
    ds = make_synthetic(n, d, 'least_squares', seed, noise=1.0)[0]
    return ObjectiveModel(ds, 'least_squares', gamma), partition_uniform(n, K, seed)

def normalized_logistic(n, d, seed=0):
    ds = make_synthetic(n, d, 'logistic', seed)[0]
    x = ds.features / np.linalg.norm(ds.features, axis=1)[:, None]
    return Dataset(x, ds.labels, True, 'normalized')

def tiny_least_squares():
    return ObjectiveModel(Dataset([[1.], [2.]], [1., 2.], False), 'least_squares')

def central_gradient(f, w, h):
    out = np.zeros_like(w)
    for i in range(len(w)):
        e = np.zeros_like(w)
        e[i] = h
        out[i] = (f(w + e) - f(w - e)) / (2 * h)
    return out

def run_cli(*argv):
    out = io.StringIO()
    err = io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = cli.main([str(a) for a in argv])
    return code, out.getvalue(), err.getvalue()


class TestData(unittest.TestCase):
    def test_parse_examples(self):
        ds = parse_libsvm("+1 1:0.5 3:2.0", d_hint=3)
        self.assertEqual(ds.labels.tolist(), [1.0])
        self.assertEqual(ds.features.tolist(), [[0.5, 0.0, 2.0]])

        ds = parse_libsvm("0 2:1.0", d_hint=2)
        self.assertEqual(ds.labels.tolist(), [-1.0])
        self.assertEqual(ds.features.tolist(), [[0.0, 1.0]])

        ds = parse_libsvm(b"# header\n-1 1:1\n\n2 2:3 # trailing\n")
        self.assertEqual(ds.labels.tolist(), [-1.0, 1.0])
        self.assertEqual(ds.d, 2)

    def test_parse_errors(self):
        for text, line in [("1 1:x", 1), ("1 1:1\n1 2:1 1:3", 2), ("1 4:1", 1), ("1 1:nan", 1),
                ("foo 1:1", 1), ("1 0:1", 1)]:
            try:
                parse_libsvm(text, d_hint=3)
            except ParseError as err:
                self.assertEqual(err.line, line, text)
            else:
                self.fail("no ParseError for %r"%(text,))

        with self.assertRaises(ParseError) as ctx:
            parse_libsvm(b"+1 1:1\n\xff 2:1\n")
        self.assertEqual((ctx.exception.line, ctx.exception.token), (2, b"\xff"))

    def test_write_then_parse(self):
        ds = make_synthetic(50, 7, 'logistic', seed=4)[0]
        out = io.BytesIO()
        write_libsvm(ds, out)
        back = parse_libsvm(out.getvalue(), d_hint=7)
        self.assertTrue(np.array_equal(back.features, ds.features))
        self.assertTrue(np.array_equal(back.labels, ds.labels))

        reg = make_synthetic(20, 3, 'least_squares', seed=4)[0]
        out = io.StringIO()
        write_libsvm(reg, out)
        back = parse_libsvm(out.getvalue(), d_hint=3, classification=False)
        self.assertTrue(np.array_equal(back.labels, reg.labels))

    def test_load_gzip_and_missing(self):
        tmp = tempfile.mkdtemp()
        try:
            path = os.path.join(tmp, 'w8a.t.gz')
            with gzip.open(path, 'wb') as out:
                out.write(b"+1 1:1 2:2\n-1 2:1\n")
            ds = load_libsvm(path)
            self.assertEqual(ds.name, 'w8a')
            self.assertEqual(ds.features.tolist(), [[1., 2.], [0., 1.]])
            self.assertRaises(DatasetError, lambda: load_libsvm(os.path.join(tmp, 'missing')))
        finally:
            shutil.rmtree(tmp)

    def test_dataset_validation(self):
        self.assertRaises(DatasetError, lambda: Dataset([[1.], [2.]], [1.]))
        self.assertRaises(DatasetError, lambda: Dataset([[np.nan]], [1.]))
        self.assertRaises(DatasetError, lambda: Dataset([[1.]], [.5]))
        Dataset([[1.]], [.5], classification=False)

    def test_expand_pairwise(self):
        ds = expand_pairwise(Dataset([[2., 3.]], [1.]))
        self.assertEqual(ds.features.tolist(), [[4., 6., 6., 9.]])
        self.assertEqual(expand_pairwise(Dataset([[1.]], [1.])).features.tolist(), [[1.]])

        wide = Dataset(np.ones((3, 54)), [1., -1., 1.])
        self.assertEqual(expand_pairwise(wide).d, 2916)
        self.assertRaises(DatasetError, lambda: expand_pairwise(wide, max_dim=1000))

    def test_partition(self):
        p = partition_uniform(6, 3, seed=11)
        self.assertEqual([len(s) for s in p.shards], [2, 2, 2])
        self.assertEqual(p.union().tolist(), list(range(6)))

        p = partition_uniform(7, 3, seed=2)
        self.assertEqual(p.shard_size, 2)
        self.assertEqual(len(p.dropped), 1)
        self.assertEqual(sorted(p.union().tolist() + p.dropped.tolist()), list(range(7)))

        self.assertEqual(partition_uniform(48000, 100, 0).shard_size, 480)
        self.assertRaises(DatasetError, lambda: partition_uniform(2, 3, 0))
        self.assertRaises(DatasetError, lambda: partition_uniform(5, 0, 0))

        for seed in range(20):
            p = partition_uniform(103, 10, seed)
            seen = np.concatenate(p.shards)
            self.assertEqual(len(set(seen.tolist())), 100)
            self.assertTrue(all(len(s) == 10 for s in p.shards))
            self.assertTrue(seen.min() >= 0 and seen.max() < 103)

        self.assertTrue(np.array_equal(partition_uniform(50, 5, 3).shards[2],
            partition_uniform(50, 5, 3).shards[2]))

    def test_synthetic_and_profiles(self):
        ds, w = make_synthetic(1000, 20, 'logistic', seed=5, margin=.1)
        self.assertTrue(np.all(ds.labels * ds.features.dot(w) / np.linalg.norm(w) >= .1))
        self.assertRaises(DatasetError, lambda: make_synthetic(0, 20))

        w8a = detect_profile('data/w8a.t.gz')
        self.assertEqual(w8a.sgd_step(480), 10. / 480)
        self.assertEqual(w8a.target_loss, .19)
        self.assertEqual(detect_profile('covtype').bfgs_step, 1.)
        self.assertEqual(detect_profile('EPSILON').bfgs_step, 10.)
        self.assertTrue(detect_profile('covtype').expand)
        self.assertIsNone(detect_profile('synth'))


class TestObjective(unittest.TestCase):
    def test_values(self):
        model, _ = logistic_problem(gamma=0.0)
        self.assertAlmostEqual(model.value(np.zeros(5)), math.log(2), places=12)
        self.assertAlmostEqual(model.value(np.zeros(5), np.arange(3)), math.log(2), places=12)

        one = ObjectiveModel(Dataset([[1.]], [1.]), 'logistic_l2')
        self.assertAlmostEqual(one.value(np.array([1.])), 0.313261687518223, places=12)

        ls = tiny_least_squares()
        self.assertEqual(ls.value(np.array([1.])), 0.0)
        self.assertEqual(ls.gradient(np.array([0.])).tolist(), [-5.0])

        reg = ObjectiveModel(Dataset([[1.]], [1.]), 'logistic_l2', gamma=2.)
        self.assertAlmostEqual(reg.value(np.array([1.])), 0.313261687518223 + 1., places=12)

    def test_gradient_at_zero(self):
        model, _ = logistic_problem(gamma=0.0)
        x, y = model.dataset.features, model.dataset.labels
        expect = -(y[:, None] * x).mean(axis=0) / 2
        self.assertLess(rel_err(model.gradient(np.zeros(5)), expect), 1e-12)

    def test_empty_subset(self):
        model, _ = logistic_problem()
        self.assertRaises(DatasetError, lambda: model.value(np.zeros(5), np.arange(0)))

    def test_hessian_vec_examples(self):
        one = ObjectiveModel(Dataset([[2.]], [1.]), 'logistic_l2')
        self.assertEqual(one.hessian_vec(np.zeros(1), np.array([3.])).tolist(), [3.0])
        model, _ = logistic_problem()
        self.assertEqual(model.hessian_vec(np.ones(5), np.zeros(5)).tolist(), [0.0] * 5)

    def test_finite_differences(self):
        rng = np.random.default_rng(7)
        for model in (logistic_problem(gamma=.05)[0], least_squares_problem(gamma=.1)[0]):
            for _ in range(20):
                w = rng.standard_normal(model.d)
                subset = np.sort(rng.choice(model.dataset.n, 60, replace=False))
                h = 1e-6 * (1 + np.linalg.norm(w))
                f = lambda v: model.value(v, subset)
                g = model.gradient(w, subset)
                self.assertLess(rel_err(central_gradient(f, w, h), g), 1e-5)

                v = rng.standard_normal(model.d)
                fd = (model.gradient(w + h * v, subset) - model.gradient(w - h * v, subset)) / (2 * h)
                hv = model.hessian_vec(w, v, subset)
                self.assertLess(rel_err(fd, hv), 1e-5)
                self.assertLess(rel_err(model.explicit_hessian(w, subset).dot(v), hv), 1e-10)

    def test_hessian_symmetry_and_convexity(self):
        model, _ = logistic_problem(gamma=.03)
        rng = np.random.default_rng(3)
        for _ in range(10):
            w, u, v = rng.standard_normal((3, model.d))
            a = u.dot(model.hessian_vec(w, v))
            b = v.dot(model.hessian_vec(w, u))
            self.assertLessEqual(abs(a - b), 1e-10 * max(abs(a), abs(b)))
            self.assertGreaterEqual(v.dot(model.hessian_vec(w, v)), .03 * v.dot(v) * (1 - 1e-12))

    def test_partition_mean(self):
        model, partition = logistic_problem(n=400, K=8, gamma=.02)
        w = np.linspace(-1, 1, model.d)
        parts = [model.value(w, shard) for shard in partition.shards]
        self.assertLess(abs(math.fsum(parts) / len(parts) - model.value(w)), 1e-12 * model.value(w))

    def test_bounds(self):
        model, _ = logistic_problem(gamma=.01)
        bounds = estimate_bounds(model, [np.zeros(model.d)])
        self.assertEqual(bounds.kappa, .01)
        self.assertLessEqual(bounds.M, bounds.B)

        one = ObjectiveModel(Dataset([[2., 0.]], [1.]), 'logistic_l2')
        bounds = estimate_bounds(one, [np.zeros(2)])
        self.assertAlmostEqual(bounds.B, 1.0, places=12)
        self.assertAlmostEqual(bounds.M, 1.0, places=5)
        self.assertLessEqual(bounds.M, bounds.B)

        self.assertRaises(BoundsError, lambda: CurvatureBounds(2., 1., 1., 1.))
        self.assertRaises(BoundsError, lambda: estimate_bounds(model, []))


class TestNewton(unittest.TestCase):
    def test_cg_examples(self):
        p, res, iters = cg_solve(lambda v: 2 * v, np.array([2., 4.]), CgConfig(1e-10))
        self.assertEqual(p.tolist(), [1., 2.])
        self.assertEqual(iters, 1)

        H = np.diag([1., 2., 3.])
        p, _, iters = cg_solve(H.dot, np.array([0., 5., 0.]))
        self.assertEqual(iters, 1)
        self.assertLess(rel_err(p, [0., 2.5, 0.]), 1e-15)

        p, res, iters = cg_solve(H.dot, np.zeros(3))
        self.assertEqual((p.tolist(), res, iters), ([0., 0., 0.], 0.0, 0))

    def test_cg_dense_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(5):
            A = rng.standard_normal((8, 8))
            H = A.dot(A.T) + np.eye(8)
            g = rng.standard_normal(8)
            p = cg_solve(H.dot, g, CgConfig(1e-12, 50))[0]
            self.assertLess(rel_err(p, linalg.solve(H, g)), 1e-8)

    def test_cg_errors(self):
        self.assertRaises(CGError, lambda: cg_solve(np.diag([1., -1.]).dot, np.array([1., 1.])))
        self.assertRaises(CGError, lambda: cg_solve(lambda v: v, np.array([np.inf, 1.])))
        self.assertEqual(CgConfig().iters_for(10), 10)
        self.assertEqual(CgConfig().iters_for(1000), 250)

    def test_armijo_examples(self):
        f = lambda w: .5 * float(w.dot(w))
        w = np.array([4.])
        self.assertEqual(armijo_backtrack(f, w, np.array([4.]), np.array([4.]), LineSearchConfig(.1)), 1.0)
        alpha = armijo_backtrack(f, w, np.array([40.]), np.array([4.]), LineSearchConfig(.45, shrink=.5))
        self.assertEqual(alpha, .0625)
        self.assertLessEqual(f(w - alpha * 40), f(w) - alpha * .45 * 160)

        self.assertRaises(DescentDirectionError,
            lambda: armijo_backtrack(f, w, np.array([-4.]), np.array([4.])))
        try:
            armijo_backtrack(lambda v: 1.0, w, np.array([1.]), np.array([1.]), LineSearchConfig(max_backtracks=3))
        except LineSearchError as err:
            self.assertEqual(err.alpha, .125)
        else:
            self.fail("expected LineSearchError")

    def test_armijo_cap(self):
        f = lambda w: .5 * float(w.dot(w))
        ls = LineSearchConfig(alpha_star_cap=.3)
        self.assertEqual(armijo_backtrack(f, np.array([4.]), np.array([4.]), np.array([4.]), ls), .3)

    def test_unit_step_on_quadratics(self):
        rng = np.random.default_rng(5)
        for d in range(1, 11):
            A = rng.standard_normal((d, d))
            H = A.dot(A.T) + .1 * np.eye(d)
            b = rng.standard_normal(d)
            f = lambda w: .5 * w.dot(H.dot(w)) - b.dot(w)
            w = rng.standard_normal(d)
            g = H.dot(w) - b
            p = linalg.solve(H, g)
            for beta in (.1, .25, .45):
                self.assertEqual(armijo_backtrack(f, w, p, g, LineSearchConfig(beta)), 1.0)

    def test_alpha_star(self):
        self.assertAlmostEqual(alpha_star(CurvatureBounds(1, 1, 1, 1), .5), 4. / 9, places=15)
        self.assertLess(alpha_star(CurvatureBounds(1e-9, 1, 1, 1), .1), 1e-8)
        for kappa, M in [(1., 1.), (.5, 1.), (.01, 100.), (2., 2.)]:
            self.assertLessEqual(alpha_star(CurvatureBounds(kappa, M, M, 1), .5), 1.0)
        self.assertRaises(BoundsError, lambda: alpha_star(CurvatureBounds(0, 0, 0, 0), .1))
        self.assertRaises(ConfigError, lambda: alpha_star(CurvatureBounds(1, 1, 1, 1), .6))

        bounds = CurvatureBounds(.1, 1, 1, 1)
        self.assertAlmostEqual(alpha_star_alt(bounds, .1, .5), 2 * .9 * .1 * .5 / 1.5, places=15)
        ls = LineSearchConfig().with_cap(bounds, 'alternative', .5)
        self.assertEqual(ls.alpha_star_cap, alpha_star_alt(bounds, .1, .5))
        self.assertEqual(LineSearchConfig().with_cap(bounds).alpha_star_cap, alpha_star(bounds, .1))
        self.assertRaises(ConfigError, lambda: LineSearchConfig().with_cap(bounds, 'alternative'))
        self.assertRaises(ConfigError, lambda: LineSearchConfig(beta=.7))
        self.assertRaises(ConfigError, lambda: LineSearchConfig(alpha_init=2.))


class TestLocalNewton(unittest.TestCase):
    def test_least_squares_step_is_exact(self):
        model = tiny_least_squares()
        state = local_newton_step(model, WorkerState.start(0, np.arange(2), [5.]))
        self.assertEqual(state.w.tolist(), [1.0])
        self.assertEqual(state.last_alpha, 1.0)

        again = local_newton_step(model, state)
        self.assertEqual(again.w.tolist(), [1.0])
        self.assertEqual(again.last_grad_norm, 0.0)

    def test_one_step_normal_equations(self):
        model, _ = least_squares_problem(n=50, d=5)
        x, y = model.dataset.features, model.dataset.labels
        state = local_newton_step(model, WorkerState.start(0, np.arange(50), np.zeros(5)),
            cg=CgConfig(1e-12))
        self.assertLess(rel_err(state.w, linalg.solve(x.T.dot(x), x.T.dot(y))), 1e-8)

    def test_logistic_step_decreases(self):
        ds = Dataset([[1., 2.], [-1., .5], [.3, -1.], [2., 1.]], [1., -1., 1., -1.])
        model = ObjectiveModel(ds, 'logistic_l2', .1)
        w = np.array([.5, -.5])
        state = local_newton_step(model, WorkerState.start(0, np.arange(4), w))
        self.assertLess(model.value(state.w), model.value(w))

    def test_average_models(self):
        states = [WorkerState.start(1, None, [3., 5.]), WorkerState.start(0, None, [1., 3.])]
        self.assertEqual(average_models(states).tolist(), [2., 4.])
        same = [WorkerState.start(k, None, [.1, .7, 1e9]) for k in range(7)]
        self.assertLess(rel_err(average_models(same), [.1, .7, 1e9]), 1e-15)

        rng = np.random.default_rng(2)
        vecs = rng.standard_normal((100, 6)) * 10 ** rng.uniform(-3, 3, (100, 1))
        got = average_models([WorkerState.start(k, None, v) for k, v in enumerate(vecs)])
        expect = [math.fsum(col) / 100 for col in vecs.T]
        self.assertLess(rel_err(got, expect), 1e-12)

        self.assertRaises(ValueError, lambda: average_models(
            [WorkerState.start(0, None, [1.]), WorkerState.start(1, None, [1., 2.])]))
        self.assertRaises(ValueError, lambda: average_models([]))

    def test_schedule(self):
        sched = SyncSchedule(3, 10)
        self.assertEqual(sched.rounds, 4)
        self.assertEqual(sched.blocks(), [3, 3, 3, 1])
        self.assertEqual(sched.sync_set, (0, 3, 6, 9))
        self.assertEqual(SyncSchedule.for_rounds(2, 5).T, 10)
        self.assertRaises(ConfigError, lambda: SyncSchedule(0, 10))

        model, partition = logistic_problem()
        metrics = run_localnewton(model, partition, sched)
        self.assertEqual([r.round for r in metrics.rows], [1, 2, 3, 4])
        self.assertEqual([r.local_iters for r in metrics.rows], [3, 6, 9, 10])

    def test_single_worker_is_centralized(self):
        model, partition = logistic_problem(n=300, K=1)
        for L in (1, 3):
            metrics = run_localnewton(model, partition, SyncSchedule.for_rounds(L, 3))
            state = WorkerState.start(0, partition.shards[0], np.zeros(model.d))
            for _ in range(3 * L):
                state = local_newton_step(model, state)
            self.assertTrue(np.array_equal(metrics.w_final, state.w))

    def test_workers_agree_after_sync(self):
        model, partition = logistic_problem()
        with Cluster(model, partition) as cluster:
            states = init_workers(partition, np.zeros(model.d))
            w_bar, states = localnewton_round(cluster, states, np.zeros(model.d), 2,
                LineSearchConfig(), CgConfig())
            self.assertEqual(cluster.rounds, 1)
        for s in states:
            self.assertTrue(np.array_equal(s.w, w_bar))

    def test_least_squares_stagnates(self):
        model, partition = least_squares_problem(n=200, d=4, K=4, seed=9)
        optima = []
        for shard in partition.shards:
            x, y = model.dataset.features[shard], model.dataset.labels[shard]
            optima.append(linalg.solve(x.T.dot(x), x.T.dot(y)))
        cg = CgConfig(1e-12)
        with Cluster(model, partition) as cluster:
            states = init_workers(partition, np.zeros(4))
            first, states = localnewton_round(cluster, states, np.zeros(4), 2, LineSearchConfig(), cg)
            second, states = localnewton_round(cluster, states, first, 2, LineSearchConfig(), cg)
        self.assertLess(rel_err(first, np.mean(optima, axis=0)), 1e-8)
        self.assertLess(rel_err(second, first), 1e-8)
        x, y = model.dataset.features, model.dataset.labels
        w_star = linalg.solve(x.T.dot(x), x.T.dot(y))
        self.assertGreater(model.value(first) - model.value(w_star), 0)

        ds, same = theory.identical_shards(model.dataset, 4, 50)
        point = theory.error_floor_point(ObjectiveModel(ds, 'least_squares'), same)
        self.assertLess(abs(point.gap), 1e-12)

    def test_first_sync_beats_start(self):
        model, partition = logistic_problem(n=200, d=5, K=4, seed=1)
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', LossIncreaseWarning)
            metrics = run_localnewton(model, partition, SyncSchedule.for_rounds(2, 8))
        f0 = model.value(np.zeros(model.d))
        losses = [r.train_loss for r in metrics.rows]
        self.assertLess(losses[0], f0)
        self.assertLess(max(losses), f0)
        # past the first sync the loss sits at the error floor and may rise a little
        self.assertLess(max(b - a for a, b in zip(losses, losses[1:])), 1e-2)

    def test_round_accounting(self):
        model, partition = logistic_problem()
        for L, T in ((1, 5), (2, 7), (4, 8)):
            with Cluster(model, partition) as cluster, warnings.catch_warnings():
                warnings.simplefilter('ignore', LossIncreaseWarning)
                metrics = run_localnewton(model, partition, SyncSchedule(L, T), cluster=cluster)
                self.assertEqual(cluster.rounds, -(-T // L))
            self.assertEqual([r.round for r in metrics.rows], list(range(1, -(-T // L) + 1)))
            self.assertEqual(metrics.rows[-1].local_iters, T)
            self.assertTrue(all(r.L == L for r in metrics.rows))


class TestAdaptive(unittest.TestCase):
    def test_adapt_examples(self):
        self.assertEqual(adapt(AdaptiveState(3, 1.0, .01, 'localnewton'), .999).L_current, 2)
        self.assertEqual(adapt(AdaptiveState(1, 1.0, .01, 'localnewton'), .999).phase, GIANT)
        new = adapt(AdaptiveState(3, 1.0, .01, 'localnewton'), .5)
        self.assertEqual((new.L_current, new.f_prev, new.phase), (3, .5, 'localnewton'))
        self.assertEqual(adapt(AdaptiveState(2, 1.0, .01, GIANT), 1.0).L_current, 2)

    def test_infinite_delta(self):
        model, partition = logistic_problem()
        metrics = run_adaptive(model, partition, L0=3, delta=float('inf'), budget=12)
        self.assertEqual([r.round for r in metrics.rows], [1, 2, 3, 6, 9, 12])
        self.assertEqual([r.L for r in metrics.rows], [3, 2, 1, 1, 1, 1])
        self.assertEqual([r.phase for r in metrics.rows], ['localnewton'] * 3 + ['giant'] * 3)
        self.assertEqual([e for _, e in metrics.events], ['L 3 -> 2', 'L 2 -> 1', 'switch to giant'])

    def test_tiny_delta(self):
        ds = make_synthetic(500, 10, 'logistic', seed=5)[0]
        tiled, partition = theory.identical_shards(ds, 4, 500)
        model = ObjectiveModel(tiled, 'logistic_l2', 1e-3)
        metrics = run_adaptive(model, partition, L0=3, delta=1e-300, budget=3)
        self.assertEqual([r.L for r in metrics.rows], [3, 3, 3])
        self.assertEqual([r.phase for r in metrics.rows], ['localnewton'] * 3)
        self.assertTrue(all(round == 3 for round, _ in metrics.events))

    def test_bad_inputs(self):
        model, partition = logistic_problem()
        self.assertRaises(ConfigError, lambda: run_adaptive(model, partition, L0=0))
        self.assertRaises(ConfigError, lambda: run_adaptive(model, partition, delta=-1.))

    def test_round_efficiency_on_large_shards(self):
        # 400 rows per worker in 10 dimensions, where local optima sit close to
        # the global one; thin shards (200 rows in 100 dimensions) lose to GIANT
        ds = make_synthetic(4000, 10, 'logistic', seed=3)[0]
        model = ObjectiveModel(ds, 'logistic_l2', 1. / ds.n)
        partition = partition_uniform(ds.n, 10, 0)
        giant = run_giant(model, partition, max_rounds=60)
        target = min(r.train_loss for r in giant.rows) + 1e-3
        adaptive = run_adaptive(model, partition, L0=3, budget=60)
        giant_rounds = giant.rounds_to(target)
        adaptive_rounds = adaptive.rounds_to(target)
        self.assertIsNotNone(adaptive_rounds)
        self.assertLessEqual(adaptive_rounds, .7 * giant_rounds)

        Ls = [r.L for r in adaptive.rows]
        self.assertEqual(Ls, sorted(Ls, reverse=True))
        self.assertEqual(adaptive.rows[-1].phase, GIANT)
        delta = adaptive.meta['delta']
        self.assertAlmostEqual(delta, 1e-4 * model.value(np.zeros(model.d)), places=15)
        by_round = dict((r.round, i) for i, r in enumerate(adaptive.rows))
        for round, _ in adaptive.events:
            i = by_round[round]
            prev = adaptive.rows[i - 1].train_loss if i else model.value(np.zeros(model.d))
            self.assertLess(prev - adaptive.rows[i].train_loss, delta)
        giant_rows = [r.round for r in adaptive.rows if r.phase == GIANT]
        self.assertTrue(all(b - a == 3 for a, b in zip(giant_rows, giant_rows[1:])))
        self.assertLessEqual(adaptive.final.train_loss, giant.final.train_loss + 1e-12)


class TestBaselines(unittest.TestCase):
    def test_giant_identical_shards(self):
        ds = make_synthetic(100, 4, 'logistic', seed=8)[0]
        tiled, partition = theory.identical_shards(ds, 4, 25)
        model = ObjectiveModel(tiled, 'logistic_l2', .01)
        w = np.zeros(4)
        local = model.restrict(partition.shards[0])
        p = cg_solve(local.hessian_operator(w), local.gradient(w))[0]
        w_new, rounds = giant_iteration(model, partition, w)
        self.assertEqual(rounds, 3)
        alpha = (w - w_new).dot(p) / p.dot(p)
        self.assertLess(min(abs(alpha - c) for c in GIANT_CANDIDATES), 1e-12)
        self.assertTrue(np.allclose(w - w_new, alpha * p, rtol=1e-12, atol=1e-15))

        lds = make_synthetic(100, 4, 'least_squares', seed=8)[0]
        tiled, partition = theory.identical_shards(lds, 4, 25)
        model = ObjectiveModel(tiled, 'least_squares')
        w_new, _ = giant_iteration(model, partition, np.zeros(4), cg=CgConfig(1e-12))
        x, y = tiled.features, tiled.labels
        self.assertLess(rel_err(w_new, linalg.solve(x.T.dot(x), x.T.dot(y))), 1e-8)

    def test_giant_rounds_and_descent(self):
        model, partition = logistic_problem(seed=2)
        for budget in (9, 10, 11):
            metrics = run_giant(model, partition, max_rounds=budget)
            self.assertEqual([r.round for r in metrics.rows], [3, 6, 9])
            self.assertEqual([r.local_iters for r in metrics.rows], [1, 2, 3])
        metrics = run_giant(model, partition, max_rounds=15)
        losses = [model.value(np.zeros(model.d))] + [r.train_loss for r in metrics.rows]
        for a, b in zip(losses, losses[1:]):
            self.assertLessEqual(b, a + 1e-12)

    def test_sgd(self):
        model, partition = least_squares_problem(n=40, d=3, K=1)
        cfg = SgdConfig(.01)
        states = local_sgd_round(model, partition, init_workers(partition, np.zeros(3)), cfg, seed=4)
        w = np.zeros(3)
        order = util.rng_stream(4, 'sgd', 0, 0, 0).permutation(40)
        for i in range(40):
            w -= .01 * model.gradient(w, order[i:i + 1])
        self.assertTrue(np.array_equal(states[0].w, w))

        flat = ObjectiveModel(Dataset(np.ones((8, 2)), np.zeros(8), False), 'least_squares')
        part = partition_uniform(8, 2, 0)
        states = local_sgd_round(flat, part, init_workers(part, np.zeros(2)), cfg)
        self.assertTrue(all(np.array_equal(s.w, np.zeros(2)) for s in states))

        with np.errstate(all='ignore'):
            self.assertRaises(SolverError, lambda: local_sgd_round(model, partition,
                init_workers(partition, np.zeros(3)), SgdConfig(1e9)))
        self.assertRaises(ConfigError, lambda: SgdConfig(0))

        metrics = run_local_sgd(*logistic_problem()[:2], cfg=SgdConfig(.5), max_rounds=4)
        self.assertEqual([r.round for r in metrics.rows], [1, 2, 3, 4])

    def test_bfgs(self):
        model, _ = logistic_problem()
        w0 = np.zeros(model.d)
        state = bfgs_iteration(model, None, BfgsState.start(model, w0), step_rule=lambda w, p, g: .1)
        self.assertTrue(np.array_equal(state.prev_w, w0 - .1 * model.gradient(w0)))

        state = BfgsState.start(model, w0)
        for _ in range(5):
            state = bfgs_iteration(model, None, state)
            h = state.inverse_hessian_approx
            self.assertLessEqual(np.abs(h - h.T).max(), 1e-10 * np.abs(h).max())

        quad, _ = least_squares_problem(n=20, d=6, seed=3)
        state = BfgsState.start(quad, np.zeros(6))
        g0 = np.linalg.norm(state.prev_grad)
        for _ in range(6):
            state = bfgs_iteration(quad, None, state, step_rule=exact_step_rule(quad))
        self.assertLess(np.linalg.norm(state.prev_grad), 1e-6 * g0)

        model, partition = logistic_problem()
        metrics = run_bfgs(model, partition, max_rounds=5)
        self.assertEqual([r.round for r in metrics.rows], [1, 2, 3, 4, 5])


class TestHarness(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        self.train = os.path.join(self.tmp, 'synth')
        ds = make_synthetic(1000, 20, 'logistic', seed=1, margin=.1)[0]
        with open(self.train, 'wb') as out:
            write_libsvm(ds, out)

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def test_accuracy(self):
        ds, w = make_synthetic(500, 5, 'logistic', seed=2, margin=.05)
        self.assertEqual(accuracy(w, ds), 1.0)
        self.assertEqual(accuracy(np.zeros(5), ds), float(np.mean(ds.labels == 1)))
        rng = np.random.default_rng(0)
        rand = Dataset(rng.standard_normal((10000, 5)), rng.choice([-1., 1.], 10000))
        self.assertLess(abs(accuracy(rng.standard_normal(5), rand) - .5), .02)
        self.assertRaises(DatasetError, lambda: accuracy(np.zeros(5), Dataset(np.zeros((0, 5)), [])))
        self.assertRaises(DatasetError, lambda: accuracy(np.zeros(4), ds))

    def test_metrics(self):
        m = RunMetrics({'algo': 'x'})
        m.append(1, 1, .5, None, .1, 1, 'giant')
        self.assertRaises(ValueError, lambda: m.append(1, 2, .4, None, .1, 1, 'giant'))
        self.assertRaises(DivergenceError, lambda: m.append(2, 2, np.nan, None, .1, 1, 'giant'))
        m.append(3, 2, .3, .75, .1, 1, 'giant')
        self.assertEqual(m.rounds_to(.4), 3)
        self.assertIsNone(m.rounds_to(.1))
        path = os.path.join(self.tmp, 'm.csv')
        with open(path, 'w') as out:
            out.write(m.to_csv())
        meta, rows = read_csv(path)
        self.assertEqual(meta['algo'], 'x')
        self.assertEqual(rows, m.rows)

    def test_config(self):
        items = parse_config_text("# comment\nalgo=giant\n\nmax-rounds = 9\n")
        cfg = ExperimentConfig(**items)
        self.assertEqual((cfg.algo, cfg.max_rounds), ('giant', 9))
        self.assertRaises(ConfigError, lambda: parse_config_text("bogus=1"))
        self.assertRaises(ConfigError, lambda: parse_config_text("algo"))
        self.assertRaises(ConfigError, lambda: ExperimentConfig(algo='newton'))
        self.assertRaises(ConfigError, lambda: ExperimentConfig(k='many'))
        self.assertRaises(ConfigError, lambda: ExperimentConfig(bogus=1))

        base = ExperimentConfig(train='a')
        self.assertEqual(base.config_hash, ExperimentConfig(train='a', threads=8).config_hash)
        self.assertEqual(base.config_hash, ExperimentConfig(train='a', k='100').config_hash)
        self.assertNotEqual(base.config_hash, base.replace(seed=1).config_hash)
        self.assertNotEqual(base.config_hash, base.replace(beta=.2).config_hash)
        self.assertTrue(ExperimentConfig(expand='yes').expand)

    def test_determinism(self):
        texts = []
        for threads in (1, 4, 1):
            cfg = ExperimentConfig(algo='localnewton', train=self.train, k=8, l=2, max_rounds=5,
                threads=threads)
            out = io.StringIO()
            run_experiment(cfg, out)
            texts.append(out.getvalue())
        self.assertEqual(texts[0], texts[1])
        self.assertEqual(texts[0], texts[2])

    def test_giant_budget_and_separable(self):
        cfg = ExperimentConfig(algo='giant', train=self.train, test=self.train, k=4, max_rounds=9)
        metrics = run_experiment(cfg)
        self.assertEqual(len(metrics.rows), 3)
        metrics = run_experiment(cfg.replace(max_rounds=60))
        self.assertEqual(metrics.rows[-1].test_acc, 1.0)

    def test_compare(self):
        cfg = ExperimentConfig(train=self.train, k=1, max_rounds=9, algos='localnewton,giant')
        target, results = compare(cfg, target_loss=-1.)
        self.assertEqual([r.rounds for r in results], [None, None])
        self.assertEqual([r.ratio for r in results], [None, None])
        ln, giant = [r.metrics for r in results]
        self.assertEqual([r.round for r in ln.rows], [r.local_iters for r in ln.rows])
        self.assertEqual([r.round for r in giant.rows], [3 * r.local_iters for r in giant.rows])
        self.assertRaises(ConfigError, lambda: compare(cfg.replace(algos='giant')))
        self.assertRaises(ConfigError, lambda: compare(cfg))


class TestTheory(unittest.TestCase):
    def test_sample_sizes(self):
        bounds = CurvatureBounds(.1, 1., 1., 1.)
        base = theory.required_sample_size(bounds, .5, .1, 10)
        self.assertEqual(base, 848)
        quarter = theory.required_sample_size(bounds, .25, .1, 10)
        self.assertLessEqual(abs(quarter - 4 * base), 4)
        halved = theory.required_sample_size(bounds, .5, .05, 10)
        self.assertLessEqual(abs(halved - base - 160 * math.log(2)), 1)
        self.assertGreater(theory.required_sample_size(bounds, .5, .1, 10, K=16), base)
        self.assertEqual(theory.gradient_sample_size(2., .5, 1., .1, 10),
            int(math.ceil(16 * math.log(100))))
        self.assertGreater(theory.chernoff_failure_bound(bounds, .5, 100, 10),
            theory.chernoff_failure_bound(bounds, .5, 1000, 10))

    def test_params(self):
        bounds = CurvatureBounds(.1, 1., 2., 3.)
        p = theory.TheoryParams.derive(bounds, .5, .01, .1, 100, .1, K=4)
        a = alpha_star(bounds, .1)
        psi = a * .1 / (1. * 1.5)
        eta = (1 + math.sqrt(2 * math.log(10))) * 3 / 10.
        C1 = .5 * psi / 2 - .01 / (.1 * .5)
        C2 = psi * .5 / 2
        expect = dict(psi=psi, eta=eta, C1=C1, C2=C2, rho1=1 - .2 * C1, rho2=1 - .2 * C2,
            C_local_a=psi - (1 - .1 * .25) / (2 * 4 * .01 * .25), C_local_b=psi * .125 / 2)
        for name, value in expect.items():
            self.assertLessEqual(abs(getattr(p, name) - value), 1e-12 * abs(value), name)
        self.assertAlmostEqual(p.floor_for(3), 3 * p.floor_l1, places=12)
        self.assertRaises(ConfigError, lambda: theory.TheoryParams.derive(bounds, .7, .01, .1, 100, .1))
        self.assertRaises(BoundsError, lambda: theory.TheoryParams.derive(
            CurvatureBounds(0, 1, 1, 1), .5, .01, .1, 100, .1))

    def test_exceeds_rate(self):
        self.assertFalse(theory.exceeds_rate(0, 500, .1))
        self.assertFalse(theory.exceeds_rate(55, 500, .1))
        self.assertTrue(theory.exceeds_rate(100, 500, .1))

    def test_hessian_concentration(self):
        ds = normalized_logistic(2000, 10)
        model = ObjectiveModel(ds, 'logistic_l2', .1)
        w = np.zeros(10)
        bounds = estimate_bounds(model, [w])
        self.assertEqual(theory.check_hessian_concentration(model, w, 2000, 3, .5, 0, bounds), 0.0)

        s = theory.required_sample_size(bounds, .5, .1, 10)
        self.assertLessEqual(s, ds.n)
        rate = theory.check_hessian_concentration(model, w, s, 500, .5, 1, bounds)
        self.assertFalse(theory.exceeds_rate(int(round(rate * 500)), 500, .1))

        self.assertGreater(theory.check_hessian_concentration(model, w, 1, 100, .05, 2, bounds), .9)

        rates = [theory.check_hessian_concentration(model, w, s, 100, .1, 3, bounds) for s in (5, 40, 320)]
        self.assertGreaterEqual(rates[0], rates[1] - .05)
        self.assertGreaterEqual(rates[1], rates[2] - .05)
        self.assertGreater(rates[0], rates[2])

        self.assertRaises(ConfigError, lambda: theory.check_hessian_concentration(model, w, 2001, 1, .5, 0))
        self.assertRaises(ConfigError, lambda: theory.check_hessian_concentration(model, w, 20, 0, .5, 0))
        self.assertRaises(ConfigError, lambda: theory.gradient_deviation_trials(model, w, 20, 0, 0))
        partition = partition_uniform(ds.n, 4, 0)
        self.assertRaises(ConfigError, lambda: theory.theory_report(model, partition, trials=0))

        job = theory.iter_hessian_concentration(model, w, 20, 3, .5, 0, bounds)
        with redirect_stdout(io.StringIO()) as out:
            last = util.show_progress(job)
        self.assertIn("100.0% complete", out.getvalue())
        self.assertEqual(len(last), 3)
        self.assertLessEqual(last[0], last[1])

    def test_gradient_deviation(self):
        n = 2 ** 15
        model = ObjectiveModel(make_synthetic(n, 10, 'logistic', seed=6)[0], 'logistic_l2', 1. / n)
        w = np.zeros(10)
        self.assertTrue(np.all(theory.gradient_deviation_trials(model, w, n, 5, 0) == 0))
        s_values = [2 ** i for i in range(5, 13)]
        stats = theory.check_gradient_deviation(model, w, s_values, 200, 0)
        slope = theory.loglog_slope(s_values, [st.quantile95_dev for st in stats])
        self.assertTrue(-.65 <= slope <= -.35, slope)
        Gamma = float(model.sample_gradient_norms(w).max())
        for st in stats:
            self.assertLessEqual(st.quantile95_dev, theory.eta_bound(st.s, .05, Gamma))
            self.assertLessEqual(st.mean_dev, st.quantile95_dev)

    def test_descent_lemma(self):
        model, partition = logistic_problem(n=3200, d=20, K=16, seed=4)
        w = np.zeros(20)
        bounds = estimate_bounds(model, [w])
        checks = theory.check_descent_lemma(model, partition, w, LineSearchConfig().with_cap(bounds))
        self.assertEqual(len(checks), 16)
        self.assertTrue(all(c.ok for c in checks), [c.margin for c in checks if not c.ok])

        model, partition = least_squares_problem(n=200, d=5, K=4)
        bounds = estimate_bounds(model, [w[:5]])
        checks = theory.check_descent_lemma(model, partition, w[:5], LineSearchConfig().with_cap(bounds))
        self.assertTrue(all(c.ok and c.decrease > 0 for c in checks))

        model = tiny_least_squares()
        bounds = estimate_bounds(model, [np.ones(1)])
        part = Partition((np.arange(2),), 1, 2, np.arange(0))
        check, = theory.check_descent_lemma(model, part, np.ones(1), LineSearchConfig().with_cap(bounds))
        self.assertEqual((check.decrease, check.psi_bound, check.ok), (0.0, 0.0, True))

        self.assertRaises(ConfigError, lambda: theory.check_descent_lemma(model, part, np.ones(1),
            LineSearchConfig()))

    def test_error_floor(self):
        s_values = [2 ** i for i in range(6, 12)]
        s_values, gaps, params, loss_slope, param_slope, rho = theory.summarize_error_floor(
            4, s_values, range(10))
        self.assertTrue(np.all(gaps > 0))
        self.assertTrue(-1.4 <= param_slope <= -.6, param_slope)
        self.assertTrue(-2.8 <= loss_slope <= -1.2, loss_slope)
        self.assertGreaterEqual(rho, .9)

        for point in theory.measure_error_floor(4, [64, 256], 0, identical=True):
            self.assertLess(abs(point.gap), 1e-12)

        singular = ObjectiveModel(Dataset([[1., 1.], [2., 2.], [3., 3.]], [1., 2., 3.], False),
            'least_squares')
        part = Partition((np.arange(3),), 1, 3, np.arange(0))
        self.assertRaises(SingularSystemError, lambda: theory.error_floor_point(singular, part))
        self.assertRaises(ConfigError, lambda: theory.error_floor_point(singular, part, L=1))


class TestCli(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        self.train = os.path.join(self.tmp, 'synth')
        code, out, _ = run_cli('gen-synth', '--n', 2000, '--d', 10, '--seed', 3, '--out', self.train)
        self.assertEqual(code, 0)
        self.assertIn('n=2000 d=10', out)

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def test_gen_synth(self):
        again = os.path.join(self.tmp, 'again')
        run_cli('gen-synth', '--n', 2000, '--d', 10, '--seed', 3, '--out', again)
        with open(self.train, 'rb') as a, open(again, 'rb') as b:
            self.assertEqual(a.read(), b.read())
        self.assertEqual(run_cli('gen-synth', '--n', 0, '--d', 10, '--out', again)[0], 2)

        sep = os.path.join(self.tmp, 'sep')
        run_cli('gen-synth', '--n', 1000, '--d', 20, '--margin', .1, '--out', sep)
        ds = load_libsvm(sep)
        self.assertEqual((ds.n, ds.d), (1000, 20))

    def test_run(self):
        code, _, err = run_cli('run', '--algo', 'giant', '--max-rounds', 9)
        self.assertEqual(code, 2)
        self.assertIn('train', err)

        code, _, _ = run_cli('run', '--algo', 'giant', '--train', self.train, '--k', 4,
            '--max-rounds', 9, '--beta', .2, '--output-dir', self.tmp)
        self.assertEqual(code, 0)
        meta, rows = read_csv(os.path.join(self.tmp, 'giant_synth_0.csv'))
        self.assertEqual(len(rows), 3)
        self.assertEqual(float(meta['beta']), .2)
        self.assertEqual(meta['K'], '4')

        code, _, _ = run_cli('run', '--algo', 'adaptive', '--train', self.train, '--k', 4,
            '--l0', 3, '--max-rounds', 30, '--output-dir', self.tmp)
        self.assertEqual(code, 0)
        _, rows = read_csv(os.path.join(self.tmp, 'adaptive_synth_0.csv'))
        phases = [r.phase for r in rows]
        self.assertEqual(phases[0], 'localnewton')
        self.assertEqual(phases[-1], 'giant')

        self.assertEqual(run_cli('run', '--train', os.path.join(self.tmp, 'nope'))[0], 2)
        with self.assertRaises(SystemExit) as ctx:
            run_cli('run', '--bogus', 1)
        self.assertEqual(ctx.exception.code, 2)

    def test_config_file(self):
        path = os.path.join(self.tmp, 'exp.cfg')
        with open(path, 'w') as out:
            out.write("algo=bfgs\ntrain=%s\nk=4\nmax_rounds=7\n"%(self.train,))
        code, _, _ = run_cli('run', '--config', path, '--max-rounds', 4, '--output-dir', self.tmp)
        self.assertEqual(code, 0)
        meta, rows = read_csv(os.path.join(self.tmp, 'bfgs_synth_0.csv'))
        self.assertEqual(len(rows), 4)
        self.assertEqual(meta['algo'], 'bfgs')

        with open(path, 'w') as out:
            out.write("algorithm=bfgs\n")
        self.assertEqual(run_cli('run', '--config', path)[0], 2)

    def test_runtime_error(self):
        reg = os.path.join(self.tmp, 'reg')
        run_cli('gen-synth', '--n', 200, '--d', 5, '--task', 'least_squares', '--out', reg)
        with np.errstate(all='ignore'), warnings.catch_warnings():
            warnings.simplefilter('ignore')
            code, _, err = run_cli('run', '--algo', 'local_sgd', '--task', 'least_squares',
                '--train', reg, '--k', 2, '--sgd-step', 1e6, '--output-dir', self.tmp)
        self.assertEqual(code, 3)
        self.assertIn('round', err)

    def test_compare(self):
        code, out, _ = run_cli('compare', '--train', self.train, '--k', 4, '--max-rounds', 6,
            '--algos', 'localnewton,giant', '--target-loss', -1, '--output-dir', self.tmp)
        self.assertEqual(code, 0)
        rows = [line.split() for line in out.splitlines()[2:4]]
        self.assertEqual([row[0] for row in rows], ['localnewton', 'giant'])
        self.assertEqual([row[1:3] for row in rows], [['—', '—'], ['—', '—']])
        with open(os.path.join(self.tmp, 'compare_synth_0.csv')) as inp:
            lines = [l for l in inp if not l.startswith('#')]
        self.assertEqual(lines[0].strip(), 'algo,round,local_iters,train_loss,test_acc,grad_norm,L,phase')
        self.assertEqual(len(lines), 1 + 6 + 2)
        self.assertEqual(run_cli('compare', '--train', self.train, '--algos', 'giant')[0], 2)

    def test_undecodable_dataset(self):
        path = os.path.join(self.tmp, 'bad')
        with open(path, 'wb') as out:
            out.write(b"+1 1:1\n\xff 2:1\n")
        code, _, err = run_cli('run', '--train', path, '--k', 1, '--output-dir', self.tmp)
        self.assertEqual(code, 2)
        self.assertIn('line 2', err)

    def test_profile_expansion(self):
        path = os.path.join(self.tmp, 'covtype')
        with open(path, 'wb') as out:
            write_libsvm(make_synthetic(40, 3, 'logistic', seed=1)[0], out)
        with self.assertLogs('localnewton.harness', 'INFO') as logs:
            experiment = build(ExperimentConfig(train=path, k=2))
        self.assertEqual(experiment.model.d, 9)
        self.assertEqual(experiment.profile.name, 'covtype')
        self.assertTrue(any('published split' in line for line in logs.output))
        self.assertEqual(build(ExperimentConfig(train=self.train, k=2)).model.d, 10)

    def test_theory(self):
        code, out, _ = run_cli('theory', '--train', self.train, '--k', 4, '--trials', 20,
            '--output-dir', self.tmp)
        self.assertEqual(code, 0)
        self.assertIn('capped descent: 0 of 4 workers failed', out)
        self.assertTrue(os.path.exists(os.path.join(self.tmp, 'theory_synth_0.csv')))
        self.assertEqual(run_cli('theory', '--train', self.train, '--epsilon', 2)[0], 2)
        code, _, err = run_cli('theory', '--train', self.train, '--trials', 0)
        self.assertEqual(code, 2)
        self.assertIn('--trials', err)


def main():
    unittest.main()


if __name__ == '__main__':
    main()
