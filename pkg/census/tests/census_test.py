from unittest import skipUnless
from unittest.mock import MagicMock, patch

import numpy as np
from django.conf import settings
from django.test import SimpleTestCase

from census.exceptions import BudgetExceeded, RankOutOfRange
from census.formulas import bound_set, poly_Dn, poly_P3, poly_split3, poly_Vrk
from census.gf import field_new
from census.matrix import FMatrix, block_identity, det
from census.services.census_service import CensusService
from census.tasks import run_tally

slow = skipUnless(settings.PERMCENSUS_SLOW_TESTS, "set PERMCENSUS_SLOW_TESTS for long censuses")


def service(p, k=1, **kwargs):
    kwargs.setdefault("workers", 1)
    kwargs.setdefault("backend", "local")
    return CensusService(field_new(p, k), **kwargs)


class JointCensusTestCase(SimpleTestCase):
    def test_gf3_small_sizes(self):
        one = service(3).census_joint(1)
        self.assertEqual(one.summary, {"P_n": 1, "D_n": 1})
        two = service(3).census_joint(2)
        self.assertEqual(two.summary["P_n"], 33)
        self.assertEqual(two.total, 81)

    def test_gf3_three_by_three(self):
        report = service(3).census_joint(3)
        self.assertEqual(report.summary["P_n"], 8163)
        self.assertEqual(report.summary["D_n"], 8451)
        self.assertEqual(sum(report.counts.values()), 3**9)
        self.assertEqual(report.counts["per=0,det=0"] + report.counts.get("per=0,det=1", 0)
                         + report.counts.get("per=0,det=2", 0), 8163)

    def test_matches_closed_forms(self):
        for p, k, n in [(3, 1, 2), (5, 1, 2), (2, 2, 2), (3, 2, 2), (7, 1, 2)]:
            report = service(p, k).census_joint(n)
            q = p**k
            self.assertEqual(report.summary["D_n"], poly_Dn(n)(q))
            self.assertEqual(report.summary["P_n"], bound_set(n).U(q))

    def test_every_per_det_pair_occurs(self):
        """Every (lambda, mu) cell is nonempty in odd characteristic"""
        for p in (3, 5):
            for n in (2, 3):
                if p**(n * n) > 3**9:
                    continue
                report = service(p).census_joint(n)
                self.assertEqual(len(report.counts), p * p)

    def test_worker_count_does_not_change_counts(self):
        single = service(3, chunk_size=7).census_joint(2)
        pooled = service(3, workers=3, chunk_size=7).census_joint(2)
        self.assertEqual(single.counts, pooled.counts)
        self.assertEqual(pooled.workers, 3)

    def test_budget(self):
        with self.assertRaises(BudgetExceeded) as cm:
            service(5, budget=2**36).census_joint(4)
        self.assertEqual(cm.exception.required, 5**16)
        self.assertIn(str(5**16), str(cm.exception))

    @slow
    def test_gf5_three_by_three(self):
        report = service(5, workers=4).census_joint(3)
        self.assertEqual(report.summary["D_n"], poly_Dn(3)(5))
        self.assertEqual(report.summary["P_n"], poly_P3()(5))

    @slow
    def test_permanent_and_determinant_counts_differ(self):
        for p in (3, 5, 7):
            report = service(p, workers=4).census_joint(3)
            self.assertNotEqual(report.summary["P_n"], report.summary["D_n"])


class ValueClassTestCase(SimpleTestCase):
    def test_gf3_uniform_nonzero_classes(self):
        report = service(3).census_value_classes(3)
        self.assertEqual(report.counts["det=1"], 5616)
        self.assertEqual(report.counts["det=2"], 5616)
        self.assertEqual(report.counts["per=1"], report.counts["per=2"])
        self.assertEqual(report.summary, {"per_nonzero_uniform": 1, "det_nonzero_uniform": 1})

    def test_gf5_two_by_two(self):
        report = service(5).census_value_classes(2)
        dets = {report.counts[f"det={a}"] for a in range(1, 5)}
        pers = {report.counts[f"per={a}"] for a in range(1, 5)}
        self.assertEqual(len(dets), 1)
        self.assertEqual(len(pers), 1)

    def test_characteristic_two(self):
        report = service(2).census_value_classes(2)
        self.assertEqual(report.counts["per=0"], report.counts["det=0"])
        self.assertEqual(report.counts["per=1"], report.counts["det=1"])


class CompoundRankTestCase(SimpleTestCase):
    def test_gf3_two_by_two(self):
        report = service(3).census_Nr(2)
        self.assertEqual(report.by_rank, {0: 1, 1: 24, 2: 8})
        self.assertEqual(report.summary["P_m"], 33)

    def test_partition_of_zero_permanent_matrices(self):
        for p, m in [(5, 2), (3, 3)]:
            report = service(p).census_Nr(m)
            self.assertEqual(sum(report.by_rank.values()), (poly_P3() if m == 3 else bound_set(2).U)(p))

    def test_one_by_one(self):
        self.assertEqual(service(3).census_Nr(1).by_rank, {0: 0, 1: 1})


class BilinearCensusTestCase(SimpleTestCase):
    def test_gf3_examples(self):
        svc = service(3)
        self.assertEqual([svc.census_Vr(2, r).summary["V"] for r in range(3)], [81, 45, 33])

    def test_matches_formula(self):
        for p in (3, 5, 7):
            svc = service(p)
            for k in (1, 2, 3):
                values = [svc.census_Vr(k, r).summary["V"] for r in range(k + 1)]
                self.assertEqual(values, [poly_Vrk(k, r)(p) for r in range(k + 1)])
                self.assertTrue(all(a > b for a, b in zip(values, values[1:])))

    def test_any_form_of_the_same_rank(self):
        ctx = field_new(5)
        rng = np.random.Generator(np.random.PCG64(21))
        svc = service(5)
        for r in (1, 2):
            base = block_identity(ctx, r, 3)
            expected = svc.census_Vr(3, r).summary["V"]
            for _ in range(3):
                P = Q = None
                while P is None or det(P) == 0:
                    P = FMatrix.random(ctx, 3, rng)
                while Q is None or det(Q) == 0:
                    Q = FMatrix.random(ctx, 3, rng)
                report = svc.census_Vr(3, form=P.matmul(base).matmul(Q))
                self.assertEqual(report.summary["rank"], r)
                self.assertEqual(report.summary["V"], expected)

    def test_rank_out_of_range(self):
        with self.assertRaises(RankOutOfRange):
            service(3).census_Vr(2, 3)


class RecursionTestCase(SimpleTestCase):
    def test_small_cases(self):
        self.assertEqual(service(3).exact_Pn_by_recursion(2), 33)
        self.assertEqual(service(3).exact_Pn_by_recursion(3), 8163)
        self.assertEqual(service(5).exact_Pn_by_recursion(3), poly_Dn(3)(5) - 25 * 4**5)

    def test_agrees_with_joint_census(self):
        svc = service(3)
        self.assertEqual(svc.exact_Pn_by_recursion(3), svc.census_joint(3).summary["P_n"])

    def test_report_breakdown(self):
        report = service(3).recursion_report(3)
        self.assertEqual(report.summary["N0"], 1)
        self.assertEqual(report.summary["V2"], 33)
        self.assertEqual(report.counts["P_n"], 8163)

    @slow
    def test_gf3_four_by_four_both_ways(self):
        svc = service(3, workers=4)
        recursion = svc.exact_Pn_by_recursion(4)
        self.assertEqual(recursion, svc.census_joint(4).summary["P_n"])
        bounds = bound_set(4)
        self.assertLessEqual(bounds.L(3), recursion)

    @slow
    def test_four_by_four_sandwich(self):
        for p in (5, 7):
            exact = service(p, workers=4).exact_Pn_by_recursion(4)
            bounds = bound_set(4)
            self.assertLessEqual(bounds.L(p), exact)
            self.assertLessEqual(exact, bounds.U(p))


class SplitThreeTestCase(SimpleTestCase):
    def test_gf3_matches_closed_forms(self):
        report = service(3).census_split3()
        for name, poly in poly_split3().items():
            self.assertEqual(report.counts[name], poly(3), name)
        self.assertEqual(report.summary, {"D_n": 8451, "P_n": 8163})

    @slow
    def test_gf5_matches_closed_forms(self):
        report = service(5, workers=4).census_split3()
        for name, poly in poly_split3().items():
            self.assertEqual(report.counts[name], poly(5), name)


class SamplingTestCase(SimpleTestCase):
    def test_estimate_near_exact_value(self):
        estimate = service(3).sample_prob(3, "det", 0, 20_000, seed=1)
        exact = 8451 / 19683
        self.assertLess(abs(estimate.estimate - exact), 5 * estimate.standard_error)
        self.assertEqual(estimate.trials, 20_000)
        self.assertTrue(0 <= estimate.hits <= estimate.trials)

    def test_reproducible(self):
        first = service(5).sample_prob(3, "per", 2, 5000, seed=42)
        second = service(5).sample_prob(3, "per", 2, 5000, seed=42)
        self.assertEqual(first.hits, second.hits)
        pooled = service(5, workers=2).sample_prob(3, "per", 2, 5000, seed=42)
        again = service(5, workers=2).sample_prob(3, "per", 2, 5000, seed=42)
        self.assertEqual(pooled.hits, again.hits)

    def test_rejects_zero_trials(self):
        with self.assertRaises(ValueError):
            service(3).sample_prob(3, "det", 0, 0, seed=1)
        with self.assertRaises(ValueError):
            service(3).sample_prob(3, "trace", 0, 10, seed=1)

    @slow
    def test_large_field(self):
        estimate = service(101).sample_prob(4, "det", 0, 1_000_000, seed=7)
        exact = poly_Dn(4)(101) / 101**16
        self.assertLess(abs(estimate.estimate - exact), 5 * estimate.standard_error)


class CeleryBackendTestCase(SimpleTestCase):
    @patch("census.services.census_service.group")
    def test_chunks_are_dispatched_as_a_group(self, mock_group):
        """Each chunk becomes one tally_chunk signature; results are summed"""
        dispatched = []

        def collect(signatures):
            signatures = list(signatures)
            dispatched.extend(signatures)
            result = MagicMock()
            result.get.return_value = [run_tally(*sig.args) for sig in signatures]
            job = MagicMock()
            job.apply_async.return_value = result
            return job

        mock_group.side_effect = collect
        report = service(3, backend="celery", workers=4, chunk_size=20).census_joint(2)
        self.assertEqual(report.summary["P_n"], 33)
        self.assertEqual(len(dispatched), 5)
        self.assertEqual(dispatched[0].task, "census.tasks.tally_chunk")
        self.assertEqual(report.backend, "celery")

    def test_eager_execution(self):
        from permcensus.celery import app

        # The Django settings namespace shadows the plain key, so set both.
        keys = ("CELERY_TASK_ALWAYS_EAGER", "task_always_eager")
        previous = settings.CELERY_TASK_ALWAYS_EAGER
        app.conf.update({key: True for key in keys})
        try:
            self.assertTrue(app.conf.task_always_eager)
            report = service(3, backend="celery", workers=2, chunk_size=30).census_Nr(2)
        finally:
            app.conf.update({key: previous for key in keys})
        self.assertEqual(report.by_rank, {0: 1, 1: 24, 2: 8})
        self.assertEqual(report.backend, "celery")
