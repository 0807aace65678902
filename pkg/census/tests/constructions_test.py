from unittest import skipUnless

from django.conf import settings
from django.test import SimpleTestCase

from census.constructions import (
    ConverterSpec,
    delta_family,
    ex1_converter,
    ex2_exchanger,
    get_converter,
    polya_2x2,
    psi33,
)
from census.exceptions import (
    BudgetExceeded,
    DimensionMismatch,
    EvenCharacteristic,
    PreconditionViolated,
    ZeroAlpha,
)
from census.gf import field_new
from census.matrix import FMatrix, det, parse_matrix, per
from census.services.verification_service import verify_converter


def wrong_polya(A):
    """Negates a22 instead of a12"""
    return A.replace(1, 1, A.ctx.neg(A[1, 1]))


class ConverterMapTestCase(SimpleTestCase):
    def setUp(self):
        self.gf3 = field_new(3)
        self.gf5 = field_new(5)
        self.gf7 = field_new(7)

    def test_polya_examples(self):
        identity = FMatrix.identity(self.gf5, 2)
        self.assertEqual(polya_2x2(identity).rows, ((1, 0), (0, 1)))
        ones = parse_matrix(self.gf5, "1,1;1,1")
        self.assertEqual(polya_2x2(ones).rows, ((1, 4), (1, 1)))
        self.assertEqual(det(polya_2x2(ones)), 2)
        with self.assertRaises(DimensionMismatch):
            polya_2x2(FMatrix.identity(self.gf5, 3))

    def test_psi33(self):
        zero = FMatrix.zeros(self.gf3, 3)
        self.assertEqual(psi33(zero), zero)
        A = parse_matrix(self.gf7, "1,2,3;4,5,6;1,1,0")
        self.assertEqual(psi33(A).rows, ((6, 2, 3), (4, 2, 6), (1, 1, 0)))
        self.assertEqual(psi33(psi33(A)), A)
        self.assertEqual(per(A), det(psi33(A)))
        with self.assertRaises(PreconditionViolated):
            psi33(FMatrix.identity(self.gf3, 3))

    def test_ex1(self):
        A = parse_matrix(self.gf7, "1,2,3;4,5,6;1,1,2")
        image = ex1_converter(A)
        self.assertEqual(image.n, 3)
        self.assertEqual(det(image), per(A))
        zero_per = parse_matrix(self.gf3, "1,1;1,2")
        self.assertEqual(det(ex1_converter(zero_per)), 0)

    def test_ex1_is_not_injective(self):
        A = parse_matrix(self.gf7, "1,0;0,1")
        B = parse_matrix(self.gf7, "0,1;1,0")
        self.assertNotEqual(A, B)
        self.assertEqual(ex1_converter(A), ex1_converter(B))

    def test_ex2_identity_input(self):
        image = ex2_exchanger(FMatrix.identity(self.gf5, 3), m=3)
        self.assertEqual(image.rows, ((1, 0, 0), (1, 1, 0), (0, 0, 1)))
        self.assertEqual(per(image), 1)
        self.assertEqual(det(image), 1)

    def test_ex2_exchanges(self):
        A = parse_matrix(self.gf7, "1,2,3;4,5,6;1,1,2")
        image = ex2_exchanger(A, m=4)
        self.assertEqual(image.n, 4)
        self.assertEqual(per(image), det(A))
        self.assertEqual(det(image), per(A))
        with self.assertRaises(DimensionMismatch):
            ex2_exchanger(A, m=1)

    def test_ex2_characteristic_two_fallback(self):
        gf2 = field_new(2)
        A = parse_matrix(gf2, "1,1;0,1")
        self.assertEqual(ex2_exchanger(A), A)
        padded = ex2_exchanger(A, m=3)
        self.assertEqual(padded.n, 3)
        self.assertEqual(per(padded), det(A))

    def test_delta_family(self):
        D = delta_family(self.gf5, 2, 1, 1, 1)
        self.assertEqual(D.rows, ((1, 0), (1, 1)))
        big = delta_family(self.gf7, 4, 3, 5, 2)
        self.assertEqual((per(big), det(big)), (3, 5))
        self.assertNotEqual(delta_family(self.gf5, 2, 2, 3, 1), delta_family(self.gf5, 2, 2, 3, 4))

    def test_delta_family_errors(self):
        with self.assertRaises(EvenCharacteristic):
            delta_family(field_new(2, 2), 2, 1, 1, 1)
        with self.assertRaises(ZeroAlpha):
            delta_family(self.gf5, 2, 1, 1, 0)
        with self.assertRaises(DimensionMismatch):
            delta_family(self.gf5, 1, 1, 1, 1)

    def test_registry(self):
        self.assertEqual(get_converter("ex2", n=3).m, 3)
        self.assertEqual(get_converter("psi33").domain_size(self.gf3), 3**8)
        self.assertEqual(get_converter("delta").domain_size(self.gf5), 100)
        with self.assertRaises(ValueError):
            get_converter("szego")
        self.assertTrue(all(get_converter(name).registered for name in ("polya2", "psi33", "ex1", "ex2", "delta")))


class VerificationTestCase(SimpleTestCase):
    def test_exhaustive_passes_over_gf3(self):
        gf3 = field_new(3)
        expected = {"polya2": 81, "psi33": 3**8, "ex1": 3**9, "ex2": 81, "delta": 18}
        for name, size in expected.items():
            report = verify_converter(get_converter(name), gf3, budget=2**36, backend="local")
            self.assertTrue(report.passed, f"{name}: {report.detail}")
            self.assertEqual(report.checked, size)

    def test_exhaustive_passes_over_gf5(self):
        gf5 = field_new(5)
        for name in ("polya2", "ex2", "delta"):
            report = verify_converter(get_converter(name), gf5, budget=2**36, backend="local")
            self.assertTrue(report.passed, name)
        self.assertEqual(
            verify_converter(get_converter("delta"), gf5, backend="local").checked, 100
        )

    def test_larger_sizes(self):
        gf3 = field_new(3)
        for spec in (get_converter("ex2", n=3, m=4), get_converter("delta", n=3), get_converter("ex1", n=2)):
            self.assertTrue(verify_converter(spec, gf3, backend="local").passed, spec.name)

    def test_random_mode(self):
        report = verify_converter(get_converter("ex2"), field_new(7), mode="random", trials=10_000, seed=3)
        self.assertTrue(report.passed)
        self.assertEqual(report.checked, 10_000)
        self.assertEqual(report.seed, 3)
        ex1 = verify_converter(get_converter("ex1", n=3), field_new(7), mode="random", trials=1000, seed=5)
        self.assertTrue(ex1.passed)

    def test_wrong_converter_is_caught(self):
        spec = ConverterSpec("wrong", 2, 2, wrong_polya)
        report = verify_converter(spec, field_new(3), backend="local")
        self.assertFalse(report.passed)
        self.assertIsNotNone(report.counterexample)
        self.assertIn("det", report.detail)
        A = parse_matrix(field_new(3), report.counterexample)
        self.assertNotEqual(per(A), det(wrong_polya(A)))
        random_report = verify_converter(spec, field_new(3), mode="random", trials=500, seed=1)
        self.assertFalse(random_report.passed)

    def test_parallel_sweep_finds_the_same_result(self):
        spec = get_converter("psi33")
        serial = verify_converter(spec, field_new(3), workers=1, backend="local")
        pooled = verify_converter(spec, field_new(3), workers=3, backend="local")
        self.assertTrue(serial.passed)
        self.assertTrue(pooled.passed)
        self.assertEqual(serial.checked, pooled.checked)

    def test_custom_spec_with_a_registered_name_is_checked_as_given(self):
        spec = ConverterSpec("polya2", 2, 2, wrong_polya)
        self.assertFalse(spec.registered)
        for backend in ("local", "celery"):
            report = verify_converter(spec, field_new(3), workers=3, backend=backend)
            self.assertFalse(report.passed, backend)
            A = parse_matrix(field_new(3), report.counterexample)
            self.assertNotEqual(per(A), det(wrong_polya(A)))

    def test_budget(self):
        with self.assertRaises(BudgetExceeded):
            verify_converter(get_converter("ex1", n=3), field_new(5), budget=10_000)

    def test_delta_in_characteristic_two(self):
        with self.assertRaises(EvenCharacteristic):
            verify_converter(get_converter("delta"), field_new(2), backend="local")

    @skipUnless(settings.PERMCENSUS_SLOW_TESTS, "set PERMCENSUS_SLOW_TESTS for GF(5) sweeps")
    def test_exhaustive_three_by_three_over_gf5(self):
        gf5 = field_new(5)
        for name in ("psi33", "ex1"):
            report = verify_converter(get_converter(name), gf5, workers=4, backend="local")
            self.assertTrue(report.passed, name)
