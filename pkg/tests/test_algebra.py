#!/usr/bin/env python3
"""
Unit tests for coc_algebra.py
Parsing, validation, brackets, subspace calculus and quotients
"""

import unittest
import sys
import os

import numpy as np

# Add parent directory to path to import coc modules
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from coc_algebra import (
    LieAlgebra,
    Subspace,
    ad,
    annihilates,
    bracket,
    bracket_subspaces,
    centre,
    change_basis,
    coad,
    derived_series,
    generated_ideal,
    is_ideal,
    lower_central_series,
    parse_number,
    quotient,
    to_raw,
    validate_algebra,
)
from coc_catalog import catalog_get, catalog_names
from coc_errors import (
    AlgebraFormatError,
    AntisymmetryViolation,
    DimensionMismatch,
    IndexOutOfRange,
    JacobiViolation,
    NotAnIdeal,
)


def algebra(name):
    return catalog_get(name).algebra


def table(brackets, dim=3):
    return {"name": "t", "dim": dim, "basis": [f"e{i + 1}" for i in range(dim)], "brackets": brackets}


class TestValidation(unittest.TestCase):
    """Structure-constant tables are parsed and checked"""

    def test_catalog_tables_validate(self):
        for name in catalog_names():
            g = algebra(name)
            self.assertLess(g.jacobi_residual, g.tol.alg_threshold(g.c), name)

    def test_jacobi_violation_names_triple(self):
        broken = table([
            {"i": 0, "j": 1, "terms": [{"k": 0, "c": 1}]},
            {"i": 1, "j": 2, "terms": [{"k": 1, "c": 1}]},
            {"i": 0, "j": 2, "terms": [{"k": 2, "c": -1}]},
        ])
        with self.assertRaises(JacobiViolation) as ctx:
            validate_algebra(broken)
        self.assertIn("Jacobi", ctx.exception.message)
        self.assertEqual(ctx.exception.details["triple"], [0, 1, 2])

    def test_conflicting_mirror_entries(self):
        raw = table([
            {"i": 0, "j": 1, "terms": [{"k": 2, "c": 1}]},
            {"i": 1, "j": 0, "terms": [{"k": 2, "c": 1}]},
        ])
        with self.assertRaises(AntisymmetryViolation):
            validate_algebra(raw)

    def test_consistent_mirror_entries_accepted(self):
        raw = table([
            {"i": 0, "j": 1, "terms": [{"k": 2, "c": 1}]},
            {"i": 1, "j": 0, "terms": [{"k": 2, "c": -1}]},
        ])
        g = validate_algebra(raw)
        self.assertEqual(g.c[1, 0, 2], -1.0)

    def test_nonzero_self_bracket(self):
        with self.assertRaises(AntisymmetryViolation):
            validate_algebra(table([{"i": 0, "j": 0, "terms": [{"k": 1, "c": 1}]}]))

    def test_index_out_of_range(self):
        with self.assertRaises(IndexOutOfRange):
            validate_algebra(table([{"i": 0, "j": 1, "terms": [{"k": 5, "c": 1}]}]))
        with self.assertRaises(IndexOutOfRange):
            validate_algebra(table([{"i": 0, "j": 3, "terms": [{"k": 1, "c": 1}]}]))

    def test_format_errors(self):
        with self.assertRaises(AlgebraFormatError):
            validate_algebra({"name": "t", "dim": 2})
        with self.assertRaises(AlgebraFormatError):
            validate_algebra({"name": "t", "dim": 2, "basis": ["a"]})
        with self.assertRaises(AlgebraFormatError):
            validate_algebra(table([
                {"i": 0, "j": 1, "terms": [{"k": 2, "c": 1}]},
                {"i": 0, "j": 1, "terms": [{"k": 2, "c": 1}]},
            ]))
        with self.assertRaises(AlgebraFormatError):
            validate_algebra(table([{"i": 0, "j": 1, "terms": [{"k": 2, "c": 1}, {"k": 2, "c": 3}]}]))
        with self.assertRaises(AlgebraFormatError):
            validate_algebra({"name": "t", "dim": True, "basis": ["a"]})

    def test_decimal_and_rational_coefficients(self):
        self.assertEqual(parse_number("1/2"), 0.5)
        self.assertEqual(parse_number("-0.25"), -0.25)
        self.assertEqual(parse_number(3), 3.0)
        with self.assertRaises(AlgebraFormatError):
            parse_number("two")
        with self.assertRaises(AlgebraFormatError):
            parse_number(True)

    def test_serialization_keeps_constants(self):
        g = algebra("se3")
        again = validate_algebra(to_raw(g))
        self.assertTrue(np.array_equal(g.c, again.c))
        self.assertEqual(again.basis, g.basis)

    def test_from_constants_checks_shape(self):
        with self.assertRaises(DimensionMismatch):
            LieAlgebra.from_constants("bad", ["a", "b"], np.zeros((3, 3, 3)))


class TestBracket(unittest.TestCase):
    """Bracket, ad and coad operators"""

    def test_heisenberg_bracket(self):
        g = algebra("heisenberg3")
        self.assertTrue(np.allclose(bracket(g, [1, 0, 0], [0, 1, 0]), [0, 0, 1]))
        self.assertTrue(np.allclose(bracket(g, [0, 1, 0], [1, 0, 0]), [0, 0, -1]))

    def test_ad_matches_bracket(self):
        g = algebra("su2+sl2R")
        rng = np.random.default_rng(1)
        for _ in range(20):
            x, y = rng.standard_normal((2, g.dim))
            self.assertTrue(np.allclose(ad(g, x) @ y, bracket(g, x, y)))

    def test_coad_is_negative_transpose(self):
        rng = np.random.default_rng(2)
        for name in catalog_names():
            g = algebra(name)
            x = rng.standard_normal(g.dim)
            self.assertTrue(np.array_equal(coad(g, x), -ad(g, x).T), name)

    def test_jacobi_on_random_triples(self):
        rng = np.random.default_rng(3)
        for name in catalog_names():
            g = algebra(name)
            for _ in range(100):
                x, y, z = rng.standard_normal((3, g.dim))
                total = (bracket(g, x, bracket(g, y, z)) + bracket(g, y, bracket(g, z, x))
                         + bracket(g, z, bracket(g, x, y)))
                scale = 1.0 + np.linalg.norm(x) * np.linalg.norm(y) * np.linalg.norm(z)
                self.assertLess(np.max(np.abs(total)), g.tol.alg_threshold(g.c) * scale, name)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            bracket(algebra("su2"), [1, 0], [0, 1, 0])


class TestSubspaces(unittest.TestCase):
    """Canonical bases and subspace operations"""

    def test_aligned_span_gets_aligned_basis(self):
        s = Subspace.span(np.array([[0.0], [0.0], [2.0]]))
        self.assertTrue(np.array_equal(s.basis, np.array([[0.0], [0.0], [1.0]])))

    def test_span_drops_dependent_columns(self):
        s = Subspace.span(np.array([[1.0, 2.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]]))
        self.assertEqual(s.dim, 2)
        self.assertEqual(Subspace.span(np.zeros((3, 2))).dim, 0)

    def test_intersect_and_sum(self):
        eye = np.eye(3)
        a = Subspace.span(eye[:, :2])
        b = Subspace.span(eye[:, 1:])
        self.assertTrue(a.intersect(b).equals(Subspace.span(eye[:, 1:2])))
        self.assertEqual(a.sum(b).dim, 3)
        self.assertEqual(a.intersect(Subspace.zero(3)).dim, 0)

    def test_complement(self):
        a = Subspace.span(np.array([[1.0], [1.0], [0.0]]))
        rest = a.complement()
        self.assertEqual(rest.dim, 2)
        self.assertLess(np.max(np.abs(a.basis.T @ rest.basis)), 1e-12)

    def test_bracket_subspaces_monotone(self):
        g = algebra("su2+heisenberg3")
        rng = np.random.default_rng(4)
        for _ in range(20):
            small = Subspace.span(rng.standard_normal((g.dim, 2)))
            large = small.sum(Subspace.span(rng.standard_normal((g.dim, 1))))
            other = Subspace.span(rng.standard_normal((g.dim, 2)))
            inner = bracket_subspaces(g, small, other)
            outer = bracket_subspaces(g, large, other)
            self.assertLess(outer.residual(inner.basis), 1e-9)


class TestSeriesAndIdeals(unittest.TestCase):
    """Derived series, lower central series, centre, generated ideals"""

    def test_derived_series(self):
        self.assertEqual([s.dim for s in derived_series(algebra("heisenberg3"))], [3, 1, 0])
        self.assertEqual([s.dim for s in derived_series(algebra("su2"))], [3])
        self.assertEqual([s.dim for s in derived_series(algebra("aff1"))], [2, 1, 0])

    def test_lower_central_series(self):
        self.assertEqual([s.dim for s in lower_central_series(algebra("heisenberg3"))], [3, 1, 0])
        self.assertEqual([s.dim for s in lower_central_series(algebra("aff1"))], [2, 1])

    def test_centre(self):
        z = centre(algebra("heisenberg3"))
        self.assertTrue(z.equals(Subspace.span(np.array([[0.0], [0.0], [1.0]]))))
        self.assertEqual(centre(algebra("su2")).dim, 0)
        self.assertEqual(centre(algebra("sl2R+R")).dim, 1)

    def test_generated_ideal(self):
        g = algebra("su2+sl2R")
        ideal = generated_ideal(g, Subspace.span(np.eye(6)[:, :1]))
        self.assertTrue(ideal.equals(Subspace.span(np.eye(6)[:, :3])))
        self.assertTrue(is_ideal(g, ideal))

    def test_annihilates(self):
        g = algebra("heisenberg3")
        z = Subspace.span(np.array([[0.0], [0.0], [1.0]]))
        self.assertTrue(annihilates(np.array([1.0, 0.0, 0.0]), z))
        self.assertFalse(annihilates(np.array([0.0, 0.0, 1.0]), z))
        self.assertTrue(annihilates(np.array([3.0, 1.0, 2.0]), Subspace.zero(g.dim)))


class TestQuotient(unittest.TestCase):
    """Quotients by ideals"""

    def test_heisenberg_mod_centre_is_abelian(self):
        g = algebra("heisenberg3")
        q, projection = quotient(g, centre(g))
        self.assertEqual(q.dim, 2)
        self.assertTrue(np.allclose(q.c, 0.0))
        self.assertEqual(q.basis, ("X", "Y"))
        self.assertEqual(np.linalg.matrix_rank(projection), 2)

    def test_euclidean_mod_translations_is_su2(self):
        g = algebra("se3")
        q, _ = quotient(g, Subspace.span(np.eye(6)[:, 3:]))
        self.assertTrue(np.allclose(q.c, algebra("su2").c))
        self.assertEqual(q.basis, ("J1", "J2", "J3"))

    def test_quotient_by_zero_is_identity(self):
        g = algebra("sl2R")
        q, projection = quotient(g, Subspace.zero(3))
        self.assertTrue(np.allclose(projection, np.eye(3)))
        self.assertTrue(np.allclose(q.c, g.c))

    def test_projection_kernel_is_ideal(self):
        g = algebra("su2+heisenberg3")
        ideal = Subspace.span(np.eye(6)[:, 3:])
        q, projection = quotient(g, ideal)
        self.assertLess(np.max(np.abs(projection @ ideal.basis)), 1e-12)
        validate_algebra(to_raw(q))

    def test_not_an_ideal(self):
        g = algebra("heisenberg3")
        with self.assertRaises(NotAnIdeal):
            quotient(g, Subspace.span(np.array([[1.0], [0.0], [0.0]])))


class TestChangeBasis(unittest.TestCase):
    """Re-expressing an algebra in another basis"""

    def test_scaling_and_back(self):
        g = algebra("sl2R")
        m = np.diag([1.0, 2.0, 1.0])
        scaled = change_basis(g, m)
        self.assertAlmostEqual(scaled.c[1, 2, 0], 2.0)
        back = change_basis(scaled, np.linalg.inv(m))
        self.assertTrue(np.allclose(back.c, g.c))

    def test_random_basis_keeps_derived_dimension(self):
        g = algebra("aff_sl2")
        m = np.eye(5) + 0.3 * np.random.default_rng(5).standard_normal((5, 5))
        h = change_basis(g, m)
        self.assertEqual(h.derived.dim, g.derived.dim)


if __name__ == '__main__':
    unittest.main()
