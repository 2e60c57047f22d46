"""
Unit tests for profiles.expr and profiles.taylor

Parsing, canonical printing, jet evaluation and domain errors.
"""

import math
import random

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import ExprDomainError, ExprSyntaxError
from profiles.expr import BinOp, Call, Neg, Num, Var, evaluate, free_names, jet_eval, parse, print_expr
from profiles.taylor import TaylorJet

CORPUS = [
    "1+2*3",
    "-(2/3)*ln(1+r^-3)",
    "r^2",
    "5",
    "-r",
    "--r",
    "r - (1 - r)",
    "r/(2*r)",
    "2^r^2",
    "(2^r)^2",
    "(-r)^2",
    "-r^2",
    "r^-(1 + r)",
    "exp(-r^2)*sin(r)",
    "sqrt(r)/(1 + r)",
    "cos(pi*r)",
    "ln(1 + 1/(2*r^3))",
    "r*-2",
    "r + -2",
    "1e-3*r",
    "0.5*r^0.5",
    "((r))",
    "exp(ln(r))",
    "1/r/r",
    "1/(r/r)",
    "r - r - r",
]


def _random_expr(rng, depth):
    if depth == 0 or rng.random() < 0.25:
        choice = rng.random()
        if choice < 0.4:
            return Var('r')
        if choice < 0.5:
            return Var('pi')
        return Num(rng.choice([0.0, 1.0, 2.0, 0.5, 3.25, 1e-7, 12.0]))
    kind = rng.random()
    if kind < 0.15:
        return Neg(_random_expr(rng, depth - 1))
    if kind < 0.3:
        return Call(rng.choice(['ln', 'exp', 'sin', 'cos', 'sqrt']), _random_expr(rng, depth - 1))
    op = rng.choice(['+', '-', '*', '/', '^'])
    return BinOp(op, _random_expr(rng, depth - 1), _random_expr(rng, depth - 1))


class ParseTestCase(SimpleTestCase):
    """Tests for parse and print_expr"""

    def test_precedence(self):
        """1+2*3 evaluates to 7"""
        self.assertEqual(evaluate(parse("1+2*3"), 1.0), 7.0)

    def test_power_binds_tighter_than_unary_minus(self):
        """-2^2 is -(2^2)"""
        self.assertEqual(evaluate(parse("-2^2"), 1.0), -4.0)

    def test_power_right_associative(self):
        """2^3^2 = 2^9"""
        self.assertEqual(evaluate(parse("2^3^2"), 1.0), 512.0)

    def test_subtraction_left_associative(self):
        """8-4-2 = 2"""
        self.assertEqual(evaluate(parse("8-4-2"), 1.0), 2.0)

    def test_schwarzschild_factor_parses(self):
        """The catalog grammar exercise is a valid AST"""
        node = parse("-(2/3)*ln(1+r^-3)")
        self.assertIsInstance(node, BinOp)
        self.assertEqual(node.op, '*')

    def test_unbalanced_offset(self):
        """'ln(' fails at byte offset 3"""
        with self.assertRaises(ExprSyntaxError) as ctx:
            parse("ln(")
        self.assertEqual(ctx.exception.offset, 3)
        self.assertTrue(ctx.exception.expected)

    def test_missing_close_paren(self):
        """'(r+1' expects ')' at the end"""
        with self.assertRaises(ExprSyntaxError) as ctx:
            parse("(r+1")
        self.assertEqual(ctx.exception.offset, 4)
        self.assertIn("')'", ctx.exception.expected)

    def test_offset_counts_utf8_bytes(self):
        """A non-ASCII character is reported at its byte offset"""
        with self.assertRaises(ExprSyntaxError) as ctx:
            parse("r + µ")
        self.assertEqual(ctx.exception.offset, 4)

    def test_unknown_identifier(self):
        """Undeclared names are rejected"""
        with self.assertRaises(ExprSyntaxError) as ctx:
            parse("x + 1")
        self.assertEqual(ctx.exception.offset, 0)
        self.assertIn('unknown identifier', str(ctx.exception))

    def test_declared_parameter(self):
        """Parameters are accepted when declared"""
        node = parse("m*r", params=['m'])
        self.assertEqual(free_names(node), {'m'})
        self.assertEqual(evaluate(node, 2.0, params={'m': 3.0}), 6.0)

    def test_trailing_garbage(self):
        """'r r' fails at the second token"""
        with self.assertRaises(ExprSyntaxError) as ctx:
            parse("r r")
        self.assertEqual(ctx.exception.offset, 2)

    def test_round_trip_handwritten(self):
        """parse(print(parse(t))) == parse(t) on the handwritten corpus"""
        for text in CORPUS:
            node = parse(text)
            self.assertEqual(parse(print_expr(node)), node, text)

    def test_round_trip_random_corpus(self):
        """50 seeded random trees survive print/parse"""
        rng = random.Random(42)
        for _ in range(50):
            node = _random_expr(rng, 4)
            text = print_expr(node)
            self.assertEqual(parse(text), node, text)

    def test_print_is_canonical(self):
        """Whitespace and redundant parentheses disappear"""
        self.assertEqual(print_expr(parse("((1)+(r*(2)))")), "1 + r*2")
        self.assertEqual(print_expr(parse("r - (1 - r)")), "r - (1 - r)")


class JetEvalTestCase(SimpleTestCase):
    """Tests for jet_eval"""

    def test_constant(self):
        """'5' -> (5, 0, 0, 0)"""
        self.assertEqual(jet_eval(parse("5"), 2.0), (5.0, 0.0, 0.0, 0.0))

    def test_square(self):
        """'r^2' at 3 -> (9, 6, 2, 0)"""
        values = jet_eval(parse("r^2"), 3.0)
        np.testing.assert_allclose(values, (9.0, 6.0, 2.0, 0.0), atol=1e-14)

    def test_schwarzschild_at_one(self):
        """u(1) = -(2/3) ln 2 and u'(1) = 1"""
        u, du, _, _ = jet_eval(parse("-(2/3)*ln(1+r^-3)"), 1.0)
        self.assertAlmostEqual(u, -(2.0 / 3.0) * math.log(2.0), places=14)
        self.assertAlmostEqual(du, 1.0, places=14)

    def test_batched_radii(self):
        """Arrays of radii give arrays of derivatives"""
        r = np.array([1.0, 2.0, 4.0])
        u, du, d2u, d3u = jet_eval(parse("r^3"), r)
        np.testing.assert_allclose(u, r ** 3)
        np.testing.assert_allclose(du, 3 * r ** 2)
        np.testing.assert_allclose(d2u, 6 * r)
        np.testing.assert_allclose(d3u, 6.0)

    def test_third_derivative_of_log(self):
        """(ln r)''' = 2/r^3"""
        *_, d3 = jet_eval(parse("ln(r)"), 2.0)
        self.assertAlmostEqual(d3, 0.25, places=14)

    def test_matches_finite_differences(self):
        """Derivatives agree with central differences to 1e-6 relative"""
        text = "exp(-r^2)*sin(r) + sqrt(r)/(1 + r) + r^1.5 - cos(2*r)^2"
        node = parse(text)
        rng = np.random.default_rng(7)
        h = 1e-5
        for r in rng.uniform(0.3, 3.0, size=25):
            values = jet_eval(node, float(r))
            for order in range(3):
                lo = jet_eval(node, float(r) - h, order=order)[order]
                hi = jet_eval(node, float(r) + h, order=order)[order]
                fd = (hi - lo) / (2 * h)
                self.assertLessEqual(abs(fd - values[order + 1]), 1e-6 * (1 + abs(values[order + 1])))

    def test_non_integer_exponent_of_jet(self):
        """r^r is differentiated through exp(r ln r)"""
        u, du, _, _ = jet_eval(parse("r^r"), 2.0)
        self.assertAlmostEqual(u, 4.0, places=12)
        self.assertAlmostEqual(du, 4.0 * (math.log(2.0) + 1.0), places=12)

    def test_log_domain_names_subexpression(self):
        """ln of a non-positive value names the call"""
        with self.assertRaises(ExprDomainError) as ctx:
            jet_eval(parse("1 + ln(r - 2)"), 1.0)
        self.assertEqual(ctx.exception.subexpression, "ln(r - 2)")

    def test_division_by_zero(self):
        """1/(r - 1) at r = 1 is reported"""
        with self.assertRaises(ExprDomainError) as ctx:
            jet_eval(parse("1/(r - 1)"), 1.0)
        self.assertIn("division by zero", str(ctx.exception))

    def test_fractional_power_of_negative_base(self):
        """(r - 2)^0.5 at r = 1 is rejected, never NaN"""
        with self.assertRaises(ExprDomainError):
            jet_eval(parse("(r - 2)^0.5"), 1.0)

    def test_integer_power_of_negative_base(self):
        """(r - 2)^3 at r = 1 is fine"""
        u, du, _, _ = jet_eval(parse("(r - 2)^3"), 1.0)
        self.assertEqual(u, -1.0)
        self.assertEqual(du, 3.0)

    def test_large_integer_power_of_negative_base(self):
        """(r - 3)^18 and (r - 2)^17 at r = 1 have no exponent-size cutoff"""
        u, du, _, _ = jet_eval(parse("(r - 3)^18"), 1.0)
        self.assertEqual(u, 2.0 ** 18)
        self.assertEqual(du, -18 * 2.0 ** 17)
        u, du, d2u, _ = jet_eval(parse("(r - 2)^17"), 1.0)
        self.assertEqual(u, -1.0)
        self.assertEqual(du, 17.0)
        self.assertEqual(d2u, -272.0)

    def test_integer_power_of_jet_without_parser(self):
        r = TaylorJet.variable(-2.0, order=1)
        u, du = (r ** 40).derivatives()
        self.assertEqual(u, 2.0 ** 40)
        self.assertEqual(du, -40 * 2.0 ** 39)

    def test_exp_overflow_is_reported(self):
        """exp(r) at r = 1000 raises instead of returning inf"""
        with self.assertRaises(ExprDomainError) as ctx:
            jet_eval(parse("exp(r)"), 1000.0)
        self.assertIn("overflow", str(ctx.exception))
        self.assertEqual(ctx.exception.subexpression, "exp(r)")

    def test_power_overflow_is_reported(self):
        with self.assertRaises(ExprDomainError):
            jet_eval(parse("r^400"), 10.0)

    def test_order_out_of_range(self):
        """Jets stop at third order"""
        with self.assertRaises(ExprDomainError):
            TaylorJet.variable(1.0, order=4)
