"""Exact jet algebra: Fermi metric jets, grading, and derived constants."""

import math
from fractions import Fraction

import numpy as np
import pytest

from zollforms.expansion import (
    FormalOperator,
    JetPolynomial,
    JetSeries,
    QQi,
    TAU,
    TAU_NU,
    TAU_NUNU,
    commutator_diagonal_constants,
    constants_report,
    d_half_coefficient,
    derive_normal_form_integrands,
    fermi_metric_jets,
    grade_expansion,
    graded_symbols,
    half_density_laplacian,
    round_sphere_c2,
    _match_integrand_basis,
    _round_sphere_mean,
)

JP = JetPolynomial
HALF = Fraction(1, 2)


def jp(value):
    return JP.const(value)


class TestQQi:
    def test_arithmetic(self):
        a = QQi(Fraction(1, 2), Fraction(1, 3))
        b = QQi(2, -1)
        assert a + b == QQi(Fraction(5, 2), Fraction(-2, 3))
        assert a * QQi(0, 1) == QQi(Fraction(-1, 3), Fraction(1, 2))
        assert (a * b) / b == a
        assert complex(QQi(1, 2)) == 1 + 2j


class TestFermiJets:
    def test_low_order_jets(self):
        J, g00 = fermi_metric_jets(4)
        assert J.coeffs[2] == TAU * QQi(Fraction(-1, 2))
        assert J.coeffs[3] == TAU_NU * QQi(Fraction(-1, 6))
        assert J.coeffs[4] == (TAU * TAU - TAU_NUNU) * QQi(Fraction(1, 24))
        assert g00.coeffs[2] == TAU                      # C1 = 1
        assert g00.coeffs[3] == TAU_NU * QQi(Fraction(1, 3))  # C2 = 1/3
        assert g00.coeffs[4] == TAU * TAU * QQi(Fraction(2, 3)) \
            + TAU_NUNU * QQi(Fraction(1, 12))

    def test_jacobi_relation_holds_identically(self):
        # d^2_y J + K J = 0 as jet polynomials at every computed order
        J, _ = fermi_metric_jets(6)
        K = JetSeries([TAU, TAU_NU, TAU_NUNU * QQi(HALF)])
        residual = J.dy().dy() + K * J
        # the top two orders are truncation artifacts of the product
        for k in range(residual.trunc - 1):
            assert residual.coeffs[k].is_zero(), f"y^{k}: {residual.coeffs[k]}"

    def test_series_inversion_against_numeric_oracle(self):
        # independent float route: evaluate J with concrete jets, invert 1/J^2
        # by naive power-series recursion, compare with the exact g00 jets
        J, g00 = fermi_metric_jets(6)
        vals = {"tau": 0.7, "tau_nu": 0.3, "tau_nunu": -0.2}
        jc = [complex(c.substitute(vals)).real for c in J.coeffs]
        j2 = np.polynomial.polynomial.polymul(jc, jc)[: len(jc)]
        inv = np.zeros_like(j2)
        inv[0] = 1.0 / j2[0]
        for k in range(1, len(inv)):
            inv[k] = -sum(j2[i] * inv[k - i] for i in range(1, k + 1)) / j2[0]
        got = [complex(c.substitute(vals)).real for c in g00.coeffs]
        assert np.allclose(got, inv, atol=1e-12)

    def test_order_cap(self):
        with pytest.raises(ValueError):
            fermi_metric_jets(7)


class TestHalfDensityLaplacian:
    def test_flat_jets_give_plain_derivatives(self):
        flat = (JetSeries([jp(1)]), JetSeries([jp(1)]))
        op = half_density_laplacian(flat)
        # -(d_s^2 + d_y^2) = D_s^2 + D_y^2
        assert set(op.terms) == {(0, 2), (2, 0)}
        assert op.terms[(0, 2)].coeffs[0] == jp(1)
        assert op.terms[(2, 0)].coeffs[0] == jp(1)

    def test_half_density_potential_at_axis(self):
        # the multiplication part of the display operator is tau/2 + O(y),
        # the known scalar half-density potential; P = -display flips the sign
        op = half_density_laplacian()
        assert op.terms[(0, 0)].coeffs[0] == TAU * QQi(Fraction(-1, 2))

    def test_constant_curvature_substitution(self):
        # tau = 1, other jets 0: no tau_nu / tau_nunu monomials anywhere
        op = half_density_laplacian()
        graded = grade_expansion(op)
        l0 = graded[Fraction(0)]
        vals = {"tau": 1.0, "tau_s": 0.0, "tau_nu": 0.0, "tau_nunu": 0.0}
        quartic = l0.terms[(0, 0)].coeffs[4].substitute(vals)
        assert abs(quartic - 2.0 / 3.0) < 1e-15


class TestGrading:
    def test_leading_orders(self):
        graded = grade_expansion(half_density_laplacian())
        l2 = graded[Fraction(-2)]
        assert set(l2.terms) == {(0, 0)}
        assert l2.terms[(0, 0)].coeffs[0] == jp(1)          # L2 = 1
        assert Fraction(-3, 2) not in graded                 # L_3/2 = 0

    def test_l1_matches_lcal(self):
        # L1 = 2 D_s + D_y^2 + tau y^2: tangential derivative plus the
        # curvature oscillator
        l1 = grade_expansion(half_density_laplacian())[Fraction(-1)]
        assert l1.terms[(0, 1)].coeffs[0] == jp(2)
        assert l1.terms[(2, 0)].coeffs[0] == jp(1)
        assert l1.terms[(0, 0)].coeffs[2] == TAU
        assert set(l1.terms) == {(0, 1), (2, 0), (0, 0)}

    def test_l_half_single_monomial(self):
        l12 = grade_expansion(half_density_laplacian())[Fraction(-1, 2)]
        assert set(l12.terms) == {(0, 0)}
        series = l12.terms[(0, 0)]
        nonzero = [k for k, c in enumerate(series.coeffs) if not c.is_zero()]
        assert nonzero == [3]
        assert series.coeffs[3] == TAU_NU * QQi(Fraction(1, 3))

    def test_l0_five_term_shape(self):
        l0 = grade_expansion(half_density_laplacian())[Fraction(0)]
        assert set(l0.terms) == {(0, 0), (0, 1), (0, 2)}   # no yD_y term: C4 = 0
        assert l0.terms[(0, 2)].coeffs[0] == jp(1)          # D_s^2
        ds1 = l0.terms[(0, 1)]
        assert ds1.coeffs[2] == TAU * QQi(2)                # 2 tau y^2 D_s
        free = l0.terms[(0, 0)]
        assert free.coeffs[0] == TAU * QQi(Fraction(-1, 2))         # C5
        assert free.coeffs[2] == TAU_S_POLY                          # C3
        assert free.coeffs[4] == TAU * TAU * QQi(Fraction(2, 3)) \
            + TAU_NUNU * QQi(Fraction(1, 12))                        # C1 + tau^2
        nonzero = [k for k, c in enumerate(free.coeffs) if not c.is_zero()]
        assert nonzero == [0, 2, 4]

    def test_graded_jets_stay_in_basic_set(self):
        graded = grade_expansion(half_density_laplacian())
        basic = {"tau", "tau_s", "tau_nu", "tau_nunu"}
        for w, op in graded.items():
            if w <= 0:
                assert op.names() <= basic, f"weight {w} uses {op.names()}"

    def test_resummation_is_exact(self):
        # substituting an exact rational value for h must reproduce the
        # operator with D_s -> h^-1 + D_s and y -> h^(1/2) y re-expanded
        op = half_density_laplacian()
        graded = grade_expansion(op)
        for hroot in (Fraction(1), Fraction(3), Fraction(1, 2)):
            total = FormalOperator()
            for w, part in graded.items():
                total = total + part.scale(QQi(hroot ** int(2 * w)))
            expected = _substituted(op, hroot)
            assert total == expected


def _substituted(op, hroot):
    """op with y -> hroot y, D_y -> D_y/hroot, D_s -> h^-1 + D_s, exact."""
    h = hroot * hroot
    out = FormalOperator()
    for (b, c), series in op.terms.items():
        dilated = JetSeries([coeff * QQi(hroot ** k)
                             for k, coeff in enumerate(series.coeffs)])
        for j in range(c + 1):
            # D_y^b carries h^(-b/2) = hroot^-b
            factor = QQi(Fraction(math.comb(c, j)) * (1 / h) ** (c - j) * hroot ** (-b))
            out = out + FormalOperator({(b, j): dilated * factor})
    return out


TAU_S_POLY = JetPolynomial.var("tau_s", QQi(0, -1))


class TestDerivedConstants:
    def test_integrand_tables(self):
        parts = derive_normal_form_integrands()
        y4, rem4 = _match_integrand_basis(parts["z4"])
        y0, rem0 = _match_integrand_basis(parts["z0"])
        assert rem4.is_zero() and rem0.is_zero()
        assert y4 == {"a": QQi(Fraction(3, 32)), "b1": QQi(Fraction(-1, 8)),
                      "b2": QQi(Fraction(-1, 16)), "c": QQi(Fraction(-1, 32)),
                      "d": QQi(Fraction(1, 32)), "e": QQi(0)}
        assert y0 == {"a": QQi(0), "b1": QQi(Fraction(1, 8)),
                      "b2": QQi(Fraction(-1, 8)), "c": QQi(0),
                      "d": QQi(0), "e": QQi(Fraction(-1, 2))}

    def test_structural_vanishing_assertions(self):
        parts = derive_normal_form_integrands()
        y4, _ = _match_integrand_basis(parts["z4"])
        y0, _ = _match_integrand_basis(parts["z0"])
        assert y4["e"] == QQi(0)   # e_j = 0 for j = 2
        assert y0["d"] == QQi(0)   # d_j = 0 for j = 0

    def test_round_sphere_linear_relation(self):
        assert round_sphere_c2() == QQi(0)

    def test_round_sphere_constant_term(self):
        parts = derive_normal_form_integrands()
        assert _round_sphere_mean(parts["z0"]) == QQi(Fraction(-1, 4))

    def test_commutator_weights(self):
        comm = commutator_diagonal_constants()
        assert comm["z4"][(3, 0)] == QQi(Fraction(1, 64))
        assert comm["z4"][(2, 1)] == QQi(Fraction(3, 64))
        assert comm["z0"][(3, 0)] == QQi(Fraction(1, 96))
        assert comm["z0"][(2, 1)] == QQi(Fraction(-1, 32))

    def test_d_half_binomials(self):
        assert d_half_coefficient(0) == Fraction(1, 24)
        assert d_half_coefficient(1) == Fraction(1, 8)
        assert d_half_coefficient(2) == Fraction(1, 8)
        assert d_half_coefficient(3) == Fraction(1, 24)

    def test_report_contents(self):
        report = constants_report()
        assert report["metric_jets"]["g00_y2 (C1)"] == "(1)*tau"
        assert "1/3" in report["metric_jets"]["g00_y3 (C2)"]
        assert report["assertions"]["e2_zero"] == "0"
        assert report["assertions"]["d0_zero"] == "0"
        assert report["assertions"]["C4_zero"] == "0"
        assert report["assertions"]["round_sphere_c2"] == "0"
        assert report["graded"]["L2"] == "(1)"
        assert report["graded"]["L_3/2"] == "0"

    def test_graded_symbols_weyl_ordering(self):
        # y D_y as a graded term: Weyl symbol must be y*eta + i/2,
        # with y*eta = (z^2 - zbar^2)/(4i)
        term = FormalOperator({(1, 0): JetSeries([JP(), jp(1)])})
        sym = graded_symbols(term)[0]
        assert sym[(2, 0)] == JP.const(QQi(0, Fraction(-1, 4)))
        assert sym[(0, 2)] == JP.const(QQi(0, Fraction(1, 4)))
        assert sym[(0, 0)] == JP.const(QQi(0, HALF))
        assert (1, 1) not in sym.coeffs
