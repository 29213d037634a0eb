"""Symbol algebra: transvectants, star products, and the matrix oracle."""

import numpy as np
import pytest

from zollforms.weyl import (
    DegreeOverflowError,
    PolySymbol,
    diagonal_part,
    poisson_constant,
    star_commutator,
    star_product,
    transvectant,
    transvectant_constant,
    weyl_quantize,
)

MONOMIALS_DEG4 = [(m, n) for m in range(5) for n in range(5 - m)]
MONOMIALS_DEG3 = [(m, n) for (m, n) in MONOMIALS_DEG4 if m + n == 3]


def random_symbol(rng, max_degree=3):
    sym = PolySymbol()
    for m in range(max_degree + 1):
        for n in range(max_degree + 1 - m):
            sym[m, n] = complex(rng.standard_normal(), rng.standard_normal())
    return sym


def symbols_close(a, b, tol=1e-12):
    keys = set(a.coeffs) | set(b.coeffs)
    return all(abs(complex(a[k]) - complex(b[k])) <= tol for k in keys)


class TestTransvectants:
    def test_p0_is_product(self):
        rng = np.random.default_rng(0)
        a, b = random_symbol(rng), random_symbol(rng)
        prod = transvectant(a, b, 0)
        expected = sum(a[m, n] * b[3 - m, 2 - n]
                       for m in range(4) for n in range(3))
        assert abs(prod[3, 2] - expected) < 1e-12

    @pytest.mark.parametrize("mn", MONOMIALS_DEG3)
    @pytest.mark.parametrize("munu", MONOMIALS_DEG3)
    def test_p1_symplectic_constant(self, mn, munu):
        got = transvectant(PolySymbol.monomial(*mn), PolySymbol.monomial(*munu), 1)
        sigma = poisson_constant(mn, munu)
        key = (mn[0] + munu[0] - 1, mn[1] + munu[1] - 1)
        assert got[key] == sigma

    def test_p1_of_action_with_itself_vanishes(self):
        action = PolySymbol.monomial(1, 1)
        assert not transvectant(action, action, 1).coeffs

    @pytest.mark.parametrize("mn", MONOMIALS_DEG3)
    @pytest.mark.parametrize("munu", MONOMIALS_DEG3)
    def test_p3_of_cubics_is_constant(self, mn, munu):
        got = transvectant(PolySymbol.monomial(*mn), PolySymbol.monomial(*munu), 3)
        assert set(got.coeffs) <= {(0, 0)}

    def test_p3_reference_values(self):
        assert transvectant_constant((3, 0), (0, 3), 3) == 36
        assert transvectant_constant((2, 1), (1, 2), 3) == -12

    @pytest.mark.parametrize("j", [0, 1, 2, 3])
    def test_symmetry_and_bilinearity(self, j):
        rng = np.random.default_rng(j + 1)
        a, b, c = (random_symbol(rng) for _ in range(3))
        ab = transvectant(a, b, j)
        ba = transvectant(b, a, j)
        assert symbols_close(ab, ba.scale((-1.0) ** j))
        lin = transvectant(a + c.scale(2.0), b, j)
        ref = transvectant(a, b, j) + transvectant(c, b, j).scale(2.0)
        assert symbols_close(lin, ref)

    def test_degree_bookkeeping(self):
        rng = np.random.default_rng(5)
        a, b = random_symbol(rng, 3), random_symbol(rng, 4)
        for j in range(4):
            got = transvectant(a, b, j)
            assert got.degree == a.degree + b.degree - 2 * j

    def test_degree_cap_enforced(self):
        big = PolySymbol.monomial(4, 4)
        with pytest.raises(DegreeOverflowError):
            transvectant(big, PolySymbol.monomial(1, 0), 0)


class TestStarCommutator:
    def test_self_commutator_vanishes(self):
        rng = np.random.default_rng(7)
        a = random_symbol(rng)
        comm = star_commutator(a, a)
        worst = max((abs(complex(v)) for v in comm.coeffs.values()), default=0.0)
        assert worst < 1e-12  # pairwise cancellation up to float addition order

    def test_z_zbar(self):
        got = star_commutator(PolySymbol.monomial(1, 0), PolySymbol.monomial(0, 1))
        assert set(got.coeffs) == {(0, 0)}
        assert complex(got[0, 0]) == 2.0

    def test_cubic_commutator_degrees(self):
        rng = np.random.default_rng(8)
        a = PolySymbol({k: complex(rng.standard_normal()) for k in MONOMIALS_DEG3})
        b = PolySymbol({k: complex(rng.standard_normal()) for k in MONOMIALS_DEG3})
        got = star_commutator(a, b)
        degrees = {m + n for (m, n) in got.coeffs}
        assert degrees <= {0, 4}

    def test_real_cubics_have_no_action_term(self):
        rng = np.random.default_rng(9)

        def real_cubic():
            vals = {(3, 0): complex(rng.standard_normal(), rng.standard_normal()),
                    (2, 1): complex(rng.standard_normal(), rng.standard_normal())}
            return PolySymbol({**vals, (0, 3): np.conj(vals[3, 0]),
                               (1, 2): np.conj(vals[2, 1])})

        comm = star_commutator(real_cubic(), real_cubic())
        diag, _ = diagonal_part(comm)
        assert len(diag) >= 2
        assert abs(complex(diag[1])) < 1e-12


class TestQuantization:
    def test_identity(self):
        got = weyl_quantize(PolySymbol.constant(1.0), 32)
        assert np.allclose(got, np.eye(32))

    def test_action_spectrum(self):
        H = weyl_quantize(PolySymbol.monomial(1, 1), 64)
        evals = np.sort(np.linalg.eigvalsh(H.real))
        assert np.allclose(evals[:32], 2.0 * np.arange(32) + 1.0, atol=1e-10)

    def test_real_symbol_hermitian(self):
        rng = np.random.default_rng(10)
        a = random_symbol(rng, 2)
        real_sym = a + a.conjugate()
        M = weyl_quantize(real_sym, 32)
        assert np.max(np.abs(M - M.conj().T)) < 1e-12

    def test_ntrunc_precondition(self):
        with pytest.raises(ValueError):
            weyl_quantize(PolySymbol.monomial(2, 2), 16)


class TestMatrixOracle:
    """weyl_quantize(star_commutator(a, b)) == [W(a), W(b)] on the interior block.

    The error is measured relative to the product magnitude
    max|W(a)| * max|W(b)| (the natural float64 scale of the comparison).
    """

    N_TRUNC = 64

    @pytest.mark.parametrize("mn", MONOMIALS_DEG4)
    @pytest.mark.parametrize("munu", MONOMIALS_DEG4)
    def test_commutator_matches(self, mn, munu):
        a, b = PolySymbol.monomial(*mn), PolySymbol.monomial(*munu)
        A = weyl_quantize(a, self.N_TRUNC)
        B = weyl_quantize(b, self.N_TRUNC)
        rhs = A @ B - B @ A
        sc = star_commutator(a, b)
        lhs = weyl_quantize(sc, self.N_TRUNC) if sc.coeffs else np.zeros_like(rhs)
        k = self.N_TRUNC - (sum(mn) + sum(munu))
        scale = max(np.max(np.abs(A)) * np.max(np.abs(B)), 1.0)
        rel = np.max(np.abs(lhs[:k, :k] - rhs[:k, :k])) / scale
        assert rel < 1e-10


class TestDiagonalPart:
    def test_quartic_action(self):
        diag, residue = diagonal_part(PolySymbol.monomial(2, 2))
        assert [complex(c) for c in diag] == [0.0, 0.0, 1.0]
        assert not residue.coeffs

    def test_off_diagonal_residue(self):
        a = PolySymbol.monomial(3, 0)
        diag, residue = diagonal_part(a)
        assert all(complex(c) == 0 for c in diag)
        assert set(residue.coeffs) == {(3, 0)}
