"""Exact Weyl-symbol algebra on polynomials in (z, zbar).

Conventions (fixed once, pinned by the matrix oracle below):
    z = y + i*eta,  hbar = 1,  Op(z) = y + i*D_y = sqrt(2) * annihilation.
The Moyal product of polynomial symbols is the terminating sum

    a # b = sum_k P_k(a, b) / k!

with the k-th transvectant

    P_k(a, b) = sum_l C(k,l) (-1)^l (d_zbar^l d_z^(k-l) a) (d_z^l d_zbar^(k-l) b).

P_0 is multiplication, P_1(z^m zbar^n, z^mu zbar^nu) =
sigma((m,n),(mu,nu)) z^(m+mu-1) zbar^(n+nu-1) with sigma the symplectic
inner product of exponent vectors, and commutators expand in odd
transvectants only:  a#b - b#a = sum_{k odd} 2 P_k(a, b) / k!.

Coefficients are generic: exact scalars (Fraction/complex), numpy sample
arrays (periodic coefficient functions), or jet polynomials all work.
"""

import math
from fractions import Fraction

import numpy as np

__all__ = [
    "PolySymbol",
    "DegreeOverflowError",
    "transvectant",
    "star_product",
    "star_commutator",
    "weyl_quantize",
    "diagonal_part",
    "poisson_constant",
    "transvectant_constant",
]

DEGREE_CAP = 8


class DegreeOverflowError(ValueError):
    """Raised when a symbol operation would exceed the degree cap."""


def _is_zero(v):
    if isinstance(v, np.ndarray):
        return False  # keep sampled coefficient functions, even if all-zero
    try:
        return v == 0
    except Exception:
        return False


class PolySymbol:
    """Polynomial symbol sum_{m,n} c[m,n] z^m zbar^n with m + n <= DEGREE_CAP.

    The coefficient table is a dict {(m, n): value}.  Values may be any
    ring elements supporting +, -, * (complex numbers, Fractions, numpy
    arrays of samples, jet polynomials).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {}
        if coeffs:
            for (m, n), v in coeffs.items():
                self[m, n] = v

    @classmethod
    def monomial(cls, m, n, coeff=1):
        return cls({(m, n): coeff})

    @classmethod
    def constant(cls, value):
        return cls({(0, 0): value})

    def __getitem__(self, key):
        return self.coeffs.get(key, 0)

    def __setitem__(self, key, value):
        m, n = key
        if m < 0 or n < 0:
            raise ValueError(f"negative exponents {key}")
        if m + n > DEGREE_CAP:
            raise DegreeOverflowError(f"monomial z^{m} zbar^{n} exceeds degree cap {DEGREE_CAP}")
        if _is_zero(value):
            self.coeffs.pop((m, n), None)
        else:
            self.coeffs[key] = value

    def items(self):
        return self.coeffs.items()

    @property
    def degree(self):
        return max((m + n for m, n in self.coeffs), default=0)

    def __add__(self, other):
        out = PolySymbol(dict(self.coeffs))
        for key, v in other.coeffs.items():
            cur = out.coeffs.get(key)
            out[key] = v if cur is None else cur + v
        return out

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return PolySymbol({k: -v for k, v in self.coeffs.items()})

    def scale(self, factor):
        return PolySymbol({k: factor * v for k, v in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, PolySymbol):
            return transvectant(self, other, 0)
        return self.scale(other)

    __rmul__ = scale

    def map_coeffs(self, fn):
        return PolySymbol({k: fn(v) for k, v in self.coeffs.items()})

    def conjugate(self):
        """Complex conjugate symbol: swaps (m, n) and conjugates entries."""
        return PolySymbol({(n, m): np.conjugate(v) for (m, n), v in self.coeffs.items()})

    def substitute_linear(self, z_image, zbar_image):
        """Compose with the linear map z -> az*z + bz*zbar, zbar likewise.

        `z_image` and `zbar_image` are pairs (coeff of z, coeff of zbar);
        coefficients may be scalars or sample arrays.
        """
        az, bz = z_image
        azb, bzb = zbar_image
        zpow = [PolySymbol.constant(1), PolySymbol({(1, 0): az, (0, 1): bz})]
        zbpow = [PolySymbol.constant(1), PolySymbol({(1, 0): azb, (0, 1): bzb})]
        deg = self.degree
        for k in range(2, deg + 1):
            zpow.append(zpow[-1] * zpow[1])
            zbpow.append(zbpow[-1] * zbpow[1])
        out = PolySymbol()
        for (m, n), v in self.coeffs.items():
            out = out + (zpow[m] * zbpow[n]).scale(v)
        return out

    def __repr__(self):
        if not self.coeffs:
            return "PolySymbol(0)"
        parts = [f"({v!r})*z^{m}*zb^{n}" for (m, n), v in sorted(self.coeffs.items())]
        return "PolySymbol(" + " + ".join(parts) + ")"


def _ff(n, k):
    """Falling factorial n (n-1) ... (n-k+1)."""
    out = 1
    for i in range(k):
        out *= n - i
    return out


def transvectant(a, b, j):
    """j-th transvectant P_j(a, b); P_0 is the product, degree drop 2j."""
    if j < 0:
        raise ValueError("transvectant order must be >= 0")
    out = PolySymbol()
    for (m, n), av in a.coeffs.items():
        for (mu, nu), bv in b.coeffs.items():
            acc = 0
            for l in range(j + 1):
                c = (
                    math.comb(j, l)
                    * (-1) ** l
                    * _ff(m, j - l)
                    * _ff(n, l)
                    * _ff(mu, l)
                    * _ff(nu, j - l)
                )
                acc += c
            if acc == 0:
                continue
            key = (m + mu - j, n + nu - j)
            if key[0] < 0 or key[1] < 0:
                continue
            term = acc * (av * bv)
            cur = out.coeffs.get(key)
            out[key] = term if cur is None else cur + term
    return out


def star_product(a, b):
    """Moyal product a # b (terminating sum of transvectants)."""
    out = PolySymbol()
    jmax = min(a.degree, b.degree)
    for j in range(jmax + 1):
        term = transvectant(a, b, j)
        if j >= 2:
            term = term.map_coeffs(lambda v, f=Fraction(1, math.factorial(j)): _scale_exact(v, f))
        out = out + term
    return out


def _scale_exact(v, frac):
    """Multiply by a Fraction without forcing floats on exact types."""
    if isinstance(v, (int, Fraction)):
        return frac * v
    if isinstance(v, np.ndarray) or isinstance(v, (float, complex)):
        return float(frac) * v
    return v * frac  # ring elements define Fraction multiplication themselves


def star_commutator(a, b):
    """a # b - b # a = sum over odd j of (2/j!) P_j(a, b)."""
    out = PolySymbol()
    jmax = min(a.degree, b.degree)
    for j in range(1, jmax + 1, 2):
        term = transvectant(a, b, j)
        term = term.map_coeffs(lambda v, f=Fraction(2, math.factorial(j)): _scale_exact(v, f))
        out = out + term
    return out


def poisson_constant(mn, munu):
    """Coefficient of P_1(z^m zbar^n, z^mu zbar^nu): sigma((m,n),(mu,nu))."""
    (m, n), (mu, nu) = mn, munu
    return m * nu - n * mu


def transvectant_constant(mn, munu, j):
    """Scalar C with P_j(z^m zbar^n, z^mu zbar^nu) = C z^(m+mu-j) zbar^(n+nu-j)."""
    sym = transvectant(PolySymbol.monomial(*mn), PolySymbol.monomial(*munu), j)
    (m, n), (mu, nu) = mn, munu
    return sym[(m + mu - j, n + nu - j)]


def diagonal_part(a):
    """Split a symbol into powers of |z|^2 and the off-diagonal residue.

    Returns (diag, residue): diag[k] is the coefficient of |z|^(2k)
    (i.e. the (k, k) table entry), residue holds every (m, n) with m != n.
    """
    top = max((m for m, n in a.coeffs if m == n), default=0)
    diag = [a[k, k] for k in range(top + 1)]
    residue = PolySymbol({k: v for k, v in a.coeffs.items() if k[0] != k[1]})
    return diag, residue


# ---------------------------------------------------------------------------
# Matrix oracle: Weyl quantization on the truncated oscillator eigenbasis
# ---------------------------------------------------------------------------

def _ladder_matrices(size):
    q = np.arange(1, size)
    create = np.zeros((size, size))
    create[q, q - 1] = np.sqrt(q)  # a^dag |q-1> = sqrt(q) |q>
    annihilate = create.T.copy()
    return annihilate, create


def _monomial_matrices(max_degree, size):
    """Exact oscillator-basis matrices of Op_W(z^m zbar^n), m+n <= max_degree.

    Uses Op(z) = sqrt(2) a and the recursion
        Op_W(z^m zbar^n) = Op(z) Op_W(z^(m-1) zbar^n) - n Op_W(z^(m-1) zbar^(n-1))
    which follows from z # p = z p + d_zbar p.
    """
    ann, cre = _ladder_matrices(size)
    opz = math.sqrt(2) * ann
    opzb = math.sqrt(2) * cre
    mats = {(0, 0): np.eye(size)}
    for n in range(1, max_degree + 1):
        mats[(0, n)] = opzb @ mats[(0, n - 1)]
    for m in range(1, max_degree + 1):
        for n in range(0, max_degree + 1 - m):
            mat = opz @ mats[(m - 1, n)]
            if n > 0:
                mat = mat - n * mats[(m - 1, n - 1)]
            mats[(m, n)] = mat
    return mats


def weyl_quantize(a, n_trunc):
    """Matrix of the Weyl quantization of `a` on oscillator states 0..n_trunc-1.

    The matrix is built with enough padding that every returned entry equals
    the corresponding entry of the untruncated operator.
    """
    deg = a.degree
    if n_trunc < deg + 16:
        raise ValueError(f"n_trunc must be >= deg + 16 = {deg + 16}")
    size = n_trunc + deg + 2
    mats = _monomial_matrices(deg, size)
    out = np.zeros((size, size), dtype=complex)
    for (m, n), v in a.coeffs.items():
        out += complex(v) * mats[(m, n)]
    return out[:n_trunc, :n_trunc]
