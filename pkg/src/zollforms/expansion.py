"""Exact jet algebra for the transverse expansion of the half-density Laplacian.

Everything here is exact: coefficients are Gaussian rationals (QQi), the
curvature data along the geodesic are formal indeterminates
{tau, tau_s, tau_nu, tau_nunu}, and operators are finite sums

    (jet polynomial) * y^k * D_y^b * D_s^c

in normal order (coefficient functions to the left of all derivatives).
The module derives the Fermi metric jets, builds the conjugated positive
half-density Laplacian, grades it semiclassically, and emits every
universal constant the construction needs.

Scaling conventions: the semiclassical parameter absorbs the period
(hbar = 1/r, the "hL" combination), so the dilation rules are
y -> hbar^(1/2) y, D_y -> hbar^(-1/2) D_y, D_s -> hbar^(-1) + D_s.
With these, the complex Jacobi frame keeps the normalization
Y(0) = 1, Y'(0) = i used by every downstream integral formula.
"""

import math
from fractions import Fraction

from .weyl import PolySymbol, star_product, transvectant, transvectant_constant

__all__ = [
    "QQi",
    "JetPolynomial",
    "JetSeries",
    "FormalOperator",
    "fermi_metric_jets",
    "half_density_laplacian",
    "grade_expansion",
    "graded_symbols",
    "constants_report",
    "JET_NAMES",
]

JET_NAMES = ("tau", "tau_s", "tau_nu", "tau_nunu")
SERIES_TRUNC = 6  # y-degree kept in all jet series


class QQi:
    """Gaussian rational a + b*i with exact Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def i(cls):
        return cls(0, 1)

    def __add__(self, other):
        other = _as_qqi(other)
        return QQi(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-_as_qqi(other))

    def __rsub__(self, other):
        return _as_qqi(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (JetPolynomial, JetSeries)):
            return other * self
        other = _as_qqi(other)
        return QQi(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_qqi(other)
        d = other.re * other.re + other.im * other.im
        if d == 0:
            raise ZeroDivisionError
        return QQi(
            (self.re * other.re + self.im * other.im) / d,
            (self.im * other.re - self.re * other.im) / d,
        )

    def __eq__(self, other):
        try:
            other = _as_qqi(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def conjugate(self):
        return QQi(self.re, -self.im)

    def __complex__(self):
        return float(self.re) + 1j * float(self.im)

    def __repr__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        return f"({self.re} + {self.im}*i)"


def _as_qqi(v):
    if isinstance(v, QQi):
        return v
    if isinstance(v, (int, Fraction)):
        return QQi(v)
    raise TypeError(f"cannot coerce {type(v)} to QQi")


ONE = QQi(1)
I = QQi(0, 1)


class JetPolynomial:
    """Multivariate polynomial in named jet indeterminates over QQi.

    Keys are canonical tuples of (name, power) pairs sorted by name; the
    empty tuple is the constant term.  New indeterminate names (e.g. mixed
    jets like tau_nu_s produced by s-differentiation) are created on the
    fly and surface in reports.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for key, val in terms.items():
                val = val if isinstance(val, QQi) else _as_qqi(val)
                if val:
                    self.terms[key] = val

    @classmethod
    def var(cls, name, coeff=1):
        return cls({((name, 1),): _as_qqi(coeff) if not isinstance(coeff, QQi) else coeff})

    @classmethod
    def const(cls, value):
        value = value if isinstance(value, QQi) else _as_qqi(value)
        return cls({(): value}) if value else cls()

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, QQi)):
            other = JetPolynomial.const(other)
        if not isinstance(other, JetPolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        if isinstance(other, (int, Fraction, QQi)):
            other = JetPolynomial.const(other)
        out = dict(self.terms)
        for key, val in other.terms.items():
            acc = out.get(key, QQi()) + val
            if acc:
                out[key] = acc
            else:
                out.pop(key, None)
        return JetPolynomial._raw(out)

    __radd__ = __add__

    @classmethod
    def _raw(cls, terms):
        obj = cls.__new__(cls)
        obj.terms = terms
        return obj

    def __neg__(self):
        return JetPolynomial._raw({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, QQi)):
            other = JetPolynomial.const(other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, QQi)):
            c = other if isinstance(other, QQi) else _as_qqi(other)
            if not c:
                return JetPolynomial()
            return JetPolynomial._raw({k: v * c for k, v in self.terms.items()})
        if not isinstance(other, JetPolynomial):
            return NotImplemented
        out = {}
        for k1, v1 in self.terms.items():
            e1 = dict(k1)
            for k2, v2 in other.terms.items():
                e = dict(e1)
                for name, p in k2:
                    e[name] = e.get(name, 0) + p
                key = tuple(sorted(e.items()))
                acc = out.get(key, QQi()) + v1 * v2
                if acc:
                    out[key] = acc
                else:
                    out.pop(key, None)
        return JetPolynomial._raw(out)

    __rmul__ = __mul__

    def s_derivative(self):
        """Formal d/ds: each indeterminate x maps to the indeterminate x_s."""
        out = JetPolynomial()
        for key, val in self.terms.items():
            for i, (name, p) in enumerate(key):
                rest = dict(key)
                rest[name] = p - 1
                if rest[name] == 0:
                    del rest[name]
                dname = name + "_s"
                rest[dname] = rest.get(dname, 0) + 1
                newkey = tuple(sorted(rest.items()))
                out = out + JetPolynomial._raw({newkey: val * QQi(p)})
        return out

    def substitute(self, values):
        """Evaluate with numeric values (scalars or numpy arrays) per name."""
        total = 0
        for key, val in self.terms.items():
            term = complex(val)
            for name, p in key:
                term = term * values[name] ** p
            total = total + term
        return total

    def names(self):
        out = set()
        for key in self.terms:
            out.update(name for name, _ in key)
        return out

    def coefficient(self, monomial):
        """Coefficient of a monomial given as a dict name -> power."""
        key = tuple(sorted((n, p) for n, p in monomial.items() if p))
        return self.terms.get(key, QQi())

    def pretty(self):
        if not self.terms:
            return "0"
        parts = []
        for key, val in sorted(self.terms.items()):
            mono = "*".join(f"{n}^{p}" if p > 1 else n for n, p in key)
            parts.append(f"({val!r})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    __repr__ = pretty


JP = JetPolynomial
TAU = JP.var("tau")
TAU_S = JP.var("tau_s")
TAU_NU = JP.var("tau_nu")
TAU_NUNU = JP.var("tau_nunu")


class JetSeries:
    """Polynomial in the Fermi normal coordinate y with JetPolynomial coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None, trunc=SERIES_TRUNC):
        base = [JP() for _ in range(trunc + 1)]
        if coeffs:
            for k, c in enumerate(coeffs[: trunc + 1]):
                base[k] = c if isinstance(c, JP) else JP.const(c)
        self.coeffs = base

    @classmethod
    def const(cls, value):
        return cls([value if isinstance(value, JP) else JP.const(value)])

    @property
    def trunc(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def __eq__(self, other):
        return isinstance(other, JetSeries) and self.coeffs == other.coeffs

    def __add__(self, other):
        if not isinstance(other, JetSeries):
            other = JetSeries.const(other)
        return JetSeries._raw([a + b for a, b in zip(self.coeffs, other.coeffs)])

    @classmethod
    def _raw(cls, coeffs):
        obj = cls.__new__(cls)
        obj.coeffs = coeffs
        return obj

    def __neg__(self):
        return JetSeries._raw([-c for c in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, JetSeries):
            other = JetSeries.const(other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, QQi, JP)):
            o = other if isinstance(other, (QQi, JP)) else _as_qqi(other)
            return JetSeries._raw([c * o for c in self.coeffs])
        n = self.trunc
        out = [JP() for _ in range(n + 1)]
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if i + j > n or b.is_zero():
                    continue
                out[i + j] = out[i + j] + a * b
        return JetSeries._raw(out)

    __rmul__ = __mul__

    def dy(self):
        """Derivative in y."""
        n = self.trunc
        out = [JP() for _ in range(n + 1)]
        for k in range(1, n + 1):
            out[k - 1] = self.coeffs[k] * QQi(k)
        return JetSeries._raw(out)

    def ds(self):
        """Formal derivative in s (acts on jet coefficients)."""
        return JetSeries._raw([c.s_derivative() for c in self.coeffs])

    def binomial_power(self, alpha):
        """(self)^alpha for series with constant term 1 and a Fraction alpha."""
        alpha = Fraction(alpha)
        if self.coeffs[0] != JP.const(1):
            raise ValueError("binomial_power requires constant term 1")
        x = JetSeries._raw(list(self.coeffs))
        x.coeffs = [JP() if k == 0 else self.coeffs[k] for k in range(self.trunc + 1)]
        out = JetSeries.const(1)
        xpow = JetSeries.const(1)
        coeff = Fraction(1)
        lowest = next((k for k in range(1, self.trunc + 1) if not x.coeffs[k].is_zero()), None)
        kmax = self.trunc if lowest is None else self.trunc // lowest
        for k in range(1, kmax + 1):
            coeff = coeff * (alpha - (k - 1)) / k
            xpow = xpow * x
            if xpow.is_zero():
                break
            out = out + xpow * QQi(coeff)
        return out

    def inverse(self):
        return self.binomial_power(-1)

    def names(self):
        out = set()
        for c in self.coeffs:
            out.update(c.names())
        return out

    def pretty(self):
        parts = [f"y^{k}: {c.pretty()}" for k, c in enumerate(self.coeffs) if not c.is_zero()]
        return "{ " + "; ".join(parts) + " }" if parts else "0"

    __repr__ = pretty


class FormalOperator:
    """Normal-ordered operator sum: series(s, y) * D_y^b * D_s^c."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for key, series in terms.items():
                if not series.is_zero():
                    self.terms[key] = series

    @classmethod
    def multiplication(cls, series):
        if not isinstance(series, JetSeries):
            series = JetSeries.const(series)
        return cls({(0, 0): series})

    @classmethod
    def d_y(cls):
        return cls({(1, 0): JetSeries.const(1)})

    @classmethod
    def d_s(cls):
        return cls({(0, 1): JetSeries.const(1)})

    def __add__(self, other):
        out = dict(self.terms)
        for key, series in other.terms.items():
            acc = out.get(key)
            acc = series if acc is None else acc + series
            if acc.is_zero():
                out.pop(key, None)
            else:
                out[key] = acc
        return FormalOperator(out)

    def __neg__(self):
        return FormalOperator({k: -s for k, s in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        return FormalOperator({k: s * factor for k, s in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, FormalOperator) and self.terms == other.terms

    def compose(self, other):
        """Operator product self . other, renormal-ordered."""
        out = FormalOperator()
        minus_i = -I
        for (b, c), fa in self.terms.items():
            for (bp, cp), fb in other.terms.items():
                # move D_y^b D_s^c across fb
                for j in range(b + 1):
                    gy = fb
                    for _ in range(j):
                        gy = gy.dy() * minus_i
                    for k in range(c + 1):
                        g = gy
                        for _ in range(k):
                            g = g.ds() * minus_i
                        if g.is_zero():
                            continue
                        coeff = math.comb(b, j) * math.comb(c, k)
                        series = fa * g * QQi(coeff)
                        key = (b - j + bp, c - k + cp)
                        cur = out.terms.get(key)
                        acc = series if cur is None else cur + series
                        if acc.is_zero():
                            out.terms.pop(key, None)
                        else:
                            out.terms[key] = acc
        return out

    def names(self):
        out = set()
        for s in self.terms.values():
            out.update(s.names())
        return out

    def pretty(self):
        if not self.terms:
            return "0"
        lines = []
        for (b, c), s in sorted(self.terms.items()):
            ops = ("D_y^%d " % b if b else "") + ("D_s^%d" % c if c else "")
            lines.append(f"[{ops.strip() or '1'}] {s.pretty()}")
        return "\n".join(lines)

    __repr__ = pretty


# ---------------------------------------------------------------------------
# Fermi metric jets and the half-density Laplacian
# ---------------------------------------------------------------------------

def fermi_metric_jets(order=4):
    """Taylor jets of the Fermi area density J(s, y) and of g^00 = J^-2.

    J solves d^2_y J = -K J with J(s,0) = 1, d_y J(s,0) = 0 and the
    curvature 2-jet K(s,y) = tau + tau_nu*y + (1/2)tau_nunu*y^2; higher
    y-jets of K are not tracked (they only enter beyond the graded orders
    this package uses).  Returns (J, g00) as JetSeries up to y^order.
    """
    if order > SERIES_TRUNC:
        raise ValueError(f"order must be <= {SERIES_TRUNC}")
    K = [TAU, TAU_NU, TAU_NUNU * QQi(Fraction(1, 2))]
    j = [JP.const(1), JP()] + [JP() for _ in range(SERIES_TRUNC - 1)]
    for k in range(0, SERIES_TRUNC - 1):
        # (k+2)(k+1) j_{k+2} = - sum_m K_m j_{k-m}
        acc = JP()
        for m, Km in enumerate(K):
            if k - m >= 0:
                acc = acc + Km * j[k - m]
        j[k + 2] = acc * QQi(Fraction(-1, (k + 2) * (k + 1)))
    J = JetSeries(j)
    g00 = (J * J).inverse()
    clip = lambda s: JetSeries(s.coeffs[: order + 1])
    return clip(J), clip(g00)


def half_density_laplacian(jets=None):
    """Positive half-density Laplacian in Fermi coordinates, normal-ordered.

    Built verbatim from the symmetric form
        -P = J^(-1/2) d_s g00 J d_s J^(-1/2) + J^(-1/2) d_y J d_y J^(-1/2)
    with d = i*D.  Truncated at y-degree 6.
    """
    if jets is None:
        jets = fermi_metric_jets(SERIES_TRUNC)
    J, g00 = jets
    if J.trunc < 4:
        raise ValueError("jets must be computed to order >= 4")
    if J.trunc < SERIES_TRUNC:
        pad = lambda s: JetSeries(s.coeffs)
        J, g00 = pad(J), pad(g00)
    Jm12 = J.binomial_power(Fraction(-1, 2))
    M = FormalOperator.multiplication
    ds = FormalOperator.d_s().scale(I)   # d/ds = i D_s
    dy = FormalOperator.d_y().scale(I)   # d/dy = i D_y
    s_part = M(Jm12).compose(ds).compose(M(g00 * J)).compose(ds).compose(M(Jm12))
    y_part = M(Jm12).compose(dy).compose(M(J)).compose(dy).compose(M(Jm12))
    return (s_part + y_part).scale(QQi(-1))


# ---------------------------------------------------------------------------
# Semiclassical grading
# ---------------------------------------------------------------------------

def grade_expansion(op):
    """Collect h-powers of T_h^* M_h^* op T_h M_h.

    Rules: y -> h^(1/2) y, D_y -> h^(-1/2) D_y, D_s -> h^(-1) + D_s.
    Returns a dict {weight (Fraction): FormalOperator}; the graded
    operator L_{2-m/2} sits at weight -2 + m/2.  Nothing is dropped: weights above
    zero are retained (callers report them as the residual).
    """
    graded = {}
    for (b, c), series in op.terms.items():
        for k, coeff in enumerate(series.coeffs):
            if coeff.is_zero():
                continue
            for j in range(c + 1):
                w = Fraction(k - b, 2) - (c - j)
                part = JetSeries([JP() for _ in range(k)] + [coeff * QQi(math.comb(c, j))])
                term = FormalOperator({(b, j): part})
                graded[w] = graded.get(w, FormalOperator()) + term
    return {w: t for w, t in graded.items() if t.terms}


def graded_symbols(graded_term):
    """(y, D_y)-part of a graded operator as Weyl symbols per D_s power.

    Returns {ds_power: PolySymbol in (z, zbar) with JetPolynomial entries}.
    The Weyl symbol of y^k D_y^b is the star product of the pure symbols,
    computed in the same algebra the numeric pipeline uses.
    """
    half = QQi(Fraction(1, 2))
    mhalf_i = QQi(0, Fraction(-1, 2))
    y_sym = PolySymbol({(1, 0): JP.const(half), (0, 1): JP.const(half)})
    eta_sym = PolySymbol({(1, 0): JP.const(mhalf_i), (0, 1): JP.const(-mhalf_i)})
    out = {}
    for (b, c), series in graded_term.terms.items():
        for k, coeff in enumerate(series.coeffs):
            if coeff.is_zero():
                continue
            sym = PolySymbol.constant(JP.const(1))
            for _ in range(k):
                sym = sym * y_sym
            for _ in range(b):
                sym = star_product(sym, eta_sym)
            sym = sym.map_coeffs(lambda v, c0=coeff: v * c0)
            out[c] = out.get(c, PolySymbol()) + sym
    return out


# ---------------------------------------------------------------------------
# Universal constants report
# ---------------------------------------------------------------------------

def _metaplectic_formal(sym):
    """Substitute z -> (Yb + i*dYb)/2 z + (Y + i*dY)/2 zbar etc., formally."""
    half = QQi(Fraction(1, 2))
    halfi = QQi(0, Fraction(1, 2))
    Y, Yb = JP.var("Y"), JP.var("Yb")
    dY, dYb = JP.var("dY"), JP.var("dYb")
    z_img = (Yb * half + dYb * halfi, Y * half + dY * halfi)
    zb_img = (Yb * half - dYb * halfi, Y * half - dY * halfi)
    return sym.substitute_linear(z_img, zb_img)


_INTEGRAND_BASIS = {
    "a": ({"dY": 2, "dYb": 2}, 1),
    "b1": ({"tau": 1, "Y": 1, "Yb": 1, "dY": 1, "dYb": 1}, 1),
    "b2": ({"tau": 1, "Yb": 2, "dY": 2}, 2),  # Re-pair; partner checked for equality
    "c": ({"tau": 2, "Y": 2, "Yb": 2}, 1),
    "d": ({"tau_nunu": 1, "Y": 2, "Yb": 2}, 1),
    "e": ({"tau": 1}, 1),
}


def _match_integrand_basis(poly):
    """Express a diagonal JetPolynomial in the closed integrand basis.

    Returns (coeffs dict, residual JetPolynomial).  The b2 entry multiplies
    Re(dY*Yb)^2, i.e. the two conjugate monomials with equal coefficients.
    """
    coeffs = {}
    residual = poly
    for name, (mono, _weight) in _INTEGRAND_BASIS.items():
        c = residual.coefficient(mono)
        if not c:
            coeffs[name] = QQi()
            continue
        if name == "b2":
            partner = {"tau": 1, "Y": 2, "dYb": 2}
            cp = residual.coefficient(partner)
            if cp != c:
                raise AssertionError("Re-structure violated in b2 extraction")
            # c w + c conj(w) = 2c Re(w): the table entry multiplies Re(dY Yb)^2
            coeffs[name] = QQi(2) * c
            sub = JP({tuple(sorted((k, v) for k, v in mono.items())): c})
            subp = JP({tuple(sorted((k, v) for k, v in partner.items())): cp})
            residual = residual - sub - subp
        else:
            coeffs[name] = c
            sub = JP({tuple(sorted((k, v) for k, v in mono.items())): c})
            residual = residual - sub
    return coeffs, residual


def formal_oscillator(graded):
    """Substituted oscillator symbol h with U* D_s U = D_s - Op(h).

    Read off from the graded order: L1 = c_s D_s + osc(y, D_y), so the
    metaplectic frame propagator has generator osc/c_s.  Returns
    (c_s as QQi, formal substituted symbol of osc/c_s).
    """
    l1 = graded[Fraction(-1)]
    syms = graded_symbols(l1)
    ds_part = syms.get(1)
    if ds_part is None or set(ds_part.coeffs) != {(0, 0)}:
        raise AssertionError("unexpected D_s structure in the h^-1 graded term")
    c_s = ds_part[(0, 0)].terms.get((), QQi())
    osc = syms.get(0, PolySymbol())
    h = _metaplectic_formal(osc).map_coeffs(lambda v: v * (ONE / c_s))
    return c_s, h


def _even_star(a, b):
    """Even-transvectant part of a # b (the s-mean-contributing part)."""
    out = PolySymbol()
    for j in range(0, min(a.degree, b.degree) + 1, 2):
        term = transvectant(a, b, j)
        term = term.map_coeffs(lambda v, f=Fraction(1, math.factorial(j)): v * QQi(f))
        out = out + term
    return out


def derive_normal_form_integrands():
    """Formal diagonal integrands of the order-zero normal form term.

    Conjugates the graded order-zero operator by the metaplectic frame
    (symbols substituted, D_s -> D_s - Op(h)) over the free ring in
    {Y, Yb, dY, dYb, tau, tau_s, tau_nunu} and extracts the |z|^4 and
    |z|^0 coefficients of the D_s-free part.  Total-s-derivative pieces
    (i d_s h from the D_s^2 conjugation, the tau_s y^2 jet term, and the
    odd-transvectant parts of the star products) integrate to zero over
    the period; they are split out, not silently dropped, and their
    vanishing is exercised numerically by the identity suite.
    """
    graded = grade_expansion(half_density_laplacian())
    c_s, h_osc = formal_oscillator(graded)
    l0 = graded[Fraction(0)]
    for (b, c) in l0.terms:
        if b != 0:
            raise AssertionError(f"unexpected D_y power {b} in the order-zero term")
    l0_syms = {c: _metaplectic_formal(sym) for c, sym in graded_symbols(l0).items()}

    total = PolySymbol()
    dropped_tau_s = PolySymbol()
    for c, sym in l0_syms.items():
        if c == 0:
            contrib = sym
        elif c == 1:
            # Op(a) (D_s - Op(h)): D_s-free part is -a # h
            contrib = _even_star(sym, h_osc).map_coeffs(lambda v: -v)
        elif c == 2:
            # Op(a) (D_s - Op(h))^2: D_s-free part is a # (h#h + i d_s h);
            # the i d_s h piece is a total derivative, reported separately
            contrib = _even_star(sym, _even_star(h_osc, h_osc))
        else:
            raise AssertionError(f"unexpected D_s power {c} in the order-zero term")
        for key, v in contrib.items():
            if "tau_s" in v.names():
                dropped_tau_s = dropped_tau_s + PolySymbol({key: v})
            else:
                total = total + PolySymbol({key: v})

    diag22 = total.coeffs.get((2, 2), JP())
    diag00 = total.coeffs.get((0, 0), JP())
    return {"z4": diag22, "z0": diag00, "tau_s_part": dropped_tau_s}


# Verified against the conjugation engine (see tests): the first homological
# solution is Q(s) = FIRST_HOMOLOGICAL_FACTOR * int_0^s d, and the order-zero
# commutator correction is COMMUTATOR_PREFACTOR * [d(s), int_0^s d].
FIRST_HOMOLOGICAL_FACTOR = QQi(Fraction(-1, 2))
COMMUTATOR_PREFACTOR = QQi(0, Fraction(-1, 4))

D_HALF_CUBE_FACTOR = Fraction(1, 3)  # L_(1/2) = (1/3) tau_nu y^3 in hbar units


def d_half_coefficient(m):
    """Scalar c_m with d_(1/2); coeff of z^m zbar^(3-m) = c_m tau_nu Yb^m Y^(3-m)."""
    return Fraction(math.comb(3, m), 1) * D_HALF_CUBE_FACTOR / 8


def commutator_diagonal_constants():
    """Per-pair weights of Im{int F_mn int_0^s F_nm} in the order-zero term.

    Returns {"z4": {(m,n): Fraction}, "z0": {(m,n): Fraction}} for the
    unordered pairs {3,0} and {2,1}; F_mn(s) = tau_nu Yb^m Y^n(s).
    """
    out = {"z4": {}, "z0": {}}
    pref = COMMUTATOR_PREFACTOR  # -i/4, engine-verified
    for (m, n) in ((3, 0), (2, 1)):
        cm, cn = d_half_coefficient(m), d_half_coefficient(n)
        p1 = transvectant_constant((m, n), (n, m), 1)
        p3 = transvectant_constant((m, n), (n, m), 3)
        # the ordered pair and its reverse combine into 2i Im(DI); the star
        # commutator carries 2/j! on the j-th transvectant
        w4 = pref * QQi(0, 2) * QQi(Fraction(2, 1) * p1 * cm * cn)
        w0 = pref * QQi(0, 2) * QQi(Fraction(2, math.factorial(3)) * p3 * cm * cn)
        out["z4"][(m, n)] = w4
        out["z0"][(m, n)] = w0
    return out


def constants_report():
    """Machine-derived table of every universal constant in the construction."""
    J, g00 = fermi_metric_jets(SERIES_TRUNC)
    P = half_density_laplacian((J, g00))
    graded = grade_expansion(P)

    def jc(series, k):
        return series.coeffs[k] if k <= series.trunc else JP()

    l2 = graded.get(Fraction(-2), FormalOperator())
    l32 = graded.get(Fraction(-3, 2), FormalOperator())
    l1 = graded.get(Fraction(-1), FormalOperator())
    l12 = graded.get(Fraction(-1, 2), FormalOperator())
    l0 = graded.get(Fraction(0), FormalOperator())
    residual = {str(w): t.pretty() for w, t in graded.items() if w > 0}

    def op_entry(op, key, ypow):
        series = op.terms.get(key)
        return jc(series, ypow) if series is not None else JP()

    yints = derive_normal_form_integrands()
    y4, rem4 = _match_integrand_basis(yints["z4"])
    y0, rem0 = _match_integrand_basis(yints["z0"])

    comm = commutator_diagonal_constants()

    p1_table = {
        f"({m},{n}),({mu},{nu})": transvectant_constant((m, n), (mu, nu), 1)
        for m in range(4)
        for n in range(4 - m)
        for mu in range(4)
        for nu in range(4 - mu)
        if (m + n, mu + nu) == (3, 3)
    }
    p3_table = {
        f"({m},{n}),({mu},{nu})": transvectant_constant((m, n), (mu, nu), 3)
        for m in range(4)
        for n in range(0, 4 - m)
        for mu in range(4)
        for nu in range(0, 4 - mu)
        if (m + n, mu + nu) == (3, 3)
    }

    report = {
        "normalization": {
            "hbar": "1/r (period absorbed); dilations y->h^(1/2)y, D_y->h^(-1/2)D_y, D_s->h^(-1)+D_s",
            "laplacian_sign": "positive (geometer's); quantization target is the displayed -Delta = ... operator",
            "frame": "Y = y2 + i*y1, Y(0)=1, Y'(0)=i; omega(Y, Ybar) = -2i",
            "p1": "reported invariants are the order-zero diagonal symbol divided by 2 (lambda ~ (r + p1/r)^2)",
            "L_powers": "with an explicit period L the y-jet terms carry L^-2 and the D_s terms L^-1; absorbed here",
        },
        "metric_jets": {
            "J_y2": jc(J, 2).pretty(),
            "J_y3": jc(J, 3).pretty(),
            "J_y4": jc(J, 4).pretty(),
            "g00_y2 (C1)": jc(g00, 2).pretty(),
            "g00_y3 (C2)": jc(g00, 3).pretty(),
            "g00_y4": jc(g00, 4).pretty(),
        },
        "graded": {
            "L2": op_entry(l2, (0, 0), 0).pretty(),
            "L_3/2": "0" if not l32.terms else l32.pretty(),
            "L1_Ds": op_entry(l1, (0, 1), 0).pretty(),
            "L1_Dy2": op_entry(l1, (2, 0), 0).pretty(),
            "L1_y2": op_entry(l1, (0, 0), 2).pretty(),
            "L_1/2_y3 (C)": op_entry(l12, (0, 0), 3).pretty(),
            "L0_Ds2": op_entry(l0, (0, 2), 0).pretty(),
            "L0_y2Ds (C2)": op_entry(l0, (0, 1), 2).pretty(),
            "L0_y2 (C3)": op_entry(l0, (0, 0), 2).pretty(),
            "L0_y4 (C1 + tau^2 part)": op_entry(l0, (0, 0), 4).pretty(),
            "L0_yDy (C4)": op_entry(l0, (1, 0), 1).pretty(),
            "L0_const (C5)": op_entry(l0, (0, 0), 0).pretty(),
        },
        "transvectants": {
            "P1_general": "P1(z^m zb^n, z^mu zb^nu) = sigma((m,n),(mu,nu)) z^(m+mu-1) zb^(n+nu-1)",
            "normalization_note": "references using C_1 = sigma/2 are half this convention",
            "P1_cubic_pairs": p1_table,
            "P3_cubic_pairs": p3_table,
        },
        "pipeline_factors": {
            "first_homological (Q = factor * int d)": repr(FIRST_HOMOLOGICAL_FACTOR),
            "commutator_prefactor ([d, int d] weight)": repr(COMMUTATOR_PREFACTOR),
            "d_half cubic coefficients (C_mn;3)": {
                f"({m},{3-m})": str(d_half_coefficient(m)) for m in range(4)
            },
        },
        "invariant_integrals": {
            "note": "weights of (1/2pi) int over gamma in the order-zero diagonal symbol "
                    "(divide by 2 for the p1 normalization); basis "
                    "[ |dY|^4, tau |dY Y|^2, tau Re(dY Yb)^2, tau^2 |Y|^4, tau_nunu |Y|^4, tau ]",
            "j2 (|z|^4)": {k: repr(v) for k, v in y4.items()},
            "j0 (|z|^0)": {k: repr(v) for k, v in y0.items()},
            "j2_residual": rem4.pretty(),
            "j0_residual": rem0.pretty(),
            "dropped_mean_free": "i d_s(h), -i tau_s yhat^2 (int tau_s Y^a Yb^b = 0), odd-transvectant parts "
                                 "(reduce to tau d/ds|Y|^2 by the Wronskian); all verified numerically",
            "commutator_j2 (weights of Im double integrals)": {
                f"({m},{n})": repr(v) for (m, n), v in comm["z4"].items()
            },
            "commutator_j0": {
                f"({m},{n})": repr(v) for (m, n), v in comm["z0"].items()
            },
        },
        "assertions": {
            "e2_zero": repr(y4["e"]),
            "d0_zero": repr(y0["d"]),
            "C4_zero": op_entry(l0, (1, 0), 1).pretty(),
            "round_sphere_c2": repr(round_sphere_c2()),
        },
        "residual_weights": residual,
    }
    return report


def round_sphere_c2():
    """Exact |z|^4 coefficient of the averaged order-zero symbol on the round sphere.

    Substitutes Y = e^{is}, tau = 1 into the derived integrands: a monomial
    Y^p Yb^q dY^r dYb^t has s-mean i^r (-i)^t [p + r == q + t], so the
    basis coefficients combine exactly.  Zero is the universal linear
    relation among the constants.
    """
    parts = derive_normal_form_integrands()
    return _round_sphere_mean(parts["z4"])


def _round_sphere_mean(poly):
    """Exact s-mean of a jet polynomial in Y-monomials at Y = e^{is}, tau = 1."""
    total = QQi()
    for key, val in poly.terms.items():
        e = dict(key)
        p, q = e.pop("Y", 0), e.pop("Yb", 0)
        r, t = e.pop("dY", 0), e.pop("dYb", 0)
        e.pop("tau", None)
        if e.pop("tau_nunu", 0) or e.pop("tau_s", 0) or e:
            continue  # vanishing jets on the round sphere
        if p + r != q + t:
            continue  # oscillatory mean
        ir = {0: ONE, 1: I, 2: -ONE, 3: -I}[r % 4]
        mit = {0: ONE, 1: -I, 2: -ONE, 3: I}[t % 4]
        total = total + val * ir * mit
    return total
