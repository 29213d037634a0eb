"""Zoll metrics of revolution and their curvature jets.

The metric family is f(r)^2 dr^2 + sin(r)^2 dphi^2 on S^2 with
f(r) = 1 + h(cos r) and h an odd polynomial, |h| < 1 on [-1, 1].  Every
geodesic avoiding the poles closes smoothly at length 2*pi (the odd part
of the profile drops out of the Clairaut integrals), which is what makes
the family a usable Zoll corpus.  Profiles with h(1) != 0 have cone
points at the poles; they are accepted, but surface-global quantities
(Gauss-Bonnet) then see the cone defect.

Tangent vectors are stored as components (v1, v2) in the orthonormal
frame e1 = (1/f) d_r, e2 = (1/sin r) d_phi of the north polar chart,
which orients the surface; the unit normal of a geodesic is the +pi/2
rotation (v1, v2) -> (-v2, v1).

Curvature jets are evaluated from closed-form derivatives of
K(u) = (f - u h'(u)) / f^3, u = cos r, which stay regular at the poles;
the finite-difference stencil along the normal geodesic is kept as the
cross-check oracle.
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import solve_ivp

__all__ = [
    "MetricModel",
    "SurfacePoint",
    "CurvatureJet",
    "IntegrationError",
    "gaussian_curvature",
    "exp_map",
    "curvature_jet_at",
    "rotate_isometry",
    "rotate_tangent",
    "state_distance",
]

ADMISSIBILITY_SAMPLES = 10_000
CHART_CORE = (0.2, math.pi - 0.2)
MERIDIAN_TOL = 1e-12      # |Clairaut constant| below this is traced as a meridian
ODE_TOL = 1e-12


class IntegrationError(RuntimeError):
    def __init__(self, message, arclength_reached=None):
        super().__init__(message)
        self.arclength_reached = arclength_reached


@dataclass(frozen=True)
class MetricModel:
    """A Zoll metric specification.

    kind: "round" or "zoll_revolution".  The profile h(x) = sum a_k x^(2k+1)
    is stored through its odd coefficients.  `h_even_coeffs` (powers
    x^2, x^4, ...) is a diagnostic hook that deliberately destroys the Zoll
    property; it exists for negative-control fixtures only.
    """

    kind: str = "round"
    h_odd_coeffs: tuple = ()
    h_even_coeffs: tuple = ()

    def __post_init__(self):
        if self.kind not in ("round", "zoll_revolution"):
            raise ValueError(f"unknown metric kind {self.kind!r}")
        object.__setattr__(self, "h_odd_coeffs", tuple(float(a) for a in self.h_odd_coeffs))
        object.__setattr__(self, "h_even_coeffs", tuple(float(a) for a in self.h_even_coeffs))
        if self.kind == "round" and (self.h_odd_coeffs or self.h_even_coeffs):
            raise ValueError("round metric takes no profile coefficients")
        x = np.linspace(-1.0, 1.0, ADMISSIBILITY_SAMPLES)
        if np.max(np.abs(self._h_poly()(x))) >= 1.0:
            raise ValueError("inadmissible profile: |h| must stay below 1 on [-1, 1]")

    @classmethod
    def round(cls):
        return cls(kind="round")

    @classmethod
    def zoll_revolution(cls, h_odd_coeffs, h_even_coeffs=()):
        return cls(kind="zoll_revolution", h_odd_coeffs=tuple(h_odd_coeffs),
                   h_even_coeffs=tuple(h_even_coeffs))

    @property
    def is_round(self):
        return not self.h_odd_coeffs and not self.h_even_coeffs

    def _h_poly(self):
        deg = 2 * len(self.h_odd_coeffs) + 1 if self.h_odd_coeffs else 0
        deg = max(deg, 2 * len(self.h_even_coeffs))
        coeffs = np.zeros(max(deg + 1, 1))
        for k, a in enumerate(self.h_odd_coeffs):
            coeffs[2 * k + 1] = a
        for k, a in enumerate(self.h_even_coeffs):
            coeffs[2 * k + 2] = a
        return Polynomial(coeffs)

    def _curvature_polys(self):
        """Cached numerator/denominator data for K(u) and its u-derivatives."""
        cache = getattr(self, "_cpolys", None)
        if cache is None:
            h = self._h_poly()
            hp = h.deriv()
            f = Polynomial([1.0]) + h
            N = f - Polynomial([0.0, 1.0]) * hp
            cache = {
                "h": h, "hp": hp, "hpp": hp.deriv(), "f": f,
                "N": N, "Np": N.deriv(), "Npp": N.deriv(2),
            }
            object.__setattr__(self, "_cpolys", cache)
        return cache

    def profile(self, u):
        return self._curvature_polys()["h"](u)

    def warp(self, u):
        """f = 1 + h(u) at u = cos r."""
        return 1.0 + self.profile(u)

    def curvature_u(self, u):
        """Gaussian curvature as a function of u = cos r."""
        c = self._curvature_polys()
        return c["N"](u) / c["f"](u) ** 3

    def curvature_u_derivs(self, u):
        """(K, dK/du, d2K/du2) at u = cos r, vectorized and pole-regular."""
        c = self._curvature_polys()
        f, hp, hpp = c["f"](u), c["hp"](u), c["hpp"](u)
        N, Np, Npp = c["N"](u), c["Np"](u), c["Npp"](u)
        K = N / f**3
        Kp = Np / f**3 - 3.0 * N * hp / f**4
        Kpp = (Npp / f**3 - (6.0 * Np * hp + 3.0 * N * hpp) / f**4
               + 12.0 * N * hp**2 / f**5)
        return K, Kp, Kpp


@dataclass(frozen=True)
class SurfacePoint:
    """Point in one of the two polar charts; r in (0, pi), phi in [0, 2pi)."""

    chart: str
    r: float
    phi: float

    def __post_init__(self):
        if self.chart not in ("north", "south"):
            raise ValueError(f"unknown chart {self.chart!r}")
        object.__setattr__(self, "phi", float(self.phi) % (2.0 * math.pi))
        object.__setattr__(self, "r", float(self.r))

    @classmethod
    def north(cls, r, phi):
        return cls("north", r, phi)

    def to_north(self):
        if self.chart == "north":
            return self
        return SurfacePoint("north", math.pi - self.r, self.phi)

    def to_south(self):
        if self.chart == "south":
            return self
        return SurfacePoint("south", math.pi - self.r, self.phi)

    def in_chart(self, chart):
        return self.to_north() if chart == "north" else self.to_south()

    def canonical(self):
        """Representation in the chart keeping r inside the core window."""
        p = self.to_north()
        if p.r > CHART_CORE[1]:
            return p.to_south()
        return p


def tangent_to_north(p, v):
    """Convert frame components of a tangent at p to the north chart frame."""
    if p.chart == "north":
        return np.asarray(v, dtype=float)
    v = np.asarray(v, dtype=float)
    return np.array([-v[0], v[1]])  # d_{r_south} = -d_{r_north}, e2 unchanged


def rotate_tangent(v, angle):
    """Rotate frame components by `angle` counterclockwise."""
    c, s = math.cos(angle), math.sin(angle)
    v = np.asarray(v, dtype=float)
    return np.array([c * v[0] - s * v[1], c * v[1] + s * v[0]])


@dataclass(frozen=True)
class CurvatureJet:
    """Curvature and its jet along a geodesic direction: tau, tau_s, tau_nu, tau_nunu."""

    tau: float
    tau_s: float
    tau_nu: float
    tau_nunu: float

    def as_dict(self):
        return {"tau": self.tau, "tau_s": self.tau_s,
                "tau_nu": self.tau_nu, "tau_nunu": self.tau_nunu}


def _as_north(p, v):
    vn = tangent_to_north(p, v)
    pn = p.to_north()
    return pn.r, pn.phi, vn


def gaussian_curvature(metric, p):
    """Gaussian curvature at p; for revolution metrics a function of r only.

    K(u = cos r) is regular across the poles, so pole-adjacent points need
    no special chart handling beyond clamping u into [-1, 1].
    """
    if metric.is_round:
        return 1.0
    u = min(1.0, max(-1.0, math.cos(p.to_north().r)))
    return float(metric.curvature_u(u))


def curvature_jet_arrays(metric, r, v1, v2, n1, n2):
    """Vectorized analytic jets along a geodesic sample set.

    r: colatitudes; (v1, v2): unit tangent frame components; (n1, n2): unit
    normal components.  All formulas are written in u = cos r and stay
    finite at the poles.
    """
    u = np.cos(r)
    sin_r = np.sin(r)
    f = metric.warp(u)
    K, Kp, Kpp = metric.curvature_u_derivs(u)
    sin2 = 1.0 - u * u
    hp = metric._curvature_polys()["hp"](u)
    tau = K
    tau_s = -Kp * sin_r * v1 / f
    tau_nu = -Kp * sin_r * n1 / f
    tau_nunu = (n1**2 / f**2) * (Kpp * sin2 - Kp * u - Kp * sin2 * hp / f) \
        - Kp * u * n2**2 / f**2
    return tau, tau_s, tau_nu, tau_nunu


def curvature_jet_at(metric, p, tangent, method="analytic", fd_step=1e-3):
    """Curvature jet (tau, tau_s, tau_nu, tau_nunu) at p along `tangent`.

    The normal is the +pi/2 rotation of the tangent.  `method="analytic"`
    uses the closed-form revolution derivatives (default); `method="fd"`
    evaluates tau_nu / tau_nunu by 5-point central differences with step
    `fd_step` along the normal geodesic and tau_s likewise along the
    tangent geodesic, serving as the independent oracle.
    """
    r, phi, v = _as_north(p, tangent)
    if abs(np.hypot(v[0], v[1]) - 1.0) > 1e-10:
        raise ValueError("tangent must be unit length")
    nrm = rotate_tangent(v, math.pi / 2)
    if metric.is_round:
        return CurvatureJet(1.0, 0.0, 0.0, 0.0)
    if method == "analytic":
        tau, tau_s, tau_nu, tau_nunu = curvature_jet_arrays(
            metric, np.array([r]), np.array([v[0]]), np.array([v[1]]),
            np.array([nrm[0]]), np.array([nrm[1]]))
        return CurvatureJet(float(tau[0]), float(tau_s[0]),
                            float(tau_nu[0]), float(tau_nunu[0]))
    if method != "fd":
        raise ValueError(f"unknown method {method!r}")
    pn = SurfacePoint.north(r, phi)

    def k_along(direction, t):
        q, _ = exp_map(metric, pn, direction, t)
        return gaussian_curvature(metric, q)

    h = fd_step
    kn = [k_along(nrm, t * h) for t in (-3, -2, -1, 0, 1, 2, 3)]
    kt = [k_along(v, t * h) for t in (-2, -1, 1, 2)]
    tau = kn[3]
    tau_s = (kt[0] - 8 * kt[1] + 8 * kt[2] - kt[3]) / (12 * h)
    tau_nu = (kn[1] - 8 * kn[2] + 8 * kn[4] - kn[5]) / (12 * h)
    tau_nunu = (-kn[1] + 16 * kn[2] - 30 * kn[3] + 16 * kn[4] - kn[5]) / (12 * h * h)
    return CurvatureJet(tau, tau_s, tau_nu, tau_nunu)


def tau_nunu_stencil(metric, p, tangent, points=5, fd_step=1e-3):
    """tau_nunu by a pure central stencil (5- or 7-point), oracle use only."""
    r, phi, v = _as_north(p, tangent)
    nrm = rotate_tangent(v, math.pi / 2)
    pn = SurfacePoint.north(r, phi)
    h = fd_step

    def k(t):
        q, _ = exp_map(metric, pn, nrm, t * h)
        return gaussian_curvature(metric, q)

    if points == 5:
        vals = [k(t) for t in (-2, -1, 0, 1, 2)]
        num = -vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]
        return num / (12 * h * h)
    if points == 7:
        vals = [k(t) for t in (-3, -2, -1, 0, 1, 2, 3)]
        num = (2 * vals[0] - 27 * vals[1] + 270 * vals[2] - 490 * vals[3]
               + 270 * vals[4] - 27 * vals[5] + 2 * vals[6])
        return num / (180 * h * h)
    raise ValueError("points must be 5 or 7")


# ---------------------------------------------------------------------------
# Geodesic flow
# ---------------------------------------------------------------------------

def clairaut_constant(metric, r, v2):
    """c = g(v, d_phi) = v2 sin r, conserved along geodesics."""
    return math.sin(r) * v2


def _flow_rhs(metric, c):
    cp = metric._curvature_polys()
    h, hp = cp["h"], cp["hp"]

    def rhs(_s, state):
        r, _phi, pr = state
        u = math.cos(r)
        sr = math.sin(r)
        f = 1.0 + h(u)
        fp = -sr * hp(u)
        dr = pr / (f * f)
        dphi = c / (sr * sr)
        dpr = pr * pr * fp / f**3 + c * c * u / sr**3
        return (dr, dphi, dpr)
    return rhs


def _meridian_rhs(metric):
    h = metric._curvature_polys()["h"]

    def rhs(_s, state):
        (rho,) = state
        return (1.0 / (1.0 + h(math.cos(rho))),)
    return rhs


def _fold_meridian(rho, phi0, direction):
    """Map unrolled meridian angle to (r, phi, v1, v2) with pole-crossing parity."""
    m = np.mod(direction * rho, 2.0 * math.pi)
    upper = m <= math.pi
    r = np.where(upper, m, 2.0 * math.pi - m)
    phi = np.where(upper, phi0, phi0 + math.pi) % (2.0 * math.pi)
    v1 = np.where(upper, 1.0, -1.0) * direction
    v2 = np.zeros_like(r)
    return r, phi, v1, v2


def flow(metric, p, v, t_eval, rtol=ODE_TOL, atol=ODE_TOL):
    """Geodesic flow from (p, v), sampled at arclengths `t_eval`.

    Returns arrays (r, phi, v1, v2) in the north chart.  Meridians
    (|Clairaut constant| < 1e-12) are integrated on the unrolled covering
    angle, which passes smoothly through the poles; all other geodesics
    keep sin r >= |c| and are integrated in the Hamiltonian form
    (r, phi, p_r).
    """
    r0, phi0, v = _as_north(p, v)
    t_eval = np.atleast_1d(np.asarray(t_eval, dtype=float))
    t_end = float(t_eval[-1])
    c = clairaut_constant(metric, r0, v[1])
    if abs(c) < MERIDIAN_TOL:
        direction = 1.0 if v[0] >= 0 else -1.0
        sol = solve_ivp(_meridian_rhs(metric), (0.0, t_end), [direction * r0],
                        method="DOP853", t_eval=t_eval, rtol=rtol, atol=atol,
                        dense_output=False)
        if not sol.success:
            raise IntegrationError(sol.message, arclength_reached=float(sol.t[-1]) if len(sol.t) else 0.0)
        # rho was integrated with d(rho)/ds = +1/f along the motion; undo direction
        rho = sol.y[0]
        r, phi, v1, v2 = _fold_meridian(rho, phi0, direction)
        return r, phi, v1, v2
    sol = solve_ivp(_flow_rhs(metric, c), (0.0, t_end),
                    [r0, phi0, (1.0 + float(metric.profile(math.cos(r0)))) * v[0]],
                    method="DOP853", t_eval=t_eval, rtol=rtol, atol=atol)
    if not sol.success:
        raise IntegrationError(sol.message, arclength_reached=float(sol.t[-1]) if len(sol.t) else 0.0)
    r, phi, pr = sol.y
    f = 1.0 + metric.profile(np.cos(r))
    v1 = pr / f
    v2 = c / np.sin(r)
    return r, phi % (2.0 * math.pi), v1, v2


def exp_map(metric, p, v, t, rtol=ODE_TOL, atol=ODE_TOL):
    """Geodesic endpoint and transported unit tangent after arclength t."""
    v = tangent_to_north(p, v)
    norm = math.hypot(v[0], v[1])
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"tangent must be unit length, |v| = {norm}")
    if t == 0.0:
        return p.to_north(), v
    if t < 0.0:
        q, w = exp_map(metric, p, -v, -t, rtol=rtol, atol=atol)
        return q, -w
    r, phi, v1, v2 = flow(metric, p, v, [t], rtol=rtol, atol=atol)
    return SurfacePoint.north(float(r[-1]), float(phi[-1])), np.array([float(v1[-1]), float(v2[-1])])


def rotate_isometry(p, v, angle):
    """Image of (point, tangent) under the revolution isometry phi -> phi + angle."""
    pn = p.to_north()
    return SurfacePoint.north(pn.r, pn.phi + angle), tangent_to_north(p, v)


def state_distance(metric, p1, v1, p2, v2):
    """Distance in the unit tangent bundle between two nearby states.

    Surface distance is the local metric chord (second-order accurate for
    nearby points, exact enough for closure defects); the tangent gap is
    the frame angle difference.
    """
    a, b = p1.to_north(), p2.to_north()
    rbar = 0.5 * (a.r + b.r)
    f = float(metric.warp(math.cos(rbar)))
    dphi = (a.phi - b.phi + math.pi) % (2.0 * math.pi) - math.pi
    dist = math.hypot(f * (a.r - b.r), math.sin(rbar) * dphi)
    w1, w2 = tangent_to_north(p1, v1), tangent_to_north(p2, v2)
    th1, th2 = math.atan2(w1[1], w1[0]), math.atan2(w2[1], w2[0])
    dth = abs((th1 - th2 + math.pi) % (2.0 * math.pi) - math.pi)
    return dist + dth


def surface_integral_of_curvature(metric, n_quad=400):
    """Integral of K over the surface by Gauss-Legendre quadrature in u = cos r.

    dA = f(r) sin r dr dphi, so the integral is 2*pi * int_{-1}^{1} K(u) f(u) du.
    Equals 4*pi for smooth profiles (h(+-1) = 0); cone-pointed profiles show
    the angle defect.
    """
    if metric.is_round:
        return 4.0 * math.pi
    x, w = np.polynomial.legendre.leggauss(n_quad)
    vals = metric.curvature_u(x) * metric.warp(x)
    return 2.0 * math.pi * float(np.dot(w, vals))
