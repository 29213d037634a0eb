"""Jacobi fields, Poincare map, Floquet data, and the variation equation.

The scalar Jacobi equation y'' + tau(s) y = 0 is integrated along a traced
geodesic, driven by the trigonometric interpolant of the sampled curvature
(decoupling this module from re-tracing).  The complex frame is
Y = y2 + i*y1 with Y(0) = 1, Y'(0) = i; its Wronskian against the
conjugate is omega(Y, Ybar) = Y Ybar' - Y' Ybar = -2i, constant in s.
On a Zoll metric the Poincare matrix is the identity and all solutions
are periodic.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .fourier import TrigInterpolant, spectral_derivative
from .surface import IntegrationError

__all__ = [
    "JacobiFrame",
    "VariationField",
    "solve_fundamental",
    "floquet_exponents",
    "quasi_frequency",
    "variation_field",
]

ODE_TOL = 1e-12
WRONSKIAN_TOL = 1e-8
ELLIPTIC_TOL = 1e-6


@dataclass(frozen=True)
class JacobiFrame:
    """Fundamental Jacobi solutions along a closed geodesic.

    y1 is vertical (y1(0) = 0, y1'(0) = 1), y2 horizontal (y2(0) = 1,
    y2'(0) = 0); Y = y2 + i*y1.  `poincare` is the symplectic Wronskian
    matrix at s = 2*pi acting on (y', y).
    """

    path: object
    y1: np.ndarray
    dy1: np.ndarray
    y2: np.ndarray
    dy2: np.ndarray
    poincare: np.ndarray
    wronskian_drift: float

    @property
    def Y(self):
        return self.y2 + 1j * self.y1

    @property
    def dY(self):
        return self.dy2 + 1j * self.dy1

    @property
    def wronskian(self):
        """y2 y1' - y1 y2' at every sample (identically 1 up to solver error)."""
        return self.y2 * self.dy1 - self.y1 * self.dy2

    @property
    def omega(self):
        """omega(Y, Ybar) = Y conj(Y)' - Y' conj(Y) at every sample (= -2i)."""
        Y, dY = self.Y, self.dY
        return Y * np.conj(dY) - dY * np.conj(Y)


def solve_fundamental(path):
    """Fundamental Jacobi frame along `path`, with Poincare matrix at 2*pi."""
    tau = TrigInterpolant(path.tau)

    def rhs(s, y):
        t = tau(s)
        return (y[1], -t * y[0], y[3], -t * y[2])

    t_eval = np.append(path.s, 2.0 * math.pi)
    sol = solve_ivp(rhs, (0.0, 2.0 * math.pi), [0.0, 1.0, 1.0, 0.0],
                    method="DOP853", t_eval=t_eval, rtol=ODE_TOL, atol=ODE_TOL)
    if not sol.success:
        raise IntegrationError(sol.message)
    y1, dy1, y2, dy2 = sol.y
    # monodromy on states (y', y): a_L a_0^{-1} in the Wronskian-matrix
    # arrangement; reduces to the identity on Zoll metrics
    poincare = np.array([[dy1[-1], dy2[-1]],
                         [y1[-1], y2[-1]]])
    frame = JacobiFrame(
        path=path,
        y1=y1[:-1], dy1=dy1[:-1], y2=y2[:-1], dy2=dy2[:-1],
        poincare=poincare,
        wronskian_drift=float(np.max(np.abs(y2[:-1] * dy1[:-1] - y1[:-1] * dy2[:-1] - 1.0))),
    )
    if frame.wronskian_drift > WRONSKIAN_TOL:
        raise IntegrationError(
            f"Wronskian drift {frame.wronskian_drift:.3e} > {WRONSKIAN_TOL}; "
            "integration tolerance insufficient")
    return frame


def floquet_exponents(frame_or_matrix):
    """Floquet exponent alpha with Poincare eigenvalues e^{+-i alpha}.

    Raises for hyperbolic or loxodromic matrices (out of the elliptic
    scope of this package).
    """
    P = frame_or_matrix.poincare if isinstance(frame_or_matrix, JacobiFrame) else np.asarray(frame_or_matrix)
    eigs = np.linalg.eigvals(P)
    if np.max(np.abs(np.abs(eigs) - 1.0)) > ELLIPTIC_TOL:
        raise ValueError(f"Poincare eigenvalues {eigs} leave the unit circle: not elliptic")
    half_trace = float(np.trace(P).real) / 2.0
    return float(math.acos(min(1.0, max(-1.0, half_trace))))


def quasi_frequency(k, q, alpha):
    """r_kq = k + 1/2 + (q + 1/2) alpha / (2 pi); reduces to k + 1/2 at alpha = 0."""
    if k < 0 or q < 0:
        raise ValueError("k and q must be nonnegative integers")
    return k + 0.5 + (q + 0.5) * alpha / (2.0 * math.pi)


@dataclass(frozen=True)
class VariationField:
    """Solution of the forced variation equation y_nu'' + tau_nu v y + tau y_nu = 0.

    For the canonical diagonal case v = y this reduces to
    y_nu'' + tau_nu y^2 + tau y_nu = 0.
    """

    y_nu: np.ndarray
    dy_nu: np.ndarray
    tau: np.ndarray
    tau_nu: np.ndarray
    y: np.ndarray
    direction: np.ndarray

    def residual(self):
        """Collocation residual, differentiating the sampled first derivative.

        One spectral derivative of dy_nu instead of two of y_nu keeps the
        solver sample noise from being amplified by the squared Nyquist
        wavenumber.  Meaningful when the field is periodic (Zoll inputs
        with ic (0, 0)).
        """
        second = spectral_derivative(self.dy_nu, order=1)
        return second + self.tau_nu * self.direction * self.y + self.tau * self.y_nu


def variation_field(frame, tau_nu=None, y=None, ic=(0.0, 0.0), direction=None):
    """Variation of a Jacobi solution under a normal deformation of the geodesic.

    Solves y_nu'' = -tau y_nu - tau_nu v(s) y(s) with the given initial
    data, where v = `direction` is the Jacobi field generating the
    deformation.  By default v = y, the diagonal form
    y_nu'' + tau_nu y^2 + tau y_nu = 0; ic = (0, 0) is the variation of the
    canonical family with frozen initial conditions.  The deformation is
    geometric (a family of nearby geodesics) only for real v: the
    Wronskian-variation identity Im(y_nu Ybar' - y_nu' Ybar) = 0 holds for
    real directions, e.g. v = y2 for the family displaced along the unit
    normal at the base point.
    """
    path = frame.path
    if tau_nu is None:
        tau_nu = path.tau_nu
    if y is None:
        y = frame.Y
    tau_nu = np.asarray(tau_nu)
    y = np.asarray(y)
    direction = y if direction is None else np.asarray(direction)
    if tau_nu.shape != path.s.shape or y.shape != path.s.shape:
        raise ValueError("samples do not live on the path grid")
    tau_i = TrigInterpolant(path.tau)
    force_i = TrigInterpolant(tau_nu * direction * y)

    def rhs(s, state):
        return (state[1], -tau_i(s) * state[0] - force_i(s))

    y0 = np.array([ic[0], ic[1]], dtype=complex)
    sol = solve_ivp(rhs, (0.0, 2.0 * math.pi), y0, method="DOP853",
                    t_eval=path.s, rtol=ODE_TOL, atol=ODE_TOL)
    if not sol.success:
        raise IntegrationError(sol.message)
    return VariationField(y_nu=sol.y[0], dy_nu=sol.y[1],
                          tau=np.asarray(path.tau), tau_nu=tau_nu, y=y,
                          direction=direction)
