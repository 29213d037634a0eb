"""Spectral calculus on uniform periodic grids over [0, 2*pi).

All sampled coefficient functions in this package live on the grid
s_j = 2*pi*j/N with N a power of two.  Derivatives, antiderivatives and
means are computed through the FFT, so they are exact for trigonometric
polynomials and spectrally accurate for smooth periodic data.
"""

import numpy as np

__all__ = [
    "grid",
    "spectral_derivative",
    "spectral_antiderivative",
    "periodic_mean",
    "TrigInterpolant",
]

MEAN_ZERO_TOL = 1e-10  # residual means below this are zeroed in antiderivatives


def _check_grid(n):
    if n < 2 or (n & (n - 1)) != 0:
        raise ValueError(f"grid size must be a power of two >= 2, got {n}")


def grid(n):
    """Sample points s_j = 2*pi*j/n."""
    _check_grid(n)
    return 2.0 * np.pi * np.arange(n) / n


def _wavenumbers(n):
    k = np.fft.fftfreq(n, d=1.0 / n)
    return k


def spectral_derivative(values, order=1):
    """d^order/ds^order of a periodic sampled function."""
    values = np.asarray(values)
    n = values.shape[-1]
    _check_grid(n)
    k = _wavenumbers(n)
    if order % 2 == 1:
        # the unpaired Nyquist mode differentiates to an odd, aliased term
        k = k.copy()
        k[n // 2] = 0.0
    coeffs = np.fft.fft(values) * (1j * k) ** order
    out = np.fft.ifft(coeffs)
    if np.isrealobj(values):
        return out.real
    return out


def periodic_mean(values):
    """Trapezoidal mean over one period (exact = sample mean on this grid)."""
    return np.mean(np.asarray(values), axis=-1)


def spectral_antiderivative(values, zero_mean_tol=MEAN_ZERO_TOL):
    """Cumulative integral F(s) = int_0^s f, F(0) = 0.

    The mean-zero part is integrated exactly in Fourier space; a residual
    mean m contributes the explicit linear ramp m*s.  Means with |m| below
    `zero_mean_tol` are zeroed, keeping F periodic for numerically
    mean-free input.
    """
    values = np.asarray(values)
    n = values.shape[-1]
    _check_grid(n)
    coeffs = np.fft.fft(values)
    mean = coeffs[..., 0] / n
    mean = np.where(np.abs(mean) < zero_mean_tol, 0.0, mean)
    k = _wavenumbers(n)
    ik = 1j * k
    ik[0] = 1.0  # dummy, zero mode handled by the ramp
    prim = coeffs / ik
    prim[..., 0] = 0.0
    # the Nyquist mode has no well-defined primitive on the grid; for smooth
    # data its coefficient is at roundoff level, drop it
    prim[..., n // 2] = 0.0
    osc = np.fft.ifft(prim)
    osc = osc - osc[..., :1]
    s = grid(n)
    out = osc + np.multiply.outer(mean, s) if values.ndim > 1 else osc + mean * s
    if np.isrealobj(values):
        return out.real
    return out


class TrigInterpolant:
    """Evaluates the trigonometric interpolant of periodic samples anywhere.

    Modes with relative magnitude below `tol` are discarded, so evaluation
    cost scales with the number of significant harmonics rather than the
    grid size.  Used to drive ODE solves with sampled coefficients.
    """

    def __init__(self, values, tol=1e-15):
        self._real = np.isrealobj(np.asarray(values))
        values = np.asarray(values, dtype=complex)
        n = values.shape[-1]
        _check_grid(n)
        coeffs = np.fft.fft(values) / n
        k = _wavenumbers(n)
        scale = np.max(np.abs(coeffs)) or 1.0
        keep = np.abs(coeffs) > tol * scale
        keep[0] = True
        self._k = k[keep]
        self._c = coeffs[keep]

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        phases = np.exp(1j * np.multiply.outer(s, self._k))
        out = phases @ self._c
        if self._real:
            out = out.real
        return out if out.shape else out[()]
