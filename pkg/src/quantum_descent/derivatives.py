"""Finite-difference and spectral derivatives on uniform 1-D grids.

Default scheme is 2nd-order central differences: periodic grids wrap the
stencil, non-periodic grids fall back to one-sided 2nd-order stencils at the
two boundary points.  A spectral (FFT) scheme is available for periodic grids
and smooth periodic fields.
"""

from __future__ import annotations

import numpy as np

SCHEMES = ("central", "spectral")


def _check_scheme(scheme: str, periodic: bool) -> None:
    if scheme not in SCHEMES:
        raise ValueError(f"unknown derivative scheme {scheme!r}, expected one of {SCHEMES}")
    if scheme == "spectral" and not periodic:
        raise ValueError("spectral derivatives require a periodic grid")


def first_derivative(values: np.ndarray, dx: float, periodic: bool, scheme: str = "central") -> np.ndarray:
    """d/dx of ``values`` sampled with spacing ``dx``."""
    _check_scheme(scheme, periodic)
    f = np.asarray(values)
    if scheme == "spectral":
        k = 2.0 * np.pi * np.fft.fftfreq(f.size, d=dx)
        out = np.fft.ifft(1j * k * np.fft.fft(f))
        return out if np.iscomplexobj(f) else out.real

    out = np.empty_like(f, dtype=np.result_type(f, float))
    if periodic:
        out[:] = (np.roll(f, -1) - np.roll(f, 1)) / (2.0 * dx)
        return out
    out[1:-1] = (f[2:] - f[:-2]) / (2.0 * dx)
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx)
    out[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * dx)
    return out


def second_derivative(values: np.ndarray, dx: float, periodic: bool, scheme: str = "central") -> np.ndarray:
    """d2/dx2 of ``values`` sampled with spacing ``dx``."""
    _check_scheme(scheme, periodic)
    f = np.asarray(values)
    if scheme == "spectral":
        k = 2.0 * np.pi * np.fft.fftfreq(f.size, d=dx)
        out = np.fft.ifft(-(k * k) * np.fft.fft(f))
        return out if np.iscomplexobj(f) else out.real

    out = np.empty_like(f, dtype=np.result_type(f, float))
    dx2 = dx * dx
    if periodic:
        out[:] = (np.roll(f, -1) - 2.0 * f + np.roll(f, 1)) / dx2
        return out
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / dx2
    out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / dx2
    out[-1] = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) / dx2
    return out


def central_from_increments(increments: np.ndarray, dx: float, periodic: bool) -> np.ndarray:
    """Central first derivative built from neighbour increments d_j = f[j+1] - f[j].

    Averaging two adjacent increments reproduces the 2nd-order central stencil,
    (f[j+1] - f[j-1]) / 2dx, but lets the caller supply a wrap-safe increment at
    a periodic seam (needed for unwrapped phases, which are not periodic even
    when the underlying wavefunction is).  For periodic input ``increments`` has
    length n with increments[-1] the seam value; otherwise length n - 1.
    """
    d = np.asarray(increments, dtype=float)
    if periodic:
        return (d + np.roll(d, 1)) / (2.0 * dx)
    n = d.size + 1
    out = np.empty(n, dtype=float)
    out[1:-1] = (d[1:] + d[:-1]) / (2.0 * dx)
    # one-sided 2nd-order ends, rewritten in increment form
    out[0] = (3.0 * d[0] - d[1]) / (2.0 * dx)
    out[-1] = (3.0 * d[-1] - d[-2]) / (2.0 * dx)
    return out
