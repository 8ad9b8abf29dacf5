"""Spatial grid, wavefunction storage, and the polar (Madelung) decomposition.

A complex field psi on a uniform 1-D grid is split as psi = R * exp(i S / hbar)
into a nonnegative amplitude R and a real action-valued phase S.  From these the
hydrodynamic fields follow: density rho = R^2, flow velocity u = dS/dx / m, and
trajectory momentum p = m * u.  Observables are plain Riemann sums over the grid.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from .derivatives import central_from_increments, first_derivative
from .errors import NodeDominatedError, NodeDominatedWarning

logger = logging.getLogger(__name__)

# Density floor below which arg(psi) is treated as undefined.  Points under the
# floor inherit the phase of the nearest valid neighbour.
EPS_NODE = 1e-12

MIN_GRID_POINTS = 8


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform 1-D position grid, x_j = x_min + j * dx.

    Periodic grids exclude x_max (spacing L/n); non-periodic grids include both
    endpoints (spacing L/(n-1)).
    """

    x_min: float
    x_max: float
    n: int
    periodic: bool = False
    dx: float = field(init=False)

    def __post_init__(self):
        length = self.x_max - self.x_min
        dx = length / self.n if self.periodic else length / (self.n - 1)
        object.__setattr__(self, "dx", dx)
        xs = self.x_min + dx * np.arange(self.n)
        xs.setflags(write=False)
        object.__setattr__(self, "_x", xs)

    @property
    def x(self) -> np.ndarray:
        """Grid point positions (read-only array of length n)."""
        return self._x

    def contains(self, x: float) -> bool:
        return self.x_min <= x <= self.x_max


def build_grid(x_min: float, x_max: float, n: int, periodic: bool = False) -> SpatialGrid:
    """Validate and construct a :class:`SpatialGrid`."""
    if not (np.isfinite(x_min) and np.isfinite(x_max)):
        raise ValueError(f"grid bounds must be finite, got [{x_min}, {x_max}]")
    if x_max <= x_min:
        raise ValueError(f"x_max must exceed x_min, got [{x_min}, {x_max}]")
    n = int(n)
    if n < MIN_GRID_POINTS:
        raise ValueError(f"grid needs at least {MIN_GRID_POINTS} points, got {n}")
    return SpatialGrid(float(x_min), float(x_max), n, bool(periodic))


@dataclass(frozen=True)
class PhysicsParams:
    """Mass, Planck constant, and friction.

    beta (momentum retention) and lam (learning rate) are always derived as
    beta = 1 - mu and lam = 1/m; they are properties, never stored.
    """

    m: float = 1.0
    hbar: float = 1.0
    mu: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.m) and self.m > 0):
            raise ValueError(f"mass must be positive, got m={self.m}")
        if not (np.isfinite(self.hbar) and self.hbar >= 0):
            raise ValueError(f"hbar must be nonnegative, got hbar={self.hbar}")
        if not (np.isfinite(self.mu) and 0.0 <= self.mu <= 1.0):
            raise ValueError(f"friction must satisfy 0 <= mu <= 1, got mu={self.mu}")

    @property
    def beta(self) -> float:
        return 1.0 - self.mu

    @property
    def lam(self) -> float:
        return 1.0 / self.m


@dataclass(frozen=True)
class Wavefunction:
    """Complex amplitudes on a grid.  Values are frozen after construction."""

    values: np.ndarray
    grid: SpatialGrid

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != (self.grid.n,):
            raise ValueError(f"values shape {v.shape} does not match grid n={self.grid.n}")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def normalized(self) -> "Wavefunction":
        """Rescale so that sum |psi|^2 dx = 1."""
        total = norm(self)
        if total <= 0.0:
            raise ValueError("cannot normalize a zero wavefunction")
        return Wavefunction(self.values / np.sqrt(total), self.grid)


@dataclass(frozen=True)
class MadelungFields:
    """Polar fields of a wavefunction: amplitude R, action phase S, rho, u, p."""

    R: np.ndarray
    S: np.ndarray
    rho: np.ndarray
    u: np.ndarray
    p: np.ndarray
    grid: SpatialGrid

    def __post_init__(self):
        for name in ("R", "S", "rho", "u", "p"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def norm(psi: Wavefunction) -> float:
    """Total probability sum |psi_j|^2 dx."""
    v = psi.values
    return float(np.sum(v.real * v.real + v.imag * v.imag) * psi.grid.dx)


def _fill_from_nearest_valid(values: np.ndarray, valid_idx: np.ndarray) -> np.ndarray:
    """Return a copy where every index takes the value of its nearest valid index."""
    n = values.size
    out = values.copy()
    pos = np.searchsorted(valid_idx, np.arange(n))
    left = valid_idx[np.clip(pos - 1, 0, valid_idx.size - 1)]
    right = valid_idx[np.clip(pos, 0, valid_idx.size - 1)]
    # ties go to the left neighbour
    nearest = np.where(np.abs(np.arange(n) - left) <= np.abs(right - np.arange(n)), left, right)
    out[:] = values[nearest]
    return out


def polar_decompose(psi: Wavefunction, params: PhysicsParams, scheme: str = "central") -> MadelungFields:
    """Split psi into Madelung fields (R, S, rho, u, p).

    The phase is S = hbar * arg(psi), unwrapped left to right starting from the
    leftmost point whose density clears the node floor; neighbour jumps larger
    than pi*hbar are folded back by 2*pi*hbar.  Sub-floor points inherit the
    phase of their nearest valid neighbour, and the global constant is fixed so
    that S = 0 at the density maximum.  u = dS/dx / m uses a wrap-safe central
    stencil (or the spectral velocity hbar*Im(psi* dpsi)/ (m rho) on periodic
    grids when ``scheme="spectral"``).

    Reports node-dominated input (more than half of the grid below the node
    floor) with a warning -- a well-localized packet on a wide grid does this
    legitimately -- and raises :class:`NodeDominatedError` only when fewer
    than two points carry usable phase.
    """
    if params.hbar <= 0.0:
        raise ValueError("polar decomposition needs hbar > 0 (phase is undefined at hbar = 0)")
    grid = psi.grid
    v = psi.values
    R = np.abs(v)
    rho = R * R
    valid = rho >= EPS_NODE
    n_invalid = int(np.count_nonzero(~valid))
    if grid.n - n_invalid < 2:
        raise NodeDominatedError(
            f"node-dominated wavefunction: {n_invalid} of {grid.n} points below the "
            f"density floor {EPS_NODE:g}; no usable phase information"
        )
    if n_invalid > 0.5 * grid.n:
        logger.debug("node-dominated decomposition: %d of %d points below %g",
                     n_invalid, grid.n, EPS_NODE)
        warnings.warn(
            "node-dominated wavefunction: over half the grid is below the density "
            f"floor {EPS_NODE:g}; sub-floor phases are filled from neighbours",
            NodeDominatedWarning, stacklevel=2,
        )

    theta = np.angle(v)
    valid_idx = np.flatnonzero(valid)
    S = np.empty(grid.n, dtype=float)
    S[valid_idx] = np.unwrap(theta[valid_idx])
    if n_invalid:
        S = _fill_from_nearest_valid(S, valid_idx)
    S *= params.hbar
    S -= S[int(np.argmax(rho))]

    if scheme == "spectral":
        dpsi = first_derivative(v, grid.dx, grid.periodic, scheme="spectral")
        dSdx = params.hbar * np.imag(np.conj(v) * dpsi) / np.maximum(rho, EPS_NODE)
    else:
        # Unwrapped S is not periodic even for a periodic psi (nonzero winding),
        # so the seam increment is taken from the wavefunction itself.
        inc = np.diff(S)
        if grid.periodic:
            if valid[0] and valid[-1]:
                seam = params.hbar * float(np.angle(v[0] * np.conj(v[-1])))
            else:
                seam = 0.0
            inc = np.append(inc, seam)
        dSdx = central_from_increments(inc, grid.dx, grid.periodic)

    u = dSdx / params.m
    p = params.m * u
    return MadelungFields(R=R, S=S, rho=rho, u=u, p=p, grid=grid)


def expectation_position(psi: Wavefunction) -> float:
    """<x> = sum x_j rho_j dx."""
    v = psi.values
    rho = v.real * v.real + v.imag * v.imag
    return float(np.sum(psi.grid.x * rho) * psi.grid.dx)


def expectation_momentum(psi: Wavefunction, params: PhysicsParams) -> float:
    """Hydrodynamic momentum <p> = sum p_j rho_j dx with p = dS/dx."""
    fields = polar_decompose(psi, params)
    return float(np.sum(fields.p * fields.rho) * psi.grid.dx)


def expectation_phase(fields: MadelungFields) -> float:
    """Density-weighted mean action <S> = sum S_j rho_j dx."""
    return float(np.sum(fields.S * fields.rho) * fields.grid.dx)


def gaussian_packet(grid: SpatialGrid, x0: float, p0: float = 0.0, sigma: float = 1.0,
                    hbar: float = 1.0) -> Wavefunction:
    """Normalized Gaussian packet whose density has standard deviation sigma."""
    if sigma <= 0:
        raise ValueError(f"packet width must be positive, got sigma={sigma}")
    if hbar <= 0:
        raise ValueError(f"packet phase needs hbar > 0, got hbar={hbar}")
    x = grid.x
    psi = np.exp(-((x - x0) ** 2) / (4.0 * sigma**2) + 1j * p0 * (x - x0) / hbar)
    return Wavefunction(psi, grid).normalized()


def plane_wave(grid: SpatialGrid, k: float) -> Wavefunction:
    """exp(i k x) / sqrt(L) on a periodic grid."""
    if not grid.periodic:
        raise ValueError("plane waves need a periodic grid")
    length = grid.x_max - grid.x_min
    return Wavefunction(np.exp(1j * k * grid.x) / np.sqrt(length), grid)
