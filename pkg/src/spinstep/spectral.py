"""Periodic grids, Fourier conventions, and free propagators for spinor fields.

All transforms in this package use one fixed convention.  On a domain of
length ``L`` sampled at ``N`` points, the collocation points and wavenumber
ladder are

    x_j = j * dx,   k_l = l * dk,   j, l = -N/2, ..., N/2 - 1,

with ``dx = L / N`` and ``dk = 2 * pi / L``.  The forward transform is the
unnormalized sum ``s_l = sum_j f(x_j) exp(-i k_l x_j)`` and the inverse
carries the ``1/N`` factor.  Arrays are stored in ascending ``x`` and
ascending ``k`` ("ladder") order; the conversion to the natural FFT layout
happens inside :func:`dft` / :func:`idft` and is never exposed.

The free propagators are the exact per-wavenumber solution operators of the
linear parts of the two models integrated here: the Gross-Neveu system in
its spinor components and the massive Thirring system in light-cone
components ``(u, v)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PAULI",
    "Grid",
    "SpinorField",
    "SpectrumField",
    "make_grid",
    "dft",
    "idft",
    "free_propagator_gn",
    "free_propagator_thirring",
    "apply_propagator",
]

#: Pauli matrices (sigma_0 .. sigma_3) in the convention used throughout.
PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid over ``[-L/2, L/2)``.

    Attributes
    ----------
    L : float
        Domain length.
    N : int
        Number of collocation points (a power of two).
    dx : float
        Spacing ``L / N``.
    dk : float
        Wavenumber spacing ``2 * pi / L``.
    x : numpy.ndarray
        Collocation points ``j * dx`` in ascending order; ``x[0] == -L/2``.
    k : numpy.ndarray
        Wavenumber ladder ``l * dk`` in ascending order.
    k_max : float
        Edge of the spectral window, ``N * dk / 2`` (equals ``pi / dx``).
    """

    L: float
    N: int
    dx: float
    dk: float
    x: np.ndarray
    k: np.ndarray
    k_max: float

    def __post_init__(self) -> None:
        self.x.setflags(write=False)
        self.k.setflags(write=False)


def make_grid(L: float, N: int) -> Grid:
    """Build a :class:`Grid`.

    Parameters
    ----------
    L : float
        Domain length; must be positive.
    N : int
        Point count; must be a power of two and at least 4.
    """
    L = float(L)
    if not L > 0.0:
        raise ValueError(f"L must be positive, got L={L}")
    if N < 4 or (N & (N - 1)) != 0:
        raise ValueError(f"N must be a power of two >= 4, got N={N}")
    dx = L / N
    dk = 2.0 * np.pi / L
    j = np.arange(-(N // 2), N // 2)
    return Grid(L=L, N=N, dx=dx, dk=dk, x=j * dx, k=j * dk, k_max=N * dk / 2.0)


def _as_component(grid: Grid, c, name: str) -> np.ndarray:
    arr = np.asarray(c, dtype=complex)
    if arr.shape != (grid.N,):
        raise ValueError(
            f"{name} must have shape ({grid.N},) to match the grid, got {arr.shape}"
        )
    return arr


@dataclass(frozen=True)
class SpinorField:
    """Two-component field sampled on a :class:`Grid` in ascending-``x`` order."""

    grid: Grid
    c1: np.ndarray
    c2: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "c1", _as_component(self.grid, self.c1, "c1"))
        object.__setattr__(self, "c2", _as_component(self.grid, self.c2, "c2"))

    def charge(self) -> float:
        """Discrete charge ``sum(|c1|^2 + |c2|^2) * dx``."""
        return float(
            (np.abs(self.c1) ** 2 + np.abs(self.c2) ** 2).sum() * self.grid.dx
        )


@dataclass(frozen=True)
class SpectrumField:
    """Unnormalized Fourier coefficients of a spinor field in ladder order."""

    grid: Grid
    s1: np.ndarray
    s2: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "s1", _as_component(self.grid, self.s1, "s1"))
        object.__setattr__(self, "s2", _as_component(self.grid, self.s2, "s2"))


def dft(field: SpinorField) -> SpectrumField:
    """Forward transform of both components, returned in ladder order."""
    f = np.vstack((field.c1, field.c2))
    s = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(f, axes=-1), axis=-1), axes=-1)
    return SpectrumField(grid=field.grid, s1=s[0], s2=s[1])


def idft(spec: SpectrumField) -> SpinorField:
    """Inverse transform of both components, returned in ascending-``x`` order."""
    s = np.vstack((spec.s1, spec.s2))
    f = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(s, axes=-1), axis=-1), axes=-1)
    return SpinorField(grid=spec.grid, c1=f[0], c2=f[1])


def free_propagator_gn(grid: Grid, dt: float) -> np.ndarray:
    """Exact linear-substep matrices for the Gross-Neveu model.

    The linear part couples the spinor components through a first-order
    derivative, which in Fourier space integrates to
    ``exp(-i * sigma_1 * k * dt)`` per ladder point.

    Returns
    -------
    numpy.ndarray
        Array of shape ``(2, 2, N)``; slice ``[:, :, l]`` updates the
        coefficient pair at wavenumber ``k[l]``.
    """
    c = np.cos(grid.k * dt).astype(complex)
    off = -1j * np.sin(grid.k * dt)
    return np.array([[c, off], [off, c]])


def free_propagator_thirring(grid: Grid, dt: float) -> np.ndarray:
    """Exact linear-substep matrices for the massive Thirring model.

    In light-cone components the linear part is advection plus the mass
    coupling; diagonalizing it gives, with ``gamma = sqrt(k^2 + 1)`` and
    ``delta = k + gamma``,

        W = 1/(1 + delta^2) * [[e^{i g t} + delta^2 e^{-i g t},
                                delta (e^{i g t} - e^{-i g t})],
                               [delta (e^{i g t} - e^{-i g t}),
                                delta^2 e^{i g t} + e^{-i g t}]].

    Returns an array of shape ``(2, 2, N)`` in ladder order.
    """
    gamma = np.sqrt(grid.k**2 + 1.0)
    delta = grid.k + gamma
    ep = np.exp(1j * gamma * dt)
    em = np.exp(-1j * gamma * dt)
    norm = 1.0 + delta**2
    w11 = (ep + delta**2 * em) / norm
    w12 = delta * (ep - em) / norm
    w22 = (delta**2 * ep + em) / norm
    return np.array([[w11, w12], [w12, w22]])


def apply_propagator(spec: SpectrumField, prop: np.ndarray) -> SpectrumField:
    """Multiply a spectrum by per-wavenumber 2x2 matrices (shape ``(2, 2, N)``)."""
    s1 = prop[0, 0] * spec.s1 + prop[0, 1] * spec.s2
    s2 = prop[1, 0] * spec.s1 + prop[1, 1] * spec.s2
    return SpectrumField(grid=spec.grid, s1=s1, s2=s2)
