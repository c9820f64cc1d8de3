"""Soliton profiles, quadratic potentials, and the box-shaped surrogate profile.

The Gross-Neveu standing soliton of frequency ``Omega`` has the two-component
envelope

    Psi_1(x) = sqrt(2 (1 - Omega)) * sech(beta x) / (1 - mu^2 tanh^2(beta x)),
    Psi_2(x) = i mu tanh(beta x) * Psi_1(x),

with ``beta = sqrt(1 - Omega^2)`` and ``mu = sqrt((1 - Omega) / (1 + Omega))``;
the full solution carries the phase ``exp(-i Omega t)`` and, for nonzero
velocity, a Lorentz boost.  The massive Thirring soliton is expressed in
light-cone components ``(u, v)`` and is parametrized by ``Q`` in ``[0, pi]``.

Linearization of either model around a soliton couples perturbation harmonics
through six quadratic envelope combinations; :class:`PotentialSet` carries
those six profiles and feeds both the spectral-edge eigenproblem and the
noise-floor monodromy analysis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spectral import Grid, SpinorField

__all__ = [
    "GNSolitonParams",
    "ThirringSolitonParams",
    "BoxModelParams",
    "PotentialSet",
    "apply_phase",
    "gn_envelope",
    "gn_envelope_values",
    "gn_soliton",
    "gn_potentials",
    "thirring_envelope",
    "thirring_envelope_values",
    "thirring_soliton",
    "thirring_potentials",
    "uv_to_psi",
    "psi_to_uv",
    "box_coupling",
    "fit_box_params",
]


def _sech(y: np.ndarray) -> np.ndarray:
    """Overflow-safe sech for arbitrarily large |y|."""
    a = np.exp(-np.abs(y))
    return 2.0 * a / (1.0 + a * a)


@dataclass(frozen=True)
class GNSolitonParams:
    """Gross-Neveu soliton: frequency ``Omega`` in (0, 1), velocity, center.

    Derived attributes ``beta`` (inverse width), ``mu`` (component ratio
    scale), and ``gamma`` (Lorentz factor of the boost) are filled in
    automatically.
    """

    Omega: float
    V: float = 0.0
    x0: float = 0.0
    beta: float = field(init=False)
    mu: float = field(init=False)
    gamma: float = field(init=False)

    def __post_init__(self) -> None:
        if not 0.0 < self.Omega < 1.0:
            raise ValueError(f"Omega must lie in (0, 1), got Omega={self.Omega}")
        if not abs(self.V) < 1.0:
            raise ValueError(f"V must satisfy |V| < 1, got V={self.V}")
        object.__setattr__(self, "beta", float(np.sqrt(1.0 - self.Omega**2)))
        object.__setattr__(
            self, "mu", float(np.sqrt((1.0 - self.Omega) / (1.0 + self.Omega)))
        )
        object.__setattr__(self, "gamma", float(1.0 / np.sqrt(1.0 - self.V**2)))


@dataclass(frozen=True)
class ThirringSolitonParams:
    """Massive Thirring soliton parametrized by ``Q`` in ``[0, pi]``."""

    Q: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.Q <= np.pi:
            raise ValueError(f"Q must lie in [0, pi], got Q={self.Q}")


def gn_envelope_values(omega: float, x: np.ndarray):
    """Standing Gross-Neveu envelope ``(Psi_1, Psi_2)`` at positions ``x``."""
    beta = np.sqrt(1.0 - omega**2)
    mu = np.sqrt((1.0 - omega) / (1.0 + omega))
    th = np.tanh(beta * x)
    psi1 = np.sqrt(2.0 * (1.0 - omega)) * _sech(beta * x) / (1.0 - mu**2 * th**2)
    psi2 = 1j * mu * th * psi1
    return psi1.astype(complex), psi2


def gn_envelope(params: GNSolitonParams, grid: Grid) -> SpinorField:
    """Standing envelope centered at ``params.x0`` (velocity is ignored)."""
    c1, c2 = gn_envelope_values(params.Omega, grid.x - params.x0)
    return SpinorField(grid=grid, c1=c1, c2=c2)


def apply_phase(profile: SpinorField, omega: float, t: float) -> SpinorField:
    """Attach the internal rotation ``exp(-i omega t)`` to both components."""
    ph = np.exp(-1j * omega * t)
    return SpinorField(grid=profile.grid, c1=ph * profile.c1, c2=ph * profile.c2)


def gn_soliton(params: GNSolitonParams, grid: Grid, t: float = 0.0) -> SpinorField:
    """Full Gross-Neveu soliton at time ``t``, boosted when ``V != 0``.

    The moving solution is evaluated analytically: the standing envelope is
    sampled at ``x_mov = gamma (x - x0 - V t)`` with internal time
    ``t_mov = gamma (t - V (x - x0))`` and the components are mixed by the
    boost matrix
    ``[[sqrt(gamma+1), sqrt(gamma-1)], [sqrt(gamma-1), sqrt(gamma+1)]] / sqrt(2)``.
    """
    if params.V == 0.0:
        return apply_phase(gn_envelope(params, grid), params.Omega, t)
    g = params.gamma
    xs = grid.x - params.x0
    x_mov = g * (xs - params.V * t)
    t_mov = g * (t - params.V * xs)
    e1, e2 = gn_envelope_values(params.Omega, x_mov)
    ph = np.exp(-1j * params.Omega * t_mov)
    e1 = e1 * ph
    e2 = e2 * ph
    a = np.sqrt(g + 1.0) / np.sqrt(2.0)
    b = np.sqrt(g - 1.0) / np.sqrt(2.0)
    return SpinorField(grid=grid, c1=a * e1 + b * e2, c2=b * e1 + a * e2)


def thirring_envelope_values(q: float, x: np.ndarray):
    """Light-cone envelope ``(U, V)`` of the Thirring soliton at ``t = 0``."""
    s = np.sin(q)
    u = s / np.cosh(x * s - 0.5j * q)
    v = -s / np.cosh(x * s + 0.5j * q)
    return u, v


def thirring_envelope(params: ThirringSolitonParams, grid: Grid) -> SpinorField:
    u, v = thirring_envelope_values(params.Q, grid.x)
    return SpinorField(grid=grid, c1=u, c2=v)


def thirring_soliton(
    params: ThirringSolitonParams, grid: Grid, t: float = 0.0
) -> SpinorField:
    """Thirring soliton in light-cone components, phase ``exp(-i t cos Q)``."""
    return apply_phase(thirring_envelope(params, grid), np.cos(params.Q), t)


def uv_to_psi(profile: SpinorField) -> SpinorField:
    """Rotate light-cone components to spinor components, ``psi = (u ± v)/sqrt(2)``."""
    r = 1.0 / np.sqrt(2.0)
    return SpinorField(
        grid=profile.grid,
        c1=r * (profile.c1 + profile.c2),
        c2=r * (profile.c1 - profile.c2),
    )


def psi_to_uv(profile: SpinorField) -> SpinorField:
    """Inverse of :func:`uv_to_psi`."""
    r = 1.0 / np.sqrt(2.0)
    return SpinorField(
        grid=profile.grid,
        c1=r * (profile.c1 + profile.c2),
        c2=r * (profile.c1 - profile.c2),
    )


@dataclass(frozen=True)
class PotentialSet:
    """Quadratic envelope combinations that drive linearized perturbations.

    ``P``-type entries multiply the perturbation itself and ``Q``-type entries
    multiply its conjugate; the remaining two combinations of the underlying
    expansion vanish identically for both models and are not stored.
    ``frequency`` carries the internal rotation rate (``Omega``, or ``cos Q``
    for the Thirring model) when the constructor knows it.
    """

    grid: Grid
    P0: np.ndarray
    P2: np.ndarray
    P3: np.ndarray
    Q0: np.ndarray
    Q1: np.ndarray
    Q3: np.ndarray
    frequency: float | None = None


def gn_potentials(profile: SpinorField, frequency: float | None = None) -> PotentialSet:
    """Coupling profiles of the Gross-Neveu linearization around ``profile``."""
    p1, p2 = profile.c1, profile.c2
    return PotentialSet(
        grid=profile.grid,
        P0=(np.abs(p1) ** 2 + np.abs(p2) ** 2) / 2.0,
        P2=np.imag(p1 * np.conj(p2)),
        P3=1.5 * (np.abs(p1) ** 2 - np.abs(p2) ** 2) - 1.0,
        Q0=(p1**2 + p2**2) / 2.0,
        Q1=-p1 * p2,
        Q3=(p1**2 - p2**2) / 2.0,
        frequency=frequency,
    )


def thirring_potentials(profile: SpinorField, q: float) -> PotentialSet:
    """Coupling profiles of the Thirring linearization.

    Parameters
    ----------
    profile : SpinorField
        Soliton envelope already rotated to spinor components
        (see :func:`uv_to_psi`).
    q : float
        Soliton parameter; the potential set's frequency slot is ``cos(q)``.
    """
    p1, p2 = profile.c1, profile.c2
    zero = np.zeros(profile.grid.N)
    return PotentialSet(
        grid=profile.grid,
        P0=(np.abs(p1) ** 2 + np.abs(p2) ** 2) / 2.0,
        P2=-np.imag(p1 * np.conj(p2)),
        P3=(np.abs(p1) ** 2 - np.abs(p2) ** 2) / 2.0 + 1.0,
        Q0=zero,
        Q1=zero,
        Q3=(p1**2 - p2**2) / 2.0,
        frequency=float(np.cos(q)),
    )


@dataclass(frozen=True)
class BoxModelParams:
    """Piecewise-constant surrogate for a soliton envelope.

    ``A`` and ``B`` play the roles of the first/second component amplitudes
    over a support of length ``L_sol``; the derived strength is
    ``C = A^2 + B^2`` and the twist angle ``phi = 2 arctan(B / A)``.
    """

    A: float
    B: float
    L_sol: float
    C: float = field(init=False)
    phi: float = field(init=False)

    def __post_init__(self) -> None:
        if self.A <= 0.0:
            raise ValueError(f"A must be positive, got A={self.A}")
        if self.B < 0.0:
            raise ValueError(f"B must be non-negative, got B={self.B}")
        if self.L_sol <= 0.0:
            raise ValueError(f"L_sol must be positive, got L_sol={self.L_sol}")
        object.__setattr__(self, "C", float(self.A**2 + self.B**2))
        object.__setattr__(self, "phi", float(2.0 * np.arctan2(self.B, self.A)))


def box_coupling(params: BoxModelParams, x) -> np.ndarray:
    """Coupling matrix of the box profile at positions ``x``.

    Returns an array of shape ``x.shape + (2, 2)`` equal to
    ``[[C, C e^{i phi}], [C e^{-i phi}, C]]`` for ``0 <= x <= L_sol/2``, its
    complex conjugate for negative ``x``, and zero outside the support.
    """
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) <= params.L_sol / 2.0
    # e^{+i phi} on the right half, e^{-i phi} on the left; x = 0 counts as right
    sgn = np.where(x < 0.0, -1.0, 1.0)
    twist = np.exp(1j * params.phi * sgn)
    out = np.zeros(x.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = params.C
    out[..., 1, 1] = params.C
    out[..., 0, 1] = params.C * twist
    out[..., 1, 0] = params.C * np.conj(twist)
    return out * inside[..., None, None]


def fit_box_params(profile: SpinorField) -> BoxModelParams:
    """Fit a box surrogate to a standing envelope.

    ``A`` is the first component at the center, ``B`` the peak magnitude of
    the second component, and ``L_sol`` is chosen so the box carries the same
    charge: ``2 (A^2 + B^2) (L_sol / 2) = charge``.
    """
    grid = profile.grid
    i0 = grid.N // 2  # x = 0
    a = float(np.abs(profile.c1[i0]))
    b = float(np.max(np.abs(profile.c2)))
    if a <= 0.0:
        raise ValueError("profile has vanishing central amplitude; cannot fit a box")
    l_sol = profile.charge() / (a**2 + b**2)
    return BoxModelParams(A=a, B=b, L_sol=l_sol)
