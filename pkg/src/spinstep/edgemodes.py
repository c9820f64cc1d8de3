"""Instability of modes at the spectral-window edges.

Splitting error couples the soliton to perturbations whose wavenumbers sit
near ``±k_max``, regardless of the time step.  Writing the perturbation as
envelopes over the M harmonics adjacent to each window edge turns the
linearized evolution into ``ds/dt = i(D + C)s`` for the 4M-component state

    s = (a_+, b_-, conj(a_-), conj(b_+)),

where ``D`` holds the harmonic detunings and ``C`` couples the blocks through
Toeplitz and Hankel matrices built from the Fourier coefficients of the six
soliton potentials.  Eigenvalues of the assembled operator with positive real
part are unstable; the growth rate of the fastest mode is directly comparable
with rates measured from split-step runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .solitons import (
    GNSolitonParams,
    PotentialSet,
    ThirringSolitonParams,
    gn_envelope,
    gn_potentials,
    thirring_envelope,
    thirring_potentials,
    uv_to_psi,
)
from .spectral import make_grid

__all__ = [
    "EdgeProblem",
    "EigenReport",
    "assemble_edge_operator",
    "build_edge_problem",
    "converged_edge_report",
    "coupling_matrix",
    "default_point_count",
    "hankel_block",
    "soliton_potentials",
    "solve_edge_instability",
    "sweep_edge_rates",
    "toeplitz_block",
]


@dataclass(frozen=True)
class EdgeProblem:
    """Inputs of the 4M x 4M edge eigenproblem.

    The six spectra tabulate Fourier coefficients of the potentials for
    harmonic indices -2M..2M (index ``n`` lives at array position ``n + 2M``).
    ``omega`` is the soliton rotation frequency (``cos Q`` for Thirring).
    """

    M: int
    omega: float
    dk: float
    N: int
    p0: np.ndarray
    p2: np.ndarray
    p3: np.ndarray
    q0: np.ndarray
    q1: np.ndarray
    q3: np.ndarray

    def __post_init__(self) -> None:
        if not 4 <= self.M <= self.N // 8:
            raise ValueError(f"M must satisfy 4 <= M <= N/8, got M={self.M}, N={self.N}")
        if self.dk <= 0.0:
            raise ValueError(f"dk must be positive, got {self.dk}")
        want = 4 * self.M + 1
        for name in ("p0", "p2", "p3", "q0", "q1", "q3"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            if arr.shape != (want,):
                raise ValueError(
                    f"spectrum {name} must cover harmonics -2M..2M "
                    f"(length {want}), got shape {arr.shape}"
                )
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class EigenReport:
    """Full spectrum of one edge eigenproblem plus its fastest mode."""

    eigenvalues: np.ndarray
    growth_rate: float
    a_plus: np.ndarray
    b_minus: np.ndarray
    a_minus_conj: np.ndarray
    b_plus_conj: np.ndarray
    omega: float
    L: float
    M: int
    N: int

    @property
    def second_rate(self) -> float:
        """Second-largest real part, for sweep tables."""
        return float(np.sort(self.eigenvalues.real)[-2])


def _pick(spectrum: np.ndarray, idx: np.ndarray) -> np.ndarray:
    spectrum = np.asarray(spectrum)
    n_max = (len(spectrum) - 1) // 2
    if idx.min() < -n_max or idx.max() > n_max:
        raise ValueError(
            f"block needs harmonics {idx.min()}..{idx.max()} but the spectrum "
            f"covers only -{n_max}..{n_max}"
        )
    return spectrum[idx + n_max]


def toeplitz_block(spectrum: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """M x M Toeplitz block; diagonals ramp from index ``lo`` to ``hi``.

    Entry (j, l) holds the coefficient at index ``lo + s(M-1) + s(l-j)`` with
    ``s = sign(hi-lo)``: the lower-left corner sits at ``lo``, the upper-right
    at ``hi``, and ``|hi-lo|`` must equal ``2(M-1)``.
    """
    if (hi - lo) % 2 != 0 or hi == lo:
        raise ValueError(f"|hi-lo| must be a positive even number, got lo={lo}, hi={hi}")
    M = abs(hi - lo) // 2 + 1
    s = 1 if hi > lo else -1
    j = np.arange(M)[:, None]
    l = np.arange(M)[None, :]
    return _pick(spectrum, lo + s * (M - 1) + s * (l - j))


def hankel_block(spectrum: np.ndarray, first: int, last: int) -> np.ndarray:
    """M x M Hankel block; anti-diagonals ramp from ``first`` to ``last``.

    Entry (j, l) holds the coefficient at ``first + s(j+l-2)`` (1-based j, l),
    so the upper-left corner sits at ``first`` and the lower-right at ``last``.
    """
    if (last - first) % 2 != 0 or last == first:
        raise ValueError(
            f"|last-first| must be a positive even number, got first={first}, last={last}"
        )
    M = abs(last - first) // 2 + 1
    s = 1 if last > first else -1
    j = np.arange(M)[:, None]
    l = np.arange(M)[None, :]
    return _pick(spectrum, first + s * (j + l))


def coupling_matrix(p: EdgeProblem) -> np.ndarray:
    """The 16-block coupling matrix C, without the 1/N prefactor."""
    M = p.M
    ip2p3 = 1j * p.p2 + p.p3
    mip2p3 = -1j * p.p2 + p.p3
    q0pq1 = p.q0 + p.q1
    q0mq1 = p.q0 - p.q1

    C = np.empty((4 * M, 4 * M), dtype=complex)
    b = [slice(i * M, (i + 1) * M) for i in range(4)]
    C[b[0], b[0]] = toeplitz_block(p.p0, -(M - 1), M - 1)
    C[b[0], b[1]] = hankel_block(ip2p3, -1, -2 * M + 1)
    C[b[0], b[2]] = hankel_block(p.q3, -2, -2 * M)
    C[b[0], b[3]] = toeplitz_block(q0pq1, -M, M - 2)
    C[b[1], b[0]] = hankel_block(mip2p3, 1, 2 * M - 1)
    C[b[1], b[1]] = toeplitz_block(p.p0, M - 1, -(M - 1))
    C[b[1], b[2]] = toeplitz_block(q0mq1, M - 2, -M)
    C[b[1], b[3]] = hankel_block(p.q3, 0, 2 * M - 2)
    C[b[2], b[0]] = -hankel_block(np.conj(p.q3), -2, -2 * M)
    C[b[2], b[1]] = -toeplitz_block(np.conj(q0mq1), -M, M - 2)
    C[b[2], b[2]] = -toeplitz_block(np.conj(p.p0), -(M - 1), M - 1)
    C[b[2], b[3]] = -hankel_block(np.conj(mip2p3), -1, -2 * M + 1)
    C[b[3], b[0]] = -toeplitz_block(np.conj(q0pq1), M - 2, -M)
    C[b[3], b[1]] = -hankel_block(np.conj(p.q3), 0, 2 * M - 2)
    C[b[3], b[2]] = -hankel_block(np.conj(ip2p3), 1, 2 * M - 1)
    C[b[3], b[3]] = -toeplitz_block(np.conj(p.p0), M - 1, -(M - 1))
    return C


def _detunings(p: EdgeProblem) -> np.ndarray:
    m = np.arange(1, p.M + 1, dtype=float)
    return np.concatenate(
        (
            p.dk * m + p.omega,
            p.dk * (m - 1) + p.omega,
            p.dk * m - p.omega,
            p.dk * (m - 1) - p.omega,
        )
    )


def assemble_edge_operator(p: EdgeProblem) -> np.ndarray:
    """The full evolution operator ``i(D + C/N)`` of the edge envelopes."""
    A = coupling_matrix(p) / p.N
    A[np.diag_indices_from(A)] += _detunings(p)
    return 1j * A


def _harmonics(values: np.ndarray, n_max: int, N: int) -> np.ndarray:
    """Raw DFT coefficients f_n, |n| <= n_max, of grid samples in x-order.

    Unnormalized on purpose: the 1/N making these function-scale Fourier
    coefficients is the prefactor :func:`assemble_edge_operator` puts on the
    coupling matrix as a whole.
    """
    coeff = np.fft.fft(np.fft.ifftshift(np.asarray(values, dtype=complex)))
    return coeff[np.arange(-n_max, n_max + 1) % N]


def build_edge_problem(potentials: PotentialSet, M: int) -> EdgeProblem:
    """Slice a potential set's Fourier coefficients into an :class:`EdgeProblem`.

    The potential set must carry its rotation frequency (``cos Q`` for the
    Thirring model), since the detuning blocks need it.
    """
    if potentials.frequency is None:
        raise ValueError("potential set carries no rotation frequency")
    grid = potentials.grid
    n_max = 2 * M
    return EdgeProblem(
        M=M,
        omega=potentials.frequency,
        dk=grid.dk,
        N=grid.N,
        p0=_harmonics(potentials.P0, n_max, grid.N),
        p2=_harmonics(potentials.P2, n_max, grid.N),
        p3=_harmonics(potentials.P3, n_max, grid.N),
        q0=_harmonics(potentials.Q0, n_max, grid.N),
        q1=_harmonics(potentials.Q1, n_max, grid.N),
        q3=_harmonics(potentials.Q3, n_max, grid.N),
    )


def solve_edge_instability(p: EdgeProblem) -> EigenReport:
    """Dense eigensolve of the assembled operator; growth rate = max Re(lambda)."""
    A = assemble_edge_operator(p)
    try:
        lam, vecs = np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(
            f"eigensolver failed for omega={p.omega}, dk={p.dk}, M={p.M}, N={p.N}"
        ) from exc
    top = int(np.argmax(lam.real))
    v = vecs[:, top]
    M = p.M
    return EigenReport(
        eigenvalues=lam,
        growth_rate=float(lam.real[top]),
        a_plus=v[:M].copy(),
        b_minus=v[M : 2 * M].copy(),
        a_minus_conj=v[2 * M : 3 * M].copy(),
        b_plus_conj=v[3 * M :].copy(),
        omega=p.omega,
        L=2.0 * np.pi / p.dk,
        M=M,
        N=p.N,
    )


def converged_edge_report(
    potentials: PotentialSet, M: int = 128, rel_tol: float = 0.02
) -> EigenReport:
    """Solve with doubling M until the growth rate stabilizes.

    Accepts the finer of two consecutive solves once they agree to ``rel_tol``
    relatively (or 1e-9 absolutely, whichever is looser).  M is capped at N/8;
    hitting the cap without agreement raises.
    """
    cap = potentials.grid.N // 8
    M_cur = min(M, cap)
    report = solve_edge_instability(build_edge_problem(potentials, M_cur))
    while True:
        M_next = min(2 * M_cur, cap)
        if M_next == M_cur:
            raise RuntimeError(
                f"edge rate did not converge by M={M_cur} (cap N/8={cap}); "
                f"last rate {report.growth_rate:.3e}"
            )
        finer = solve_edge_instability(build_edge_problem(potentials, M_next))
        if abs(finer.growth_rate - report.growth_rate) <= max(
            rel_tol * abs(finer.growth_rate), 1e-9
        ):
            return finer
        M_cur, report = M_next, finer


def default_point_count(L: float) -> int:
    """Grid size for a sweep: 4096 scaled with L, rounded to a power of two."""
    return int(2 ** round(np.log2(4096.0 * L / (40.0 * np.pi))))


def soliton_potentials(model: str, frequency: float, L: float, N: int) -> PotentialSet:
    """Standing-soliton potential set for either model on an L-periodic grid."""
    grid = make_grid(L=L, N=N)
    if model == "gn":
        profile = gn_envelope(GNSolitonParams(Omega=frequency), grid)
        return gn_potentials(profile, frequency=frequency)
    if model == "thirring":
        params = ThirringSolitonParams(Q=frequency)
        return thirring_potentials(uv_to_psi(thirring_envelope(params, grid)), frequency)
    raise ValueError(f"unknown model {model!r}")


def sweep_edge_rates(
    model: str,
    frequency: float,
    L_values: Iterable[float],
    M: int = 128,
    n_rule: Callable[[float], int] | None = None,
    converge: bool = True,
) -> tuple[EigenReport, ...]:
    """One edge eigensolve per domain length; L enters only through dk = 2pi/L.

    ``frequency`` is the soliton parameter (Omega for Gross-Neveu, Q for
    massive Thirring).  ``n_rule`` maps L to the grid size used to sample the
    potentials; the default keeps dx constant at its 40pi/4096 reference.
    """
    if n_rule is None:
        n_rule = default_point_count
    reports = []
    for L in L_values:
        pots = soliton_potentials(model, frequency, L, n_rule(L))
        if converge:
            reports.append(converged_edge_report(pots, M=M))
        else:
            reports.append(solve_edge_instability(build_edge_problem(pots, M)))
    return tuple(reports)
