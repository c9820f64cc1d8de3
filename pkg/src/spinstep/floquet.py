"""Noise-floor instability via the monodromy of a 2x2 periodic ODE.

Far from the window edges, splitting error drives every background mode the
same way: a pair of sampled-soliton coefficients couples the mode to its
reflection.  The pair's evolution over one domain period is the fundamental
matrix Phi(L) of ``c' = R(t) c``, where R is built from the standing-soliton
envelope evaluated at a position argument that winds periodically through the
domain.  The spectral radius of Phi(L) then decides the fate of the noise
floor: unstable when rho > 1, with rate ln(rho)/L.

The generator R is i sigma3 times a matrix with equal diagonal entries, hence
trace-free, so det Phi = 1 identically; the integration check below keeps
that honest to 1e-10.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy.linalg import expm

from .solitons import BoxModelParams, gn_envelope_values, thirring_envelope_values

__all__ = [
    "BoxModelReport",
    "MonodromyReport",
    "box_model_monodromy",
    "floor_ode_rhs_gn",
    "floor_rate_thirring",
    "integrate_floor_ode",
    "integrate_monodromy",
    "sweep_floor_rates",
]


@dataclass(frozen=True)
class MonodromyReport:
    """Fundamental matrix over one period and the rates derived from it."""

    Phi: np.ndarray
    rho: float
    norm: float
    growth_rate: float
    period_hint: float
    omega: float
    L: float
    steps: int

    @property
    def det_error(self) -> float:
        return float(abs(np.linalg.det(self.Phi) - 1.0))


def floor_ode_rhs_gn(omega: float, psi1: complex, psi2: complex) -> np.ndarray:
    """Generator of the noise-floor pair ODE at one envelope sample.

    ``i sigma3 (omega sigma0 + [[P0, Q0+Q1], [(Q0+Q1)*, P0]])`` with
    P0 = (|psi1|^2+|psi2|^2)/2 the intensity potential and
    Q0+Q1 = (psi1-psi2)^2/2 the pair coupling.  The conjugate pairing of the
    off-diagonal entries matters: it sets the sign of the coupling's chirp
    against the diagonal winding, and flipping it turns the growth-rate peaks
    into plateaus several times too large.
    """
    p0 = (abs(psi1) ** 2 + abs(psi2) ** 2) / 2.0
    q01 = (psi1 - psi2) ** 2 / 2.0
    return np.array(
        [[1j * (omega + p0), 1j * q01], [-1j * np.conj(q01), -1j * (omega + p0)]],
        dtype=complex,
    )


def _wrap(t: np.ndarray, L: float) -> np.ndarray:
    """Map times onto the principal domain [-L/2, L/2)."""
    return (t + L / 2.0) % L - L / 2.0


def _rk4_pass(r11, r12, r21, h: float, steps: int) -> np.ndarray:
    """Advance Phi' = R(t) Phi from the identity across ``steps`` RK4 steps.

    The generator samples arrive tabulated at half-step resolution
    (2*steps + 1 values); entry r22 = -r11 is implied.  Unrolled 2x2 scalar
    arithmetic — this loop dominates sweep runtime.
    """
    a, b, c, d = 1.0 + 0.0j, 0.0j, 0.0j, 1.0 + 0.0j
    h2, h6 = h / 2.0, h / 6.0
    for n in range(steps):
        p11, p12, p21 = r11[2 * n], r12[2 * n], r21[2 * n]
        m11, m12, m21 = r11[2 * n + 1], r12[2 * n + 1], r21[2 * n + 1]
        e11, e12, e21 = r11[2 * n + 2], r12[2 * n + 2], r21[2 * n + 2]

        k1a = p11 * a + p12 * c
        k1b = p11 * b + p12 * d
        k1c = p21 * a - p11 * c
        k1d = p21 * b - p11 * d

        ta, tb, tc, td = a + h2 * k1a, b + h2 * k1b, c + h2 * k1c, d + h2 * k1d
        k2a = m11 * ta + m12 * tc
        k2b = m11 * tb + m12 * td
        k2c = m21 * ta - m11 * tc
        k2d = m21 * tb - m11 * td

        ta, tb, tc, td = a + h2 * k2a, b + h2 * k2b, c + h2 * k2c, d + h2 * k2d
        k3a = m11 * ta + m12 * tc
        k3b = m11 * tb + m12 * td
        k3c = m21 * ta - m11 * tc
        k3d = m21 * tb - m11 * td

        ta, tb, tc, td = a + h * k3a, b + h * k3b, c + h * k3c, d + h * k3d
        k4a = e11 * ta + e12 * tc
        k4b = e11 * tb + e12 * td
        k4c = e21 * ta - e11 * tc
        k4d = e21 * tb - e11 * td

        a += h6 * (k1a + 2.0 * (k2a + k3a) + k4a)
        b += h6 * (k1b + 2.0 * (k2b + k3b) + k4b)
        c += h6 * (k1c + 2.0 * (k2c + k3c) + k4c)
        d += h6 * (k1d + 2.0 * (k2d + k3d) + k4d)
    return np.array([[a, b], [c, d]], dtype=complex)


def _spectral_radius(Phi: np.ndarray) -> float:
    """Larger eigenvalue modulus from the characteristic quadratic."""
    half_tr = (Phi[0, 0] + Phi[1, 1]) / 2.0
    disc = np.sqrt(half_tr**2 - np.linalg.det(Phi) + 0.0j)
    return float(max(abs(half_tr + disc), abs(half_tr - disc)))


def _report(Phi: np.ndarray, omega: float, L: float, steps: int) -> MonodromyReport:
    rho = _spectral_radius(Phi)
    return MonodromyReport(
        Phi=Phi,
        rho=rho,
        norm=float(np.linalg.svd(Phi, compute_uv=False)[0]),
        growth_rate=float(np.log(rho) / L),
        period_hint=np.pi / abs(omega),
        omega=omega,
        L=L,
        steps=steps,
    )


def default_step_count(L: float) -> int:
    return max(1000, int(np.ceil(20.0 * L)))


def integrate_floor_ode(
    omega: float,
    L: float,
    envelope: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]],
    steps: int | None = None,
    check_tol: float = 1e-8,
) -> MonodromyReport:
    """Monodromy of the floor ODE for an arbitrary envelope sampler.

    ``envelope`` maps an array of principal-domain positions to the two
    components entering :func:`floor_ode_rhs_gn`.  The RK4 pass is accepted
    only once doubling the step count moves the fundamental matrix by less
    than ``check_tol`` (entrywise); the finer pass is what gets reported.
    """
    if L <= 0.0:
        raise ValueError(f"L must be positive, got {L}")
    n = default_step_count(L) if steps is None else int(steps)
    if n < 2:
        raise ValueError(f"steps must be at least 2, got {steps}")

    def run(n_steps: int) -> np.ndarray:
        h = L / n_steps
        tau = _wrap(np.arange(2 * n_steps + 1) * (h / 2.0), L)
        psi1, psi2 = envelope(tau)
        p0 = (np.abs(psi1) ** 2 + np.abs(psi2) ** 2) / 2.0
        q01 = (psi1 - psi2) ** 2 / 2.0
        r11 = (1j * (omega + p0)).tolist()
        r12 = (1j * q01).tolist()
        r21 = (-1j * np.conj(q01)).tolist()
        return _rk4_pass(r11, r12, r21, h, n_steps)

    coarse = run(n)
    for _ in range(6):
        fine = run(2 * n)
        if np.max(np.abs(fine - coarse)) <= check_tol:
            return _report(fine, omega, L, 2 * n)
        n *= 2
        coarse = fine
    raise RuntimeError(
        f"monodromy integration did not settle to {check_tol:g} by {2 * n} steps "
        f"(omega={omega}, L={L})"
    )


def integrate_monodromy(
    omega: float, L: float, steps: int | None = None
) -> MonodromyReport:
    """Noise-floor monodromy for the standing Gross-Neveu soliton."""

    def envelope(tau: np.ndarray):
        return gn_envelope_values(omega, tau)

    return integrate_floor_ode(omega, L, envelope, steps=steps)


def floor_rate_thirring(q: float, L: float, steps: int | None = None) -> MonodromyReport:
    """Thirring noise-floor monodromy: diagonal generator, unimodular Phi.

    The generator is ``i sigma3 (cos Q + P0(tau))`` with no off-diagonal
    coupling, so ``Phi = diag(exp(i Theta), exp(-i Theta))`` with Theta the
    integral of the diagonal.  Theta is evaluated by Simpson quadrature
    refined until successive doublings agree to 1e-10, which pins rho = 1 to
    roundoff — the floor never grows.
    """
    if L <= 0.0:
        raise ValueError(f"L must be positive, got {L}")
    n = default_step_count(L) if steps is None else int(steps)
    n += n % 2  # Simpson needs an even panel count

    def theta(n_panels: int) -> float:
        tau = _wrap(np.linspace(0.0, L, n_panels + 1), L)
        u, v = thirring_envelope_values(q, tau)
        f = np.cos(q) + (np.abs(u) ** 2 + np.abs(v) ** 2) / 2.0
        w = np.ones(n_panels + 1)
        w[1:-1:2], w[2:-1:2] = 4.0, 2.0
        return float((L / n_panels) / 3.0 * np.dot(w, f))

    val = theta(n)
    for _ in range(8):
        refined = theta(2 * n)
        if abs(refined - val) <= 1e-10 * max(1.0, abs(refined)):
            val = refined
            n *= 2
            break
        n *= 2
        val = refined
    else:
        raise RuntimeError(f"floor phase integral did not converge (Q={q}, L={L})")

    Phi = np.diag([np.exp(1j * val), np.exp(-1j * val)])
    return _report(Phi, np.cos(q), L, n)


@dataclass(frozen=True)
class BoxModelReport:
    """Closed-form box-model monodromy next to its integrated cross-check."""

    report: MonodromyReport
    lambda_abs: tuple[float, float]
    phi11: complex
    phi12: complex
    params: BoxModelParams
    omega: float
    L: float

    @property
    def max_rate(self) -> float:
        return float(np.log(max(self.lambda_abs)) / self.L)


def _box_generators(params: BoxModelParams, omega: float) -> tuple[np.ndarray, np.ndarray]:
    half = params.C / 2.0
    tw = np.exp(1j * params.phi)
    plus = 1j * np.array(
        [[omega + half, half * tw], [-half * np.conj(tw), -(omega + half)]]
    )
    minus = 1j * np.array(
        [[omega + half, half * np.conj(tw)], [-half * tw, -(omega + half)]]
    )
    return plus, minus


def box_model_monodromy(
    params: BoxModelParams, omega: float, L: float, rk4_check: bool = True
) -> BoxModelReport:
    """Monodromy of the piecewise-constant soliton replacement.

    The envelope is replaced by a constant-coupling box of width ``L_sol``;
    each constant segment integrates exactly as a matrix exponential, and the
    eigenvalue moduli follow from the quadratic in the box entries.  With
    ``rk4_check`` the same generator is also swept with the generic RK4 pass
    and the two spectral radii must agree to 1e-6.
    """
    if L <= 4.0 * params.L_sol:
        raise ValueError(
            f"domain length {L:g} must exceed four box widths ({4 * params.L_sol:g})"
        )
    plus, minus = _box_generators(params, omega)
    phi_sol = expm(plus * (params.L_sol / 2.0)) @ expm(minus * (params.L_sol / 2.0))
    free_phase = omega * (L - params.L_sol)
    Phi = phi_sol @ np.diag([np.exp(1j * free_phase), np.exp(-1j * free_phase)])

    phi11, phi12 = complex(phi_sol[0, 0]), complex(phi_sol[0, 1])
    b = 2.0 * abs(phi11) * np.cos(free_phase + np.angle(phi11))
    c = abs(phi11) ** 2 - abs(phi12) ** 2
    disc = np.sqrt(b**2 / 4.0 - c + 0.0j)
    lam = (b / 2.0 + disc, b / 2.0 - disc)

    report = _report(Phi, omega, L, steps=0)
    if rk4_check:
        rho_rk4 = _box_rho_rk4(params, omega, L)
        if abs(rho_rk4 - report.rho) > 1e-6:
            raise RuntimeError(
                f"box-model RK4 cross-check failed: exact rho {report.rho:.9f} "
                f"vs integrated {rho_rk4:.9f}"
            )
    return BoxModelReport(
        report=report,
        lambda_abs=(float(abs(lam[0])), float(abs(lam[1]))),
        phi11=phi11,
        phi12=phi12,
        params=params,
        omega=omega,
        L=L,
    )


def _box_rho_rk4(params: BoxModelParams, omega: float, L: float) -> float:
    """Integrate the box generator segment by segment with the RK4 pass.

    Segment order matters beyond cyclic rotation: the two soliton halves must
    stay adjacent (spike leaves through the positive-chirp half, wraps through
    free space, re-enters through the negative-chirp half), otherwise the
    product lands in a different similarity class with a different radius.
    """
    plus, minus = _box_generators(params, omega)
    free = 1j * np.array([[omega, 0.0], [0.0, -omega]])
    Phi = np.eye(2, dtype=complex)
    for gen, span in ((plus, params.L_sol / 2.0), (free, L - params.L_sol), (minus, params.L_sol / 2.0)):
        n = max(200, int(np.ceil(160.0 * span)))
        r11 = [gen[0, 0]] * (2 * n + 1)
        r12 = [gen[0, 1]] * (2 * n + 1)
        r21 = [gen[1, 0]] * (2 * n + 1)
        Phi = _rk4_pass(r11, r12, r21, span / n, n) @ Phi
    return _spectral_radius(Phi)


def sweep_floor_rates(
    omega: float, L_values: Iterable[float], steps: int | None = None
) -> tuple[MonodromyReport, ...]:
    """One Gross-Neveu floor monodromy per domain length."""
    return tuple(integrate_monodromy(omega, L, steps=steps) for L in L_values)
