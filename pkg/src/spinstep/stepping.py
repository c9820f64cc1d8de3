"""Time steppers: split-step Fourier schemes and a pseudo-spectral RK4.

Public step functions act on whole fields and are convenient for algebraic
checks; :func:`run_simulation` drives an internal merged loop that fuses the
trailing and leading half-drifts of consecutive Strang steps, so long runs
cost two FFTs per step.  Snapshots are stored as spectra in the component
variables native to the model: ``(psi1, psi2)`` for Gross-Neveu (the RK4
scheme integrates light-cone variables internally and converts on record),
``(u, v)`` for the massive Thirring model.

A run never raises on instability: growth is the object of study.  When any
field sample exceeds ``BLOWUP_THRESHOLD`` (or stops being finite) at a
snapshot instant, the run ends early with termination status ``"blowup"``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import fft as sfft

from .solitons import GNSolitonParams, ThirringSolitonParams, gn_soliton, thirring_soliton
from .spectral import (
    Grid,
    SpectrumField,
    SpinorField,
    apply_propagator,
    dft,
    free_propagator_gn,
    free_propagator_thirring,
    idft,
    make_grid,
)

__all__ = [
    "BLOWUP_THRESHOLD",
    "RunConfig",
    "Trajectory",
    "initial_field",
    "rk4ps_step_gn",
    "run_simulation",
    "seed_flat_spectrum",
    "seed_noise",
    "ssm1_step_gn",
    "ssm1_step_thirring",
    "ssm2_step_gn",
    "ssm2_step_thirring",
]

BLOWUP_THRESHOLD = 1e6

_MODELS = ("gn", "thirring")
_SCHEMES = ("ssm1", "ssm2", "rk4ps")


def _check_band(band, key: str) -> tuple[float, float]:
    try:
        lo, hi = band
    except (TypeError, ValueError):
        raise ValueError(f"{key} must be a (k_lo, k_hi) pair, got {band!r}") from None
    lo, hi = float(lo), float(hi)
    if not (0.0 <= lo < hi):
        raise ValueError(f"{key} must satisfy 0 <= k_lo < k_hi, got {band!r}")
    return lo, hi


@dataclass(frozen=True)
class RunConfig:
    """Complete description of one simulation.

    ``solitons`` holds the initial condition in superposition; entries must be
    :class:`GNSolitonParams` or :class:`ThirringSolitonParams` matching
    ``model``.  ``component_scale`` multiplies the two components of the built
    profile before seeding.  ``noise_amplitude`` adds seeded white noise
    (uniform real/imaginary parts) in x-space; ``flat_amplitude`` adds a real
    constant to every Fourier coefficient (restricted to ``flat_band`` when
    given).  ``band_filter`` zeroes all modes with ``|k|`` inside the given
    range after every step.  ``tracked_bands`` holds ``(k_center,
    k_halfwidth)`` pairs; the peak coefficient magnitude over each band is
    recorded per component at every snapshot.
    """

    model: str
    scheme: str
    L: float
    N: int
    dt: float
    t_max: float
    cadence: int = 1
    solitons: tuple = ()
    component_scale: tuple[float, float] = (1.0, 1.0)
    noise_amplitude: float = 1e-12
    seed: int = 0
    flat_amplitude: float = 0.0
    flat_band: tuple[float, float] | None = None
    band_filter: tuple[float, float] | None = None
    tracked_bands: tuple[tuple[float, float], ...] = ()
    store_spectra: bool = True
    advection_only: bool = False

    def __post_init__(self) -> None:
        model = str(self.model).lower()
        if model not in _MODELS:
            raise ValueError(f"model must be one of {_MODELS}, got {self.model!r}")
        scheme = str(self.scheme).lower()
        if scheme not in _SCHEMES:
            raise ValueError(f"scheme must be one of {_SCHEMES}, got {self.scheme!r}")
        if scheme == "rk4ps" and model != "gn":
            raise ValueError("scheme 'rk4ps' is only implemented for model 'gn'")
        if self.advection_only and scheme != "rk4ps":
            raise ValueError("advection_only requires scheme 'rk4ps'")
        if not self.dt > 0.0:
            raise ValueError(f"dt must be positive, got dt={self.dt}")
        if not self.t_max >= self.dt:
            raise ValueError(f"t_max must be at least dt, got t_max={self.t_max}")
        if not (isinstance(self.cadence, (int, np.integer)) and self.cadence >= 1):
            raise ValueError(f"cadence must be an integer >= 1, got cadence={self.cadence!r}")
        if self.noise_amplitude < 0.0:
            raise ValueError(f"noise_amplitude must be >= 0, got {self.noise_amplitude}")
        if self.flat_amplitude < 0.0:
            raise ValueError(f"flat_amplitude must be >= 0, got {self.flat_amplitude}")
        scale = tuple(float(s) for s in self.component_scale)
        if len(scale) != 2 or not all(np.isfinite(scale)):
            raise ValueError(f"component_scale must be two finite factors, got {self.component_scale!r}")
        expected = GNSolitonParams if model == "gn" else ThirringSolitonParams
        for s in self.solitons:
            if not isinstance(s, expected):
                raise ValueError(
                    f"solitons entries must be {expected.__name__} for model {model!r}, got {type(s).__name__}"
                )
        object.__setattr__(self, "model", model)
        object.__setattr__(self, "scheme", scheme)
        object.__setattr__(self, "solitons", tuple(self.solitons))
        object.__setattr__(self, "component_scale", scale)
        if self.flat_band is not None:
            object.__setattr__(self, "flat_band", _check_band(self.flat_band, "flat_band"))
        if self.band_filter is not None:
            object.__setattr__(self, "band_filter", _check_band(self.band_filter, "band_filter"))
        tracked = []
        for entry in self.tracked_bands:
            try:
                center, halfwidth = entry
            except (TypeError, ValueError):
                raise ValueError(
                    f"tracked_bands entries must be (k_center, k_halfwidth) pairs, got {entry!r}"
                ) from None
            center, halfwidth = float(center), float(halfwidth)
            if not (np.isfinite(center) and halfwidth > 0.0):
                raise ValueError(
                    f"tracked_bands entries need finite center and positive halfwidth, got {entry!r}"
                )
            tracked.append((center, halfwidth))
        object.__setattr__(self, "tracked_bands", tuple(tracked))

    @property
    def n_steps(self) -> int:
        return int(round(self.t_max / self.dt))


@dataclass(frozen=True)
class Trajectory:
    """Recorded simulation output.

    ``spectra`` is a tuple of :class:`SpectrumField` snapshots (or ``None``
    when the run was configured not to store them); ``charge`` and
    ``band_max`` are aligned with ``times``.  ``band_max`` has shape
    ``(n_tracked_bands, 2, n_snapshots)``: the peak coefficient magnitude
    over each band, per component.  ``final_spectrum`` — the last recorded
    snapshot — is kept even when intermediate spectra are discarded.
    """

    config: RunConfig
    grid: Grid
    times: np.ndarray
    spectra: tuple[SpectrumField, ...] | None
    charge: np.ndarray
    band_max: np.ndarray
    final_spectrum: SpectrumField
    termination: str
    steps_taken: int


# ---------------------------------------------------------------------------
# seeding


def seed_noise(f: SpinorField, amplitude: float, seed: int) -> SpinorField:
    """Add seeded white noise to every sample of both components.

    Real and imaginary parts are drawn independently and uniformly from
    ``[-amplitude, amplitude]``.
    """
    if amplitude < 0.0:
        raise ValueError(f"amplitude must be >= 0, got {amplitude}")
    if amplitude == 0.0:
        return f
    rng = np.random.default_rng(seed)
    re = rng.uniform(-amplitude, amplitude, size=(2, f.grid.N))
    im = rng.uniform(-amplitude, amplitude, size=(2, f.grid.N))
    return SpinorField(
        grid=f.grid,
        c1=f.c1 + re[0] + 1j * im[0],
        c2=f.c2 + re[1] + 1j * im[1],
    )


def seed_flat_spectrum(
    f: SpinorField, amplitude: float, band: tuple[float, float] | None = None
) -> SpinorField:
    """Add the real constant ``amplitude`` to Fourier coefficients of both components.

    With ``band=(k_lo, k_hi)`` only modes with ``|k|`` inside the closed range
    are shifted; otherwise every mode is.  Adding a constant to all modes is
    the spectral picture of a single-sample spike of height ``amplitude`` at
    ``x = 0``.
    """
    if amplitude < 0.0:
        raise ValueError(f"amplitude must be >= 0, got {amplitude}")
    if amplitude == 0.0:
        return f
    spec = dft(f)
    if band is None:
        mask = np.ones(f.grid.N, dtype=bool)
    else:
        lo, hi = _check_band(band, "band")
        mask = (np.abs(f.grid.k) >= lo) & (np.abs(f.grid.k) <= hi)
    s1 = spec.s1.copy()
    s2 = spec.s2.copy()
    s1[mask] += amplitude
    s2[mask] += amplitude
    return idft(SpectrumField(grid=f.grid, s1=s1, s2=s2))


def initial_field(config: RunConfig, grid: Grid | None = None) -> SpinorField:
    """Build the configured initial condition (solitons, scaling, seeding)."""
    if grid is None:
        grid = make_grid(config.L, config.N)
    c1 = np.zeros(grid.N, dtype=complex)
    c2 = np.zeros(grid.N, dtype=complex)
    for params in config.solitons:
        if config.model == "gn":
            s = gn_soliton(params, grid, 0.0)
        else:
            s = thirring_soliton(params, grid, 0.0)
        c1 += s.c1
        c2 += s.c2
    f = SpinorField(grid=grid, c1=config.component_scale[0] * c1, c2=config.component_scale[1] * c2)
    if config.noise_amplitude > 0.0:
        f = seed_noise(f, config.noise_amplitude, config.seed)
    if config.flat_amplitude > 0.0:
        f = seed_flat_spectrum(f, config.flat_amplitude, config.flat_band)
    return f


# ---------------------------------------------------------------------------
# nonlinear substeps (exact pointwise phase rotations)


def _gn_phase(c1: np.ndarray, c2: np.ndarray, dt: float):
    theta = np.abs(c1) ** 2 - np.abs(c2) ** 2 - 1.0
    ph = np.exp(1j * dt * theta)
    return c1 * ph, c2 * np.conj(ph)


def _thirring_phase(u: np.ndarray, v: np.ndarray, dt: float):
    # moduli are invariant under this flow, so both phases use pre-step values
    return u * np.exp(1j * dt * np.abs(v) ** 2), v * np.exp(1j * dt * np.abs(u) ** 2)


# ---------------------------------------------------------------------------
# public single-step operations


def ssm2_step_gn(f: SpinorField, dt: float) -> SpinorField:
    """Strang step: half free drift, exact nonlinear rotation, half free drift."""
    half = free_propagator_gn(f.grid, 0.5 * dt)
    g = idft(apply_propagator(dft(f), half))
    c1, c2 = _gn_phase(g.c1, g.c2, dt)
    g = SpinorField(grid=f.grid, c1=c1, c2=c2)
    return idft(apply_propagator(dft(g), half))


def ssm1_step_gn(f: SpinorField, dt: float) -> SpinorField:
    """First-order step: exact nonlinear rotation, then a full free drift."""
    c1, c2 = _gn_phase(f.c1, f.c2, dt)
    g = SpinorField(grid=f.grid, c1=c1, c2=c2)
    return idft(apply_propagator(dft(g), free_propagator_gn(f.grid, dt)))


def ssm2_step_thirring(f: SpinorField, dt: float) -> SpinorField:
    """Strang step for the Thirring model in light-cone components."""
    half = free_propagator_thirring(f.grid, 0.5 * dt)
    g = idft(apply_propagator(dft(f), half))
    u, v = _thirring_phase(g.c1, g.c2, dt)
    g = SpinorField(grid=f.grid, c1=u, c2=v)
    return idft(apply_propagator(dft(g), half))


def ssm1_step_thirring(f: SpinorField, dt: float) -> SpinorField:
    """First-order step: the full linear part first, then the nonlinear rotation."""
    g = idft(apply_propagator(dft(f), free_propagator_thirring(f.grid, dt)))
    u, v = _thirring_phase(g.c1, g.c2, dt)
    return SpinorField(grid=f.grid, c1=u, c2=v)


def _rk4ps_rhs(state: np.ndarray, ik: np.ndarray, advection_only: bool) -> np.ndarray:
    out = np.empty_like(state)
    out[0] = -ik * state[0]
    out[1] = ik * state[1]
    if not advection_only:
        phys = sfft.ifft(state, axis=-1)
        u, v = phys[0], phys[1]
        nl = np.empty_like(phys)
        nl[0] = 1j * (u * np.abs(v) ** 2 + np.conj(u) * v * v - v)
        nl[1] = 1j * (v * np.abs(u) ** 2 + np.conj(v) * u * u - u)
        out += sfft.fft(nl, axis=-1)
    return out


def _rk4ps_advance(state: np.ndarray, dt: float, ik: np.ndarray, advection_only: bool) -> np.ndarray:
    k1 = _rk4ps_rhs(state, ik, advection_only)
    k2 = _rk4ps_rhs(state + (0.5 * dt) * k1, ik, advection_only)
    k3 = _rk4ps_rhs(state + (0.5 * dt) * k2, ik, advection_only)
    k4 = _rk4ps_rhs(state + dt * k3, ik, advection_only)
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4ps_step_gn(f: SpinorField, dt: float, advection_only: bool = False) -> SpinorField:
    """Classical RK4 step in light-cone variables with spectral derivatives.

    ``f`` must already be expressed in the light-cone components; see
    :func:`spinstep.solitons.psi_to_uv`.  With ``advection_only`` the
    right-hand side keeps only the derivative terms, reducing each mode to an
    uncoupled linear advection problem.
    """
    state = sfft.fft(np.fft.ifftshift(np.vstack((f.c1, f.c2)), axes=-1), axis=-1)
    ik = 1j * np.fft.ifftshift(f.grid.k)
    new = _rk4ps_advance(state, dt, ik, advection_only)
    phys = np.fft.fftshift(sfft.ifft(new, axis=-1), axes=-1)
    return SpinorField(grid=f.grid, c1=phys[0], c2=phys[1])


# ---------------------------------------------------------------------------
# the recording loop


class _Recorder:
    def __init__(self, config: RunConfig, grid: Grid, nat_k: np.ndarray):
        self.config = config
        self.grid = grid
        self.times: list[float] = []
        self.spectra: list[SpectrumField] = []
        self.last_spectrum: SpectrumField | None = None
        self.charge: list[float] = []
        self.band_max: list[list[list[float]]] = []
        self.band_masks = []
        for center, halfwidth in config.tracked_bands:
            mask = (nat_k >= center - halfwidth) & (nat_k <= center + halfwidth)
            if not mask.any():
                raise ValueError(
                    f"tracked_bands entry ({center}, {halfwidth}) selects no modes on this grid"
                )
            self.band_masks.append(mask)

    def record(self, t: float, state: np.ndarray, phys: np.ndarray | None) -> bool:
        """Append a snapshot; returns True when the blow-up sentinel fires."""
        grid = self.grid
        if phys is None:
            phys = sfft.ifft(state, axis=-1)
        self.times.append(t)
        mags = np.abs(state)
        self.charge.append(float((grid.dx / grid.N) * np.sum(mags**2)))
        self.band_max.append(
            [[float(np.max(mags[0, m])), float(np.max(mags[1, m]))] for m in self.band_masks]
        )
        shifted = np.fft.fftshift(state, axes=-1)
        self.last_spectrum = SpectrumField(
            grid=grid, s1=shifted[0].copy(), s2=shifted[1].copy()
        )
        if self.config.store_spectra:
            self.spectra.append(self.last_spectrum)
        peak = float(np.max(np.abs(phys)))
        return (not np.isfinite(peak)) or peak > BLOWUP_THRESHOLD

    def build(self, termination: str, steps_taken: int) -> Trajectory:
        n_bands = len(self.band_masks)
        band = (
            np.array(self.band_max, dtype=float)
            .reshape(len(self.times), n_bands, 2)
            .transpose(1, 2, 0)
        )
        return Trajectory(
            config=self.config,
            grid=self.grid,
            times=np.array(self.times, dtype=float),
            spectra=tuple(self.spectra) if self.config.store_spectra else None,
            charge=np.array(self.charge, dtype=float),
            band_max=band,
            final_spectrum=self.last_spectrum,
            termination=termination,
            steps_taken=steps_taken,
        )


def _apply2(m, state: np.ndarray) -> None:
    a = m[0] * state[0] + m[1] * state[1]
    b = m[2] * state[0] + m[3] * state[1]
    state[0] = a
    state[1] = b


def _prop_entries(grid: Grid, dt: float, model: str):
    if model == "gn":
        p = free_propagator_gn(grid, dt)
    else:
        p = free_propagator_thirring(grid, dt)
    p = np.fft.ifftshift(p, axes=-1)
    return p[0, 0], p[0, 1], p[1, 0], p[1, 1]


def run_simulation(config: RunConfig) -> Trajectory:
    """Run the configured simulation and record snapshots at the cadence.

    The number of steps is ``round(t_max / dt)``; each step advances exactly
    ``dt``.  The first snapshot is the initial condition and the final step is
    always recorded.  The optional band filter is applied after every step,
    before any recording, so snapshots see the filtered state.
    """
    grid = make_grid(config.L, config.N)
    f0 = initial_field(config, grid)
    nat_k = np.fft.ifftshift(grid.k)
    rec = _Recorder(config, grid, nat_k)

    kill = None
    if config.band_filter is not None:
        lo, hi = config.band_filter
        kill = np.flatnonzero((np.abs(nat_k) >= lo) & (np.abs(nat_k) <= hi))

    if config.model == "gn" and config.scheme == "rk4ps":
        return _run_rk4ps(config, grid, f0, nat_k, rec, kill)
    return _run_ssm(config, grid, f0, rec, kill)


def _run_ssm(config: RunConfig, grid: Grid, f0: SpinorField, rec: _Recorder, kill) -> Trajectory:
    dt = config.dt
    n_steps = config.n_steps
    phase = _gn_phase if config.model == "gn" else _thirring_phase
    strang = config.scheme == "ssm2"
    lie_linear_first = config.model == "thirring" and config.scheme == "ssm1"

    state = sfft.fft(np.fft.ifftshift(np.vstack((f0.c1, f0.c2)), axes=-1), axis=-1)
    full = _prop_entries(grid, dt, config.model)
    half = _prop_entries(grid, 0.5 * dt, config.model) if strang else None

    if rec.record(0.0, state, np.vstack((f0.c1, f0.c2))):
        return rec.build("blowup", 0)

    if strang:
        _apply2(half, state)
    termination = "completed"
    m = 0
    for m in range(1, n_steps + 1):
        if lie_linear_first:
            _apply2(full, state)
        phys = sfft.ifft(state, axis=-1)
        phys[0], phys[1] = phase(phys[0], phys[1], dt)
        state = sfft.fft(phys, axis=-1)
        if not (strang or lie_linear_first):
            _apply2(full, state)  # first-order scheme: drift after the rotation
        if kill is not None:
            state[:, kill] = 0.0
        if m % config.cadence == 0 or m == n_steps:
            if strang:
                snap = state.copy()
                _apply2(half, snap)
            else:
                snap = state
            if rec.record(m * dt, snap, phys):
                termination = "blowup"
                break
        if strang and m < n_steps:
            _apply2(full, state)
    return rec.build(termination, m)


def _run_rk4ps(config: RunConfig, grid: Grid, f0: SpinorField, nat_k, rec: _Recorder, kill) -> Trajectory:
    dt = config.dt
    n_steps = config.n_steps
    ik = 1j * nat_k
    root2 = np.sqrt(2.0)

    def to_psi(state: np.ndarray) -> np.ndarray:
        return np.vstack(((state[0] + state[1]) / root2, (state[0] - state[1]) / root2))

    # integrate in light-cone variables; record in spinor components
    u0 = np.vstack(((f0.c1 + f0.c2) / root2, (f0.c1 - f0.c2) / root2))
    state = sfft.fft(np.fft.ifftshift(u0, axes=-1), axis=-1)
    if rec.record(0.0, to_psi(state), u0):
        return rec.build("blowup", 0)
    termination = "completed"
    m = 0
    for m in range(1, n_steps + 1):
        state = _rk4ps_advance(state, dt, ik, config.advection_only)
        if kill is not None:
            state[:, kill] = 0.0
        if m % config.cadence == 0 or m == n_steps:
            if rec.record(m * dt, to_psi(state), sfft.ifft(state, axis=-1)):
                termination = "blowup"
                break
    return rec.build(termination, m)
