"""Spectral diagnostics: resonance prediction, band tracking, growth fitting.

The growth-rate classifier follows a deterministic recipe.  Candidate fit
windows are drawn from a lattice of snapshot indices, must span at least 30%
of the track, and must contain at least ten samples.  The log-linear fit with
the highest R² among positive slopes defines the exponential candidate; a
straight-line fit of the raw amplitude over the *same* window arbitrates
between genuinely exponential growth and slow algebraic growth, whose
logarithm is concave but can still fit a line with R² above 0.98 over a
moderate window.  A track is tagged ``exponential`` only when the log-linear
fit clears the R² threshold, has positive rate, and explains the window at
least as well as the straight line does.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import SpectrumField, SpinorField, dft, idft
from .stepping import Trajectory

__all__ = [
    "BandTrack",
    "GrowthFit",
    "band_amplitude",
    "band_track",
    "cfl_threshold",
    "extract_mode_shape",
    "fit_growth_rate",
    "resonant_wavenumbers",
    "spectral_support_width",
]


def resonant_wavenumbers(dt: float, k_max: float) -> np.ndarray:
    """Wavenumbers ``n pi / dt`` (n >= 1) lying strictly inside the window.

    Empty when ``pi/dt >= k_max``: resonances exist only for time steps above
    the threshold ``dt = dx``.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got dt={dt}")
    base = np.pi / dt
    count = int(np.floor(k_max / base))
    ks = base * np.arange(1, count + 1)
    return ks[ks < k_max]


def cfl_threshold(dx: float) -> float:
    """Largest resonance-free time step: the grid spacing itself."""
    return dx


@dataclass(frozen=True)
class BandTrack:
    """Peak spectral amplitude of one wavenumber band over time, per component."""

    k_center: float
    k_halfwidth: float
    times: np.ndarray
    amp1: np.ndarray
    amp2: np.ndarray

    def __post_init__(self) -> None:
        if not np.all(np.diff(self.times) > 0.0):
            raise ValueError("BandTrack times must be strictly increasing")

    @property
    def amplitude(self) -> np.ndarray:
        """Componentwise maximum, the series used for growth fitting."""
        return np.maximum(self.amp1, self.amp2)


def _band_mask(grid, k_center: float, k_halfwidth: float) -> np.ndarray:
    if k_halfwidth <= 0.0:
        raise ValueError(f"k_halfwidth must be positive, got {k_halfwidth}")
    lo, hi = k_center - k_halfwidth, k_center + k_halfwidth
    if lo < -grid.k_max - 1e-12 or hi > grid.k_max - grid.dk + 1e-12:
        raise ValueError(
            f"band [{lo:g}, {hi:g}] exceeds the spectral window "
            f"[{-grid.k_max:g}, {grid.k_max - grid.dk:g}]"
        )
    mask = (grid.k >= lo) & (grid.k <= hi)
    if not mask.any():
        raise ValueError(f"band [{lo:g}, {hi:g}] contains no ladder points")
    return mask


def band_amplitude(spec: SpectrumField, k_center: float, k_halfwidth: float):
    """Peak coefficient modulus over the band, one value per component."""
    mask = _band_mask(spec.grid, k_center, k_halfwidth)
    return float(np.max(np.abs(spec.s1[mask]))), float(np.max(np.abs(spec.s2[mask])))


def band_track(traj: Trajectory, k_center: float, k_halfwidth: float) -> BandTrack:
    """Extract a band's amplitude history from a trajectory.

    Bands named in the run's ``tracked_bands`` are available even when the
    trajectory did not store spectra; any other band requires stored spectra.
    """
    for i, (center, halfwidth) in enumerate(traj.config.tracked_bands):
        if center == k_center and halfwidth == k_halfwidth:
            return BandTrack(
                k_center=k_center,
                k_halfwidth=k_halfwidth,
                times=traj.times.copy(),
                amp1=traj.band_max[i, 0].copy(),
                amp2=traj.band_max[i, 1].copy(),
            )
    if traj.spectra is None:
        raise ValueError(
            "band was not tracked during the run and the trajectory stores no spectra"
        )
    pairs = [band_amplitude(s, k_center, k_halfwidth) for s in traj.spectra]
    amps = np.array(pairs, dtype=float)
    return BandTrack(
        k_center=k_center,
        k_halfwidth=k_halfwidth,
        times=traj.times.copy(),
        amp1=amps[:, 0],
        amp2=amps[:, 1],
    )


@dataclass(frozen=True)
class GrowthFit:
    """Result of growth-model selection on a band track.

    ``rate`` and ``intercept`` describe the tagged model: for ``exponential``
    they parametrize ``ln a = intercept + rate t``; for ``linear``,
    ``a = intercept + rate t``; for ``flat`` the rate is zero.  ``exp_rate``
    and ``exp_r2`` always report the best log-linear window fit regardless of
    the chosen tag, so slow growth can be bounded quantitatively.
    """

    rate: float
    intercept: float
    window: tuple[float, float]
    r_squared: float
    model: str
    exp_rate: float
    exp_r2: float


def _window_scan(t: np.ndarray, y: np.ndarray, min_span: float, min_samples: int):
    """Best positive-slope window fit: (i, j, slope, intercept, r2) or None.

    Windows run over a lattice of at most ~600 endpoints; the highest R² wins
    and ties go to the later window.
    """
    n = len(t)
    stride = max(1, int(np.ceil(n / 600)))
    lattice = np.arange(0, n, stride)
    if lattice[-1] != n - 1:
        lattice = np.append(lattice, n - 1)

    tc = t - t.mean()
    yc = y - y.mean()
    cx = np.concatenate(([0.0], np.cumsum(tc)))
    cy = np.concatenate(([0.0], np.cumsum(yc)))
    cxx = np.concatenate(([0.0], np.cumsum(tc * tc)))
    cxy = np.concatenate(([0.0], np.cumsum(tc * yc)))
    cyy = np.concatenate(([0.0], np.cumsum(yc * yc)))

    best = None  # (r2, t_a, t_b, i, j, slope, intercept)
    for a in lattice:
        bs = lattice[lattice > a]
        if bs.size == 0:
            continue
        m = bs - a + 1.0
        ok = (t[bs] - t[a] >= min_span) & (m >= min_samples)
        if not ok.any():
            continue
        bs, m = bs[ok], m[ok]
        sx = cx[bs + 1] - cx[a]
        sy = cy[bs + 1] - cy[a]
        sxx = (cxx[bs + 1] - cxx[a]) - sx * sx / m
        sxy = (cxy[bs + 1] - cxy[a]) - sx * sy / m
        syy = (cyy[bs + 1] - cyy[a]) - sy * sy / m
        with np.errstate(divide="ignore", invalid="ignore"):
            slope = sxy / sxx
            r2 = np.where((sxx > 0.0) & (syy > 1e-300), sxy * sxy / (sxx * syy), -1.0)
        r2 = np.minimum(r2, 1.0)
        r2[slope <= 0.0] = -1.0
        if np.max(r2) < 0.0:
            continue
        jj = int(np.flatnonzero(r2 == np.max(r2))[-1])  # latest endpoint on ties
        cand_r2 = float(r2[jj])
        cand = (cand_r2, float(t[a]), float(t[bs[jj]]), int(a), int(bs[jj]), float(slope[jj]))
        if best is None or cand_r2 > best[0] + 1e-12:
            best = cand
        elif abs(cand_r2 - best[0]) <= 1e-12 and (cand[1], cand[2]) >= (best[1], best[2]):
            best = cand
    if best is None:
        return None
    r2, t_a, t_b, i, j, slope = best
    seg_t, seg_y = t[i : j + 1], y[i : j + 1]
    intercept = float(seg_y.mean() - slope * seg_t.mean())
    return i, j, slope, intercept, r2


def _plain_fit(t: np.ndarray, y: np.ndarray):
    tc, yc = t - t.mean(), y - y.mean()
    sxx = float(np.dot(tc, tc))
    syy = float(np.dot(yc, yc))
    sxy = float(np.dot(tc, yc))
    if sxx <= 0.0 or syy <= 1e-300:
        return 0.0, float(y.mean()), 0.0
    slope = sxy / sxx
    r2 = min(sxy * sxy / (sxx * syy), 1.0)
    return slope, float(y.mean() - slope * t.mean()), r2


def fit_growth_rate(
    track: BandTrack,
    r2_threshold: float = 0.98,
    min_span_fraction: float = 0.3,
    min_samples: int = 10,
) -> GrowthFit:
    """Classify a band's growth and fit its rate over an auto-selected window."""
    t = np.asarray(track.times, dtype=float)
    amp = np.asarray(track.amplitude, dtype=float)
    if len(t) < 30:
        raise ValueError(f"need at least 30 samples to fit a growth rate, got {len(t)}")
    min_span = min_span_fraction * (t[-1] - t[0])
    y = np.log(np.clip(amp, 1e-300, None))

    exp_rate, exp_r2 = 0.0, 0.0
    exp_best = _window_scan(t, y, min_span, min_samples)
    if exp_best is not None:
        i, j, slope, intercept, r2 = exp_best
        exp_rate, exp_r2 = slope, r2
        if r2 >= r2_threshold:
            # does a straight line through the raw amplitudes do as well here?
            _, _, lin_r2_here = _plain_fit(t[i : j + 1], amp[i : j + 1])
            if r2 >= lin_r2_here:
                return GrowthFit(
                    rate=slope,
                    intercept=intercept,
                    window=(float(t[i]), float(t[j])),
                    r_squared=r2,
                    model="exponential",
                    exp_rate=exp_rate,
                    exp_r2=exp_r2,
                )

    lin_best = _window_scan(t, amp, min_span, min_samples)
    if lin_best is not None and lin_best[4] >= r2_threshold:
        i, j, slope, intercept, r2 = lin_best
        return GrowthFit(
            rate=slope,
            intercept=intercept,
            window=(float(t[i]), float(t[j])),
            r_squared=r2,
            model="linear",
            exp_rate=exp_rate,
            exp_r2=exp_r2,
        )

    return GrowthFit(
        rate=0.0,
        intercept=float(amp.mean()),
        window=(float(t[0]), float(t[-1])),
        r_squared=0.0,
        model="flat",
        exp_rate=exp_rate,
        exp_r2=exp_r2,
    )


def spectral_support_width(spec: SpectrumField, threshold: float, k_min: float = 0.0) -> float:
    """Total spectral measure carrying coefficients above ``threshold``.

    Counts ladder points where either component exceeds the threshold,
    restricted to ``|k| >= k_min`` (use this to mask out the soliton's own
    spectrum when sizing an unstable band), and returns ``count * dk``.
    """
    if threshold <= 0.0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    if k_min < 0.0:
        raise ValueError(f"k_min must be non-negative, got {k_min}")
    amp = np.maximum(np.abs(spec.s1), np.abs(spec.s2))
    sel = (np.abs(spec.grid.k) >= k_min) & (amp > threshold)
    return float(spec.grid.dk * np.count_nonzero(sel))


def extract_mode_shape(f: SpinorField, k_lo: float) -> SpinorField:
    """High-pass the field at ``|k| >= k_lo`` and normalize the result.

    The output has unit peak two-component amplitude
    ``max_j sqrt(|c1_j|^2 + |c2_j|^2) = 1``, making mode shapes comparable
    across times and runs.
    """
    grid = f.grid
    if not 0.0 < k_lo < grid.k_max:
        raise ValueError(f"k_lo must lie in (0, k_max={grid.k_max:g}), got {k_lo}")
    spec = dft(f)
    keep = np.abs(grid.k) >= k_lo
    s1 = np.where(keep, spec.s1, 0.0)
    s2 = np.where(keep, spec.s2, 0.0)
    total = max(np.max(np.abs(spec.s1)), np.max(np.abs(spec.s2)))
    kept = max(np.max(np.abs(s1)), np.max(np.abs(s2)))
    # transform roundoff scatters ~1e-16 of the peak across all wavenumbers;
    # anything at that level is leakage, not signal
    if kept <= 1e-13 * total:
        raise ValueError("high-pass filter removed the entire field")
    g = idft(SpectrumField(grid=grid, s1=s1, s2=s2))
    norm = float(np.sqrt(np.max(np.abs(g.c1) ** 2 + np.abs(g.c2) ** 2)))
    return SpinorField(grid=grid, c1=g.c1 / norm, c2=g.c2 / norm)
