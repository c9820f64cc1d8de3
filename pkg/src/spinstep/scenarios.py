"""Named scenario library and config plumbing for the command-line harness.

A scenario is a JSON-able description of one piece of work: a simulation, an
eigenvalue sweep, a floor-monodromy sweep, a box-model sweep, or a set of
prediction/measurement pairings.  Numeric fields accept readable spellings:
lengths like ``"40pi+3.3"``, counts like ``"2^12"``, time steps like
``"dx/5"`` or ``"0.9dx"``, and band centers like ``"kmax-2"`` or ``"pi/dt"``.

The in-repo library covers the documented phenomenology: clean runs, the
resonant-pair and resonant-burst regimes, edge-mode growth for robust and
fragile solitons, noise-floor staircases, the two-soliton collision, the
massive Thirring counterpart, and prediction sweeps for each instability
mechanism.  Scenarios too long for a default test cycle carry
``extended=True``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .solitons import GNSolitonParams, ThirringSolitonParams
from .stepping import RunConfig

__all__ = [
    "SCENARIO_SCHEMA",
    "Scenario",
    "build_run_config",
    "evaluate_expectations",
    "get_scenario",
    "iter_scenarios",
    "load_scenario_file",
    "parse_band_center",
    "parse_count",
    "parse_length",
    "parse_timestep",
]

SCENARIO_SCHEMA = "spinstep.scenario/1"

_KINDS = ("simulate", "edge-sweep", "floor-sweep", "box-model", "crossval")

_LENGTH_RE = re.compile(r"^(?P<mult>-?[\d.eE+-]*?)\s*pi\s*(?P<shift>[+-][\d.eE]+)?$")
_STEP_RE = re.compile(r"^(?P<mult>[\d.eE+-]*?)\s*dx\s*(?:/\s*(?P<div>[\d.eE+-]+))?$")


def parse_length(value) -> float:
    """Length in domain units; strings may use ``pi``, e.g. ``"40pi+3.3"``."""
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip()
    m = _LENGTH_RE.match(text)
    if m:
        mult = m.group("mult")
        shift = m.group("shift")
        factor = 1.0 if mult in ("", "+") else -1.0 if mult == "-" else float(mult)
        return factor * np.pi + (float(shift) if shift else 0.0)
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"cannot parse length {value!r}") from None


def parse_count(value) -> int:
    """Point count; strings may use a power, e.g. ``"2^12"``."""
    if isinstance(value, (int, np.integer)):
        return int(value)
    text = str(value).strip()
    if "^" in text:
        base, _, exp = text.partition("^")
        return int(base) ** int(exp)
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"cannot parse count {value!r}") from None


def parse_timestep(value, dx: float) -> float:
    """Time step; strings may be grid-relative, e.g. ``"dx/5"`` or ``"1.25dx"``."""
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip()
    m = _STEP_RE.match(text)
    if m:
        mult = m.group("mult")
        div = m.group("div")
        out = dx * (float(mult) if mult else 1.0)
        return out / float(div) if div else out
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"cannot parse time step {value!r}") from None


_CENTER_RE = re.compile(
    r"^(?P<sign>[+-]?)kmax(?:/(?P<div>[\d.eE]+)|(?P<shift>[+-][\d.eE]+))?$"
)


def parse_band_center(value, k_max: float, dt: float) -> float:
    """Band center; strings may reference ``kmax`` or the resonance ``pi/dt``.

    Arithmetic is literal: ``"-kmax+2"`` is ``-k_max + 2``, two grid units in
    from the negative edge.
    """
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip().replace(" ", "")
    m = _CENTER_RE.match(text)
    if m:
        out = -k_max if m.group("sign") == "-" else k_max
        if m.group("div"):
            out /= float(m.group("div"))
        elif m.group("shift"):
            out += float(m.group("shift"))
        return out
    if text in ("pi/dt", "+pi/dt", "-pi/dt"):
        return -np.pi / dt if text[0] == "-" else np.pi / dt
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"cannot parse band center {value!r}") from None


_CONFIG_KEYS = {
    "model", "scheme", "L", "N", "dt", "t_max", "cadence", "solitons",
    "component_scale", "noise_amplitude", "seed", "flat_amplitude",
    "flat_band", "band_filter", "tracked_bands", "store_spectra",
}
_REQUIRED_KEYS = ("model", "scheme", "L", "N", "dt", "t_max")


def build_run_config(payload: dict, seed: int | None = None) -> RunConfig:
    """Turn a JSON-able mapping into a validated :class:`RunConfig`.

    Raises ``ValueError`` naming the offending key for anything missing,
    unknown, or unparseable.  ``seed`` overrides the payload's seed when
    given (the CLI's ``--seed`` flag).
    """
    unknown = set(payload) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config key '{sorted(unknown)[0]}'")
    for key in _REQUIRED_KEYS:
        if key not in payload:
            raise ValueError(f"missing required key '{key}'")

    def parsed(key, parser, *args):
        try:
            return parser(payload[key], *args)
        except ValueError as exc:
            raise ValueError(f"invalid value for key '{key}': {exc}") from None

    L = parsed("L", parse_length)
    N = parsed("N", parse_count)
    dx = L / N
    dt = parsed("dt", parse_timestep, dx)
    k_max = np.pi / dx

    model = str(payload["model"]).lower()
    solitons = []
    for i, entry in enumerate(payload.get("solitons", ())):
        try:
            if model == "thirring":
                solitons.append(ThirringSolitonParams(Q=parse_length(entry["Q"])))
            else:
                solitons.append(
                    GNSolitonParams(
                        Omega=float(entry["Omega"]),
                        V=float(entry.get("V", 0.0)),
                        x0=parse_length(entry.get("x0", 0.0)),
                    )
                )
        except KeyError as exc:
            raise ValueError(f"soliton {i} is missing key {exc}") from None

    bands = tuple(
        (parse_band_center(c, k_max, dt), float(h))
        for c, h in payload.get("tracked_bands", ())
    )

    kwargs = dict(
        model=model,
        scheme=payload["scheme"],
        L=L,
        N=N,
        dt=dt,
        t_max=float(payload["t_max"]),
        solitons=tuple(solitons),
        tracked_bands=bands,
    )
    for key in ("cadence", "noise_amplitude", "flat_amplitude", "store_spectra"):
        if key in payload:
            kwargs[key] = payload[key]
    if "component_scale" in payload:
        kwargs["component_scale"] = tuple(payload["component_scale"])
    for key in ("flat_band", "band_filter"):
        if payload.get(key) is not None:
            lo, hi = payload[key]
            kwargs[key] = (
                parse_band_center(lo, k_max, dt),
                parse_band_center(hi, k_max, dt),
            )
    kwargs["seed"] = int(payload.get("seed", 0)) if seed is None else int(seed)
    return RunConfig(**kwargs)


@dataclass(frozen=True)
class Scenario:
    """One named piece of work for the harness."""

    name: str
    kind: str
    description: str
    payload: dict
    extended: bool = False
    expectations: tuple = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {self.kind!r}")

    def to_json(self) -> dict:
        out = {
            "schema": SCENARIO_SCHEMA,
            "name": self.name,
            "kind": self.kind,
            "description": self.description,
            "payload": self.payload,
        }
        if self.extended:
            out["extended"] = True
        if self.expectations:
            out["expectations"] = list(self.expectations)
        return out


def load_scenario_file(path) -> Scenario:
    """Read one scenario from a JSON file (the ``--config`` flag)."""
    raw = json.loads(Path(path).read_text())
    if raw.get("schema") != SCENARIO_SCHEMA:
        raise ValueError(
            f"config schema must be '{SCENARIO_SCHEMA}', got {raw.get('schema')!r}"
        )
    for key in ("name", "kind", "payload"):
        if key not in raw:
            raise ValueError(f"missing required key '{key}'")
    return Scenario(
        name=raw["name"],
        kind=raw["kind"],
        description=raw.get("description", ""),
        payload=raw["payload"],
        extended=bool(raw.get("extended", False)),
        expectations=tuple(raw.get("expectations", ())),
    )


def evaluate_expectations(expectations, fits, tracks) -> list[str]:
    """Check declared outcomes against fitted band growth; list the failures.

    Supported forms: ``{"band": i, "tag": name}``, ``{"band": i,
    "min_decades": d}``, ``{"band": i, "max_decades": d}``, and
    ``{"all_bands_below": amp}``.
    """
    failures = []
    for exp in expectations:
        if "all_bands_below" in exp:
            limit = float(exp["all_bands_below"])
            for i, tr in enumerate(tracks):
                peak = float(np.max(tr.amplitude))
                if peak > limit:
                    failures.append(
                        f"band {i} reached {peak:.3e}, expected everything below {limit:.3e}"
                    )
            continue
        i = int(exp["band"])
        fit, tr = fits[i], tracks[i]
        if "tag" in exp and fit.model != exp["tag"]:
            failures.append(f"band {i} tagged '{fit.model}', expected '{exp['tag']}'")
        decades = float(np.log10(np.max(tr.amplitude) / tr.amplitude[0]))
        if "min_decades" in exp and decades < float(exp["min_decades"]):
            failures.append(
                f"band {i} grew {decades:.2f} decades, expected at least {exp['min_decades']}"
            )
        if "max_decades" in exp and decades > float(exp["max_decades"]):
            failures.append(
                f"band {i} grew {decades:.2f} decades, expected at most {exp['max_decades']}"
            )
    return failures


def _simulate(name, description, extended=False, expectations=(), **payload) -> Scenario:
    return Scenario(
        name=name,
        kind="simulate",
        description=description,
        payload=payload,
        extended=extended,
        expectations=tuple(expectations),
    )


_LIBRARY: tuple[Scenario, ...] = (
    # -- direct simulations -------------------------------------------------
    _simulate(
        "clean-run-075",
        "Robust soliton below the resonance threshold: no instability to t=2000.",
        model="gn", scheme="ssm2", L="20pi", N="2^10", dt="0.9dx", t_max=2000.0,
        solitons=[{"Omega": 0.75}], noise_amplitude=1e-12, seed=4, cadence=200,
        store_spectra=False,
        tracked_bands=[["kmax/2", 2.0], ["kmax-2", 1.9]],
        expectations=[{"all_bands_below": 1e-6}],
    ),
    _simulate(
        "clean-run-075-full",
        "Full-scale clean run (large grid, t=10000); hours-long, for replication only.",
        extended=True,
        model="gn", scheme="ssm2", L="20pi", N="2^16", dt="0.9dx", t_max=10000.0,
        solitons=[{"Omega": 0.75}], noise_amplitude=1e-12, seed=4, cadence=2000,
        store_spectra=False, tracked_bands=[["kmax/2", 2.0]],
    ),
    _simulate(
        "resonance-pair-075",
        "Coarse step above threshold: a single resonant pair at +-pi/dt ramps linearly.",
        model="gn", scheme="ssm2", L="20pi", N="2^10", dt="1.5dx", t_max=16000.0,
        solitons=[{"Omega": 0.75}], noise_amplitude=1e-12, seed=4, cadence=400,
        store_spectra=False,
        tracked_bands=[["pi/dt", 2.0], ["-pi/dt", 2.0]],
        expectations=[{"band": 0, "tag": "linear"}, {"band": 1, "tag": "linear"}],
    ),
    _simulate(
        "resonance-burst-035",
        "Fragile soliton above threshold: mode groups beside pi/dt go exponential.",
        model="gn", scheme="ssm2", L="40pi", N="2^12", dt="1.25dx", t_max=3000.0,
        solitons=[{"Omega": 0.35}], noise_amplitude=1e-12, seed=11, cadence=100,
        store_spectra=False,
        tracked_bands=[["pi/dt", 2.0], ["-pi/dt", 2.0]],
        expectations=[{"band": 0, "tag": "exponential"}, {"band": 1, "tag": "exponential"}],
    ),
    _simulate(
        "edge-growth-035",
        "Fragile soliton, small step: spectral-edge modes grow exponentially.",
        model="gn", scheme="ssm2", L="40pi", N="2^12", dt=0.01, t_max=1500.0,
        solitons=[{"Omega": 0.35}], flat_amplitude=1e-12, noise_amplitude=0.0,
        seed=1, cadence=100, store_spectra=False,
        tracked_bands=[["kmax-2", 1.95], ["-kmax+2", 1.95]],
        expectations=[{"band": 0, "tag": "exponential"}],
    ),
    _simulate(
        "edge-growth-05",
        "Intermediate soliton: slower edge growth, longer horizon.",
        model="gn", scheme="ssm2", L="40pi", N="2^12", dt=0.01, t_max=3500.0,
        solitons=[{"Omega": 0.5}], flat_amplitude=1e-12, noise_amplitude=0.0,
        seed=1, cadence=100, store_spectra=False,
        tracked_bands=[["kmax-2", 1.95]],
        expectations=[{"band": 0, "tag": "exponential"}],
    ),
    _simulate(
        "edge-growth-075-long",
        "Robust-soliton edge growth is ~40x slower; needs t=50000 to surface.",
        extended=True,
        model="gn", scheme="ssm2", L="40pi", N="2^12", dt="dx/5", t_max=50000.0,
        solitons=[{"Omega": 0.75}], flat_amplitude=1e-12, noise_amplitude=0.0,
        seed=1, cadence=2000, store_spectra=False,
        tracked_bands=[["kmax-2", 1.95]],
    ),
    _simulate(
        "edge-growth-smallstep-035",
        "Step-independence check: dt=0.001 leaves the edge growth rate unchanged.",
        extended=True,
        model="gn", scheme="ssm2", L="40pi", N="2^12", dt=0.001, t_max=1500.0,
        solitons=[{"Omega": 0.35}], flat_amplitude=1e-12, noise_amplitude=0.0,
        seed=1, cadence=1000, store_spectra=False,
        tracked_bands=[["kmax-2", 1.95]],
    ),
    _simulate(
        "floor-staircase-035",
        "Noise floor inside a growth window: mid-spectrum staircase to t=1500.",
        model="gn", scheme="ssm2", L="40pi+3.3", N="2^12", dt="dx/5", t_max=1500.0,
        solitons=[{"Omega": 0.35}], flat_amplitude=1e-12, noise_amplitude=0.0,
        seed=3, cadence=100, store_spectra=False,
        tracked_bands=[["kmax/2", 2.0], ["-kmax/2", 2.0]],
    ),
    _simulate(
        "floor-staircase-05",
        "Noise floor at Omega=0.5 near its window peak; slower, needs t=5000.",
        extended=True,
        model="gn", scheme="ssm2", L="40pi+3.4", N="2^12", dt="dx/5", t_max=5000.0,
        solitons=[{"Omega": 0.5}], flat_amplitude=1e-12, noise_amplitude=0.0,
        seed=3, cadence=200, store_spectra=False,
        tracked_bands=[["kmax/2", 2.0], ["-kmax/2", 2.0]],
    ),
    _simulate(
        "floor-control-075",
        "Positive control at the documented peak length; ~10 minutes of wall time.",
        extended=True,
        model="gn", scheme="ssm2", L="40pi+3.1", N="2^12", dt="dx/5", t_max=14000.0,
        solitons=[{"Omega": 0.75}], flat_amplitude=1e-12, noise_amplitude=0.0,
        seed=5, cadence=100, store_spectra=False,
        tracked_bands=[["kmax/2", 2.0], ["-kmax/2", 2.0]],
        expectations=[{"band": 0, "tag": "exponential"}],
    ),
    _simulate(
        "collision-expansion",
        "Two-soliton collision on a wide domain; edge support expands near closest approach.",
        model="gn", scheme="ssm2", L="160pi", N="2^14", dt="dx/5", t_max=200.0,
        solitons=[{"Omega": 0.25}, {"Omega": 0.15, "V": 0.1, "x0": "-8pi"}],
        noise_amplitude=1e-12, seed=7, cadence=815, store_spectra=True,
    ),
    _simulate(
        "inflated-pulse-02",
        "Non-soliton pulse (components scaled 1.2x): edge instability still bites.",
        model="gn", scheme="ssm2", L="40pi", N="2^12", dt="dx/5", t_max=300.0,
        solitons=[{"Omega": 0.2}], component_scale=[1.2, 1.2],
        noise_amplitude=1e-12, seed=9, cadence=50, store_spectra=False,
        tracked_bands=[["kmax-2", 1.95]],
    ),
    _simulate(
        "thirring-edge",
        "Massive Thirring soliton: edge modes blow up, the floor stays put.",
        model="thirring", scheme="ssm2", L="40pi", N="2^12", dt="dx/5", t_max=1000.0,
        solitons=[{"Q": "0.35pi"}], noise_amplitude=1e-12, seed=2, cadence=100,
        store_spectra=False,
        tracked_bands=[["kmax-2", 1.95], ["kmax/2", 2.0]],
        expectations=[{"band": 0, "min_decades": 6}, {"band": 1, "max_decades": 1}],
    ),
    _simulate(
        "rk4-edge-02",
        "Same edge instability under an RK4 pseudospectral stepper.",
        model="gn", scheme="rk4ps", L="40pi", N="2^12", dt="dx/5", t_max=300.0,
        solitons=[{"Omega": 0.2}], noise_amplitude=1e-12, seed=6, cadence=50,
        store_spectra=False, tracked_bands=[["kmax-2", 1.95]],
        expectations=[{"band": 0, "tag": "exponential"}],
    ),
    # -- prediction sweeps ---------------------------------------------------
    Scenario(
        name="edge-sweep-02",
        kind="edge-sweep",
        description="Edge eigenvalue rate vs L for the fragile soliton (32 lengths).",
        payload={"model": "gn", "frequency": 0.2, "L_start": "40pi",
                 "L_stop": "41pi", "L_step": 0.1, "M": 64, "converge": True},
    ),
    Scenario(
        name="edge-sweep-075",
        kind="edge-sweep",
        description="Edge eigenvalue rate vs L for the robust soliton: isolated peaks.",
        payload={"model": "gn", "frequency": 0.75, "L_start": "40pi",
                 "L_stop": "40pi+4.3", "L_step": 0.3, "M": 64, "converge": True},
    ),
    Scenario(
        name="edge-eigen-thirring",
        kind="edge-sweep",
        description="Edge eigenvalue prediction for the massive Thirring soliton.",
        payload={"model": "thirring", "frequency": "0.35pi", "L_start": "40pi",
                 "L_stop": "40pi+0.1", "L_step": 1.0, "M": 64, "converge": True},
    ),
    Scenario(
        name="floor-sweep-075",
        kind="floor-sweep",
        description="Floor monodromy rate vs L near 40pi: one sharp growth window.",
        payload={"model": "gn", "frequency": 0.75, "L_start": "40pi+2.0",
                 "L_stop": "40pi+4.3", "L_step": 0.1},
    ),
    Scenario(
        name="floor-sweep-05",
        kind="floor-sweep",
        description="Floor monodromy rate vs L for Omega=0.5.",
        payload={"model": "gn", "frequency": 0.5, "L_start": "40pi+2.0",
                 "L_stop": "40pi+4.3", "L_step": 0.1},
    ),
    Scenario(
        name="floor-sweep-thirring",
        kind="floor-sweep",
        description="Thirring floor monodromy: spectral radius pinned to one.",
        payload={"model": "thirring", "frequency": "0.35pi", "L_start": "20pi",
                 "L_stop": "60pi+0.1", "L_step": "20pi"},
    ),
    Scenario(
        name="box-approx-075",
        kind="box-model",
        description="Piecewise-constant envelope surrogate swept across one period in L.",
        payload={"frequency": 0.75, "fit_L": "40pi", "fit_N": 4096,
                 "L_start": "40pi", "L_stop": "40pi+4.3", "L_step": 0.05},
    ),
    # -- prediction vs measurement -------------------------------------------
    Scenario(
        name="crossval-edge",
        kind="crossval",
        description="Edge growth: eigenvalue prediction vs measured slopes at two frequencies.",
        payload={"pairs": [
            {"name": "edge-035", "run": "edge-growth-035", "band": 0,
             "predict": {"kind": "edge", "model": "gn", "frequency": 0.35,
                         "L": "40pi", "M": 64}, "tolerance": 0.15},
            {"name": "edge-05", "run": "edge-growth-05", "band": 0,
             "predict": {"kind": "edge", "model": "gn", "frequency": 0.5,
                         "L": "40pi", "M": 64}, "tolerance": 0.15},
        ]},
    ),
    Scenario(
        name="crossval-floor-035",
        kind="crossval",
        description="Noise floor: monodromy prediction vs measured staircase slope.",
        payload={"pairs": [
            {"name": "floor-035", "run": "floor-staircase-035", "band": 0,
             "predict": {"kind": "floor", "model": "gn", "frequency": 0.35,
                         "L": "40pi+3.3"}, "tolerance": 0.2},
        ]},
    ),
)

_BY_NAME = {s.name: s for s in _LIBRARY}
assert len(_BY_NAME) == len(_LIBRARY), "scenario names must be unique"


def iter_scenarios() -> tuple[Scenario, ...]:
    return _LIBRARY


def get_scenario(name: str) -> Scenario:
    try:
        return _BY_NAME[name]
    except KeyError:
        known = ", ".join(sorted(_BY_NAME))
        raise ValueError(f"unknown scenario '{name}' (known: {known})") from None
