"""Split-step Fourier solvers and instability predictors for nonlinear Dirac solitons."""

from __future__ import annotations

__version__ = "0.1.0"

from .spectral import (
    Grid,
    SpinorField,
    SpectrumField,
    dft,
    idft,
    free_propagator_gn,
    free_propagator_thirring,
    make_grid,
)
from .solitons import (
    BoxModelParams,
    GNSolitonParams,
    PotentialSet,
    ThirringSolitonParams,
    apply_phase,
    box_coupling,
    fit_box_params,
    gn_envelope,
    gn_potentials,
    gn_soliton,
    psi_to_uv,
    thirring_potentials,
    thirring_soliton,
    uv_to_psi,
)
from .stepping import (
    RunConfig,
    Trajectory,
    initial_field,
    rk4ps_step_gn,
    run_simulation,
    seed_flat_spectrum,
    seed_noise,
    ssm1_step_gn,
    ssm1_step_thirring,
    ssm2_step_gn,
    ssm2_step_thirring,
)
from .measure import (
    BandTrack,
    GrowthFit,
    band_amplitude,
    band_track,
    cfl_threshold,
    extract_mode_shape,
    fit_growth_rate,
    resonant_wavenumbers,
    spectral_support_width,
)
from .edgemodes import (
    EdgeProblem,
    EigenReport,
    build_edge_problem,
    converged_edge_report,
    default_point_count,
    solve_edge_instability,
    soliton_potentials,
    sweep_edge_rates,
)
from .floquet import (
    BoxModelReport,
    MonodromyReport,
    box_model_monodromy,
    floor_rate_thirring,
    integrate_floor_ode,
    integrate_monodromy,
    sweep_floor_rates,
)
from .scenarios import (
    Scenario,
    build_run_config,
    get_scenario,
    iter_scenarios,
    load_scenario_file,
)

__all__ = [
    "__version__",
    "Grid",
    "SpinorField",
    "SpectrumField",
    "dft",
    "idft",
    "free_propagator_gn",
    "free_propagator_thirring",
    "make_grid",
    "BoxModelParams",
    "GNSolitonParams",
    "PotentialSet",
    "ThirringSolitonParams",
    "apply_phase",
    "box_coupling",
    "fit_box_params",
    "gn_envelope",
    "gn_potentials",
    "gn_soliton",
    "psi_to_uv",
    "thirring_potentials",
    "thirring_soliton",
    "uv_to_psi",
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
    "BandTrack",
    "GrowthFit",
    "band_amplitude",
    "band_track",
    "cfl_threshold",
    "extract_mode_shape",
    "fit_growth_rate",
    "resonant_wavenumbers",
    "spectral_support_width",
    "EdgeProblem",
    "EigenReport",
    "build_edge_problem",
    "converged_edge_report",
    "default_point_count",
    "solve_edge_instability",
    "soliton_potentials",
    "sweep_edge_rates",
    "BoxModelReport",
    "MonodromyReport",
    "box_model_monodromy",
    "floor_rate_thirring",
    "integrate_floor_ode",
    "integrate_monodromy",
    "sweep_floor_rates",
    "Scenario",
    "build_run_config",
    "get_scenario",
    "iter_scenarios",
    "load_scenario_file",
]
