"""Command-line harness: run scenarios and write reproducible artifacts.

Verbs
-----
``simulate``        integrate one scenario, write spectra + band-growth CSV
``predict-edge``    eigenvalue edge-rate sweep over domain lengths
``predict-floor``   noise-floor monodromy sweep over domain lengths
``box-model``       piecewise-constant surrogate sweep
``crossval``        predicted vs measured growth rates, tolerance-checked
``list-scenarios``  show the in-repo scenario library

Every verb writes a ``manifest.json`` tying each output file's checksum to a
hash of the resolved configuration; reruns with the same config and seed
produce byte-identical files.  Exit codes: 0 success, 1 failed expectations
or internal error, 2 configuration problems (the message names the offending
key), 3 simulation blow-up, 4 cross-validation tolerance violation.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import output
from .edgemodes import (
    build_edge_problem,
    converged_edge_report,
    default_point_count,
    solve_edge_instability,
    soliton_potentials,
)
from .floquet import box_model_monodromy, floor_rate_thirring, integrate_monodromy
from .measure import band_track, fit_growth_rate
from .scenarios import (
    Scenario,
    build_run_config,
    evaluate_expectations,
    get_scenario,
    iter_scenarios,
    load_scenario_file,
    parse_count,
    parse_length,
)
from .solitons import GNSolitonParams, fit_box_params, gn_envelope
from .spectral import make_grid
from .stepping import run_simulation

__all__ = ["main"]

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_CROSSVAL = 4


def _worker_count(requested: int | None) -> int:
    """Requested workers, capped by the SPINSTEP_MAX_WORKERS environment knob."""
    n = int(requested) if requested else 1
    cap = os.environ.get("SPINSTEP_MAX_WORKERS")
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def _parallel_map(fn, tasks, workers: int) -> list:
    """Order-preserving map; falls back to a plain loop for one worker."""
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(fn, tasks))


def _resolve_scenario(args, kind: str) -> Scenario:
    if args.scenario and args.config:
        raise ValueError("pass either '--scenario' or '--config', not both")
    if args.scenario:
        sc = get_scenario(args.scenario)
    elif args.config:
        sc = load_scenario_file(args.config)
    else:
        raise ValueError("missing required option '--scenario' or '--config'")
    if sc.kind != kind:
        raise ValueError(
            f"scenario '{sc.name}' has kind '{sc.kind}' but this command runs '{kind}'"
        )
    return sc


def _length_grid(payload: dict) -> np.ndarray:
    for key in ("L_start", "L_stop", "L_step"):
        if key not in payload:
            raise ValueError(f"missing required key '{key}'")
    start = parse_length(payload["L_start"])
    stop = parse_length(payload["L_stop"])
    step = parse_length(payload["L_step"])
    if step <= 0.0:
        raise ValueError(f"invalid value for key 'L_step': must be positive, got {step}")
    return np.arange(start, stop, step)


def _frequency(payload: dict) -> float:
    if "frequency" not in payload:
        raise ValueError("missing required key 'frequency'")
    return parse_length(payload["frequency"])


def _scenario_frequency(config) -> float:
    if not config.solitons:
        return float("nan")
    first = config.solitons[0]
    return float(getattr(first, "Omega", getattr(first, "Q", float("nan"))))


# -- workers (module-level so process pools can pickle them) -----------------

def _edge_point(task):
    model, frequency, L, M, converge = task
    pots = soliton_potentials(model, frequency, L, default_point_count(L))
    if converge:
        return converged_edge_report(pots, M=M)
    return solve_edge_instability(build_edge_problem(pots, M))


def _floor_point(task):
    model, frequency, L = task
    if model == "thirring":
        return floor_rate_thirring(frequency, L)
    return integrate_monodromy(frequency, L)


def _predicted_rate(spec: dict) -> float:
    for key in ("kind", "model", "frequency", "L"):
        if key not in spec:
            raise ValueError(f"prediction is missing key '{key}'")
    frequency = parse_length(spec["frequency"])
    L = parse_length(spec["L"])
    if spec["kind"] == "edge":
        pots = soliton_potentials(spec["model"], frequency, L, default_point_count(L))
        return converged_edge_report(pots, M=int(spec.get("M", 64))).growth_rate
    if spec["kind"] == "floor":
        report = (
            floor_rate_thirring(frequency, L)
            if spec["model"] == "thirring"
            else integrate_monodromy(frequency, L)
        )
        return report.growth_rate
    raise ValueError(f"prediction kind must be 'edge' or 'floor', got {spec['kind']!r}")


def _crossval_pair(pair: dict):
    for key in ("name", "run", "band", "predict", "tolerance"):
        if key not in pair:
            raise ValueError(f"crossval pair is missing key '{key}'")
    run = pair["run"]
    payload = get_scenario(run).payload if isinstance(run, str) else run
    config = build_run_config(payload)
    traj = run_simulation(config)
    center, halfwidth = config.tracked_bands[int(pair["band"])]
    fit = fit_growth_rate(band_track(traj, center, halfwidth))
    predicted = _predicted_rate(pair["predict"])
    return pair["name"], predicted, fit.exp_rate, float(pair["tolerance"])


# -- verbs -------------------------------------------------------------------

def _cmd_simulate(args) -> int:
    sc = _resolve_scenario(args, "simulate")
    config = build_run_config(sc.payload, seed=args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    traj = run_simulation(config)
    files = [output.write_spectra(out / f"{sc.name}-spectra.bin", traj)]

    tracks = [band_track(traj, c, h) for c, h in config.tracked_bands]
    can_fit = traj.times.size >= 30
    fits = [fit_growth_rate(tr) for tr in tracks] if can_fit else []
    frequency = _scenario_frequency(config)
    rows = [
        (
            sc.name, config.model, config.scheme, frequency, config.L,
            config.L / np.pi, config.N, config.dt, tr.k_center, tr.k_halfwidth,
            fit.rate, fit.r_squared, fit.model, fit.window[0], fit.window[1],
        )
        for tr, fit in zip(tracks, fits)
    ]
    files.append(output.write_growth_csv(out / f"{sc.name}-growth.csv", rows))
    manifest_config = dict(sc.payload, seed=config.seed)
    output.write_manifest(out, "simulate", manifest_config, files)

    print(f"{sc.name}: termination={traj.termination} steps={traj.steps_taken}")
    for tr, fit in zip(tracks, fits):
        print(
            f"  band {tr.k_center:+.3f}: {fit.model} rate={fit.rate:.4e} "
            f"r2={fit.r_squared:.4f}"
        )
    if tracks and not can_fit:
        print(
            f"{sc.name}: only {traj.times.size} snapshots, too few to fit "
            "band growth (need 30)",
            file=sys.stderr,
        )
    if traj.termination == "blowup":
        print(f"{sc.name}: field blew up; partial outputs kept", file=sys.stderr)
        return EXIT_BLOWUP
    if args.check:
        if sc.expectations and not can_fit:
            print(f"{sc.name}: cannot check expectations without fits", file=sys.stderr)
            return EXIT_FAIL
        failures = evaluate_expectations(sc.expectations, fits, tracks)
        for msg in failures:
            print(f"{sc.name}: FAILED expectation: {msg}", file=sys.stderr)
        if failures:
            return EXIT_FAIL
        print(f"{sc.name}: all {len(sc.expectations)} expectations hold")
    return EXIT_OK


def _cmd_predict_edge(args) -> int:
    sc = _resolve_scenario(args, "edge-sweep")
    p = sc.payload
    if "model" not in p:
        raise ValueError("missing required key 'model'")
    frequency = _frequency(p)
    tasks = [
        (p["model"], frequency, float(L), int(p.get("M", 64)), bool(p.get("converge", True)))
        for L in _length_grid(p)
    ]
    reports = _parallel_map(_edge_point, tasks, _worker_count(args.workers))

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = [output.write_edge_csv(out / f"{sc.name}-edge.csv", frequency, reports)]
    output.write_manifest(out, "predict-edge", dict(p), files)
    print(f"{sc.name}: {len(reports)} lengths -> {files[0].name}")
    return EXIT_OK


def _cmd_predict_floor(args) -> int:
    sc = _resolve_scenario(args, "floor-sweep")
    p = sc.payload
    if "model" not in p:
        raise ValueError("missing required key 'model'")
    frequency = _frequency(p)
    tasks = [(p["model"], frequency, float(L)) for L in _length_grid(p)]
    reports = _parallel_map(_floor_point, tasks, _worker_count(args.workers))

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = [output.write_floor_csv(out / f"{sc.name}-floor.csv", frequency, reports)]
    output.write_manifest(out, "predict-floor", dict(p), files)
    print(f"{sc.name}: {len(reports)} lengths -> {files[0].name}")
    return EXIT_OK


def _cmd_box_model(args) -> int:
    sc = _resolve_scenario(args, "box-model")
    p = sc.payload
    omega = _frequency(p)
    grid = make_grid(
        L=parse_length(p.get("fit_L", "40pi")), N=parse_count(p.get("fit_N", 4096))
    )
    params = fit_box_params(gn_envelope(GNSolitonParams(Omega=omega), grid))
    # The RK4 cross-check is slow; run it once to vouch for the closed form.
    reports = [
        box_model_monodromy(params, omega, float(L), rk4_check=(i == 0))
        for i, L in enumerate(_length_grid(p))
    ]

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = [output.write_box_csv(out / f"{sc.name}-box.csv", omega, reports)]
    output.write_manifest(out, "box-model", dict(p), files)
    print(f"{sc.name}: {len(reports)} lengths -> {files[0].name}")
    return EXIT_OK


def _cmd_crossval(args) -> int:
    sc = _resolve_scenario(args, "crossval")
    pairs = sc.payload.get("pairs", [])
    results = _parallel_map(_crossval_pair, pairs, _worker_count(args.workers))

    rows = []
    for name, predicted, measured, tolerance in results:
        if predicted != 0.0:
            rel = abs(predicted - measured) / abs(predicted)
        else:
            rel = 0.0 if measured == 0.0 else float("inf")
        status = "pass" if rel <= tolerance else "fail"
        rows.append((name, predicted, measured, rel, tolerance, status))

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = [output.write_crossval_csv(out / f"{sc.name}-crossval.csv", rows)]
    output.write_manifest(out, "crossval", dict(sc.payload), files)

    print(f"{'scenario':<24}{'predicted':>14}{'measured':>14}{'rel_err':>10}  status")
    for name, predicted, measured, rel, tolerance, status in rows:
        print(f"{name:<24}{predicted:>14.5e}{measured:>14.5e}{rel:>10.3f}  {status}")
    failed = [r[0] for r in rows if r[5] == "fail"]
    if failed:
        print(f"tolerance violated for: {', '.join(failed)}", file=sys.stderr)
        return EXIT_CROSSVAL
    return EXIT_OK


def _cmd_list_scenarios(args) -> int:
    for sc in iter_scenarios():
        tag = " [extended]" if sc.extended else ""
        print(f"{sc.name:<26}{sc.kind:<12}{tag:<11} {sc.description}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinstep",
        description="Soliton simulations and instability predictions for "
        "Gross-Neveu and massive Thirring models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, check=False):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--scenario", help="name from the in-repo library")
        cmd.add_argument("--config", help="path to a scenario JSON file")
        cmd.add_argument("--out-dir", default="spinstep-out", help="artifact directory")
        cmd.add_argument("--seed", type=int, default=None, help="override the noise seed")
        cmd.add_argument("--workers", type=int, default=None,
                         help="parallel workers (capped by SPINSTEP_MAX_WORKERS)")
        if check:
            cmd.add_argument("--check", action="store_true",
                             help="fail unless declared expectations hold")
        cmd.set_defaults(func=func)
        return cmd

    add("simulate", _cmd_simulate, "integrate one scenario and record band growth",
        check=True)
    add("predict-edge", _cmd_predict_edge, "edge-rate eigenvalue sweep over lengths")
    add("predict-floor", _cmd_predict_floor, "noise-floor monodromy sweep over lengths")
    add("box-model", _cmd_box_model, "piecewise-constant surrogate sweep")
    add("crossval", _cmd_crossval, "compare predicted and measured growth rates")

    lst = sub.add_parser("list-scenarios", help="show the scenario library")
    lst.set_defaults(func=_cmd_list_scenarios)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
