"""Command-line front end: scenario presets, artifact emission, caching.

    nlwaves <command> --config <path> [--out <dir>] [--cache <dir>]

Commands: linstab, run, tables, field, ks.  Exit codes: 0 success, 2 config
error, 3 numerical failure.  Configs are flat JSON objects; a "scenario" key
selects a preset whose values the remaining keys override.  Every run
directory gets a manifest.json that reproduces the resolved config exactly.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import basis as basis_mod
from . import diagnostics as diag
from . import evolve, kslab, report
from .errors import ConfigurationError, DomainError, NlwavesError
from .linstab import growth_rate, neutral_band
from .meanflow import annulus_geometry, couette_profile

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

# Physics shared by every figure scenario.
_BASE = {
    "h": 0.5, "Re": 88.1,
    "dk": 0.25, "k_max": 12.0, "M": 20, "n_r": 48,
    "dt": 0.01, "t_end": 40.0,
    "snapshot_every": 0.5, "energy_every": 0.25,
    "eq_window": 10.0, "eq_tol": 1e-8,
    "seeds": [], "equilibrate_first": False, "t_pre": 0.0,
}

# The perturbation amplitudes follow the grid-amplitude measure abar = dk|A|
# of this code's unit-energy eigenfunctions (larger by a factor Re than the
# source figures, which normalize velocity by the inner-cylinder speed).
PRESETS = {
    "fig1": {**_BASE, "seeds": [[3.0, 1, 1e-3]]},
    "fig2": {**_BASE, "seeds": [[1.75, 1, 1e-3]]},
    "fig3": {**_BASE, "seeds": [[3.25, 1, 1e-3], [3.5, 1, 8.8]],
             "equilibrate_first": True, "t_pre": 30.0, "t_end": 80.0},
    "fig4": {**_BASE, "seeds": [[3.25, 1, 1e-3], [3.5, 1, 6.6]],
             "equilibrate_first": True, "t_pre": 30.0, "t_end": 80.0},
    "fig5": {**_BASE, "seeds": [[1.75, 1, 1e-3]]},
    "custom": dict(_BASE),
    "linstab": {"h": 0.5, "Re": 88.1, "n_r": 48,
                "k_lo": 0.1, "k_hi": 12.0, "k_samples": 120},
    "ks-sensitivity": {"regime": "chaotic", "n_modes": 64, "l_domain": 22.0,
                       "dt_list": [0.25, 0.125], "t_end": 500.0,
                       "snapshot_every": 1.0, "threshold": 0.5,
                       "seed_mode": 1, "seed_amp": 0.01},
}


def load_config(path, overrides=None):
    """Resolve a JSON config file against its scenario preset."""
    try:
        with open(path) as fh:
            user = json.load(fh)
    except OSError as err:
        raise ConfigurationError(f"cannot read config {path}: {err}")
    except json.JSONDecodeError as err:
        raise ConfigurationError(f"config {path} line {err.lineno}: {err.msg}")
    if not isinstance(user, dict):
        raise ConfigurationError(f"config {path}: top level must be an object")
    scenario = user.get("scenario", "custom")
    if scenario not in PRESETS:
        raise ConfigurationError(
            f"config {path} key 'scenario': unknown scenario {scenario!r} "
            f"(choices: {', '.join(sorted(PRESETS))})"
        )
    cfg = dict(PRESETS[scenario])
    cfg["scenario"] = scenario
    for key, val in user.items():
        cfg[key] = val
    if overrides:
        cfg.update(overrides)
    return cfg


def write_manifest(cfg, out_dir):
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(cfg, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_manifest(run_dir):
    path = os.path.join(run_dir, "manifest.json")
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as err:
        raise ConfigurationError(f"cannot read manifest in {run_dir}: {err}")


def _sim_config(cfg):
    try:
        return evolve.SimConfig(
            dk=float(cfg["dk"]), k_max=float(cfg["k_max"]), M=int(cfg["M"]),
            n_r=int(cfg["n_r"]), dt=float(cfg["dt"]), t_end=float(cfg["t_end"]),
            snapshot_every=float(cfg["snapshot_every"]),
            eq_window=float(cfg["eq_window"]), eq_tol=float(cfg["eq_tol"]),
            energy_every=float(cfg["energy_every"]),
        )
    except KeyError as err:
        raise ConfigurationError(f"config missing key {err.args[0]!r}")


def _seed_state(sim, seeds):
    if not seeds:
        raise ConfigurationError("scenario requires at least one seed (k0, m, amplitude)")
    state = None
    for k0, m, amp in seeds:
        if state is None:
            state = evolve.init_single_mode(sim, float(k0), int(m), float(amp))
        else:
            state = evolve.add_perturbation(state, float(k0), int(m), float(amp))
    return state


def _basis_for(cfg, cache_dir):
    return basis_mod.load_or_build(
        h=float(cfg["h"]), Re=float(cfg["Re"]), dk=float(cfg["dk"]),
        k_max=float(cfg["k_max"]), M=int(cfg["M"]), n_r=int(cfg["n_r"]),
        cache_dir=cache_dir,
    )


def _out_dir(cfg, args, default_leaf):
    out = args.out or cfg.get("out_dir") or os.path.join("out", default_leaf)
    os.makedirs(out, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# commands

def cmd_linstab(cfg, args):
    out = _out_dir(cfg, args, "linstab")
    geom = annulus_geometry(float(cfg["h"]))
    profile = couette_profile(geom, float(cfg["Re"]))
    n_r = int(cfg["n_r"])
    band = neutral_band(geom, profile, n_r=n_r,
                        bracket=(float(cfg["k_lo"]), float(cfg["k_hi"])))
    kvals = np.linspace(float(cfg["k_lo"]), float(cfg["k_hi"]), int(cfg["k_samples"]))
    from .radial import radial_grid
    grid = radial_grid(n_r, geom)
    sigmas = [growth_rate(geom, profile, k, grid=grid) for k in kvals]
    report.write_sigma_curve_csv(kvals, sigmas, os.path.join(out, "sigma.csv"))
    report.svg_curves(os.path.join(out, "sigma.svg"), kvals, [sigmas],
                      labels=["sigma"], title="axisymmetric growth rate",
                      xlabel="k", ylabel="sigma")
    write_manifest(cfg, out)
    if band is None:
        print("no unstable band")
    else:
        print(f"unstable band: ({band[0]:.4f}, {band[1]:.4f})")
    print(f"wrote {out}/sigma.csv")
    return 0


def _run_scenario(cfg, cache_dir):
    """Integrate a figure scenario; returns (series, basis, sim)."""
    sim = _sim_config(cfg)
    basis = _basis_for(cfg, cache_dir)
    seeds = cfg["seeds"]
    if cfg.get("equilibrate_first") and len(seeds) > 1:
        pre = evolve.SimConfig(
            dk=sim.dk, k_max=sim.k_max, M=sim.M, n_r=sim.n_r, dt=sim.dt,
            t_end=float(cfg["t_pre"]), snapshot_every=sim.snapshot_every,
            eq_window=sim.eq_window, eq_tol=sim.eq_tol, energy_every=sim.energy_every,
        )
        pre_series = evolve.run(pre, _seed_state(pre, seeds[:1]), basis)
        state = pre_series.final
        for k0, m, amp in seeds[1:]:
            state = evolve.add_perturbation(state, float(k0), int(m), float(amp))
    else:
        state = _seed_state(sim, seeds)
    series = evolve.run(sim, state, basis)
    return series, basis, sim


def _emit_run_artifacts(series, basis, cfg, out):
    kpos = basis.kgrid_pos
    report.write_energy_history_csv(series, kpos, os.path.join(out, "energy.csv"),
                                    meta={"scenario": cfg["scenario"]})
    evolve.export_snapshots_csv(series, os.path.join(out, "snapshots.csv"),
                                header_meta={"scenario": cfg["scenario"]})
    # energy curves for the seeded wavenumbers, their first harmonics and k=0
    track = sorted({0.0} | {float(k) for k, _, _ in cfg["seeds"]}
                   | {2.0 * float(k) for k, _, _ in cfg["seeds"]
                      if 2.0 * float(k) <= basis.k_max})
    e = np.asarray(series.energy_e)
    cols = [int(round(k / basis.dk)) for k in track]
    report.svg_curves(os.path.join(out, "energy.svg"), series.energy_t,
                      [np.abs(e[:, c]) for c in cols],
                      labels=[f"k={k:g}" for k in track], logy=True,
                      title="kinetic energy evolution", xlabel="t", ylabel="|E(k)|")
    _emit_tables(series, basis, out)
    try:
        resonances = diag.classify_resonances(series, basis)
    except NlwavesError:
        resonances = []
    report.write_resonances_csv(resonances, os.path.join(out, "resonances.csv"))
    final = series.final
    summary = {
        "equilibrium_reached": series.equilibrium_reached,
        "t_equilibrium": series.t_equilibrium,
        "t_final": final.t,
    }
    try:
        summary["dominant_k"] = diag.dominant_wavenumber(final, basis)
    except NlwavesError:
        summary["dominant_k"] = None
    with open(os.path.join(out, "summary.txt"), "w") as fh:
        for key, val in summary.items():
            fh.write(f"{key}: {val}\n")
    return summary


def _emit_tables(series, basis, out):
    final = series.final
    try:
        k_dom = diag.dominant_wavenumber(final, basis)
    except NlwavesError:
        k_dom = basis.dk
    kvals = [0.0] + [i * k_dom for i in range(1, 5) if i * k_dom <= basis.k_max]
    amps = diag.amplitude_table(final, kvals=kvals)
    report.write_mode_table_csv(amps, os.path.join(out, "amplitude_table.csv"))
    freqs = diag.frequency_table(series, kvals)
    report.write_mode_table_csv(freqs, os.path.join(out, "frequency_table.csv"),
                                value_name="freq")
    return amps, freqs


def cmd_run(cfg, args):
    out = _out_dir(cfg, args, cfg["scenario"])
    write_manifest(cfg, out)
    try:
        series, basis, _ = _run_scenario(cfg, args.cache)
    except NlwavesError as err:
        partial = getattr(err, "series", None)
        if partial is not None and partial.snapshots:
            _emit_run_artifacts(partial, _basis_for(cfg, args.cache), cfg, out)
            print(f"blow-up: {err}; partial artifacts in {out}", file=sys.stderr)
        raise
    summary = _emit_run_artifacts(series, basis, cfg, out)
    print(f"scenario {cfg['scenario']}: dominant_k={summary['dominant_k']}, "
          f"equilibrium_reached={summary['equilibrium_reached']} "
          f"(t_eq={summary['t_equilibrium']})")
    print(f"wrote {out}")
    return 0


def cmd_tables(cfg, args):
    run_dir = cfg.get("run_dir")
    if not run_dir:
        raise ConfigurationError("tables requires 'run_dir' pointing at a completed run")
    manifest = read_manifest(run_dir)
    sim = _sim_config(manifest)
    series = evolve.load_snapshots_csv(os.path.join(run_dir, "snapshots.csv"), sim)
    basis = _basis_for(manifest, args.cache)
    out = _out_dir(cfg, args, "tables")
    # energies for dominant-k detection
    series.energy_t = [series.snapshots[-1][0]]
    series.energy_e = [diag.energy_spectrum(series.final, basis)]
    _emit_tables(series, basis, out)
    write_manifest(cfg, out)
    print(f"wrote {out}/amplitude_table.csv and frequency_table.csv")
    return 0


def cmd_field(cfg, args):
    run_dir = cfg.get("run_dir")
    out = _out_dir(cfg, args, "field")
    if run_dir:
        manifest = read_manifest(run_dir)
        sim = _sim_config(manifest)
        series = evolve.load_snapshots_csv(os.path.join(run_dir, "snapshots.csv"), sim)
        basis = _basis_for(manifest, args.cache)
        final = series.final
    else:
        series, basis, _ = _run_scenario(cfg, args.cache)
        if not series.equilibrium_reached:
            raise ConfigurationError(
                "scenario did not reach equilibrium; extend t_end or pass 'run_dir' "
                "with an equilibrated run"
            )
        final = series.final
    write_manifest(cfg, out)
    for selector in ("total", "fundamental", "second-harmonic"):
        r, z, ur, uz = diag.velocity_field_rz(final, basis, selector=selector)
        stem = selector.replace("-", "_")
        report.write_field_csv(r, z, ur, uz, os.path.join(out, f"field_{stem}.csv"),
                               meta={"selector": selector})
        report.svg_quiver(os.path.join(out, f"field_{stem}.svg"), r, z, ur, uz,
                          title=f"velocity projection ({selector})")
    print(f"wrote field panels to {out}")
    return 0


def cmd_ks(cfg, args):
    out = _out_dir(cfg, args, "ks")
    regime = cfg.get("regime", "chaotic")
    if regime == "chaotic":
        l_domain = float(cfg.get("l_domain", 22.0))
    elif regime == "dissipative":
        l_domain = float(cfg.get("l_domain", 6.0))
    else:
        raise ConfigurationError(f"unknown KS regime {regime!r}")
    dt_list = cfg["dt_list"]
    if (not isinstance(dt_list, (list, tuple)) or len(dt_list) < 2
            or not all(isinstance(x, (int, float)) and x > 0 for x in dt_list)):
        raise ConfigurationError("'dt_list' must list at least two positive time steps")
    n_modes = int(cfg["n_modes"])
    init = kslab.seed_long_wave(n_modes, l_domain, mode=int(cfg["seed_mode"]),
                                amp=float(cfg["seed_amp"]))
    rep = kslab.timestep_sensitivity(
        n_modes, l_domain, init, [float(x) for x in dt_list],
        t_end=float(cfg["t_end"]), snapshot_every=float(cfg["snapshot_every"]),
        threshold=float(cfg["threshold"]),
    )
    write_manifest(cfg, out)
    with open(os.path.join(out, "sensitivity.txt"), "w") as fh:
        fh.write("\n".join(rep.lines()) + "\n")
    report.write_sensitivity_csv(rep, os.path.join(out, "sensitivity.csv"))
    traj = kslab.ks_run(n_modes, l_domain, init, float(min(dt_list)),
                        float(cfg["t_end"]), float(cfg["snapshot_every"]))
    kslab.export_trajectory_csv(traj, os.path.join(out, "trajectory.csv"))
    print(f"verdict: {rep.verdict}")
    print(f"wrote {out}/sensitivity.txt")
    return 0


COMMANDS = {
    "linstab": cmd_linstab,
    "run": cmd_run,
    "tables": cmd_tables,
    "field": cmd_field,
    "ks": cmd_ks,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nlwaves",
        description="Nonlinear wave-interaction simulator for Taylor-Couette flow",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--cache", default=None,
                       help="basis cache directory (default: $NLWAVES_CACHE)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](cfg, args)
    except (ConfigurationError, DomainError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except NlwavesError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
