"""Command-line interface.

Subcommands
-----------
equilibria   locate steady states and report linearization constants
stability    delay-free Hurwitz analysis with an eigenvalue self-check
hopf         critical delays (discrete kernels) or critical scale (cascade kernels)
simulate     integrate one scenario, classify the long-run behaviour
sweep        repeat a scenario over a delay grid, two branches per value

Exit codes: 0 success, 2 configuration error, 3 no admissible steady state,
4 internal self-check failure.  All file output is byte deterministic.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, RunConfig, SimSettings, Tolerances, load_config, scenario_preset_names
from .equilibria import EquilibriumSet, ExistenceError, FeasibilityError, drift, find_equilibria
from .kernels import KernelSpec, check_composition
from .cycles import detect_cycle
from .output import Manifest, format_value, write_csv
from .simulate import Scenario, simulate
from .spectral import (
    HopfHypothesisError,
    dirac_critical_delays,
    gamma_critical_theta,
    nondelayed_eigenvalues,
    stability_report,
)


class SelfCheckError(RuntimeError):
    """An internal consistency check failed; results are not trustworthy."""


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, metavar="PATH|PRESET",
                   help="config file, or one of: " + ", ".join(scenario_preset_names()))
    p.add_argument("--out", default=".", metavar="DIR", help="output directory (default: .)")
    p.add_argument("--tolerance", action="append", default=[], metavar="NAME=VALUE",
                   help="override a named tolerance; repeatable")


def _add_sim_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("--t-end", type=float, default=None, help="override integration horizon (min)")
    p.add_argument("--step", type=float, default=None, help="override integrator step (min)")
    p.add_argument("--stride", type=float, default=None, help="override output spacing (min)")
    p.add_argument("--transient-fraction", type=float, default=None,
                   help="override fraction of the run discarded before classification")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hpaxis",
                                 description="four-channel neuroendocrine feedback model: "
                                             "steady states, stability, delay thresholds, simulation")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("equilibria", help="locate steady states")
    _add_common(p)

    p = sub.add_parser("stability", help="delay-free stability analysis")
    _add_common(p)

    p = sub.add_parser("hopf", help="critical delay computation")
    _add_common(p)
    p.add_argument("--kernel", choices=("dirac", "gamma"), default="dirac",
                   help="delay kernel family (default: dirac)")
    p.add_argument("--order", type=int, default=4,
                   help="cascade order for --kernel gamma (default: 4)")
    p.add_argument("--pmax", type=int, default=3,
                   help="number of discrete-kernel branches reported (default: 3)")

    p = sub.add_parser("simulate", help="integrate one scenario")
    _add_common(p)
    _add_sim_overrides(p)
    p.add_argument("--initial", default=None, metavar="SPEC",
                   help="override initial state: 'E2*1.01' or four comma-separated values")
    p.add_argument("--plot", action="store_true", help="also write SVG figures")

    p = sub.add_parser("sweep", help="delay sweep over two branches")
    _add_common(p)
    _add_sim_overrides(p)
    p.add_argument("--param", choices=("tau", "theta"), required=True,
                   help="swept quantity: total discrete lag (tau) or cascade scale (theta)")
    p.add_argument("--from", dest="from_value", type=float, required=True, metavar="LO")
    p.add_argument("--to", dest="to_value", type=float, required=True, metavar="HI")
    p.add_argument("--steps", type=int, required=True, help="number of grid points (>= 2)")
    p.add_argument("--plot", action="store_true", help="also write an SVG summary figure")

    return ap


def _find(cfg: RunConfig, tol: Tolerances) -> EquilibriumSet:
    return find_equilibria(cfg.params, grid_points=cfg.grid_points, xtol_rel=tol.root_xtol_rel)


def _eq_rows(eqs: EquilibriumSet, cfg: RunConfig):
    rows = []
    for eq in sorted(eqs, key=lambda e: e.label):
        rows.append([eq.label, eq.x0, eq.x1, eq.x2, eq.x3, eq.x4, eq.a, eq.b, eq.w4_tilde])
    return rows


def _cmd_equilibria(args, cfg: RunConfig, tol: Tolerances) -> int:
    eqs = _find(cfg, tol)
    out = Path(args.out)
    man = Manifest("equilibria", cfg.items, tol, source=cfg.source, outputs=["equilibria.csv"])
    cols = ["label", "x0", "x1", "x2", "x3", "x4", "a", "b", "w4tilde"]
    footer = [f"feasible window: ({format_value(eqs.x_low)}, {format_value(eqs.x_max)})",
              f"grid points: {eqs.grid_points}"]
    if eqs.degenerate:
        footer.append("degenerate root candidates: "
                      + ", ".join(format_value(x) for x in eqs.degenerate))
    write_csv(out / "equilibria.csv", cols, _eq_rows(eqs, cfg), man, footer=footer)
    print(f"{len(eqs)} steady state(s) in ({format_value(eqs.x_low)}, {format_value(eqs.x_max)})")
    for eq in sorted(eqs, key=lambda e: e.label):
        d = drift(eq, cfg.params)
        print(f"  {eq.label}: x3 = {eq.x3:.6g}, x4 = {eq.x4:.6g}, residual drift = {d:.3g}")
    if eqs.degenerate:
        print(f"  note: {len(eqs.degenerate)} grid point(s) look tangent; counts may be fragile there")
    print(f"wrote {out / 'equilibria.csv'}")
    return 0


def _eig_pairs(eq, params):
    eigs = sorted(nondelayed_eigenvalues(eq, params), key=lambda z: (z.real, z.imag))
    flat = []
    for z in eigs:
        flat.extend([z.real, z.imag])
    return eigs, flat


def _cmd_stability(args, cfg: RunConfig, tol: Tolerances) -> int:
    eqs = _find(cfg, tol)
    out = Path(args.out)
    cols = ["label", "i0", "i1", "i2", "i3", "i3_bar",
            "c1", "c2", "c3", "c4", "discriminant",
            "hurwitz_stable", "delay_independent_stable",
            "eig1_re", "eig1_im", "eig2_re", "eig2_im",
            "eig3_re", "eig3_im", "eig4_re", "eig4_im"]
    rows = []
    agree = 0
    for eq in sorted(eqs, key=lambda e: e.label):
        rep = stability_report(eq, cfg.params)
        eigs, flat = _eig_pairs(eq, cfg.params)
        max_re = max(z.real for z in eigs)
        eig_stable = max_re < 0.0
        if eig_stable != rep.hurwitz_stable and abs(max_re) > tol.eigen_agreement:
            raise SelfCheckError(
                f"{eq.label}: Hurwitz verdict {rep.hurwitz_stable} disagrees with "
                f"eigenvalues (max real part {max_re:.6g})")
        agree += 1
        rows.append([eq.label, rep.i0, rep.i1, rep.i2, rep.i3, rep.i3_bar,
                     rep.c1, rep.c2, rep.c3, rep.c4, rep.discriminant,
                     rep.hurwitz_stable, rep.delay_independent_stable] + flat)
        verdict = "stable" if rep.hurwitz_stable else "unstable"
        extra = " (stable for every delay)" if rep.delay_independent_stable else ""
        print(f"  {eq.label}: delay-free {verdict}{extra}, max Re(lambda) = {max_re:.6g}")
    man = Manifest("stability", cfg.items, tol, source=cfg.source, outputs=["stability.csv"])
    write_csv(out / "stability.csv", cols, rows, man)
    print(f"self-check: Hurwitz test and eigenvalues agree on {agree} steady state(s)")
    print(f"wrote {out / 'stability.csv'}")
    return 0


def _cmd_hopf(args, cfg: RunConfig, tol: Tolerances) -> int:
    eqs = _find(cfg, tol)
    out = Path(args.out)
    if args.kernel == "dirac":
        if args.pmax < 0:
            raise ConfigError([("pmax", "must be >= 0")])
        cols = ["label", "omega0"] + [f"tau_{p}" for p in range(args.pmax + 1)] + ["residual", "note"]
    else:
        if args.order < 2:
            raise ConfigError([("order", "cascade order must be >= 2")])
        cols = ["label", "omega0", "order", "omega_p", "theta_p", "mean_delay", "residual", "note"]
    rows = []
    for eq in sorted(eqs, key=lambda e: e.label):
        try:
            if args.kernel == "dirac":
                res = dirac_critical_delays(eq, cfg.params, pmax=args.pmax)
            else:
                res = gamma_critical_theta(eq, cfg.params, order=args.order,
                                           scan_points=tol.omega_scan_points)
        except HopfHypothesisError as exc:
            note = str(exc)
            if args.kernel == "dirac":
                rows.append([eq.label, None] + [None] * (args.pmax + 1) + [None, note])
            else:
                rows.append([eq.label, None, args.order, None, None, None, None, note])
            print(f"  {eq.label}: {note}")
            continue
        if res.found and res.residual > tol.hopf_residual:
            raise SelfCheckError(
                f"{eq.label}: crossing residual {res.residual:.3g} exceeds "
                f"tolerance {tol.hopf_residual:.3g}")
        if args.kernel == "dirac":
            rows.append([eq.label, res.omega0] + list(res.taus) + [res.residual, res.note])
            taus = ", ".join(f"{t:.4f}" for t in res.taus)
            print(f"  {eq.label}: omega0 = {res.omega0:.6f}, tau = {taus}")
        else:
            if res.found:
                rows.append([eq.label, res.omega0, res.order, res.omega_p, res.theta_p,
                             res.critical_average_delay, res.residual, res.note])
                print(f"  {eq.label}: omega0 = {res.omega0:.6f}, theta = {res.theta_p:.6f} "
                      f"(mean delay {res.critical_average_delay:.4f})")
            else:
                rows.append([eq.label, res.omega0, res.order, None, None, None, None, res.note])
                print(f"  {eq.label}: {res.note}")
    man = Manifest("hopf", cfg.items, tol, source=cfg.source, outputs=["hopf.csv"])
    write_csv(out / "hopf.csv", cols, rows, man)
    print(f"wrote {out / 'hopf.csv'}")
    return 0


def _merged_settings(args, cfg: RunConfig) -> SimSettings:
    sim = cfg.sim
    initial = getattr(args, "initial", None)
    overrides = {
        "t_end": args.t_end,
        "step": args.step,
        "stride": args.stride,
        "transient_fraction": args.transient_fraction,
    }
    if sim is None:
        if overrides["t_end"] is None:
            raise ConfigError([("simulation", "section missing and no --t-end given")])
        sim = SimSettings(t_end=overrides["t_end"])
    fields = {k: v for k, v in overrides.items() if v is not None}
    if fields:
        sim = SimSettings(t_end=fields.get("t_end", sim.t_end),
                          step=fields.get("step", sim.step),
                          stride=fields.get("stride", sim.stride),
                          transient_fraction=fields.get("transient_fraction", sim.transient_fraction),
                          initial=sim.initial)
    if initial is not None:
        from .config import parse_initial
        sim = SimSettings(t_end=sim.t_end, step=sim.step, stride=sim.stride,
                          transient_fraction=sim.transient_fraction,
                          initial=parse_initial(initial))
    return sim


def _resolve_initial(sim: SimSettings, eqs: EquilibriumSet):
    spec = sim.initial
    if spec[0] == "point":
        return spec[1]
    _, label, factor = spec
    try:
        eq = eqs.by_label(label)
    except KeyError:
        raise ConfigError([("initial", f"no steady state labelled {label!r} "
                            f"(found {', '.join(e.label for e in eqs)})")])
    return tuple(factor * v for v in eq.state())


def _require_kernels(cfg: RunConfig):
    if cfg.kernels is None:
        raise ConfigError([("kernel", "at least one [kernel.*] section is required "
                            "for this command")])
    return cfg.kernels


def _cycle_footer(rep, events) -> list:
    lines = [f"cycle: classification = {rep.classification}"]
    if rep.period is not None:
        lines.append(f"cycle: period = {format_value(rep.period)}")
    if rep.peak_count:
        lines.append(f"cycle: peaks = {rep.peak_count}")
    if rep.peak_cv is not None:
        lines.append(f"cycle: peak_spacing_cv = {format_value(rep.peak_cv)}")
    if rep.amplitude_trend is not None:
        lines.append(f"cycle: amplitude_trend = {format_value(rep.amplitude_trend)}")
    if rep.channel_ranges is not None:
        for i, (lo, hi) in enumerate(rep.channel_ranges, start=1):
            lines.append(f"cycle: x{i}_range = {format_value(lo)}, {format_value(hi)}")
    if rep.limit_point is not None:
        pt = ", ".join(format_value(v) for v in rep.limit_point)
        lines.append(f"cycle: limit_point = {pt}")
    if rep.matched_label is not None:
        lines.append(f"cycle: matched_label = {rep.matched_label}")
    if rep.note:
        lines.append(f"cycle: note = {rep.note}")
    for ev in events:
        lines.append(f"event: kind = {ev.kind}, channel = x{ev.channel}, "
                     f"first_t = {format_value(ev.first_t)}, worst = {format_value(ev.worst)}, "
                     f"count = {ev.count}")
    return lines


def _cmd_simulate(args, cfg: RunConfig, tol: Tolerances) -> int:
    kernels = _require_kernels(cfg)
    sim = _merged_settings(args, cfg)
    eqs = _find(cfg, tol)
    initial = _resolve_initial(sim, eqs)
    try:
        scn = Scenario(params=cfg.params, kernels=kernels, initial=initial,
                       t_end=sim.t_end, step=sim.step, stride=sim.stride)
    except ValueError as exc:
        raise ConfigError([("simulation", str(exc))])
    traj = simulate(scn, positivity_tol=tol.positivity, box_slack=tol.box_slack)
    rep = detect_cycle(traj, transient_fraction=sim.transient_fraction, equilibria=eqs,
                       noise_floor_factor=tol.noise_floor_factor,
                       peak_cv_max=tol.peak_cv_max,
                       decay_trend_ratio=tol.decay_trend_ratio)
    out = Path(args.out)
    outputs = ["trajectory.csv"]
    if args.plot:
        outputs += [f"trajectory-x{i}.svg" for i in (1, 2, 3, 4)] + ["trajectory-phase-x1-x3.svg"]
    man = Manifest("simulate", cfg.items, tol, source=cfg.source, outputs=outputs)
    rows = [[traj.t[i]] + [traj.x[i, j] for j in range(4)] for i in range(traj.t.size)]
    write_csv(out / "trajectory.csv", ["t", "x1", "x2", "x3", "x4"], rows, man,
              footer=_cycle_footer(rep, traj.events))
    print(f"integrated {scn.t_end:g} min ({traj.t.size} samples), family = {scn.family}")
    print(f"classification: {rep.classification}")
    if rep.period is not None:
        print(f"  period = {rep.period:.4f} min over {rep.peak_count} peaks "
              f"(spacing cv = {rep.peak_cv:.4f})")
    if rep.channel_ranges is not None:
        lo, hi = rep.channel_ranges[2]
        print(f"  x3 range = [{lo:.4f}, {hi:.4f}]")
    if rep.limit_point is not None:
        tag = f" (matches {rep.matched_label})" if rep.matched_label else ""
        print(f"  limit point x3 = {rep.limit_point[2]:.6f}{tag}")
    if rep.note:
        print(f"  note: {rep.note}")
    if traj.events:
        for ev in traj.events:
            print(f"  event: {ev.kind} on x{ev.channel} at t = {ev.first_t:g} "
                  f"(worst {ev.worst:.3g}, {ev.count} samples)")
    else:
        print("  invariants: no positivity or box violations")
    if args.plot:
        from .plots import plot_trajectory
        for path in plot_trajectory(traj, out):
            print(f"wrote {path}")
    print(f"wrote {out / 'trajectory.csv'}")
    return 0


def _swept_kernels(kernels, param, value, base_total):
    out = {}
    if param == "tau":
        factor = value / base_total
        for k, spec in kernels.items():
            out[k] = KernelSpec.dirac(spec.tau * factor) if spec.tau > 0 else spec
    else:
        for k, spec in kernels.items():
            out[k] = KernelSpec.gamma(spec.order, value) if spec.order > 0 else spec
    return out


def _cmd_sweep(args, cfg: RunConfig, tol: Tolerances) -> int:
    kernels = _require_kernels(cfg)
    sim = _merged_settings(args, cfg)
    if args.steps < 2:
        raise ConfigError([("steps", "must be >= 2")])
    families = {spec.family for spec in kernels.values() if not spec.instantaneous}
    want = "dirac" if args.param == "tau" else "gamma"
    if families != {want}:
        raise ConfigError([("param", f"--param {args.param} needs {want} kernels, "
                            f"config has {sorted(families) or ['none']}")])
    base_total = check_composition(kernels)
    if args.param == "tau" and base_total <= 0:
        raise ConfigError([("param", "tau sweep needs a nonzero base delay to scale")])
    eqs = _find(cfg, tol)
    branches = [eqs.highest]
    if len(eqs) > 1:
        branches.append(eqs.lowest)
    values = [args.from_value + (args.to_value - args.from_value) * i / (args.steps - 1)
              for i in range(args.steps)]
    rows = []
    for value in values:
        if value <= 0:
            raise ConfigError([("from/to", "swept values must stay positive")])
        swept = _swept_kernels(kernels, args.param, value, base_total)
        for eq in branches:
            initial = tuple(1.01 * v for v in eq.state())
            try:
                scn = Scenario(params=cfg.params, kernels=swept, initial=initial,
                               t_end=sim.t_end, step=sim.step, stride=sim.stride)
            except ValueError as exc:
                raise ConfigError([("simulation", f"value {value:g}: {exc}")])
            traj = simulate(scn, positivity_tol=tol.positivity, box_slack=tol.box_slack)
            rep = detect_cycle(traj, transient_fraction=sim.transient_fraction, equilibria=eqs,
                               noise_floor_factor=tol.noise_floor_factor,
                               peak_cv_max=tol.peak_cv_max,
                               decay_trend_ratio=tol.decay_trend_ratio)
            if rep.channel_ranges is not None:
                x3_lo, x3_hi = rep.channel_ranges[2]
            elif rep.limit_point is not None:
                x3_lo = x3_hi = rep.limit_point[2]
            else:
                start = int(rep.window[0] // sim.stride) if rep.window[0] == rep.window[0] else 0
                tail = traj.x3[start:] if start < traj.t.size else traj.x3
                x3_lo, x3_hi = float(tail.min()), float(tail.max())
            rows.append({"value": value, "branch": eq.label,
                         "classification": rep.classification,
                         "period": rep.period, "x3_min": x3_lo, "x3_max": x3_hi})
            print(f"  {args.param} = {value:g}, branch {eq.label}: {rep.classification}"
                  + (f", period = {rep.period:.2f}" if rep.period is not None else ""))
    out = Path(args.out)
    outputs = ["sweep.csv"] + (["sweep.svg"] if args.plot else [])
    man = Manifest("sweep", cfg.items, tol, source=cfg.source, outputs=outputs)
    cols = ["value", "branch", "classification", "period", "x3_min", "x3_max"]
    write_csv(out / "sweep.csv", cols,
              [[r["value"], r["branch"], r["classification"], r["period"],
                r["x3_min"], r["x3_max"]] for r in rows],
              man)
    if args.plot:
        from .plots import plot_sweep
        print(f"wrote {plot_sweep(rows, args.param, out)}")
    print(f"wrote {out / 'sweep.csv'}")
    return 0


_DISPATCH = {
    "equilibria": _cmd_equilibria,
    "stability": _cmd_stability,
    "hopf": _cmd_hopf,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        import warnings
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            tol = Tolerances().apply_overrides(args.tolerance)
            cfg = load_config(args.config)
            code = _DISPATCH[args.command](args, cfg, tol)
        seen = []
        for w in caught:
            text = str(w.message)
            if text not in seen:
                seen.append(text)
                print(f"warning: {text}", file=sys.stderr)
        return code
    except ConfigError as exc:
        for field, msg in exc.problems:
            print(f"config error [{field}]: {msg}", file=sys.stderr)
        return 2
    except (ExistenceError, FeasibilityError) as exc:
        print(f"model inconsistency: {exc}", file=sys.stderr)
        return 3
    except SelfCheckError as exc:
        print(f"self-check failed: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
