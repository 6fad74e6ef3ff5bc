"""Command-line front end: relay-tune identify|tune|simulate|compare|circuit.

Exit codes: 0 ok, 1 usage, 2 CSV parse, 3 identification, 4 no limit cycle,
5 diverged loop, 6 infeasible circuit. Warnings are printed but never change
the exit code. All numeric flags are plain floats; angles are in degrees.

An optional --config FILE of `key = value` lines (keys named like the flags)
supplies defaults; explicit flags always win.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import circuit as circuit_mod
from . import csvio, tuning
from .chart import write_chart
from .errors import (
    ConfigError,
    CsvFormatError,
    Diverged,
    IllConditioned,
    Infeasible,
    InsufficientResponse,
    InvalidArgument,
    InvalidGains,
    InvalidPhaseMargin,
    InvalidTarget,
    MetricsUndefined,
    NoLimitCycle,
    NoOverlap,
    NoStep,
    RelayTuneError,
)
from .ident import average_records, identify_fopdt
from .model import FopdtModel, ParallelGains, PidGains, to_parallel
from .sim import (
    LoopScenario,
    SimConfig,
    compute_metrics,
    relay_experiment,
    simulate_closed_loop,
    simulate_open_loop,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_IDENT = 3
EXIT_NO_CYCLE = 4
EXIT_DIVERGED = 5
EXIT_INFEASIBLE = 6

_ERROR_CODES = (
    (CsvFormatError, EXIT_PARSE),
    ((NoStep, InsufficientResponse, IllConditioned, NoOverlap), EXIT_IDENT),
    (NoLimitCycle, EXIT_NO_CYCLE),
    (Diverged, EXIT_DIVERGED),
    (Infeasible, EXIT_INFEASIBLE),
)

DEFAULT_PM_KC = 50.0
DEFAULT_PM_KR = 70.0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunReport:
    """Everything one command run produced, in printable form."""

    command: str
    inputs_echo: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    trace_paths: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    exit_code: int = 0

    def render(self) -> str:
        lines = [f"== relay-tune {self.command} =="]
        if self.inputs_echo:
            lines.append("inputs:")
            for k, v in self.inputs_echo.items():
                lines.append(f"  {k} = {v}")
        if self.results:
            lines.append("results:")
            for k, v in self.results.items():
                lines.append(f"  {k} = {v:.6g}")
        for note in self.notes:
            lines.append(note)
        if self.trace_paths:
            lines.append("files:")
            for p in self.trace_paths:
                lines.append(f"  {p}")
        if self.warnings:
            lines.append("warnings:")
            for w in self.warnings:
                lines.append(f"  ! {w}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# parser construction

def _add_model_flags(p):
    p.add_argument("--model-kp", type=float, required=True,
                   help="plant steady-state gain")
    p.add_argument("--model-tau", type=float, required=True,
                   help="plant time constant [s]")
    p.add_argument("--model-delay", type=float, default=0.0,
                   help="plant dead time [s] (default 0)")


def _add_sim_flags(p):
    p.add_argument("--dt", type=float, default=0.01, help="sample time [s]")
    p.add_argument("--duration", type=float, default=100.0, help="run length [s]")


def _add_scenario_flags(p):
    p.add_argument("--setpoint", type=float, default=1.0,
                   help="set-point step applied at t = 0")
    p.add_argument("--disturbance", type=float, default=-0.5,
                   help="input disturbance step magnitude (0 disables)")
    p.add_argument("--disturbance-time", type=float, default=50.0,
                   help="disturbance start time [s]")
    p.add_argument("--filter-n", type=float, default=20.0,
                   help="derivative filter sharpness (filter tc = td/N)")
    p.add_argument("--band", type=float, default=0.05,
                   help="settling band as a fraction of the step")
    p.add_argument("--sat-low", type=float, default=None,
                   help="controller output lower clamp")
    p.add_argument("--sat-high", type=float, default=None,
                   help="controller output upper clamp")


def _add_out_flags(p, plot=True):
    p.add_argument("--out-dir", default=".", help="directory for output files")
    if plot:
        p.add_argument("--plot", action="store_true",
                       help="also write an SVG chart next to the CSV")


def build_parser():
    parser = _Parser(prog="relay-tune",
                     description="Relay-feedback PID tuning toolkit")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("identify", help="fit an FOPDT model from logged CSVs")
    p.add_argument("csvs", nargs="+", help="response record CSV files")
    p.add_argument("--grid-dt", type=float, default=0.1,
                   help="uniform grid step for averaging [s]")
    _add_out_flags(p, plot=False)

    p = subs.add_parser("tune", help="relay experiment + tuning rule")
    _add_model_flags(p)
    p.add_argument("--method", choices=("ah", "kc", "kr"), required=True)
    p.add_argument("--pm", type=float, default=None,
                   help=f"phase margin [deg] (default {DEFAULT_PM_KC:g} for kc, "
                        f"{DEFAULT_PM_KR:g} for kr)")
    p.add_argument("--relay-d", type=float, default=1.0, help="relay magnitude")
    p.add_argument("--hysteresis", type=float, default=0.0, help="relay hysteresis band")
    _add_sim_flags(p)
    _add_out_flags(p, plot=False)

    p = subs.add_parser("simulate", help="closed-loop run (or open-loop step without gains)")
    _add_model_flags(p)
    p.add_argument("--kp", type=float, default=None, help="controller gain")
    p.add_argument("--ti", type=float, default=None, help="integral time [s]")
    p.add_argument("--td", type=float, default=None, help="derivative time [s]")
    p.add_argument("--step", type=float, default=1.0,
                   help="open-loop input step magnitude (no-gains mode)")
    p.add_argument("--step-time", type=float, default=1.0,
                   help="open-loop input step time [s] (no-gains mode)")
    _add_scenario_flags(p)
    _add_sim_flags(p)
    _add_out_flags(p)

    p = subs.add_parser("compare", help="run the AH/KC/KR pipelines side by side")
    _add_model_flags(p)
    p.add_argument("--pm-kc", type=float, default=DEFAULT_PM_KC,
                   help="phase margin for the KC rule [deg]")
    p.add_argument("--pm-kr", type=float, default=DEFAULT_PM_KR,
                   help="phase margin for the KR rule [deg]")
    p.add_argument("--relay-d", type=float, default=1.0, help="relay magnitude")
    p.add_argument("--hysteresis", type=float, default=0.0, help="relay hysteresis band")
    _add_scenario_flags(p)
    _add_sim_flags(p)
    _add_out_flags(p)

    p = subs.add_parser("circuit", help="synthesize op-amp PID component values")
    p.add_argument("--kp", type=float, required=True, help="proportional gain")
    p.add_argument("--ti", type=float, default=None, help="integral time [s]")
    p.add_argument("--td", type=float, default=None, help="derivative time [s]")
    p.add_argument("--ki", type=float, default=None, help="parallel integral gain [1/s]")
    p.add_argument("--kd", type=float, default=None, help="parallel derivative gain [s]")
    p.add_argument("--r3", type=float, default=1000.0, help="divider resistor R3 [ohm]")
    p.add_argument("--c1", type=float, default=220e-6, help="input capacitor C1 [F]")
    p.add_argument("--c2", type=float, default=22e-6, help="feedback capacitor C2 [F]")
    p.add_argument("--mode", choices=("exact", "half-split"), default="exact",
                   help="synthesis formulas (exact inverse, or legacy half-split)")
    p.add_argument("--series", choices=("none", "e12", "e24"), default="none",
                   help="snap resistors to a standard series")

    for sp in subs.choices.values():
        sp.add_argument("--config", default=None,
                        help="key=value file supplying flag defaults")
    return parser, subs


def _load_config(path) -> dict:
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key = value")
                key, val = line.split("=", 1)
                values[key.strip().replace("-", "_")] = val.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}")
    return values


def _apply_config_defaults(subparser, values: dict) -> None:
    for action in subparser._actions:
        if action.dest in values:
            raw = values[action.dest]
            if isinstance(action, argparse._StoreTrueAction):
                action.default = raw.lower() in ("1", "true", "yes", "on")
            elif action.type is not None:
                try:
                    action.default = action.type(raw)
                except ValueError:
                    raise UsageError(
                        f"config value {action.dest} = {raw!r} is not a number"
                    )
            else:
                action.default = raw
            action.required = False


# ---------------------------------------------------------------------------
# shared helpers

def _model_from_args(args) -> FopdtModel:
    return FopdtModel(gain_kp=args.model_kp, tau=args.model_tau,
                      dead_time=args.model_delay)


def _cfg_from_args(args) -> SimConfig:
    return SimConfig(dt=args.dt, duration=args.duration)


def _scenario_from_args(args) -> LoopScenario:
    if (args.sat_low is None) != (args.sat_high is None):
        raise UsageError("--sat-low and --sat-high must be given together")
    sat = None if args.sat_low is None else (args.sat_low, args.sat_high)
    return LoopScenario(
        setpoint_step=args.setpoint,
        disturbance_magnitude=args.disturbance,
        disturbance_time=args.disturbance_time,
        derivative_filter_n=args.filter_n,
        saturation=sat,
    )


def _outpath(args, name: str) -> str:
    os.makedirs(args.out_dir, exist_ok=True)
    return os.path.join(args.out_dir, name)


def _tune_pipeline(model, method, pm, relay_d, hysteresis, cfg):
    """Relay experiment(s) plus the chosen rule.

    Returns (gains, critical point used by the rule, result detail dict,
    list of (name, trace)). The kr method runs a plain relay first, derives
    the extra transport delay from its period, and reruns with the delay.
    """
    outcome, trace = relay_experiment(model, relay_d, hysteresis, 0.0, cfg)
    cp = tuning.CriticalPoint(kc=outcome.critical_gain_kc, tc=outcome.period_tc)
    detail = {
        "amplitude_a": outcome.amplitude_a,
        "period_tc": outcome.period_tc,
        "critical_gain_kc": outcome.critical_gain_kc,
    }
    traces = [("relay", trace)]
    if method == "ah":
        gains = tuning.tune_ah(cp)
    elif method == "kc":
        gains = tuning.tune_kc(cp, pm)
    elif method == "kr":
        extra = tuning.kr_extra_delay(pm, cp.tc)
        outcome2, trace2 = relay_experiment(model, relay_d, hysteresis, extra, cfg)
        cp = tuning.CriticalPoint(kc=outcome2.critical_gain_kc, tc=outcome2.period_tc)
        detail.update({
            "extra_delay": extra,
            "delayed_amplitude_a": outcome2.amplitude_a,
            "delayed_period_tc": outcome2.period_tc,
            "delayed_critical_gain_kc": outcome2.critical_gain_kc,
        })
        traces.append(("relay_delayed", trace2))
        gains = tuning.tune_kr(cp)
    else:
        raise UsageError(f"unknown method {method!r}")
    return gains, cp, detail, traces


def _metrics_into(report, metrics, prefix=""):
    report.results[prefix + "overshoot_percent"] = metrics.overshoot_percent
    if metrics.settling_time is not None:
        report.results[prefix + "settling_time"] = metrics.settling_time
    else:
        report.notes.append(f"{prefix}settling_time: not reached")
    if metrics.recovery_time is not None:
        report.results[prefix + "recovery_time"] = metrics.recovery_time
    elif prefix:
        report.notes.append(f"{prefix}recovery_time: not reached")


# ---------------------------------------------------------------------------
# commands

def cmd_identify(args) -> RunReport:
    report = RunReport(command="identify")
    report.inputs_echo["csvs"] = ", ".join(args.csvs)
    report.inputs_echo["grid_dt"] = f"{args.grid_dt:g}"
    records = [csvio.read_record_csv(p) for p in args.csvs]
    averaged = average_records(records, args.grid_dt)
    out_csv = _outpath(args, "averaged.csv")
    csvio.write_record_csv(out_csv, averaged)
    report.trace_paths.append(out_csv)
    model = identify_fopdt(averaged)
    report.results["gain_kp"] = model.gain_kp
    report.results["tau"] = model.tau
    report.results["dead_time"] = model.dead_time
    report.notes.append("model: " + model.transfer_function())
    return report


def cmd_tune(args) -> RunReport:
    report = RunReport(command="tune")
    model = _model_from_args(args)
    cfg = _cfg_from_args(args)
    pm = args.pm
    if pm is None:
        pm = {"kc": DEFAULT_PM_KC, "kr": DEFAULT_PM_KR}.get(args.method)
    report.inputs_echo["model"] = model.transfer_function()
    report.inputs_echo["method"] = args.method
    if args.method != "ah":
        report.inputs_echo["pm_deg"] = f"{pm:g}"
    report.inputs_echo["relay_d"] = f"{args.relay_d:g}"
    gains, cp, detail, traces = _tune_pipeline(
        model, args.method, pm, args.relay_d, args.hysteresis, cfg)
    report.results.update(detail)
    report.results["kp"] = gains.kp
    report.results["ti"] = gains.ti
    report.results["td"] = gains.td
    par = to_parallel(gains)
    report.results["parallel_kp"] = par.kp
    report.results["parallel_ki"] = par.ki
    report.results["parallel_kd"] = par.kd
    for name, trace in traces:
        path = _outpath(args, f"{name}_{args.method}.csv")
        csvio.write_trace_csv(path, trace)
        report.trace_paths.append(path)
    return report


def cmd_simulate(args) -> RunReport:
    report = RunReport(command="simulate")
    model = _model_from_args(args)
    cfg = _cfg_from_args(args)
    report.inputs_echo["model"] = model.transfer_function()

    have_gains = any(v is not None for v in (args.kp, args.ti, args.td))
    if have_gains:
        if args.kp is None or args.ti is None:
            raise UsageError("closed-loop mode needs at least --kp and --ti")
        gains = PidGains(kp=args.kp, ti=args.ti, td=args.td or 0.0)
        scenario = _scenario_from_args(args)
        report.inputs_echo["gains"] = f"kp={gains.kp:g} ti={gains.ti:g} td={gains.td:g}"
        report.inputs_echo["scenario"] = (
            f"setpoint={scenario.setpoint_step:g} "
            f"disturbance={scenario.disturbance_magnitude:g}"
            f"@{scenario.disturbance_time:g}s"
        )
        trace = simulate_closed_loop(model, gains, scenario, cfg)
        dist_t = (scenario.disturbance_time
                  if scenario.disturbance_magnitude != 0.0 else None)
        metrics = compute_metrics(trace, band_fraction=args.band,
                                  disturbance_time=dist_t)
        _metrics_into(report, metrics, prefix="")
        if metrics.recovery_time is None and dist_t is not None:
            report.notes.append("recovery_time: not reached")
        report.results["final_value"] = metrics.final_value
    else:
        report.inputs_echo["mode"] = "open-loop step (no gains given)"
        n = cfg.n_samples
        u = np.full(n, args.step, dtype=np.float64)
        k0 = int(math.ceil(args.step_time / cfg.dt - 1e-9))
        u[:min(k0, n)] = 0.0
        trace = simulate_open_loop(model, u, cfg)
        report.results["final_value"] = float(trace.output[-1])

    out_csv = _outpath(args, "trace.csv")
    csvio.write_trace_csv(out_csv, trace)
    report.trace_paths.append(out_csv)
    if args.plot:
        out_svg = _outpath(args, "trace.svg")
        t = trace.times()
        write_chart(
            out_svg,
            [("setpoint", t, trace.setpoint), ("output", t, trace.output),
             ("control", t, trace.control)],
            title="relay-tune simulate", xlabel="time [s]", ylabel="value",
        )
        report.trace_paths.append(out_svg)
    return report


def cmd_compare(args) -> RunReport:
    report = RunReport(command="compare")
    model = _model_from_args(args)
    cfg = _cfg_from_args(args)
    scenario = _scenario_from_args(args)
    report.inputs_echo["model"] = model.transfer_function()
    report.inputs_echo["pm_kc"] = f"{args.pm_kc:g}"
    report.inputs_echo["pm_kr"] = f"{args.pm_kr:g}"
    dist_t = scenario.disturbance_time if scenario.disturbance_magnitude != 0.0 else None

    methods = (("ah", None), ("kc", args.pm_kc), ("kr", args.pm_kr))
    rows = []
    outputs = {}
    failures = []
    trace_len = None
    for method, pm in methods:
        try:
            gains, cp, detail, _ = _tune_pipeline(
                model, method, pm, args.relay_d, args.hysteresis, cfg)
            trace = simulate_closed_loop(model, gains, scenario, cfg)
            metrics = compute_metrics(trace, band_fraction=args.band,
                                      disturbance_time=dist_t)
        except RelayTuneError as exc:
            failures.append((method, exc))
            report.warnings.append(f"{method}: {type(exc).__name__}: {exc}")
            continue
        outputs[method] = trace.output
        trace_len = len(trace)
        rows.append((method, gains, metrics))
        for k, v in (("kp", gains.kp), ("ti", gains.ti), ("td", gains.td),
                     ("overshoot_percent", metrics.overshoot_percent)):
            report.results[f"{method}_{k}"] = v
        if metrics.settling_time is not None:
            report.results[f"{method}_settling_time"] = metrics.settling_time
        if metrics.recovery_time is not None:
            report.results[f"{method}_recovery_time"] = metrics.recovery_time

    if not rows:
        first_method, first_exc = failures[0]
        report.exit_code = _exit_code_for(first_exc)
        report.notes.append("all tuning pipelines failed")
        return report

    rows.sort(key=lambda r: r[2].overshoot_percent)
    header = f"{'method':8} {'overshoot%':>10} {'settling[s]':>12} {'recovery[s]':>12}"
    report.notes.append("metrics (sorted by overshoot):")
    report.notes.append("  " + header)
    for method, gains, metrics in rows:
        st = f"{metrics.settling_time:.2f}" if metrics.settling_time is not None else "n/a"
        rc = f"{metrics.recovery_time:.2f}" if metrics.recovery_time is not None else "n/a"
        report.notes.append(
            f"  {method:8} {metrics.overshoot_percent:>10.2f} {st:>12} {rc:>12}"
        )

    t = np.arange(trace_len, dtype=np.float64) * cfg.dt
    done = [m for m, _ in methods if m in outputs]
    names = ["time"] + [f"output_{m}" for m in done]
    columns = [t] + [outputs[m] for m in done]
    out_csv = _outpath(args, "compare.csv")
    csvio.write_columns_csv(out_csv, names, columns)
    report.trace_paths.append(out_csv)
    if args.plot:
        out_svg = _outpath(args, "compare.svg")
        series = [(f"output_{m}", t, outputs[m]) for m in done]
        series.insert(0, ("setpoint", t, np.full(trace_len, scenario.setpoint_step)))
        write_chart(out_svg, series, title="tuning method comparison",
                    xlabel="time [s]", ylabel="output")
        report.trace_paths.append(out_svg)
    return report


def cmd_circuit(args) -> RunReport:
    report = RunReport(command="circuit")
    pid_form = args.ti is not None or args.td is not None
    par_form = args.ki is not None or args.kd is not None
    if pid_form and par_form:
        raise UsageError("give either --ti/--td or --ki/--kd, not both")
    if pid_form:
        if args.ti is None:
            raise UsageError("--ti is required when giving time-constant gains")
        gains = PidGains(kp=args.kp, ti=args.ti, td=args.td or 0.0)
        target = to_parallel(gains)
        report.inputs_echo["gains"] = f"kp={gains.kp:g} ti={gains.ti:g} td={gains.td:g}"
    elif par_form:
        target = ParallelGains(kp=args.kp, ki=args.ki or 0.0, kd=args.kd or 0.0)
    else:
        raise UsageError("gains required: --ti [--td], or --ki [--kd]")
    report.inputs_echo["target"] = (
        f"KP={target.kp:g} KI={target.ki:g} KD={target.kd:g}"
    )
    report.inputs_echo["mode"] = args.mode
    synth = circuit_mod.synthesize_exact if args.mode == "exact" \
        else circuit_mod.synthesize_half_split
    result = synth(target, r3=args.r3, c1=args.c1, c2=args.c2)
    design = result.design
    if args.series != "none":
        result = circuit_mod.snap_to_series(design, args.series)
        design = result.design
        report.inputs_echo["series"] = args.series
    achieved = circuit_mod.circuit_gains(design)
    final_report = circuit_mod.GainReport(target, achieved)

    report.notes.append("components:")
    for name, unit in (("r1", "Ohm"), ("r2", "Ohm"), ("r3", "Ohm"), ("r4", "Ohm"),
                       ("c1", "F"), ("c2", "F")):
        value = getattr(design, name)
        report.results[name] = value
        report.notes.append(f"  {name.upper()} = {circuit_mod.fmt_eng(value, unit)}")
    report.results["achieved_kp"] = achieved.kp
    report.results["achieved_ki"] = achieved.ki
    report.results["achieved_kd"] = achieved.kd
    errors = final_report.rel_errors()
    report.notes.append("consistency (forward-evaluated gains vs target):")
    for name in ("kp", "ki", "kd"):
        report.notes.append(
            f"  {name.upper()}: target {getattr(target, name):.6g}, "
            f"achieved {getattr(achieved, name):.6g} "
            f"({100 * errors[name]:.3g}% error)"
        )
    if not final_report.is_consistent():
        report.warnings.append(
            f"synthesized gains deviate from the target by up to "
            f"{100 * final_report.max_rel_error:.3g}% (largest on "
            f"{max(errors, key=errors.get).upper()})"
        )
    return report


# ---------------------------------------------------------------------------

_HANDLERS = {
    "identify": cmd_identify,
    "tune": cmd_tune,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "circuit": cmd_circuit,
}


def _exit_code_for(exc) -> int:
    for types, code in _ERROR_CODES:
        if isinstance(exc, types):
            return code
    return EXIT_USAGE


def _scan_config_path(argv):
    for i, arg in enumerate(argv):
        if arg == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if arg.startswith("--config="):
            return arg.split("=", 1)[1]
    return None


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    try:
        config_path = _scan_config_path(argv)
        if config_path is not None:
            values = _load_config(config_path)
            for sp in subs.choices.values():
                _apply_config_defaults(sp, values)
        args = parser.parse_args(argv)
        handler = _HANDLERS[args.command]
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            report = handler(args)
        report.warnings.extend(str(w.message) for w in caught)
    except UsageError as exc:
        print(f"relay-tune: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidArgument, InvalidGains, InvalidPhaseMargin, InvalidTarget,
            ConfigError, MetricsUndefined) as exc:
        print(f"relay-tune: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RelayTuneError as exc:
        print(f"relay-tune: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _exit_code_for(exc)
    print(report.render())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
