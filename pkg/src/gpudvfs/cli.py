"""Command-line front end.

Exit codes: 0 success (or feasible plan), 2 infeasible plan, 1 error.
Numbers are written rounded to 12 significant digits, then in shortest
round-trip form, so repeated runs give byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import fitting
from .models import DomainError, predict_cpu_dvfs, predict_energy, predict_power_law
from .planner import (
    FAMILIES,
    LocalPlanRequest,
    PartitionPlanRequest,
    evaluate_plan,
    plan_frequency,
    plan_partition,
    rate_sweep,
)
from .profiles import (
    ConfigurationError,
    ProfileError,
    block_latencies,
    load_builtin,
    load_edge,
    load_profile,
    read_trace,
    total_latency,
    validate_profile,
    with_workload_baseline,
)

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2
FIGURES = ("latency-vs-freq", "model-compare", "plan-bars", "rate-sweep", "partition-curves")


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors share the generic error exit code
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def num(x) -> float:
    return float(f"{float(x):.12g}")


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, float)):
        return repr(num(x)) if isinstance(x, float) else str(x)
    return str(x)


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, float):
        return num(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2) + "\n"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _emit(text: str, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- inputs

def _load(args):
    if not args.profile:
        raise CliError("--profile is required")
    path = Path(args.profile)
    profile = load_profile(path) if path.exists() else load_builtin(args.profile)
    edge = load_edge(args.edge) if getattr(args, "edge", None) else profile.edge
    return profile.device, profile.network, edge


def _with_baseline(net, dev, args, families):
    if "cpu-dvfs" not in families:
        return net
    if getattr(args, "flops_per_cycle", None):
        net = with_workload_baseline(net, args.flops_per_cycle)
    if getattr(args, "fit_max_freq", None):
        freqs = [f for f in dev.freq_scale if f <= args.fit_max_freq + 1e-12]
        net = fitting.fit_baseline(net, freqs)
    return net


def _warnings(net, dev, edge):
    return [i.message for i in validate_profile(net, dev, edge).issues]


def _check_valid(net, dev, edge):
    report = validate_profile(net, dev, edge)
    if not report.ok:
        raise CliError("invalid profile: " + "; ".join(f"{i.code}: {i.message}" for i in report.errors))


# ---------------------------------------------------------------- commands

def cmd_fit(args) -> int:
    series = read_trace(args.trace)
    fits = []
    for key, pts in series.items():
        if args.model == "power-law":
            res = fitting.fit_power_law(pts)
        else:
            res = fitting.fit_cpu_dvfs(pts)
        entry = {"block": key, "family": args.model, "points": len(pts)}
        if res.model is not None:
            entry["model" if args.model == "power-law" else "cpu_dvfs"] = res.model.as_dict()
        entry.update(rmse_ms=res.rmse, r_squared=res.r_squared if res.r_squared != float("-inf") else None,
                     flags=list(res.flags))
        fits.append(entry)
    _emit(dumps({"source": str(args.trace), "fits": fits}), args.out)
    return EXIT_OK


def cmd_predict(args) -> int:
    dev, net, edge = _load(args)
    net = _with_baseline(net, dev, args, (args.model,))
    f = args.freq
    if not dev.f_min - 1e-12 <= f <= dev.f_max + 1e-12:
        print(f"warning: {f} GHz is outside the device scale [{dev.f_min}, {dev.f_max}]", file=sys.stderr)
    if args.block is not None:
        try:
            blk = net.blocks[net.block_index(args.block)]
        except (IndexError, KeyError) as e:
            raise CliError(str(e.args[0])) from None
        if args.model == "power-law":
            t = predict_power_law(blk.model, f)
        elif blk.cpu_dvfs is None:
            raise ConfigurationError(f"block {blk.name} has no CPU-DVFS model")
        else:
            t = predict_cpu_dvfs(blk.cpu_dvfs, f)
    else:
        t = total_latency(net, f, args.model)
    lines = [f"{fmt(t)} ms"]
    if args.energy:
        lines.append(f"{fmt(predict_energy(dev.kappa, f, t))} J")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _plan_report(command, plan, net, dev, edge, truth):
    report = {
        "command": command,
        "profile": {"network": net.name, "device": dev.name},
        "request": plan.request.as_dict(),
        "model_family": plan.model_family,
        "decision": {"frequency_ghz": plan.frequency, "partition": plan.partition},
        "predicted": {"latency_ms": plan.predicted_latency_ms, "energy_j": plan.predicted_energy_j},
        "feasible": plan.feasible,
    }
    if truth:
        ev = evaluate_plan(plan, net, dev, edge, truth)
        report["truth"] = {"family": truth, "latency_ms": ev.actual_latency_ms,
                           "energy_j": ev.actual_energy_j, "deadline_met": ev.deadline_met}
    report["candidates"] = [c.as_dict() for c in plan.candidate_table]
    report["warnings"] = _warnings(net, dev, edge)
    return report


def cmd_plan(args) -> int:
    dev, net, edge = _load(args)
    _check_valid(net, dev, edge)
    net = _with_baseline(net, dev, args, (args.model, args.truth))
    if args.plan_kind == "local":
        if (args.deadline_ms is None) == (args.energy_j is None):
            raise CliError("plan local needs exactly one of --deadline-ms or --energy-j")
        req = (LocalPlanRequest.deadline(args.deadline_ms) if args.deadline_ms is not None
               else LocalPlanRequest.energy_budget(args.energy_j))
        plan = plan_frequency(net, dev, req, args.model)
    else:
        req = PartitionPlanRequest(args.deadline_ms, args.rate_mbps,
                                   args.freq if args.freq is not None else "max", args.joint_freq)
        plan = plan_partition(net, dev, edge, req, args.model)
    _emit(dumps(_plan_report(f"plan {args.plan_kind}", plan, net, dev, edge, args.truth)), args.out)
    return EXIT_OK if plan.feasible else EXIT_INFEASIBLE


def _sweep_rows(net, dev, edge, args):
    rows = []
    for rate, plan in rate_sweep(net, dev, edge, args.rates, args.deadline_ms, args.model,
                                 args.freq if args.freq is not None else "max", args.joint_freq):
        rows.append((rate, plan.partition, plan.frequency, plan.predicted_latency_ms,
                     plan.predicted_energy_j, plan.feasible))
    return ("rate_mbps", "partition", "frequency_ghz", "latency_ms", "energy_j", "feasible"), rows


def cmd_sweep(args) -> int:
    dev, net, edge = _load(args)
    _check_valid(net, dev, edge)
    net = _with_baseline(net, dev, args, (args.model,))
    _emit(csv_text(*_sweep_rows(net, dev, edge, args)), args.out)
    return EXIT_OK


def _fig_latency_vs_freq(net, dev, edge, args):
    header = ["freq_ghz", "total_ms"] + [f"{b.name}_ms" for b in net.blocks]
    rows = [[f, total_latency(net, f, args.model)] + block_latencies(net, f, args.model)
            for f in dev.freq_scale]
    return header, rows


def _fig_model_compare(net, dev, edge, args):
    freqs = dev.freq_scale
    if args.trace:
        series = read_trace(args.trace)
        key = int(args.block) if args.block else "total"
        if key not in series:
            raise CliError(f"trace has no rows for block {key}")
        pts = series[key]
        if args.fit_max_freq:
            pts = [p for p in pts if p[0] <= args.fit_max_freq + 1e-12]
        pl = fitting.fit_power_law(pts).model
        truth = lambda f: predict_power_law(pl, f)
    elif args.block:
        blk = net.blocks[net.block_index(args.block)]
        truth = lambda f: predict_power_law(blk.model, f)
    else:
        truth = lambda f: total_latency(net, f)
    if not args.trace:
        band = [f for f in freqs if not args.fit_max_freq or f <= args.fit_max_freq + 1e-12]
        pts = [(f, truth(f)) for f in band]
    cpu = fitting.fit_cpu_dvfs(pts).model
    if cpu is None:
        raise CliError("CPU-DVFS fit is degenerate (all-zero latencies)")
    rows = [(f, truth(f), predict_cpu_dvfs(cpu, f)) for f in freqs]
    return ("freq_ghz", "power_law_ms", "cpu_dvfs_ms"), rows


def _fig_plan_bars(net, dev, edge, args):
    if args.deadlines and args.energies:
        raise CliError("give either --deadlines or --energies, not both")
    values = args.deadlines or args.energies
    if not values:
        raise CliError("plan-bars needs a non-empty --deadlines or --energies list")
    truth = args.truth or "power-law"
    rows = []
    for v in values:
        req = LocalPlanRequest.deadline(v) if args.deadlines else LocalPlanRequest.energy_budget(v)
        plan = plan_frequency(net, dev, req, args.model)
        ev = evaluate_plan(plan, net, dev, edge, truth)
        rows.append((v, plan.frequency, plan.predicted_latency_ms, plan.predicted_energy_j,
                     ev.actual_latency_ms, ev.actual_energy_j, plan.feasible, ev.deadline_met))
    header = ("deadline_ms" if args.deadlines else "energy_budget_j", "frequency_ghz", "predicted_ms",
              "predicted_j", "actual_ms", "actual_j", "feasible", "constraint_met")
    return header, rows


def _fig_rate_sweep(net, dev, edge, args):
    if not args.rates:
        raise CliError("rate-sweep needs --rates")
    if args.deadline_ms is None:
        raise CliError("rate-sweep needs --deadline-ms")
    return _sweep_rows(net, dev, edge, args)


def _fig_partition_curves(net, dev, edge, args):
    if args.rate_mbps is None or args.deadline_ms is None:
        raise CliError("partition-curves needs --rate-mbps and --deadline-ms")
    req = PartitionPlanRequest(args.deadline_ms, args.rate_mbps, args.freq if args.freq is not None else "max")
    plan = plan_partition(net, dev, edge, req, args.model)
    rows = [(c.partition, c.device_ms, c.upload_ms, c.edge_ms, c.latency_ms, c.energy_j, c.feasible)
            for c in plan.candidate_table]
    return ("partition", "device_ms", "upload_ms", "edge_ms", "total_ms", "energy_j", "feasible"), rows


_FIGURE_BUILDERS = {
    "latency-vs-freq": _fig_latency_vs_freq,
    "model-compare": _fig_model_compare,
    "plan-bars": _fig_plan_bars,
    "rate-sweep": _fig_rate_sweep,
    "partition-curves": _fig_partition_curves,
}


def cmd_figure(args) -> int:
    if args.figure not in _FIGURE_BUILDERS:
        raise CliError(f"unknown figure {args.figure!r}; expected one of {', '.join(FIGURES)}")
    dev, net, edge = _load(args)
    _check_valid(net, dev, edge)
    net = _with_baseline(net, dev, args, (args.model, args.truth))
    header, rows = _FIGURE_BUILDERS[args.figure](net, dev, edge, args)
    _emit(csv_text(header, rows), args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    dev, net, edge = _load(args)
    report = validate_profile(net, dev, edge)
    _emit(dumps(report.as_dict()), args.out)
    return EXIT_OK if report.ok else EXIT_ERROR


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--profile", help="profile JSON file or built-in profile name")
    common.add_argument("--edge", help="JSON file holding an edge profile")
    common.add_argument("--out", help="write output here instead of stdout")

    families = argparse.ArgumentParser(add_help=False)
    families.add_argument("--model", choices=FAMILIES, default="power-law", help="planning/prediction model")
    families.add_argument("--truth", choices=FAMILIES, help="re-evaluate the plan under this model")
    families.add_argument("--flops-per-cycle", type=float,
                          help="derive CPU-DVFS models from block FLOPs with this throughput")
    families.add_argument("--fit-max-freq", type=float,
                          help="fit CPU-DVFS models to the power-law on scale points up to this GHz")

    p = _Parser(prog="gpudvfs", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("fit", parents=[common], help="fit latency models to a trace CSV")
    s.add_argument("--trace", required=True)
    s.add_argument("--model", choices=FAMILIES, default="power-law")
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("predict", parents=[common], help="predict latency (and energy)")
    s.add_argument("--freq", type=float, required=True, help="GPU frequency in GHz")
    s.add_argument("--block", help="1-based block number or block name")
    s.add_argument("--energy", action="store_true")
    s.add_argument("--model", choices=FAMILIES, default="power-law")
    s.add_argument("--flops-per-cycle", type=float)
    s.add_argument("--fit-max-freq", type=float)
    s.set_defaults(func=cmd_predict)

    plan = sub.add_parser("plan", help="plan frequency or partition point")
    kinds = plan.add_subparsers(dest="plan_kind", required=True, parser_class=_Parser)
    s = kinds.add_parser("local", parents=[common, families])
    s.add_argument("--deadline-ms", type=float)
    s.add_argument("--energy-j", type=float)
    s.set_defaults(func=cmd_plan)
    s = kinds.add_parser("partition", parents=[common, families])
    s.add_argument("--deadline-ms", type=float, required=True)
    s.add_argument("--rate-mbps", type=float, required=True)
    s.add_argument("--freq", type=float, help="device frequency in GHz (default: scale maximum)")
    s.add_argument("--joint-freq", action="store_true", help="also search the frequency scale")
    s.set_defaults(func=cmd_plan)

    s = sub.add_parser("sweep", parents=[common, families], help="partition plans over uplink rates")
    s.add_argument("--rates", type=float, nargs="*", default=[])
    s.add_argument("--deadline-ms", type=float, required=True)
    s.add_argument("--freq", type=float)
    s.add_argument("--joint-freq", action="store_true")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("figure", parents=[common, families], help="emit plot-ready CSV")
    s.add_argument("figure", help=f"one of: {', '.join(FIGURES)}")
    s.add_argument("--trace")
    s.add_argument("--block")
    s.add_argument("--deadlines", type=float, nargs="*")
    s.add_argument("--energies", type=float, nargs="*")
    s.add_argument("--rates", type=float, nargs="*", default=[])
    s.add_argument("--rate-mbps", type=float)
    s.add_argument("--deadline-ms", type=float)
    s.add_argument("--freq", type=float)
    s.add_argument("--joint-freq", action="store_true")
    s.set_defaults(func=cmd_figure)

    s = sub.add_parser("validate", parents=[common], help="check profile invariants")
    s.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ProfileError, ConfigurationError, DomainError, fitting.InsufficientDataError,
            KeyError, IndexError, OSError, ValueError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_ERROR
