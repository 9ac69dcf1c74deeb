"""Command-line front end: ``snnsim plan | encode | run``."""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import encoders
from .config import TRANSPORTS, ExperimentConfig, load_config
from .errors import SnnSimError
from .presets import IRIS_FEATURE_MAXS, IRIS_FEATURE_MINS, get_preset
from .processor import CLOCK_PERIOD_NS, Processor, SimTrace, classify, output_latency
from .uart import (
    BAUD_RATE,
    DEFAULT_TRANSACTION_US,
    LoopbackChannel,
    LoopbackDevice,
    frame_time_s,
    host_session,
    programming_time,
    transaction_count,
)

log = logging.getLogger("snnsim")


def _fmt_seconds(seconds):
    if seconds < 1e-3:
        return f"{seconds * 1e6:.2f} us"
    return f"{seconds * 1e3:.2f} ms"


def cmd_plan(args):
    plan = transaction_count(args.n, per_transaction_us=args.per_tx_us)
    frame = plan.total * frame_time_s(BAUD_RATE)
    print(f"neurons           {plan.n}")
    print(f"connection list   {plan.cl}")
    print(f"thresholds        {plan.threshold}")
    print(f"weights           {plan.weight}")
    print(f"impulse           {plan.impulse}")
    print(f"total             {plan.total} transactions")
    print(f"programming time  {_fmt_seconds(programming_time(plan))} "
          f"({args.per_tx_us:g} us per transaction)")
    print(f"8N1 wire time     {_fmt_seconds(frame)} "
          f"(10-bit frames at {BAUD_RATE} baud, for comparison)")
    return 0


def _float_list(text):
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if len(values) != encoders.N_FEATURES:
        raise argparse.ArgumentTypeError(f"expected {encoders.N_FEATURES} values")
    return values


def _encode_dataset(kind, path, levels, gap, mins, maxs, pixel_threshold):
    """Return ``(samples, schedules)`` in input-span width."""
    if kind == "image":
        samples = encoders.read_images(path)
        schedules = [encoders.encode_image(s, pixel_threshold)[np.newaxis, :] for s in samples]
        return samples, schedules
    samples = encoders.read_tabular_csv(path)
    if samples and (mins is None or maxs is None):
        lo, hi = encoders.dataset_ranges(samples)
        mins = list(lo) if mins is None else mins
        maxs = list(hi) if maxs is None else maxs
    schedules = [encoders.encode_tabular(s, mins, maxs, levels, gap) for s in samples]
    return samples, schedules


def cmd_encode(args):
    mins, maxs = args.mins, args.maxs
    if args.preset:
        preset = get_preset(args.preset)
        if args.kind == "tabular":
            encoders.check_gap(args.gap, preset.refractory)
            if preset.name == "iris":
                mins = mins or list(IRIS_FEATURE_MINS)
                maxs = maxs or list(IRIS_FEATURE_MAXS)
    _, schedules = _encode_dataset(
        args.kind, args.dataset, args.levels, args.gap, mins, maxs, args.pixel_threshold
    )
    text = "\n".join(encoders.format_schedule(s) for s in schedules)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


@dataclass
class SampleResult:
    index: int
    true_label: Optional[str]
    predicted: Optional[str]
    no_decision: bool
    counts: tuple
    first_output_cycle: Optional[int]
    latency_cycles: Optional[int]
    trace: SimTrace


def _simulate(cfg: ExperimentConfig, schedule) -> SimTrace:
    net, run = cfg.network, cfg.run
    bank, model = net.bank(), net.model()
    if run.transport == "direct":
        depth = "full" if run.trace == "full" else "spikes"
        return Processor(bank, model).run(schedule, run.extra_cycles, depth=depth)
    frames = list(schedule)
    if frames:
        frames += [np.zeros(net.n, dtype=np.uint8)] * run.extra_cycles
    device = LoopbackDevice(net.n, bank.refractory, bank.leak_step, model)
    result = host_session(LoopbackChannel(device), bank, frames)
    impulses = np.array(frames, dtype=np.uint8).reshape(len(frames), net.n)
    return SimTrace(0, impulses, result.spike_matrix(len(frames)))


def run_experiment(cfg: ExperimentConfig):
    net, enc = cfg.network, cfg.encoder
    if enc.kind == "tabular":
        encoders.check_gap(enc.gap, net.refractory)
    samples, schedules = _encode_dataset(
        enc.kind, enc.dataset, enc.levels, enc.gap,
        enc.feature_mins, enc.feature_maxs, enc.pixel_threshold,
    )
    results = []
    for i, (sample, sched) in enumerate(zip(samples, schedules)):
        full = encoders.embed(sched, net.n, net.inputs[0])
        trace = _simulate(cfg, full)
        decision = classify(trace, net.output_range, mode=net.decode)
        results.append(SampleResult(
            index=i,
            true_label=sample.label,
            predicted=None if decision.no_spike else net.class_names[decision.index],
            no_decision=decision.no_spike,
            counts=decision.counts,
            first_output_cycle=decision.first_spike_cycle,
            latency_cycles=output_latency(trace, net.output_range),
            trace=trace,
        ))
        log.info("sample %d: predicted %s", i, results[-1].predicted)
    return results


def write_report(results, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow([
        "sample", "true_label", "predicted", "no_decision",
        "first_output_cycle", "latency_cycles", "latency_ns", "spike_counts",
    ])
    for r in results:
        w.writerow([
            r.index,
            r.true_label or "",
            r.predicted or "",
            int(r.no_decision),
            "" if r.first_output_cycle is None else r.first_output_cycle,
            "" if r.latency_cycles is None else r.latency_cycles,
            "" if r.latency_cycles is None else r.latency_cycles * CLOCK_PERIOD_NS,
            " ".join(str(c) for c in r.counts),
        ])


def cmd_run(args):
    cfg = load_config(args.config)
    if args.transport:
        cfg.run.transport = args.transport
    if args.report:
        cfg.report.report = args.report
    if args.trace_dir:
        cfg.report.trace_dir = args.trace_dir
    if args.print_effective_config:
        print(cfg.to_json())
        return 0

    results = run_experiment(cfg)
    if cfg.report.report:
        Path(cfg.report.report).parent.mkdir(parents=True, exist_ok=True)
        with open(cfg.report.report, "w", newline="") as fh:
            write_report(results, fh)
    else:
        write_report(results, sys.stdout)
    if cfg.report.trace_dir and cfg.run.trace != "none":
        out = Path(cfg.report.trace_dir)
        out.mkdir(parents=True, exist_ok=True)
        for r in results:
            with open(out / f"sample_{r.index:04d}.csv", "w", newline="") as fh:
                r.trace.write_csv(fh)

    labelled = [r for r in results if r.true_label is not None]
    correct = sum(r.predicted == r.true_label for r in labelled)
    latencies = sorted({r.latency_cycles for r in results if r.latency_cycles is not None})
    summary = f"samples {len(results)}, labelled {len(labelled)}, correct {correct}"
    if latencies:
        summary += ", output latency " + "/".join(
            f"{c} cycles ({c * CLOCK_PERIOD_NS} ns at 100 MHz)" for c in latencies
        )
    print(summary, file=sys.stderr)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="snnsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="count UART transactions to program an n-neuron bank")
    p.add_argument("n", type=int)
    p.add_argument("--per-tx-us", type=float, default=DEFAULT_TRANSACTION_US,
                   help="duration of one transaction in microseconds (default %(default)s)")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("encode", help="encode a dataset into cycle:bitstring spike schedules")
    p.add_argument("dataset")
    p.add_argument("--kind", choices=("tabular", "image"), default="tabular")
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--gap", type=int, default=3)
    p.add_argument("--mins", type=_float_list, help="comma-separated feature minima")
    p.add_argument("--maxs", type=_float_list, help="comma-separated feature maxima")
    p.add_argument("--pixel-threshold", type=int, default=encoders.DEFAULT_PIXEL_THRESHOLD)
    p.add_argument("--preset", help="target preset, enables the refractory gap check")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("run", help="simulate every dataset sample of an experiment config")
    p.add_argument("config")
    p.add_argument("--transport", choices=TRANSPORTS)
    p.add_argument("--report", help="report CSV path (overrides report.report)")
    p.add_argument("--trace-dir", help="per-sample trace CSV directory")
    p.add_argument("--print-effective-config", action="store_true",
                   help="print the fully expanded config as JSON and exit")
    p.set_defaults(func=cmd_run)
    return parser


def _setup_logging():
    level = os.environ.get("SNNSIM_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s: %(message)s",
    )
    logging.captureWarnings(True)


def main(argv=None):
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SnnSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
