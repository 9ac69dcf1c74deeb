"""JSON experiment configuration.

A config has four sections; everything except ``encoder.dataset`` has a
default, and a ``network.preset`` (and optionally ``network.demo``) fills the
network fields that are not given explicitly::

    {
      "network": {"preset": "iris", "demo": "iris-onehot-setosa"},
      "encoder": {"dataset": "iris.csv", "levels": 4, "gap": 3},
      "run": {"extra_cycles": 8, "trace": "full", "transport": "direct"},
      "report": {"report": "out/report.csv", "trace_dir": "out/traces"}
    }

Relative paths are resolved against the config file's directory and stored
as absolute paths, so an effective config can be re-run from anywhere.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from . import lif
from .errors import ConfigurationError
from .interconnect import ConnectionMatrix
from .presets import DEMO_PRESET, IRIS, IRIS_FEATURE_MAXS, IRIS_FEATURE_MINS, demo_bank, get_preset
from .processor import NeuronModel, Processor, RegisterBank

TRANSPORTS = ("direct", "loopback-uart")
TRACE_DEPTHS = ("full", "spikes", "none")
ENCODER_KINDS = ("tabular", "image")
DECODE_MODES = ("first_spike", "count")


@dataclass
class NetworkConfig:
    preset: Optional[str]
    n: int
    inputs: list
    outputs: list
    thresholds: list
    weights: list
    connections: list
    refractory: int
    leak_step: int = 0
    leak_mode: str = "fixed"
    tau_m: float = 1.0
    c_m: float = 1.0
    dt: float = 1.0
    i_bias: float = 0.0
    negative_policy: str = "clamp"
    class_names: list = field(default_factory=list)
    decode: str = "count"

    @property
    def input_range(self):
        return range(*self.inputs)

    @property
    def output_range(self):
        return range(*self.outputs)

    def bank(self) -> RegisterBank:
        return RegisterBank(
            self.n, self.thresholds, self.weights, ConnectionMatrix(self.n, self.connections),
            refractory=self.refractory, leak_step=self.leak_step,
        )

    def model(self) -> NeuronModel:
        return NeuronModel(
            leak_mode=self.leak_mode, tau_m=self.tau_m, c_m=self.c_m, dt=self.dt,
            i_bias=self.i_bias, negative_policy=self.negative_policy,
        )


@dataclass
class EncoderConfig:
    dataset: str
    kind: str
    levels: int = 4
    gap: int = 3
    feature_mins: Optional[list] = None
    feature_maxs: Optional[list] = None
    pixel_threshold: int = 128


@dataclass
class RunConfig:
    extra_cycles: int = 8
    trace: str = "full"
    transport: str = "direct"


@dataclass
class ReportConfig:
    report: Optional[str] = None
    trace_dir: Optional[str] = None


@dataclass
class ExperimentConfig:
    network: NetworkConfig
    encoder: EncoderConfig
    run: RunConfig
    report: ReportConfig

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _take(section: dict, name: str, allowed):
    unknown = set(section) - set(allowed)
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigurationError(f"unknown field {name}.{key}", f"{name}.{key}")


def _int(value, fieldname, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigurationError(f"{fieldname} must be an integer", fieldname)
    if minimum is not None and value < minimum:
        raise ConfigurationError(f"{fieldname} must be >= {minimum}", fieldname)
    return value


def _choice(value, fieldname, choices):
    if value not in choices:
        raise ConfigurationError(f"{fieldname} must be one of {', '.join(choices)}", fieldname)
    return value


def _span(value, fieldname, n):
    if not (isinstance(value, list) and len(value) == 2 and all(isinstance(v, int) for v in value)):
        raise ConfigurationError(f"{fieldname} must be [start, stop]", fieldname)
    start, stop = value
    if not 0 <= start < stop <= n:
        raise ConfigurationError(f"{fieldname} {value} outside [0, {n}]", fieldname)
    return [start, stop]


def _resolve(path, base_dir):
    if path is None:
        return None
    p = Path(path)
    if not p.is_absolute() and base_dir is not None:
        p = Path(base_dir) / p
    return str(p.absolute())


def _parse_network(raw: dict) -> NetworkConfig:
    fields = {f for f in NetworkConfig.__dataclass_fields__} | {"demo"}
    _take(raw, "network", fields)
    defaults = {}
    preset_name = raw.get("preset")
    demo = raw.get("demo")
    if demo is not None:
        if demo not in DEMO_PRESET:
            demo_bank(demo)  # raises with the list of known sets
        if preset_name is None:
            preset_name = DEMO_PRESET[demo]
        elif preset_name != DEMO_PRESET[demo]:
            raise ConfigurationError(
                f"demo set {demo!r} belongs to preset {DEMO_PRESET[demo]!r}", "network.demo"
            )
    if preset_name is not None:
        p = get_preset(preset_name)
        defaults.update(
            n=p.n,
            inputs=[p.inputs.start, p.inputs.stop],
            outputs=[p.outputs.start, p.outputs.stop],
            thresholds=[p.input_threshold] * p.n,
            connections=p.connections().tolist(),
            refractory=p.refractory,
            class_names=list(p.class_names),
            decode=p.decode,
        )
    if demo is not None:
        bank = demo_bank(demo)
        defaults.update(
            thresholds=list(bank.thresholds),
            weights=list(bank.weights),
            connections=bank.connections.tolist(),
        )
    merged = {**defaults, **{k: v for k, v in raw.items() if k != "demo"}}

    if "n" not in merged:
        raise ConfigurationError("network.n is required without a preset", "network.n")
    n = _int(merged["n"], "network.n", 1)
    for key in ("inputs", "outputs", "thresholds", "weights", "connections", "refractory"):
        if key not in merged:
            raise ConfigurationError(f"network.{key} is required", f"network.{key}")
    cfg = NetworkConfig(
        preset=preset_name,
        n=n,
        inputs=_span(merged["inputs"], "network.inputs", n),
        outputs=_span(merged["outputs"], "network.outputs", n),
        thresholds=list(merged["thresholds"]),
        weights=list(merged["weights"]),
        connections=[list(r) for r in merged["connections"]],
        refractory=_int(merged["refractory"], "network.refractory", 0),
        leak_step=_int(merged.get("leak_step", 0), "network.leak_step", 0),
        leak_mode=_choice(merged.get("leak_mode", "fixed"), "network.leak_mode",
                          [m.value for m in lif.LeakMode]),
        tau_m=float(merged.get("tau_m", 1.0)),
        c_m=float(merged.get("c_m", 1.0)),
        dt=float(merged.get("dt", 1.0)),
        i_bias=float(merged.get("i_bias", 0.0)),
        negative_policy=_choice(merged.get("negative_policy", "clamp"), "network.negative_policy",
                                [m.value for m in lif.NegativePolicy]),
        class_names=list(merged.get("class_names", [])),
        decode=_choice(merged.get("decode", "count"), "network.decode", DECODE_MODES),
    )
    n_out = len(cfg.output_range)
    if not cfg.class_names:
        cfg.class_names = [str(i) for i in range(n_out)]
    if len(cfg.class_names) != n_out:
        raise ConfigurationError(
            f"network.class_names has {len(cfg.class_names)} names for {n_out} outputs",
            "network.class_names",
        )
    try:
        Processor(cfg.bank(), cfg.model())
    except ConfigurationError as exc:
        where = f"network.{exc.field}" if exc.field else "network"
        raise ConfigurationError(f"{where}: {exc}", where) from exc
    except ValueError as exc:
        raise ConfigurationError(f"network: {exc}", "network") from exc
    return cfg


def _parse_encoder(raw: dict, network: NetworkConfig, base_dir) -> EncoderConfig:
    _take(raw, "encoder", EncoderConfig.__dataclass_fields__)
    if "dataset" not in raw:
        raise ConfigurationError("encoder.dataset is required", "encoder.dataset")
    default_kind = "image" if network.preset == "mnist8x8" else "tabular"
    cfg = EncoderConfig(
        dataset=_resolve(raw["dataset"], base_dir),
        kind=_choice(raw.get("kind", default_kind), "encoder.kind", ENCODER_KINDS),
        levels=_int(raw.get("levels", 4), "encoder.levels", 1),
        gap=_int(raw.get("gap", 3), "encoder.gap", 1),
        feature_mins=raw.get("feature_mins"),
        feature_maxs=raw.get("feature_maxs"),
        pixel_threshold=_int(raw.get("pixel_threshold", 128), "encoder.pixel_threshold", 0),
    )
    if cfg.pixel_threshold > 255:
        raise ConfigurationError("encoder.pixel_threshold must be <= 255", "encoder.pixel_threshold")
    if cfg.kind == "tabular" and network.preset == IRIS.name:
        if cfg.feature_mins is None:
            cfg.feature_mins = list(IRIS_FEATURE_MINS)
        if cfg.feature_maxs is None:
            cfg.feature_maxs = list(IRIS_FEATURE_MAXS)
    for key in ("feature_mins", "feature_maxs"):
        value = getattr(cfg, key)
        if value is not None:
            if not (isinstance(value, list) and len(value) == 4):
                raise ConfigurationError(f"encoder.{key} must list 4 numbers", f"encoder.{key}")
            setattr(cfg, key, [float(v) for v in value])
    width = 4 if cfg.kind == "tabular" else 64
    if len(network.input_range) != width:
        raise ConfigurationError(
            f"{cfg.kind} encoder drives {width} inputs but network.inputs spans "
            f"{len(network.input_range)}",
            "network.inputs",
        )
    return cfg


def parse_config(raw: dict, base_dir=None) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigurationError("config must be a JSON object")
    _take(raw, "config", ("network", "encoder", "run", "report"))
    for key in ("network", "encoder"):
        if not isinstance(raw.get(key), dict):
            raise ConfigurationError(f"section {key} is required", key)
    network = _parse_network(raw["network"])
    encoder = _parse_encoder(raw["encoder"], network, base_dir)

    run_raw = raw.get("run", {})
    _take(run_raw, "run", RunConfig.__dataclass_fields__)
    run = RunConfig(
        extra_cycles=_int(run_raw.get("extra_cycles", 8), "run.extra_cycles", 0),
        trace=_choice(run_raw.get("trace", "full"), "run.trace", TRACE_DEPTHS),
        transport=_choice(run_raw.get("transport", "direct"), "run.transport", TRANSPORTS),
    )
    rep_raw = raw.get("report", {})
    _take(rep_raw, "report", ReportConfig.__dataclass_fields__)
    report = ReportConfig(
        report=_resolve(rep_raw.get("report"), base_dir),
        trace_dir=_resolve(rep_raw.get("trace_dir"), base_dir),
    )
    return ExperimentConfig(network, encoder, run, report)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON ({exc})", "config") from exc
    return parse_config(raw, base_dir=path.parent)
