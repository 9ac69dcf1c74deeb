"""Clock-stepped model of the neuromorphic processor.

Register bank -> array of LIF neurons -> mux-grid interconnect, advanced one
clock edge per :meth:`Processor.tick`.  Pipeline per clock edge, all stages
reading only values registered on the previous edge:

* sampling register  <- external impulse pins
* neuron input regs  <- route(previous outputs) + sampled impulse bit
* neuron state       <- LIF step on the input registers

A neuron therefore needs two cycles (latch + step) and the external boundary
adds one sampling cycle, so an impulse on the pins during cycle ``k`` first
shows on an input neuron's output in cycle ``k + 3`` and on the next layer's
output in cycle ``k + 5``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import lif
from .errors import ConfigurationError, InputError
from .interconnect import ConnectionMatrix, route

REGISTER_MAX = 255
CLOCK_PERIOD_NS = 10  # 100 MHz system clock


@dataclass(frozen=True)
class NeuronModel:
    """Neuron settings that are not part of the programmable register image."""

    leak_mode: lif.LeakMode = lif.LeakMode.FIXED_LEAK
    tau_m: float = 1.0
    c_m: float = 1.0
    dt: float = 1.0
    i_bias: float = 0.0
    negative_policy: lif.NegativePolicy = lif.NegativePolicy.CLAMP

    def __post_init__(self):
        object.__setattr__(self, "leak_mode", lif.LeakMode(self.leak_mode))
        object.__setattr__(self, "negative_policy", lif.NegativePolicy(self.negative_policy))


def _byte_tuple(values, n, name):
    values = tuple(int(v) for v in values)
    if len(values) != n:
        raise ConfigurationError(f"{name} has {len(values)} entries, expected {n}", name)
    for v in values:
        if not 0 <= v <= REGISTER_MAX:
            raise ConfigurationError(f"{name} entry {v} does not fit in 8 bits", name)
    return values


@dataclass
class RegisterBank:
    """Full configuration image of an ``n``-neuron processor.

    ``weights`` holds one 8-bit weight per neuron, applied to every enabled
    incoming connection and to the neuron's own impulse bit.
    """

    n: int
    thresholds: tuple
    weights: tuple
    connections: ConnectionMatrix
    impulse: tuple = None
    refractory: int = 0
    leak_step: int = 0

    def __post_init__(self):
        self.n = int(self.n)
        if self.n < 1:
            raise ConfigurationError(f"n must be positive, got {self.n}", "n")
        self.thresholds = _byte_tuple(self.thresholds, self.n, "thresholds")
        self.weights = _byte_tuple(self.weights, self.n, "weights")
        if not isinstance(self.connections, ConnectionMatrix):
            try:
                self.connections = ConnectionMatrix.from_rows(self.connections)
            except InputError as exc:
                raise ConfigurationError(str(exc), "connections") from exc
        if self.connections.n != self.n:
            raise ConfigurationError(
                f"connection matrix is {self.connections.n}x{self.connections.n}, expected {self.n}",
                "connections",
            )
        if self.impulse is None:
            self.impulse = (0,) * self.n
        self.impulse = tuple(int(b) for b in self.impulse)
        if len(self.impulse) != self.n or any(b not in (0, 1) for b in self.impulse):
            raise ConfigurationError(f"impulse must be {self.n} bits", "impulse")
        if int(self.refractory) != self.refractory or self.refractory < 0:
            raise ConfigurationError("refractory must be a non-negative integer", "refractory")
        if int(self.leak_step) != self.leak_step or self.leak_step < 0:
            raise ConfigurationError("leak_step must be a non-negative integer", "leak_step")
        self.refractory = int(self.refractory)
        self.leak_step = int(self.leak_step)

    def copy(self):
        return RegisterBank(
            self.n, self.thresholds, self.weights, self.connections.copy(),
            self.impulse, self.refractory, self.leak_step,
        )


@dataclass
class SimTrace:
    """Per-cycle waveform: what each register holds *during* each cycle.

    ``v`` and ``r`` are ``None`` for spikes-only traces.
    """

    start_cycle: int
    impulses: np.ndarray
    y: np.ndarray
    v: Optional[np.ndarray] = None
    r: Optional[np.ndarray] = None

    @property
    def n(self):
        return self.y.shape[1]

    @property
    def cycles(self):
        return np.arange(self.start_cycle, self.start_cycle + len(self))

    def __len__(self):
        return self.y.shape[0]

    def spike_counts(self, neurons: Sequence[int]):
        return [int(self.y[:, i].sum()) for i in neurons]

    def first_spike_cycle(self, neurons: Sequence[int]):
        """Earliest cycle in which any of ``neurons`` spikes, or ``None``."""
        neurons = list(neurons)
        if not len(self) or not neurons:
            return None
        hits = np.flatnonzero(self.y[:, neurons].any(axis=1))
        return int(self.start_cycle + hits[0]) if hits.size else None

    def first_impulse_cycle(self):
        hits = np.flatnonzero(self.impulses.any(axis=1)) if len(self) else np.array([])
        return int(self.start_cycle + hits[0]) if hits.size else None

    def write_csv(self, fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["cycle", "neuron", "v", "r", "y"])
        for t, cycle in enumerate(self.cycles):
            for i in range(self.n):
                v = "" if self.v is None else _fmt(self.v[t, i])
                r = "" if self.r is None else int(self.r[t, i])
                w.writerow([int(cycle), i, v, r, int(self.y[t, i])])

    def to_csv(self):
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def _fmt(value):
    if isinstance(value, (np.floating, float)):
        return repr(float(value))
    return str(int(value))


@dataclass(frozen=True)
class Classification:
    index: int
    counts: tuple
    no_spike: bool
    first_spike_cycle: Optional[int] = None


def classify(trace: SimTrace, output_range: Sequence[int], mode="count") -> Classification:
    """Pick the winning output neuron.

    ``mode="count"`` takes the argmax of total spikes, ``"first_spike"`` the
    neuron that fires earliest.  Ties go to the lowest index; an all-silent
    trace yields index 0 with ``no_spike`` set.
    """
    outputs = list(output_range)
    if not outputs:
        raise InputError("output range is empty")
    if any(i < 0 or i >= trace.n for i in outputs):
        raise InputError(f"output range {outputs[0]}..{outputs[-1]} outside [0, {trace.n})")
    if mode not in ("count", "first_spike"):
        raise InputError(f"unknown decode mode {mode!r}")
    counts = tuple(trace.spike_counts(outputs))
    first = trace.first_spike_cycle(outputs)
    if first is None:
        return Classification(0, counts, True, None)
    if mode == "count":
        index = int(np.argmax(counts))
    else:
        row = trace.y[first - trace.start_cycle, outputs]
        index = int(np.flatnonzero(row)[0])
    return Classification(index, counts, False, first)


@dataclass
class _Registers:
    states: list
    sampled: np.ndarray
    latched: np.ndarray


class Processor:
    """``n`` homogeneous LIF neurons wired by a :class:`ConnectionMatrix`."""

    def __init__(self, bank: RegisterBank, model: NeuronModel = NeuronModel()):
        self.model = model
        self.load_registers(bank)

    @property
    def n(self):
        return self.bank.n

    def _params_for(self, i):
        bank, m = self.bank, self.model
        return lif.LifParams(
            v_th=bank.thresholds[i],
            r_ref=bank.refractory,
            # one slot per source neuron plus the impulse line
            weights=(bank.weights[i],) * (bank.n + 1),
            leak_mode=m.leak_mode,
            i_bias=m.i_bias,
            tau_m=m.tau_m,
            c_m=m.c_m,
            dt=m.dt,
            lam=bank.leak_step,
            negative_policy=m.negative_policy,
        )

    def load_registers(self, bank: RegisterBank):
        """Install ``bank`` and clear all dynamic state and the cycle counter."""
        if not isinstance(bank, RegisterBank):
            raise ConfigurationError("expected a RegisterBank")
        if any(t == 0 for t in bank.thresholds):
            raise ConfigurationError("thresholds must be positive", "thresholds")
        self.bank = bank.copy()
        try:
            self._params = [self._params_for(i) for i in range(bank.n)]
        except InputError as exc:
            raise ConfigurationError(str(exc)) from exc
        zero = 0.0 if self.model.leak_mode is lif.LeakMode.EULER else 0
        self._regs = _Registers(
            states=[lif.LifState(v=zero) for _ in range(bank.n)],
            sampled=np.zeros(bank.n, dtype=np.uint8),
            latched=np.zeros((bank.n, bank.n + 1), dtype=np.uint8),
        )
        self.cycle = 0
        return self

    def read_registers(self) -> RegisterBank:
        return self.bank.copy()

    def outputs(self) -> np.ndarray:
        """Output spike register as visible during the current cycle."""
        return np.fromiter((s.y for s in self._regs.states), dtype=np.uint8, count=self.n)

    def potentials(self):
        return [s.v for s in self._regs.states]

    def refractory_counters(self):
        return [s.r for s in self._regs.states]

    def _impulse_vector(self, impulse):
        e = np.asarray(impulse)
        if e.shape != (self.n,):
            raise InputError(f"impulse must have {self.n} bits, got shape {e.shape}")
        if e.size and not np.all((e == 0) | (e == 1)):
            raise InputError("impulse bits must be 0 or 1")
        return e.astype(np.uint8)

    def tick(self, impulse) -> np.ndarray:
        """Run one clock cycle with ``impulse`` on the external input pins.

        Returns the output spikes visible during this cycle, then clocks every
        register so the next call sees the following cycle.
        """
        e = self._impulse_vector(impulse)
        regs = self._regs
        y_now = self.outputs()
        states = []
        for i, (params, state) in enumerate(zip(self._params, regs.states)):
            nxt, _ = lif.step(params, state, regs.latched[i])
            states.append(nxt)
        latched = np.empty_like(regs.latched)
        latched[:, :-1] = route(self.bank.connections, y_now)
        latched[:, -1] = regs.sampled
        self._regs = _Registers(states=states, sampled=e, latched=latched)
        self.bank.impulse = tuple(int(b) for b in e)
        self.cycle += 1
        return y_now

    def run(self, schedule, extra_cycles=0, depth="full") -> SimTrace:
        """Apply ``schedule`` one vector per cycle, then ``extra_cycles`` of silence."""
        if depth not in ("full", "spikes"):
            raise InputError(f"unknown trace depth {depth!r}")
        schedule = [self._impulse_vector(e) for e in schedule]
        if extra_cycles < 0:
            raise InputError("extra_cycles must be non-negative")
        schedule += [np.zeros(self.n, dtype=np.uint8)] * int(extra_cycles)
        total = len(schedule)
        vdtype = np.float64 if self.model.leak_mode is lif.LeakMode.EULER else np.int64
        impulses = np.zeros((total, self.n), dtype=np.uint8)
        ys = np.zeros((total, self.n), dtype=np.uint8)
        vs = np.zeros((total, self.n), dtype=vdtype) if depth == "full" else None
        rs = np.zeros((total, self.n), dtype=np.int64) if depth == "full" else None
        start = self.cycle
        for t, e in enumerate(schedule):
            impulses[t] = e
            if vs is not None:
                vs[t] = self.potentials()
                rs[t] = self.refractory_counters()
            ys[t] = self.tick(e)
        return SimTrace(start, impulses, ys, vs, rs)


def output_latency(trace: SimTrace, output_range: Sequence[int]):
    """Cycles from the first asserted impulse to the first output spike."""
    first_in = trace.first_impulse_cycle()
    first_out = trace.first_spike_cycle(output_range)
    if first_in is None or first_out is None:
        return None
    return first_out - first_in

