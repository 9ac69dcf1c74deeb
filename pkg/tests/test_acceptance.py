"""Acceptance criteria, one test per criterion.

Each test reports its verdict through the ``criterion`` fixture, which
prints a PASS/FAIL line per criterion at the end of the pytest run.
"""

import random
import shutil
from pathlib import Path

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from snnsim import lif
from snnsim.cli import main
from snnsim.encoders import TabularSample, decode_label, embed, encode_image, encode_tabular
from snnsim.interconnect import ConnectionMatrix, route
from snnsim.lif import LifParams, LifState, NegativePolicy
from snnsim.presets import (
    IRIS,
    IRIS_FEATURE_MAXS,
    IRIS_FEATURE_MINS,
    IRIS_PROTOTYPES,
    MNIST8X8,
    digit_glyph,
    iris_onehot_bank,
    mnist_template_bank,
)
from snnsim.processor import Processor, RegisterBank, output_latency
from snnsim.uart import (
    LoopbackChannel,
    LoopbackDevice,
    decode_8n1,
    decode_stream,
    encode_8n1,
    encode_stream,
    host_session,
    programming_time,
    serialize_registers,
    transaction_count,
)

from oracles import lif_oracle, route_oracle

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def test_criterion_1_transaction_arithmetic(criterion):
    p74, p1 = transaction_count(74), transaction_count(1)
    segs = (p74.cl, p74.threshold, p74.weight, p74.impulse)
    ms = programming_time(p74) * 1e3
    us = programming_time(p1) * 1e6
    ok = (segs == (740, 74, 74, 10) and p74.total == 898 and abs(ms - 93.54) <= 0.01
          and p1.total == 4 and abs(us - 416.68) <= 0.01)
    criterion(1, "transaction arithmetic", ok,
              f"n=74: {segs} total {p74.total}, {ms:.4f} ms; n=1: {p1.total}, {us:.4f} us")


def test_criterion_2_serializer_planner_identity(criterion):
    bad = []
    for n in range(1, 129):
        bank = RegisterBank(n, [1] * n, [1] * n, ConnectionMatrix(n))
        if len(serialize_registers(bank)) != transaction_count(n).total:
            bad.append(n)
    criterion(2, "serializer/planner identity", not bad, f"n in [1, 128], mismatches {bad}")


def _latencies(preset, rng, trials=20):
    out = set()
    for _ in range(trials):
        thresholds = rng.integers(1, 50, preset.n)
        weights = thresholds + rng.integers(0, 20, preset.n)
        bank = preset.bank(np.minimum(weights, 255).tolist(), thresholds=thresholds.tolist())
        impulse = np.zeros((1 + int(rng.integers(0, 4)), preset.n), dtype=np.uint8)
        impulse[-1, int(rng.integers(0, preset.n_inputs))] = 1
        trace = Processor(bank).run(impulse, extra_cycles=10)
        out.add(output_latency(trace, preset.outputs))
    return out


def test_criterion_3_latency(criterion):
    rng = np.random.default_rng(3)
    iris, mnist = _latencies(IRIS, rng), _latencies(MNIST8X8, rng)
    criterion(3, "two-layer latency", iris == mnist == {5},
              f"iris {sorted(iris)}, mnist {sorted(mnist)} cycles")


def _lif_case(rng, mode):
    n_in = rng.randint(1, 6)
    weights = [rng.randint(0, 255) for _ in range(n_in)]
    r_ref = rng.randint(0, 5)
    train = [[rng.randint(0, 1) for _ in range(n_in)] for _ in range(rng.randint(0, 32))]
    if mode == "euler":
        kw = dict(tau_m=rng.choice([1.0, 2.0, 5.0]), c_m=rng.choice([0.5, 1.0, 2.0]),
                  dt=1.0, i_bias=rng.choice([0.0, 1.5]))
        v_th = rng.uniform(0.5, 500.0)
        params = LifParams(v_th=v_th, r_ref=r_ref, weights=weights, leak_mode="euler", **kw)
    else:
        kw = dict(lam=rng.randint(0, 20), clamp=rng.random() < 0.7)
        v_th = rng.randint(1, 500)
        policy = NegativePolicy.CLAMP if kw["clamp"] else NegativePolicy.ALLOW_NEGATIVE
        params = LifParams(v_th=v_th, r_ref=r_ref, weights=weights, lam=kw["lam"],
                           negative_policy=policy)
    expected = lif_oracle(mode, v_th, r_ref, weights, train, **kw)
    return params, train, expected


def test_criterion_4_lif_oracle_equivalence(criterion):
    rng = random.Random(44)
    cases = mismatches = 0
    for mode in ("euler", "fixed"):
        for _ in range(1000):
            params, train, expected = _lif_case(rng, mode)
            state = LifState(v=0.0 if mode == "euler" else 0)
            ys, vs, rs = [], [], []
            for s in train:
                state, y = lif.step(params, state, s)
                ys.append(y)
                vs.append(state.v)
                rs.append(state.r)
            cases += 1
            mismatches += (ys, vs, rs) != expected
    criterion(4, "LIF oracle equivalence", mismatches == 0,
              f"{cases} cases over both leak modes, {mismatches} mismatches")


def test_criterion_5_refractory_invariants(criterion):
    stats = {"neuron_cycles": 0, "spikes": 0, "violations": 0}

    @settings(max_examples=150, deadline=None, derandomize=True)
    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 8), cycles=st.integers(20, 60))
    def run(seed, n, cycles):
        rng = np.random.default_rng(seed)
        r_ref = int(rng.integers(0, 6))
        bank = RegisterBank(
            n, rng.integers(1, 4, n).tolist(), rng.integers(1, 4, n).tolist(),
            rng.integers(0, 2, (n, n)), refractory=r_ref, leak_step=int(rng.integers(0, 2)),
        )
        schedule = (rng.random((cycles, n)) < 0.5).astype(np.uint8)
        proc = Processor(bank)
        last = [None] * n
        for e in schedule:
            proc.tick(e)
            for i in range(n):
                # state registers after the clock edge
                if proc.outputs()[i]:
                    stats["spikes"] += 1
                    if proc.potentials()[i] != 0 or proc.refractory_counters()[i] != r_ref:
                        stats["violations"] += 1
                    if last[i] is not None and proc.cycle - last[i] <= r_ref:
                        stats["violations"] += 1
                    last[i] = proc.cycle
            stats["neuron_cycles"] += n

    run()
    ok = stats["violations"] == 0 and stats["neuron_cycles"] >= 10_000
    criterion(5, "refractory invariants", ok,
              f"{stats['neuron_cycles']} neuron-cycles, {stats['spikes']} spikes, "
              f"{stats['violations']} violations")


def test_criterion_6_routing_oracle(criterion):
    rng = np.random.default_rng(6)
    mismatches = 0
    for _ in range(500):
        n = int(rng.integers(1, 17))
        m = rng.integers(0, 2, (n, n))
        y = rng.integers(0, 2, n)
        mismatches += route(ConnectionMatrix(n, m), y).tolist() != route_oracle(m.tolist(), y.tolist())
    iris_ok = True
    for i in IRIS.inputs:
        y = np.zeros(IRIS.n, dtype=np.uint8)
        y[i] = 1
        receivers = {d for d, row in enumerate(route(IRIS.connections(), y)) if row.any()}
        iris_ok &= receivers == {4, 5, 6}
    criterion(6, "routing oracle", mismatches == 0 and iris_ok,
              f"500 seeds up to 16x16, {mismatches} mismatches; iris inputs reach outputs 4-6: {iris_ok}")


def test_criterion_7_wire_transparency(criterion):
    rng = np.random.default_rng(7)
    wire_bad = vectors = 0
    banks = [(IRIS, IRIS.bank([1] * 7)), (IRIS, iris_onehot_bank(2)),
             (MNIST8X8, MNIST8X8.bank([1] * 74, thresholds=[1] * 64 + [20] * 10)),
             (MNIST8X8, mnist_template_bank())]
    for preset, bank in banks:
        for _ in range(50 if preset is IRIS else 25):
            frames = np.zeros((int(rng.integers(1, 8)) + 8, preset.n), dtype=np.uint8)
            frames[:-8, :preset.n_inputs] = rng.random((len(frames) - 8, preset.n_inputs)) < 0.4
            device = LoopbackDevice(bank.n, bank.refractory, bank.leak_step)
            session = host_session(LoopbackChannel(device), bank, frames)
            direct = Processor(bank).run(frames)
            wire_bad += not np.array_equal(session.spike_matrix(len(frames)), direct.y)
            vectors += 1
    bytes_ok = all(decode_8n1(encode_8n1(b)) == b for b in range(256))
    data = np.random.default_rng(70).integers(0, 256, 10_000, dtype=np.uint8).tobytes()
    stream_ok = all(decode_stream(encode_stream(data[:k])) == data[:k] for k in (0, 1, 10_000))
    ok = wire_bad == 0 and bytes_ok and stream_ok
    criterion(7, "wire transparency", ok,
              f"{vectors} vectors over both presets, {wire_bad} mismatches; "
              f"256-byte roundtrip {bytes_ok}; 10^4-byte stream {stream_ok}")


def test_criterion_8_classification_behavior(criterion):
    iris_ok = []
    for cls, name in enumerate(IRIS.class_names):
        sample = TabularSample(IRIS_PROTOTYPES[name], name)
        sched = embed(encode_tabular(sample, IRIS_FEATURE_MINS, IRIS_FEATURE_MAXS, 4, 3), IRIS.n)
        trace = Processor(iris_onehot_bank(cls)).run(sched, extra_cycles=8)
        active = [i for i in IRIS.outputs if trace.y[:, i].any()]
        iris_ok.append(active == [4 + cls] and decode_label(trace, IRIS).label == name)
    bank = mnist_template_bank()
    digits_ok = []
    for d in range(10):
        sched = embed(encode_image(digit_glyph(d).reshape(-1))[None, :], MNIST8X8.n)
        trace = Processor(bank).run(sched, extra_cycles=8)
        digits_ok.append(decode_label(trace, MNIST8X8).label == str(d))
    criterion(8, "classification behavior", all(iris_ok) and all(digits_ok),
              f"iris prototypes {sum(iris_ok)}/3 single-output, digits {sum(digits_ok)}/10 argmax")


def test_criterion_9_determinism(criterion, tmp_path):
    shutil.copytree(CONFIGS, tmp_path / "configs")
    identical = True
    for name in ("iris_onehot.json", "mnist_templates.json"):
        outputs = []
        for k in range(2):
            rep, traces = tmp_path / f"{name}.{k}.csv", tmp_path / f"{name}.{k}.traces"
            code = main(["run", str(tmp_path / "configs" / name), "--report", str(rep),
                         "--trace-dir", str(traces)])
            files = sorted(traces.iterdir()) if traces.exists() else []
            outputs.append((code, rep.read_bytes(), [(f.name, f.read_bytes()) for f in files]))
        identical &= outputs[0] == outputs[1] and outputs[0][0] == 0 and bool(outputs[0][2])
    criterion(9, "determinism", identical, "two runs of each shipped config, report and traces")
