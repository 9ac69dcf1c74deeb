"""Benchmark network layouts and hand-built demonstration register sets.

The two layouts are two-layer feedforward networks: every input neuron
feeds every output neuron.  Only topology, refractory length and the input
threshold are fixed here; weights come from the caller or from the
demonstration builders below, which are hand-crafted for testing and are
not trained values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .interconnect import ConnectionMatrix
from .processor import RegisterBank


@dataclass(frozen=True)
class Preset:
    name: str
    n_inputs: int
    n_outputs: int
    refractory: int
    class_names: tuple
    decode: str  # "first_spike" or "count"
    input_threshold: int = 1

    @property
    def n(self):
        return self.n_inputs + self.n_outputs

    @property
    def inputs(self):
        return range(0, self.n_inputs)

    @property
    def outputs(self):
        return range(self.n_inputs, self.n)

    def connections(self) -> ConnectionMatrix:
        return ConnectionMatrix.feedforward(self.n, self.inputs, self.outputs)

    def bank(self, weights, thresholds=None, connections=None, leak_step=0) -> RegisterBank:
        if thresholds is None:
            thresholds = [self.input_threshold] * self.n
        if connections is None:
            connections = self.connections()
        return RegisterBank(
            self.n, thresholds, weights, connections,
            refractory=self.refractory, leak_step=leak_step,
        )


IRIS = Preset(
    name="iris",
    n_inputs=4,
    n_outputs=3,
    refractory=2,
    class_names=("Iris-setosa", "Iris-versicolor", "Iris-virginica"),
    decode="first_spike",
)

MNIST8X8 = Preset(
    name="mnist8x8",
    n_inputs=64,
    n_outputs=10,
    refractory=4,
    class_names=tuple(str(d) for d in range(10)),
    decode="count",
)

PRESETS = {p.name: p for p in (IRIS, MNIST8X8)}

# Standard Iris feature ranges (sepal length, sepal width, petal length, petal width), cm.
IRIS_FEATURE_MINS = (4.3, 2.0, 1.0, 0.1)
IRIS_FEATURE_MAXS = (7.9, 4.4, 6.9, 2.5)

# Class-mean measurements, used as per-class prototype samples.
IRIS_PROTOTYPES = {
    "Iris-setosa": (5.006, 3.428, 1.462, 0.246),
    "Iris-versicolor": (5.936, 2.770, 4.260, 1.326),
    "Iris-virginica": (6.588, 2.974, 5.552, 2.026),
}


def get_preset(name) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown preset {name!r}; choose from {sorted(PRESETS)}", "network.preset"
        ) from None


def iris_onehot_bank(class_index: int) -> RegisterBank:
    """Iris layout where only output ``4 + class_index`` has a nonzero weight.

    Any input spike then drives exactly that output neuron.  This exercises
    routing, latency and decoding; it is not a classifier.
    """
    if not 0 <= class_index < IRIS.n_outputs:
        raise ConfigurationError(f"class index {class_index} out of range", "demo")
    weights = [1] * IRIS.n_inputs + [0] * IRIS.n_outputs
    weights[IRIS.n_inputs + class_index] = 1
    return IRIS.bank(weights)


_GLYPHS = {
    0: ["..####..",
        ".#....#.",
        "#......#",
        "#......#",
        "#......#",
        "#......#",
        ".#....#.",
        "..####.."],
    1: ["...##...",
        "..###...",
        ".#.##...",
        "...##...",
        "...##...",
        "...##...",
        "...##...",
        ".######."],
    2: [".#####..",
        "#.....#.",
        "......#.",
        ".....#..",
        "....#...",
        "...#....",
        "..#.....",
        "########"],
    3: ["######..",
        "......#.",
        "......#.",
        "..####..",
        "......#.",
        "......#.",
        "......#.",
        "######.."],
    4: ["....##..",
        "...#.#..",
        "..#..#..",
        ".#...#..",
        "########",
        ".....#..",
        ".....#..",
        ".....#.."],
    5: ["#######.",
        "#.......",
        "#.......",
        "######..",
        "......#.",
        "......#.",
        "#.....#.",
        ".#####.."],
    6: ["...###..",
        "..#.....",
        ".#......",
        "#.####..",
        "##....#.",
        "#......#",
        ".#....#.",
        "..####.."],
    7: ["########",
        "......#.",
        ".....#..",
        "....#...",
        "...#....",
        "..#.....",
        "..#.....",
        "..#....."],
    8: ["..####..",
        ".#....#.",
        ".#....#.",
        "..####..",
        ".#....#.",
        "#......#",
        ".#....#.",
        "..####.."],
    9: ["..####..",
        ".#....#.",
        "#......#",
        ".#....##",
        "..####.#",
        "......#.",
        ".....#..",
        "..###..."],
}


def digit_glyph(digit: int) -> np.ndarray:
    """8x8 intensity image (0 or 255) of a hand-drawn digit."""
    rows = _GLYPHS[digit]
    return np.array([[255 if ch == "#" else 0 for ch in row] for row in rows], dtype=np.uint8)


def mnist_template_bank() -> RegisterBank:
    """MNIST layout where output ``64 + d`` listens only to digit ``d``'s pixels.

    Each output's threshold equals its template size, so it fires exactly
    when every template pixel is lit.  No glyph is contained in another, so
    each glyph drives exactly its own output neuron.
    """
    p = MNIST8X8
    conn = ConnectionMatrix(p.n)
    thresholds = [p.input_threshold] * p.n
    for d in range(10):
        pixels = np.flatnonzero(digit_glyph(d).reshape(-1) > 0)
        for px in pixels:
            conn.set_connection(int(px), p.n_inputs + d, True)
        thresholds[p.n_inputs + d] = len(pixels)
    return p.bank([1] * p.n, thresholds=thresholds, connections=conn)


DEMOS = {
    "iris-onehot-setosa": lambda: iris_onehot_bank(0),
    "iris-onehot-versicolor": lambda: iris_onehot_bank(1),
    "iris-onehot-virginica": lambda: iris_onehot_bank(2),
    "mnist-templates": mnist_template_bank,
}

DEMO_PRESET = {
    "iris-onehot-setosa": "iris",
    "iris-onehot-versicolor": "iris",
    "iris-onehot-virginica": "iris",
    "mnist-templates": "mnist8x8",
}


def demo_bank(name) -> RegisterBank:
    try:
        return DEMOS[name]()
    except KeyError:
        raise ConfigurationError(
            f"unknown demo set {name!r}; choose from {sorted(DEMOS)}", "network.demo"
        ) from None
