"""Dataset -> spike schedule front end, and output decoding back to labels.

Images: an 8x8 grayscale image becomes one 64-bit impulse vector (pixel
``(r, c)`` drives input ``8r + c``), presented for a single cycle.

Tabular samples: each feature is min-max normalised, clipped to ``[0, 1]``
and quantised to ``k = floor(norm * levels + 0.5)`` spikes, emitted on that
feature's input line at cycles ``0, gap, 2*gap, ...``.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import InputError
from .presets import Preset
from .processor import SimTrace, classify

IMAGE_SIDE = 8
IMAGE_PIXELS = IMAGE_SIDE * IMAGE_SIDE
N_FEATURES = 4
DEFAULT_PIXEL_THRESHOLD = 128


@dataclass(frozen=True)
class GrayImage8x8:
    pixels: tuple
    label: Optional[str] = None

    def __post_init__(self):
        px = tuple(int(p) for p in np.asarray(self.pixels).reshape(-1))
        if len(px) != IMAGE_PIXELS:
            raise InputError(f"an 8x8 image has {IMAGE_PIXELS} pixels, got {len(px)}")
        if any(p < 0 or p > 255 for p in px):
            raise InputError("pixel intensities must lie in [0, 255]")
        object.__setattr__(self, "pixels", px)


@dataclass(frozen=True)
class TabularSample:
    features: tuple
    label: Optional[str] = None

    def __post_init__(self):
        f = tuple(float(x) for x in self.features)
        if len(f) != N_FEATURES:
            raise InputError(f"expected {N_FEATURES} features, got {len(f)}")
        if not all(math.isfinite(x) for x in f):
            raise InputError(f"non-finite feature in {f}")
        object.__setattr__(self, "features", f)


def pixel_index(row: int, col: int) -> int:
    return IMAGE_SIDE * row + col


def encode_image(img, pixel_threshold=DEFAULT_PIXEL_THRESHOLD) -> np.ndarray:
    """64-bit impulse vector: bit ``p`` is set iff pixel ``p`` > ``pixel_threshold``."""
    if not 0 <= pixel_threshold <= 255:
        raise InputError(f"pixel threshold {pixel_threshold} outside [0, 255]")
    if not isinstance(img, GrayImage8x8):
        img = GrayImage8x8(img)
    return (np.asarray(img.pixels) > pixel_threshold).astype(np.uint8)


def bits_to_image(bits) -> np.ndarray:
    """Inverse of the pixel index map: 64 bits back to an 8x8 binary array."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.shape != (IMAGE_PIXELS,):
        raise InputError(f"expected {IMAGE_PIXELS} bits, got shape {bits.shape}")
    return bits.reshape(IMAGE_SIDE, IMAGE_SIDE)


def quantize(value, lo, hi, levels) -> int:
    norm = min(max((value - lo) / (hi - lo), 0.0), 1.0)
    return int(math.floor(norm * levels + 0.5))


def encode_tabular(sample, feature_mins, feature_maxs, levels=4, gap=3) -> np.ndarray:
    """Burst-count code: ``(levels - 1) * gap + 1`` cycles by 4 input lines."""
    if not isinstance(sample, TabularSample):
        sample = TabularSample(sample)
    if int(levels) != levels or levels < 1:
        raise InputError(f"levels must be a positive integer, got {levels}")
    if int(gap) != gap or gap < 1:
        raise InputError(f"gap must be a positive integer, got {gap}")
    if len(feature_mins) != N_FEATURES or len(feature_maxs) != N_FEATURES:
        raise InputError(f"need {N_FEATURES} feature minima and maxima")
    for lo, hi in zip(feature_mins, feature_maxs):
        if not lo < hi:
            raise InputError(f"feature range [{lo}, {hi}] is empty")
    schedule = np.zeros(((levels - 1) * gap + 1, N_FEATURES), dtype=np.uint8)
    for i, (x, lo, hi) in enumerate(zip(sample.features, feature_mins, feature_maxs)):
        k = quantize(x, lo, hi, levels)
        schedule[[j * gap for j in range(k)], i] = 1
    return schedule


def check_gap(gap, refractory):
    """Warn if burst spikes would land inside the input neuron's refractory window."""
    if gap <= refractory:
        warnings.warn(
            f"spike gap {gap} <= refractory period {refractory}: "
            "input neurons will drop some burst spikes",
            stacklevel=2,
        )
        return False
    return True


def embed(schedule, n, input_offset=0) -> np.ndarray:
    """Widen an input-span schedule to full ``n``-bit impulse vectors."""
    schedule = np.atleast_2d(np.asarray(schedule, dtype=np.uint8))
    width = schedule.shape[1]
    if input_offset < 0 or input_offset + width > n:
        raise InputError(f"{width} input lines at offset {input_offset} do not fit {n} neurons")
    out = np.zeros((schedule.shape[0], n), dtype=np.uint8)
    out[:, input_offset:input_offset + width] = schedule
    return out


@dataclass(frozen=True)
class Decision:
    label: Optional[str]
    index: int
    counts: tuple
    no_decision: bool
    first_spike_cycle: Optional[int]


def decode_label(trace: SimTrace, preset: Preset) -> Decision:
    result = classify(trace, preset.outputs, mode=preset.decode)
    label = None if result.no_spike else preset.class_names[result.index]
    return Decision(label, result.index, result.counts, result.no_spike, result.first_spike_cycle)


def format_schedule(schedule) -> str:
    """``cycle:bitstring`` per line, input line 0 leftmost."""
    lines = []
    for t, row in enumerate(np.atleast_2d(np.asarray(schedule, dtype=np.uint8))):
        lines.append(f"{t}:" + "".join(str(int(b)) for b in row))
    return "\n".join(lines) + "\n"


def parse_schedule(text: str) -> list:
    """Parse blank-line-separated ``cycle:bitstring`` blocks into arrays."""
    blocks, current, width = [], [], None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            if current:
                blocks.append(np.array(current, dtype=np.uint8))
                current = []
            continue
        cycle, sep, bits = line.partition(":")
        if not sep or not cycle.isdigit() or not bits or set(bits) - {"0", "1"}:
            raise InputError(f"line {lineno}: malformed schedule entry {line!r}")
        if int(cycle) != len(current):
            raise InputError(f"line {lineno}: expected cycle {len(current)}, got {cycle}")
        if width is not None and len(bits) != width:
            raise InputError(f"line {lineno}: width {len(bits)} differs from {width}")
        width = len(bits)
        current.append([int(b) for b in bits])
    if current:
        blocks.append(np.array(current, dtype=np.uint8))
    return blocks


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def read_tabular_csv(path) -> list:
    """Rows of 4 numeric features plus an optional label; a header row is skipped."""
    samples = []
    with open(path, newline="") as fh:
        for rowno, row in enumerate(csv.reader(fh), 1):
            if not row or all(not c.strip() for c in row):
                continue
            if rowno == 1 and not _is_number(row[0]):
                continue
            if len(row) not in (N_FEATURES, N_FEATURES + 1):
                raise InputError(f"row {rowno}: expected 4 features and an optional label")
            try:
                feats = [float(c) for c in row[:N_FEATURES]]
                label = row[N_FEATURES].strip() if len(row) > N_FEATURES else None
                samples.append(TabularSample(feats, label or None))
            except (ValueError, InputError) as exc:
                raise InputError(f"row {rowno}: {exc}") from exc
    return samples


def read_image_csv(path) -> list:
    """One image per row: 64 intensities, optionally followed by a label."""
    images = []
    with open(path, newline="") as fh:
        for rowno, row in enumerate(csv.reader(fh), 1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) not in (IMAGE_PIXELS, IMAGE_PIXELS + 1):
                raise InputError(f"row {rowno}: expected 64 intensities and an optional label")
            try:
                pixels = [int(c) for c in row[:IMAGE_PIXELS]]
                label = row[IMAGE_PIXELS].strip() if len(row) > IMAGE_PIXELS else None
                images.append(GrayImage8x8(pixels, label or None))
            except (ValueError, InputError) as exc:
                raise InputError(f"row {rowno}: {exc}") from exc
    return images


def _pgm_tokens(data: bytes):
    """Header tokens of a PGM file and the offset just past the header."""
    tokens, pos = [], 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise InputError("truncated PGM header")
        tokens.append(data[start:pos].decode("ascii"))
    return tokens, pos + 1


def read_pgm(path) -> GrayImage8x8:
    data = Path(path).read_bytes()
    (magic, w, h, maxval), offset = _pgm_tokens(data)
    if magic not in ("P2", "P5"):
        raise InputError(f"{path}: not a PGM file (magic {magic!r})")
    if (int(w), int(h)) != (IMAGE_SIDE, IMAGE_SIDE):
        raise InputError(f"{path}: expected an 8x8 image, got {w}x{h}")
    maxval = int(maxval)
    if not 0 < maxval <= 255:
        raise InputError(f"{path}: only 8-bit PGM is supported")
    if magic == "P5":
        raw = data[offset:offset + IMAGE_PIXELS]
        if len(raw) != IMAGE_PIXELS:
            raise InputError(f"{path}: truncated pixel data")
        pixels = list(raw)
    else:
        pixels = [int(t) for t in data[offset:].split()]
    if maxval != 255:
        pixels = [round(p * 255 / maxval) for p in pixels]
    return GrayImage8x8(pixels)


def write_pgm(path, img: GrayImage8x8, binary=True):
    header = f"{'P5' if binary else 'P2'}\n{IMAGE_SIDE} {IMAGE_SIDE}\n255\n".encode()
    if binary:
        body = bytes(img.pixels)
    else:
        body = "\n".join(
            " ".join(str(p) for p in img.pixels[r * IMAGE_SIDE:(r + 1) * IMAGE_SIDE])
            for r in range(IMAGE_SIDE)
        ).encode() + b"\n"
    Path(path).write_bytes(header + body)


def read_images(path) -> list:
    """Images from a ``.pgm`` file, a directory of them, or an image CSV."""
    path = Path(path)
    if path.is_dir():
        return [read_pgm(p) for p in sorted(path.glob("*.pgm"))]
    if path.suffix.lower() == ".pgm":
        return [read_pgm(path)]
    return read_image_csv(path)


def dataset_ranges(samples: Sequence[TabularSample]):
    """Per-feature min and max over a dataset."""
    if not samples:
        raise InputError("cannot derive feature ranges from an empty dataset")
    feats = np.array([s.features for s in samples])
    return tuple(feats.min(axis=0).tolist()), tuple(feats.max(axis=0).tolist())
