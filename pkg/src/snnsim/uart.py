"""Host <-> device serial link.

Wire format (one byte per transaction, every byte framed 8N1):

1. connection-list rows: for each source neuron, ``ceil(n/8)`` bytes; bit
   ``j`` of the row (destination ``j``) lives in byte ``j // 8`` at bit
   position ``j % 8``; padding bits are zero
2. thresholds: ``n`` bytes
3. weights: ``n`` bytes
4. impulse register: ``ceil(n/8)`` bytes, packed like a row

After the image, every further ``ceil(n/8)``-byte group is one cycle of
impulse input; the device clocks once per group and answers with the packed
output spike register only for cycles in which some neuron spiked.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Protocol

import numpy as np

from .errors import FramingError, InputError, TransportError
from .interconnect import ConnectionMatrix
from .processor import NeuronModel, Processor, RegisterBank

BAUD_RATE = 9600
FRAME_BITS = 10
# Duration of one bit at 9600 baud, rounded; used as the cost of one transaction.
DEFAULT_TRANSACTION_US = 104.17


def encode_8n1(byte: int):
    """Start bit, eight data bits LSB first, stop bit."""
    if not 0 <= byte <= 0xFF:
        raise InputError(f"{byte} is not a byte")
    return (0,) + tuple((byte >> i) & 1 for i in range(8)) + (1,)


def decode_8n1(bits, frame_index=0) -> int:
    bits = tuple(bits)
    if len(bits) != FRAME_BITS:
        raise InputError(f"an 8N1 frame has {FRAME_BITS} bits, got {len(bits)}")
    if bits[0] != 0 or bits[-1] != 1:
        raise FramingError(frame_index)
    return sum(b << i for i, b in enumerate(bits[1:9]))


def encode_stream(data: bytes) -> list:
    out = []
    for b in data:
        out.extend(encode_8n1(b))
    return out


def decode_stream(bits) -> bytes:
    bits = list(bits)
    if len(bits) % FRAME_BITS:
        raise InputError(f"bit stream length {len(bits)} is not a whole number of frames")
    return bytes(
        decode_8n1(bits[i:i + FRAME_BITS], i // FRAME_BITS)
        for i in range(0, len(bits), FRAME_BITS)
    )


def row_bytes(n: int) -> int:
    return (n + 7) // 8


def pack_bits(bits) -> bytes:
    """Neuron ``i`` -> bit ``i % 8`` of byte ``i // 8``."""
    bits = [int(b) for b in bits]
    out = bytearray(row_bytes(len(bits)))
    for i, b in enumerate(bits):
        if b:
            out[i // 8] |= 1 << (i % 8)
    return bytes(out)


def unpack_bits(data: bytes, n: int):
    if len(data) != row_bytes(n):
        raise InputError(f"expected {row_bytes(n)} bytes for {n} bits, got {len(data)}")
    for i in range(n, 8 * len(data)):
        if (data[i // 8] >> (i % 8)) & 1:
            raise InputError(f"padding bit {i} is set")
    return tuple((data[i // 8] >> (i % 8)) & 1 for i in range(n))


def image_length(n: int) -> int:
    return n * row_bytes(n) + 2 * n + row_bytes(n)


def serialize_registers(bank: RegisterBank) -> bytes:
    out = bytearray()
    for src in range(bank.n):
        out += pack_bits(bank.connections.bits[src])
    out += bytes(bank.thresholds)
    out += bytes(bank.weights)
    out += pack_bits(bank.impulse)
    return bytes(out)


def deserialize_registers(image: bytes, n: int, refractory=0, leak_step=0) -> RegisterBank:
    """Inverse of :func:`serialize_registers`.

    ``refractory`` and ``leak_step`` are not carried in the image and must be
    supplied by the caller.
    """
    if n < 1:
        raise InputError(f"n must be positive, got {n}")
    if len(image) != image_length(n):
        raise InputError(f"image for n={n} must be {image_length(n)} bytes, got {len(image)}")
    rb = row_bytes(n)
    rows = [unpack_bits(image[i * rb:(i + 1) * rb], n) for i in range(n)]
    pos = n * rb
    thresholds = tuple(image[pos:pos + n])
    weights = tuple(image[pos + n:pos + 2 * n])
    impulse = unpack_bits(image[pos + 2 * n:], n)
    return RegisterBank(
        n, thresholds, weights, ConnectionMatrix(n, rows), impulse, refractory, leak_step
    )


@dataclass(frozen=True)
class TransactionPlan:
    n: int
    cl: int
    threshold: int
    weight: int
    impulse: int
    per_transaction_s: float = DEFAULT_TRANSACTION_US * 1e-6

    @property
    def total(self):
        return self.cl + self.threshold + self.weight + self.impulse

    @property
    def duration_s(self):
        return programming_time(self)


def transaction_count(n: int, per_transaction_us=DEFAULT_TRANSACTION_US) -> TransactionPlan:
    if int(n) != n or n < 1:
        raise InputError(f"neuron count must be a positive integer, got {n}")
    if per_transaction_us < 0:
        raise InputError("per-transaction duration must be non-negative")
    n = int(n)
    return TransactionPlan(
        n=n,
        cl=n * row_bytes(n),
        threshold=n,
        weight=n,
        impulse=row_bytes(n),
        per_transaction_s=per_transaction_us * 1e-6,
    )


def programming_time(plan: TransactionPlan) -> float:
    """Seconds to send the whole register image."""
    return plan.total * plan.per_transaction_s


def frame_time_s(baud=BAUD_RATE) -> float:
    """Wire time of one full 8N1 byte frame."""
    return FRAME_BITS / baud


class ByteChannel(Protocol):
    """Host end of a bidirectional byte link."""

    def write(self, data: bytes) -> None: ...

    def read(self) -> bytes: ...


class LoopbackDevice:
    """In-process device endpoint: UART receiver, register bank and processor."""

    def __init__(self, n, refractory=0, leak_step=0, model: NeuronModel = NeuronModel()):
        self.n = n
        self.refractory = refractory
        self.leak_step = leak_step
        self.model = model
        self.processor: Optional[Processor] = None
        self._rx_bits = []
        self._rx_bytes = bytearray()
        self._frames = 0
        self._tx = bytearray()

    def receive_bits(self, bits):
        self._rx_bits.extend(bits)
        while len(self._rx_bits) >= FRAME_BITS:
            frame, self._rx_bits = self._rx_bits[:FRAME_BITS], self._rx_bits[FRAME_BITS:]
            byte = decode_8n1(frame, self._frames)
            self._frames += 1
            self._receive_byte(byte)

    def _receive_byte(self, byte):
        self._rx_bytes.append(byte)
        if self.processor is None:
            if len(self._rx_bytes) == image_length(self.n):
                bank = deserialize_registers(
                    bytes(self._rx_bytes), self.n, self.refractory, self.leak_step
                )
                self.processor = Processor(bank, self.model)
                self._rx_bytes.clear()
        elif len(self._rx_bytes) == row_bytes(self.n):
            impulse = unpack_bits(bytes(self._rx_bytes), self.n)
            self._rx_bytes.clear()
            y = self.processor.tick(impulse)
            if y.any():
                self._tx += pack_bits(y)

    def transmit_bits(self):
        bits = encode_stream(bytes(self._tx))
        self._tx.clear()
        return bits


class LoopbackChannel:
    """Reliable in-process serial line to a :class:`LoopbackDevice`.

    ``flip_bits`` lists host->device bit positions (counted over the whole
    session) to invert; ``close_after`` closes the line once that many bytes
    have been written.
    """

    def __init__(self, device: LoopbackDevice, flip_bits=(), close_after=None):
        self.device = device
        self.flip_bits = set(flip_bits)
        self.close_after = close_after
        self.bytes_sent = 0
        self._bit_pos = 0
        self.closed = False

    def write(self, data: bytes):
        for byte in data:
            if self.closed or (self.close_after is not None and self.bytes_sent >= self.close_after):
                self.closed = True
                raise TransportError(self.bytes_sent)
            bits = list(encode_8n1(byte))
            for i in range(FRAME_BITS):
                if self._bit_pos + i in self.flip_bits:
                    bits[i] ^= 1
            self._bit_pos += FRAME_BITS
            self.device.receive_bits(bits)
            self.bytes_sent += 1

    def read(self) -> bytes:
        return decode_stream(self.device.transmit_bits())

    def close(self):
        self.closed = True


@dataclass
class SessionResult:
    n: int
    outputs: list = field(default_factory=list)  # (cycle, bits) for cycles with spikes
    transcript: list = field(default_factory=list)  # (direction, bytes)

    @property
    def bytes_sent(self):
        return sum(len(b) for d, b in self.transcript if d == "tx")

    def spike_matrix(self, cycles: int) -> np.ndarray:
        out = np.zeros((cycles, self.n), dtype=np.uint8)
        for cycle, bits in self.outputs:
            if cycle < cycles:
                out[cycle] = bits
        return out


def host_session(channel: ByteChannel, bank: RegisterBank, impulses) -> SessionResult:
    """Program ``bank`` over ``channel`` then stream ``impulses`` one cycle each.

    Output groups read back after each impulse group are attributed to that
    cycle.
    """
    n = bank.n
    result = SessionResult(n)

    def send(data):
        result.transcript.append(("tx", bytes(data)))
        channel.write(data)

    send(serialize_registers(bank))
    rb = row_bytes(n)
    for cycle, impulse in enumerate(impulses):
        send(pack_bits(impulse))
        reply = channel.read()
        if not reply:
            continue
        result.transcript.append(("rx", reply))
        if len(reply) % rb:
            raise InputError(f"device reply of {len(reply)} bytes is not a whole output group")
        for i in range(0, len(reply), rb):
            result.outputs.append((cycle, unpack_bits(reply[i:i + rb], n)))
    return result
