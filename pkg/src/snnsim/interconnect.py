"""Mux-grid all-to-all spike routing.

``conn[src, dst] == 1`` forwards neuron ``src``'s output to neuron ``dst``;
a disabled entry routes a constant zero.  Routing is combinational: it maps
one cycle's output vector to every destination's input vector and adds no
delay of its own.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError


def _as_bits(values, name) -> np.ndarray:
    a = np.asarray(values)
    if a.size and not np.all((a == 0) | (a == 1)):
        raise InputError(f"{name} entries must be 0 or 1")
    return a.astype(np.uint8)


class ConnectionMatrix:
    """Dense ``n x n`` binary connection list indexed ``[source][destination]``."""

    def __init__(self, n, bits=None):
        n = int(n)
        if n < 1:
            raise InputError(f"network size must be positive, got {n}")
        if bits is None:
            self.bits = np.zeros((n, n), dtype=np.uint8)
        else:
            arr = _as_bits(bits, "connection")
            if arr.shape != (n, n):
                raise InputError(f"connection matrix must be {n}x{n}, got {arr.shape}")
            self.bits = arr.copy()

    @classmethod
    def from_rows(cls, rows):
        rows = np.asarray(rows)
        if rows.ndim != 2:
            raise InputError("connection matrix must be two-dimensional")
        return cls(rows.shape[0], rows)

    @classmethod
    def feedforward(cls, n, sources, destinations):
        """Every source in ``sources`` feeds every destination in ``destinations``."""
        conn = cls(n)
        for s in sources:
            for d in destinations:
                conn.set_connection(s, d, True)
        return conn

    @property
    def n(self):
        return self.bits.shape[0]

    def _check(self, src, dst):
        if not (0 <= src < self.n and 0 <= dst < self.n):
            raise InputError(f"connection ({src}, {dst}) outside a {self.n}-neuron network")

    def set_connection(self, src, dst, enabled):
        self._check(src, dst)
        self.bits[src, dst] = 1 if enabled else 0

    def get_connection(self, src, dst):
        self._check(src, dst)
        return int(self.bits[src, dst])

    def fan_in(self, dst):
        """Source indices routed into ``dst``."""
        return [int(i) for i in np.flatnonzero(self.bits[:, dst])]

    def copy(self):
        return ConnectionMatrix(self.n, self.bits)

    def tolist(self):
        return self.bits.tolist()

    def __eq__(self, other):
        if not isinstance(other, ConnectionMatrix):
            return NotImplemented
        return self.bits.shape == other.bits.shape and bool(np.array_equal(self.bits, other.bits))

    def __repr__(self):
        return f"ConnectionMatrix(n={self.n}, enabled={int(self.bits.sum())})"


def route(conn: ConnectionMatrix, outputs) -> np.ndarray:
    """Per-destination input vectors for one cycle.

    Row ``m`` of the result is destination ``m``'s input vector; entry
    ``[m, j]`` is ``outputs[j] AND conn[j][m]``, aligned with the
    destination's weight for source ``j``.
    """
    y = _as_bits(outputs, "output spike")
    if y.shape != (conn.n,):
        raise InputError(f"expected {conn.n} output spikes, got shape {y.shape}")
    return conn.bits.T & y[np.newaxis, :]
