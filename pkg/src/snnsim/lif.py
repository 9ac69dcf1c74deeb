"""Discrete-time leaky integrate-and-fire neuron.

Two membrane backends share one threshold/reset/refractory stage:

* ``LeakMode.EULER`` -- multiplicative decay::

      v~ = (1 - dt/tau_m) * v + (dt/c_m) * (sum_j w_j s_j + i_bias)

* ``LeakMode.FIXED_LEAK`` -- the integer datapath used on the FPGA::

      v~ = v + sum_j w_j s_j - lam * [v != 0]

  where the indicator is evaluated on the potential *before* the update.

Then, with ``r`` the refractory counter before the update::

      y' = 1            if v~ >= v_th and r == 0 else 0
      v' = 0            if y' or r > 0            else v~
      r' = r_ref        if y'                     else max(0, r - 1)

Fixed-leak arithmetic is exact (Python ints); Euler arithmetic is float64.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InputError

WEIGHT_MAX = 255


class LeakMode(str, enum.Enum):
    EULER = "euler"
    FIXED_LEAK = "fixed"


class NegativePolicy(str, enum.Enum):
    """What the fixed-leak backend does when the leak overshoots zero."""

    CLAMP = "clamp"
    ALLOW_NEGATIVE = "allow-negative"


@dataclass(frozen=True)
class LifParams:
    v_th: float
    r_ref: int
    weights: tuple
    leak_mode: LeakMode = LeakMode.FIXED_LEAK
    i_bias: float = 0.0
    tau_m: float = 1.0
    c_m: float = 1.0
    dt: float = 1.0
    lam: int = 0
    negative_policy: NegativePolicy = NegativePolicy.CLAMP
    _w: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        weights = tuple(int(w) for w in self.weights)
        if any(w != orig for w, orig in zip(weights, self.weights)):
            raise InputError("weights must be integers")
        if any(w < 0 or w > WEIGHT_MAX for w in weights):
            raise InputError(f"weights must lie in [0, {WEIGHT_MAX}]")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "leak_mode", LeakMode(self.leak_mode))
        object.__setattr__(self, "negative_policy", NegativePolicy(self.negative_policy))
        if not self.v_th > 0:
            raise InputError(f"v_th must be positive, got {self.v_th}")
        if int(self.r_ref) != self.r_ref or self.r_ref < 0:
            raise InputError(f"r_ref must be a non-negative integer, got {self.r_ref}")
        object.__setattr__(self, "r_ref", int(self.r_ref))
        if self.leak_mode is LeakMode.EULER:
            ratio = self.dt / self.tau_m if self.tau_m > 0 else float("nan")
            if not 0 < ratio <= 1:
                raise InputError(f"dt/tau_m must lie in (0, 1], got {ratio}")
            if not self.c_m > 0:
                raise InputError(f"c_m must be positive, got {self.c_m}")
        else:
            if int(self.lam) != self.lam or self.lam < 0:
                raise InputError(f"lam must be a non-negative integer, got {self.lam}")
            object.__setattr__(self, "lam", int(self.lam))
            if self.i_bias != 0:
                raise InputError("i_bias is only defined for the Euler backend")
        w = np.asarray(weights, dtype=np.int64)
        w.flags.writeable = False
        object.__setattr__(self, "_w", w)

    @property
    def n_inputs(self):
        return len(self.weights)


@dataclass(frozen=True)
class LifState:
    v: float = 0
    r: int = 0
    y: int = 0

    def __post_init__(self):
        if self.r < 0:
            raise InputError(f"refractory counter must be >= 0, got {self.r}")
        if self.y not in (0, 1):
            raise InputError(f"output spike must be 0 or 1, got {self.y}")


def _spike_vector(params: LifParams, spikes) -> np.ndarray:
    s = np.asarray(spikes)
    if s.shape != (params.n_inputs,):
        raise InputError(
            f"expected {params.n_inputs} input spikes, got shape {s.shape}"
        )
    if s.size and not np.all((s == 0) | (s == 1)):
        raise InputError("input spikes must be 0 or 1")
    return s.astype(np.int64, copy=False)


def synaptic_drive(params: LifParams, spikes) -> int:
    """Weighted input sum ``sum_j w_j s_j`` as an exact integer."""
    return int(params._w @ _spike_vector(params, spikes))


def euler_pre_threshold(params: LifParams, state: LifState, spikes) -> float:
    if params.leak_mode is not LeakMode.EULER:
        raise InputError("euler_pre_threshold requires leak_mode=EULER")
    drive = synaptic_drive(params, spikes)
    decay = 1.0 - params.dt / params.tau_m
    return decay * float(state.v) + (params.dt / params.c_m) * (drive + params.i_bias)


def fixed_leak_pre_threshold(params: LifParams, state: LifState, spikes) -> int:
    if params.leak_mode is not LeakMode.FIXED_LEAK:
        raise InputError("fixed_leak_pre_threshold requires leak_mode=FIXED_LEAK")
    drive = synaptic_drive(params, spikes)
    v_tilde = state.v + drive - (params.lam if state.v != 0 else 0)
    if params.negative_policy is NegativePolicy.CLAMP and v_tilde < 0:
        v_tilde = 0
    return v_tilde


def apply_threshold(params: LifParams, v_tilde, r: int):
    """Spike, reset and refractory stage. Returns ``(y, v, r)`` for the next cycle."""
    if r < 0 or r > params.r_ref:
        raise InputError(f"refractory counter {r} outside [0, {params.r_ref}]")
    y = 1 if (v_tilde >= params.v_th and r == 0) else 0
    v = 0 if (y or r > 0) else v_tilde
    r_next = params.r_ref if y else max(0, r - 1)
    return y, v, r_next


def pre_threshold(params: LifParams, state: LifState, spikes):
    if params.leak_mode is LeakMode.EULER:
        return euler_pre_threshold(params, state, spikes)
    return fixed_leak_pre_threshold(params, state, spikes)


def step(params: LifParams, state: LifState, spikes):
    """Advance one neuron by one cycle. Returns ``(next_state, y)``."""
    v_tilde = pre_threshold(params, state, spikes)
    y, v, r = apply_threshold(params, v_tilde, state.r)
    return LifState(v=v, r=r, y=y), y


def simulate(params: LifParams, state: LifState, spike_train: Sequence):
    """Fold :func:`step` over a spike train; returns ``(final_state, outputs)``."""
    outputs = []
    for spikes in spike_train:
        state, y = step(params, state, spikes)
        outputs.append(y)
    return state, outputs
