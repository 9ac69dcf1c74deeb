"""Cycle-accurate simulator of an FPGA LIF neuromorphic processor with
all-to-all configurable connectivity and a UART programming link."""

from .errors import ConfigurationError, FramingError, InputError, SnnSimError, TransportError
from .interconnect import ConnectionMatrix, route
from .lif import LeakMode, LifParams, LifState, NegativePolicy
from .processor import (
    Classification,
    NeuronModel,
    Processor,
    RegisterBank,
    SimTrace,
    classify,
    output_latency,
)
from .uart import (
    TransactionPlan,
    deserialize_registers,
    host_session,
    programming_time,
    serialize_registers,
    transaction_count,
)

__all__ = [
    "Classification",
    "ConfigurationError",
    "ConnectionMatrix",
    "FramingError",
    "InputError",
    "LeakMode",
    "LifParams",
    "LifState",
    "NegativePolicy",
    "NeuronModel",
    "Processor",
    "RegisterBank",
    "SimTrace",
    "SnnSimError",
    "TransactionPlan",
    "TransportError",
    "classify",
    "deserialize_registers",
    "host_session",
    "output_latency",
    "programming_time",
    "route",
    "serialize_registers",
    "transaction_count",
]

__version__ = "0.1.0"
