"""Exception hierarchy shared by every snnsim module."""


class SnnSimError(Exception):
    """Base class for all simulator errors."""


class InputError(SnnSimError, ValueError):
    """An argument violates an operation's preconditions (shape, range, ...)."""


class ConfigurationError(SnnSimError, ValueError):
    """A register bank or experiment configuration is inconsistent.

    ``field`` names the offending configuration entry when known.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class FramingError(SnnSimError):
    """An 8N1 frame had a bad start or stop bit."""

    def __init__(self, frame_index, message=None):
        self.frame_index = frame_index
        super().__init__(message or f"framing error in frame {frame_index}")


class TransportError(SnnSimError):
    """The byte channel closed before the session finished."""

    def __init__(self, bytes_sent, message=None):
        self.bytes_sent = bytes_sent
        super().__init__(message or f"channel closed after {bytes_sent} bytes sent")
