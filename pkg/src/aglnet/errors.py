"""Exception hierarchy shared by every module."""


class AglnetError(Exception):
    """Base class; ``kind`` is the machine-readable tag used by the CLI."""

    kind = "error"

    def to_dict(self):
        return {"error": self.kind, "message": str(self)}


class InvalidConfigurationError(AglnetError, ValueError):
    kind = "invalid-configuration"


class DegenerateDataError(AglnetError, ValueError):
    kind = "degenerate-data"


class DivergenceError(AglnetError, FloatingPointError):
    """Raised when an iterate becomes non-finite; ``step`` is where it happened."""

    kind = "divergence"

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step

    def to_dict(self):
        out = super().to_dict()
        out["step"] = self.step
        return out


class UndefinedMetricError(AglnetError, ZeroDivisionError):
    kind = "undefined-metric"


class ResourceError(AglnetError, MemoryError):
    kind = "resource"


class SweepError(AglnetError, RuntimeError):
    """Every point of a regularization path failed."""

    kind = "sweep-failure"

    def __init__(self, message, failures=None):
        super().__init__(message)
        self.failures = dict(failures or {})

    def to_dict(self):
        out = super().to_dict()
        out["failures"] = {repr(k): str(v) for k, v in self.failures.items()}
        return out


class AglnetIOError(AglnetError, OSError):
    kind = "io"
