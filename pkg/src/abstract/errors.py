class WorkbenchError(ValueError):
    """Base class for every failure the workbench reports to its caller."""


class TopologyParseError(WorkbenchError):
    pass


class SpecFormatError(WorkbenchError):
    pass


class SpecValidationError(WorkbenchError):
    """A spec failed its construction conditions. `violations` keeps the full list."""

    def __init__(self, message: str, violations: list | None = None):
        super().__init__(message)
        self.violations = violations or []


class SpecMismatchError(WorkbenchError):
    pass


class PermutationError(WorkbenchError):
    pass


class NotCanonicalError(WorkbenchError):
    pass


class InternalConflictError(WorkbenchError):
    """Raised when a topology with an internal conflict is handed to a transformation."""

    def __init__(self, message: str, pair: tuple[int, int]):
        super().__init__(message)
        self.pair = pair


class SearchLimitError(WorkbenchError):
    pass


class ChannelSamplingError(WorkbenchError):
    pass
