"""Exception hierarchy shared by every computons module."""


class ComputonsError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ComputonsError, ValueError):
    """An element or map lies outside the finite set it was declared on."""


class ConstructionError(ComputonsError):
    """A computon could not be built; ``rule`` names the violated restriction."""

    def __init__(self, rule, message):
        super().__init__(f"{rule}: {message}")
        self.rule = rule


class MorphismError(ComputonsError):
    """A candidate morphism breaks a commuting square or the boundary condition."""

    def __init__(self, clause, message):
        super().__init__(f"{clause}: {message}")
        self.clause = clause


class NotPushableError(ComputonsError):
    """``violations`` is a list of ``(clause, message)``; ``clauses`` keeps the names."""

    def __init__(self, violations):
        self.violations = list(violations)
        self.clauses = [name for name, _ in self.violations]
        detail = "; ".join(f"{name}: {msg}" for name, msg in self.violations)
        super().__init__("span is not pushable: " + detail)


class CompositionError(ComputonsError):
    """An operator precondition failed (sequentiability, markers, connectivity)."""

    def __init__(self, clause, message):
        super().__init__(f"{clause}: {message}")
        self.clause = clause


class ExecutionError(ComputonsError):
    """Raised by the interpreter; carries the partial trace when available."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class InputError(ExecutionError):
    pass


class NonTerminationError(ExecutionError):
    pass


class DeviceError(ComputonsError):
    """Device invocation failure.

    ``kind`` is one of ``unknown-device``, ``bad-arguments``, ``timeout``,
    ``network``, ``malformed-response`` or ``device-failure``.
    """

    def __init__(self, kind, device, message):
        super().__init__(f"{device}: {kind}: {message}")
        self.kind = kind
        self.device = device
        self.detail = message
