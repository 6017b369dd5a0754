"""Exception hierarchy shared by every pbtguard module."""


class PbtGuardError(Exception):
    """Base class for all errors raised by pbtguard."""


class ConfigurationError(PbtGuardError, ValueError):
    """A configuration object or subject lookup is invalid."""


class DomainError(PbtGuardError, ValueError):
    """An input lies outside the declared domain of an operation."""


class BundleError(PbtGuardError):
    """An input bundle is missing a required part."""


class BundleIOError(BundleError, OSError):
    """A file referenced by a bundle manifest could not be read."""

    def __init__(self, path, reason):
        OSError.__init__(self, f"cannot read {path}: {reason}")
        self.path = str(path)
        self.reason = reason

    def __str__(self):
        return f"cannot read {self.path}: {self.reason}"


class ContractError(PbtGuardError, ValueError):
    """A caller broke the precondition of an operation."""


class ProviderError(PbtGuardError):
    """The LLM provider failed to produce a response."""

    def __init__(self, message, status=None):
        super().__init__(message)
        self.status = status


class FixtureMissingError(ProviderError):
    """No recorded or scripted response exists for a conversation."""

    def __init__(self, digest, message=None):
        super().__init__(message or f"no fixture for conversation digest {digest}")
        self.digest = digest


class ExtractionError(PbtGuardError):
    """A model response contained no test function."""


class GuardExtractionError(PbtGuardError):
    """Assertions of a PBT fall outside the supported guard grammar."""

    def __init__(self, message, expressions=()):
        super().__init__(message)
        self.expressions = list(expressions)


class ClassificationError(PbtGuardError):
    """Executability could not be classified (e.g. a patch did not apply)."""


class SchemeCoverageError(PbtGuardError):
    """A generated input fell outside every cell of a partition scheme."""


class MappingConsistencyError(PbtGuardError, ValueError):
    """A mapping table violates one of its consistency rules."""


class UnknownSubjectError(ConfigurationError, LookupError):
    """No corpus subject is registered under the requested id."""


class UnknownFieldError(PbtGuardError, LookupError):
    """A fault or guard names a field missing from the subject's schema."""
