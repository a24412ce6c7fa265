"""Exception types shared across the toolchain."""


class ExposcanError(Exception):
    """Base class for all toolchain errors."""


class UnreadableInput(ExposcanError):
    """Input file is not valid UTF-8."""


class FatalSyntax(ExposcanError):
    """No class or interface declaration could be recovered from the file."""


class CommentHasNoContext(ExposcanError):
    """Comments are self-contained and carry no context snippet."""


class ProviderUnavailable(ExposcanError):
    """The requested embedding provider is not registered or not reachable."""


class DimensionMismatch(ExposcanError):
    """Vector dimensions disagree with what the consumer expects."""


class InputTooSmall(ExposcanError):
    """Classifier input dimension too small for the layer-width rule."""


class NotBinaryTask(ExposcanError):
    """Operation is defined for binary-labelled data only."""


class MinorityTooSmall(ExposcanError):
    """Minority class needs at least two members to interpolate."""


class ClassTooSmall(ExposcanError):
    """A class has too few examples to train on."""


class NonFiniteLoss(ExposcanError):
    """Training loss became NaN or infinite."""


class LengthMismatch(ExposcanError):
    """Prediction and truth sequences differ in length."""


class ModelMissing(ExposcanError):
    """A required classifier model file is absent."""

    def __init__(self, kind: str):
        super().__init__(f"no model available for task {kind!r}")
        self.kind = kind


class UnknownCwe(ExposcanError):
    """Ruleset references a CWE id outside the supported hierarchy."""


class MissingFile(ExposcanError):
    """A flow step references a file that is not part of the corpus."""


class SpanOutOfRange(ExposcanError):
    """A flow step references lines beyond the end of its file."""


class SchemaViolation(ExposcanError):
    """A dataset row does not match the expected schema."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnknownFile(ExposcanError):
    """A detection references a file outside the benchmark corpus."""


class BadConfig(ExposcanError):
    """Scan configuration is inconsistent or incomplete."""
