class QembedError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(QembedError, ValueError):
    """Invalid shapes, indices, or configuration values."""


class UsageError(QembedError, ValueError):
    """A call that violates an operation's preconditions (empty batch, bad lengths)."""


class InfeasibleError(QembedError):
    """The requested search is too large to run."""


class TrainingError(QembedError, RuntimeError):
    """Training diverged or failed.

    ``step`` is the optimizer step at which the loss went non-finite, when known.
    ``context`` accumulates where the failure happened (noise run, generation, ...).
    """

    def __init__(self, message: str, step: int | None = None, context: str | None = None):
        self.message = message
        self.step = step
        self.context = context
        text = message if step is None else f"{message} at step {step}"
        if context:
            text = f"{context}: {text}"
        super().__init__(text)

    def with_context(self, where: str) -> "TrainingError":
        context = where if not self.context else f"{where}, {self.context}"
        return TrainingError(self.message, step=self.step, context=context)
