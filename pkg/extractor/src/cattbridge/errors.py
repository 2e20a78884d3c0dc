"""Exception hierarchy for the extraction bridge."""


class BridgeError(Exception):
    """Base class for every error this package raises on purpose."""


class BridgeValidationError(BridgeError, ValueError):
    """Caller passed arguments that violate a documented precondition."""


class CandidateTokenError(BridgeValidationError):
    """A trace candidate does not map to a single token."""


class ImageMismatchError(BridgeValidationError):
    """The image is incompatible with the model's processor contract."""


class ModelUnavailableError(BridgeError):
    """The requested model cannot be loaded in this environment."""


class MaskToolError(BridgeError):
    """The external masking command failed or is not installed."""
