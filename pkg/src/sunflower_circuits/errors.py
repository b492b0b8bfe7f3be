"""Shared exception types."""


class EmptyFamilyError(ValueError):
    """Raised when an operation needs at least one member set."""


class ExactIntractableError(RuntimeError):
    """Exact enumeration would exceed the configured work cap.

    Callers are expected to fall back to a Monte-Carlo engine.
    """

    def __init__(self, cost_bits: int, cap_bits: int):
        self.cost_bits = cost_bits
        self.cap_bits = cap_bits
        super().__init__(
            f"exact enumeration needs ~2^{cost_bits} steps, cap is 2^{cap_bits}"
        )


class EnumerationTooLargeError(RuntimeError):
    """A full construction (e.g. all polynomials) exceeds its cap."""


class ThresholdNotMetError(RuntimeError):
    """Sunflower search failed on a family below the guarantee threshold."""


class BaseCaseFailedError(RuntimeError):
    """Extraction bottomed out on a 1-uniform family that is too small."""


class MonomialBlowupError(RuntimeError):
    """Gate-wise expansion of an arithmetic circuit exceeded the monomial cap."""


class NegativeConstantError(ValueError):
    """A monotone arithmetic circuit may only carry positive constants."""


class TooLargeError(RuntimeError):
    """Input size exceeds a hard cap of a quadratic/exhaustive scan."""


class ConfigError(ValueError):
    """Invalid experiment configuration (unknown key, missing seed, ...)."""
