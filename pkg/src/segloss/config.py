"""Shared numeric configuration for the loss kernels."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError


@dataclass(frozen=True)
class LossConfig:
    """Numeric knobs shared by every loss kernel.

    epsilon stabilizes overlap quotients (added to numerator and denominator
    of ratio-style losses), log_clamp floors probabilities before any
    logarithm, and include_background controls whether class 0 takes part
    in class sums and means.
    """

    epsilon: float = 1e-6
    log_clamp: float = 1e-12
    include_background: bool = True

    def __post_init__(self):
        if not (isinstance(self.epsilon, float) and self.epsilon > 0.0):
            raise ValidationError(f"epsilon must be a positive float, got {self.epsilon!r}")
        if not (isinstance(self.log_clamp, float) and self.log_clamp > 0.0):
            raise ValidationError(f"log_clamp must be a positive float, got {self.log_clamp!r}")

    def first_class(self) -> int:
        """Index of the first class included in sums (0 or 1)."""
        return 0 if self.include_background else 1


DEFAULT_CONFIG = LossConfig()
