from __future__ import annotations


class ChannelInferenceError(Exception):
    pass


class ValidationError(ChannelInferenceError, ValueError):
    """Bad input: wrong shapes, unknown labels, unparseable text."""


class MathError(ChannelInferenceError, ArithmeticError):
    """Well-formed input whose computation is undefined (zero mass, zero validity)."""


class DimensionError(ValidationError):
    pass


class UnknownLabelError(ValidationError):
    pass


class MaskParseError(ValidationError):
    def __init__(self, message: str, position: int | None = None) -> None:
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class EffectParseError(ValidationError):
    pass


class FeatureSpecError(ValidationError):
    pass


class TableFormatError(ValidationError):
    pass


class FitError(ValidationError):
    pass


class DensityError(ValidationError):
    pass


class ZeroMassError(MathError):
    pass


class ConditioningError(MathError):
    pass


class ImpossibleObservationError(MathError):
    pass
