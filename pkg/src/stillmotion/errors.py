"""Exception types shared across the package."""


class StillmotionError(Exception):
    """Base class for all errors raised by this package."""


class ImageDecodeError(StillmotionError):
    """File bytes could not be decoded into an image."""


class EmptyImageError(ImageDecodeError):
    """Decoded image has a zero dimension."""


class ClickConflictError(StillmotionError):
    """Positive and negative clicks cancel each other out entirely."""


class NoBoundaryDataError(StillmotionError):
    """Fill region covers the whole image, leaving no boundary pixels."""


class ConfigError(StillmotionError):
    """Invalid pipeline configuration. Carries every problem found."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class StageError(StillmotionError):
    """A pipeline stage failed. Message is prefixed with the stage name."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"{stage}: {cause}")
