"""Exception types raised across the package."""


class MeasNoiseError(ValueError):
    """Base class for invalid inputs and unmet preconditions."""


class DimensionMismatch(MeasNoiseError):
    pass


class NotHermitian(MeasNoiseError):
    pass


class CompletenessViolated(MeasNoiseError):
    """Measurement operators do not satisfy sum M^dag M = I."""


class UnknownLabel(MeasNoiseError):
    pass


class LabelMismatch(MeasNoiseError):
    pass


class ZeroProbability(MeasNoiseError):
    """Post-measurement state requested for an outcome set of probability zero."""


class OrthogonalityViolated(MeasNoiseError):
    pass


class NotJointlyUnbiased(MeasNoiseError):
    pass


class DegenerateSigma(MeasNoiseError):
    pass


class ScenarioError(MeasNoiseError):
    """Malformed scenario file; ``location`` points at the offending entry."""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)
