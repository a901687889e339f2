"""Noise, disturbance and uncertainty relations for finite quantum measurements."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    DegenerateSigma,
    DimensionMismatch,
    MeasNoiseError,
    NotJointlyUnbiased,
    OrthogonalityViolated,
    ScenarioError,
    ZeroProbability,
)
from .hilbert import TOL, Observable, ket, spectral  # noqa: F401
from .measurement import (  # noqa: F401
    JointFamily,
    MeasurementFamily,
    Pom,
    TpcpMap,
    pom_of,
    projective_family,
    tpcp_of,
)
