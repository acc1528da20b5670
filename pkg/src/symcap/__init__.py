"""P-symmetric Ekeland-Hofer capacities, action spectra and numerical oracles."""

__version__ = "0.1.0"

from .bidisk import (
    BidiskSpectrumQuery,
    IntersectionResult,
    bidisk_interval_intersection,
    bidisk_spectrum_values,
    verify_lag_report,
)
from .capacities import (
    DomainSpec,
    Kind,
    ObstructionVerdict,
    Status,
    ball_table,
    capacity_ball,
    capacity_ellipsoid,
    capacity_polydisc,
    capacity_sequence,
    embedding_obstruction,
    related_capacities,
)
from .domain import ActionValue, PSymmetry, Radii, validate_radii
from .errors import (
    AmbiguousInFloatMode,
    InputError,
    MaxIterationsExceeded,
    NoConvergence,
    NumericalFailure,
    SingularJacobian,
    SymcapError,
)
from .spectrum import ActionStream, eh_stream, multiplicity, nth_value, sigma_p_prime_stream, sigma_p_stream

__all__ = [
    "ActionStream", "ActionValue", "AmbiguousInFloatMode", "BidiskSpectrumQuery", "DomainSpec",
    "InputError", "IntersectionResult", "Kind", "MaxIterationsExceeded", "NoConvergence",
    "NumericalFailure", "ObstructionVerdict", "PSymmetry", "Radii", "SingularJacobian", "Status",
    "SymcapError", "ball_table", "bidisk_interval_intersection", "bidisk_spectrum_values",
    "capacity_ball", "capacity_ellipsoid", "capacity_polydisc", "capacity_sequence", "eh_stream",
    "embedding_obstruction", "multiplicity", "nth_value", "related_capacities", "sigma_p_prime_stream",
    "sigma_p_stream", "validate_radii", "verify_lag_report",
]
