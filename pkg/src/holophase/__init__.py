"""Geometric phases of mixed quantum states from horizontal lifts of purifications."""

from .connection import (
    TransportResult,
    connection_form,
    horizontal_lift,
    horizontality_residual,
    moment_map,
)
from .errors import HolophaseError
from .evolution import (
    UnitaryPath,
    builtin_neutron_I,
    builtin_neutron_II,
    propagate_constant,
    resample,
)
from .phases import (
    PhaseReport,
    closed_curve_holonomy,
    first_defined_order,
    geometric_phase,
    higher_order_phase,
    newton_coefficients,
    off_diagonal_factors,
    overlap_matrix,
    phase_factor_J,
    phase_report,
    sjoqvist_phase,
)
from .spectral import (
    DensityOperator,
    PurificationFrame,
    SpectralMatrices,
    Spectrum,
    block_projectors,
    spectrum_of,
    standard_purification,
)
from .tolerances import Tolerances

__version__ = "0.1.0"

__all__ = [
    "DensityOperator",
    "HolophaseError",
    "PhaseReport",
    "PurificationFrame",
    "SpectralMatrices",
    "Spectrum",
    "Tolerances",
    "TransportResult",
    "UnitaryPath",
    "block_projectors",
    "builtin_neutron_I",
    "builtin_neutron_II",
    "closed_curve_holonomy",
    "connection_form",
    "first_defined_order",
    "geometric_phase",
    "higher_order_phase",
    "horizontal_lift",
    "horizontality_residual",
    "moment_map",
    "newton_coefficients",
    "off_diagonal_factors",
    "overlap_matrix",
    "phase_factor_J",
    "phase_report",
    "propagate_constant",
    "resample",
    "sjoqvist_phase",
    "spectrum_of",
    "standard_purification",
]
