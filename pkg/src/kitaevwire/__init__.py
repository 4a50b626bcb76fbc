"""Zero modes and two-lead transport of a 1-D p-wave superconducting chain.

The package builds the particle-hole matrix of an open or closed wire (the
latter optionally with strong on-site defects), analyses its spectrum and
Majorana structure, and computes steady currents and differential
conductance for two normal leads attached to arbitrary sites, exactly in the
frequency domain.
"""

from .analysis import PoleSum, landauer_oracle, steady_limit
from .errors import (
    ConfigError,
    EigensolverError,
    KitaevWireError,
    NumericalError,
    QuadratureError,
    SingularPropagatorError,
    SymmetryViolationError,
)
from .leads import (
    DampingSample,
    LeadConfig,
    coupling_spectrum,
    damping,
    damping_sample,
    dissipation_matrix,
    fermi,
)
from .model import (
    BdgMatrix,
    Boundary,
    WireConfig,
    build_bdg,
    build_blocks,
    bulk_gap,
    ph_reflection,
)
from .spectrum import (
    EigenMode,
    MajoranaPair,
    ModeClass,
    ModePair,
    classify_modes,
    diagonalize,
    low_energy_couplings,
    majorana_rep,
    pair_modes,
    ph_conjugate,
)
from .transport import (
    ConductanceCurve,
    ConductancePoint,
    Peak,
    PropagatorSample,
    QuadratureSpec,
    TransportResult,
    conductance_sweep,
    differential_conductance,
    propagator,
    steady_current,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Boundary",
    "WireConfig",
    "BdgMatrix",
    "build_blocks",
    "build_bdg",
    "bulk_gap",
    "ph_reflection",
    "ModeClass",
    "EigenMode",
    "ModePair",
    "MajoranaPair",
    "ph_conjugate",
    "diagonalize",
    "pair_modes",
    "classify_modes",
    "majorana_rep",
    "low_energy_couplings",
    "LeadConfig",
    "DampingSample",
    "coupling_spectrum",
    "damping",
    "damping_sample",
    "dissipation_matrix",
    "fermi",
    "PropagatorSample",
    "QuadratureSpec",
    "TransportResult",
    "ConductancePoint",
    "Peak",
    "ConductanceCurve",
    "propagator",
    "steady_current",
    "differential_conductance",
    "conductance_sweep",
    "PoleSum",
    "steady_limit",
    "landauer_oracle",
    "KitaevWireError",
    "ConfigError",
    "NumericalError",
    "EigensolverError",
    "SymmetryViolationError",
    "SingularPropagatorError",
    "QuadratureError",
]
