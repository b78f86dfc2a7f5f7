"""Exact Chern-number and stability calculus for weighted flags on surface
divisor configurations, with a search for the minimal c2 / norm ratio."""

__version__ = "0.1.0"

from .chern import (
    ChernReport,
    CrossingTable,
    FilteredSystemData,
    c1_cycle,
    c2_local,
    c2_number,
    c2_trivial,
    derive_tables,
    norm_sq,
)
from .errors import (
    BGIViolationError,
    ConvergenceError,
    CoverageError,
    DegenerateDegreeError,
    DimensionMismatchError,
    DocumentParseError,
    DocumentValidationError,
    FiltstabError,
    ImproperSubspaceError,
    InvariantError,
    MissingCrossingTableError,
    NoStableConfigurationError,
    OrderingCollapseError,
    ShapeMismatchError,
    SingularFormError,
    UnbalancedFiltrationError,
)
from .filtration import (
    FilteredConfiguration,
    Filtration,
    GrSpectrum,
    joint_gr_dim,
    joint_multiplicity_table,
    joint_step_multiplicities,
    product,
)
from .linalg import Rat, Subspace, rational_from_string, rational_to_string, span
from .stability import (
    Certainty,
    StabilityVerdict,
    Status,
    candidate_subspaces,
    check_stability,
    parabolic_degree,
)
from .surface import (
    DivisorConfiguration,
    PlaneArrangement,
    blow_up,
    crossing_points,
)
from .upsilon import (
    InnerResult,
    QuadraticPair,
    UpsilonEstimate,
    WeightShape,
    assemble_quadratics,
    canonical_weights,
    inner_minimize,
    outer_search,
    rationalize,
    shape_of,
)

__all__ = [name for name in dir() if not name.startswith("_")]
