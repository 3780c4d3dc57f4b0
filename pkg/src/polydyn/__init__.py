"""Exact degree growth of monomial maps through mixed volumes of rational polytopes."""

from .algebra import (
    AlgebraElement,
    Current,
    dilate,
    eval_current,
    gen,
    graded_part,
    log_class,
    madison_mixed_volume,
    mixed_volume_elements,
    observably_equal,
    projection_valuation,
    pullback,
    pullback_current,
    pushforward,
    pushforward_current,
    vol_functional,
    volume_current,
)
from .dynamics import (
    AsymptoticReport,
    DegreeTable,
    ResonanceError,
    degree,
    degree_table,
    degrees,
    dynamical_degrees,
    entropy,
    invariant_pairing,
    limit_currents,
    resonance,
    thmD_constant,
    thmD_validate,
)
from .linalg import (
    LatticeMatrix,
    RefinementError,
    SplittingError,
    char_poly,
    det,
    eigen_moduli,
    exterior_power,
    invariant_splitting,
    mat_pow,
    sup_norm,
)
from .mixed import (
    box_mixed_volume,
    mixed_volume,
    mixed_volume_pair,
    mixed_volume_polarization,
)
from .polytope import (
    Subspace,
    VPolytope,
    box,
    facets,
    hull,
    linear_image,
    minkowski_sum,
    project,
    scale,
    segment,
    standard_simplex,
    unit_cube,
    volume,
)

__version__ = "0.1.0"
