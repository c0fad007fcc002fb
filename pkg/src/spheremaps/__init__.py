"""Rational sphere maps from the unit disk to complex balls.

Verification of the identity system, Gram-matrix invariants and unitary
equivalence, partial normal forms with the low-degree ``G`` and ``J``
families, and explicit homotopies to ``z (+) 0``.
"""

from .automorphisms import BallAutomorphism, DiskAutomorphism, precompose
from .constructions import (
    FourierPair,
    blaschke_factor,
    nonalgebraic_pair,
    random_rational_sphere_map,
    random_sphere_map,
    rational_tensor_step,
    tensor_step,
)
from .errors import (
    ClassificationError,
    DegreeError,
    DimensionError,
    InconsistencyError,
    InfeasibleError,
    NotASphereMapError,
    NotInModuliError,
    NotPSDError,
    PoleError,
    PreconditionError,
    SphereMapError,
    UnsupportedError,
    ValidationError,
)
from .homotopy import (
    HomotopyPath,
    HomotopySegment,
    mobius_identity_path,
    multiply_path,
    pad_swap_path,
    polynomial_to_identity_path,
    rational_to_identity_path,
    verify_path,
)
from .maps import (
    PolynomialSphereMap,
    RationalSphereMap,
    circle_sample_residual,
    degree_gap_check,
    denominator_form,
    evaluate,
    identity_map,
    reduce_lowest_terms,
    upper_traces,
    verify,
    verify_polynomial,
    verify_rational,
)
from .moduli import (
    EquivalenceWitness,
    constraint_residual,
    gram,
    gram_to_map,
    moduli_dimension,
    moduli_tangent_rank,
    sample_moduli,
    star_equivalent,
    unitarily_equivalent,
)
from .normalform import (
    GParams,
    JParams,
    NormalFormMatrix,
    check_normal_structure,
    classify_degree1,
    classify_degree2,
    equivalent_degree1,
    make_G,
    make_J,
    normal_form,
    spherical_normalize_degree1,
)

__version__ = "0.1.0"
