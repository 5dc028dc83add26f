"""Decide when idempotent Fourier multipliers are contractive on Hardy spaces of the torus."""
from .errors import InputError, ResourceError
from .extensions import (
    Budget,
    ClosureResult,
    ExtensionCertificate,
    PExponent,
    Verdict,
    complete,
    distance,
    extend,
    extension_certificate,
    find_positive_direction,
    is_coset_restriction,
    is_contractive_projection_set,
    linear_reflection,
    negativity_index,
    restriction_property,
    triangular_reflection,
)
from .indices import FreqSet, MultiIndex, freqset
from .laurent import LaurentPoly
from .lattice import (
    AffineLattice,
    AnnihilatorDecomposition,
    EnumerationResult,
    affine_lattice,
    annihilator,
    annihilator_average,
    contains,
    direction_cone_trivial,
    enumerate_orthant,
    reflection_gcd,
)
from .polyoracle import WitnessReport, even_norm, extension_support_oracle, shapiro_pairing, witness_search_even

__version__ = "0.1.0"
