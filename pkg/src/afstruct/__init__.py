"""Induced (a,1)f structures on spheres and products of spheres.

The ambient space E^(2p+q) carries an orthogonal involution; decomposing it
along a submanifold's tangent and normal spaces yields the induced tensor
``P``, 1-forms ``u_a``, vector fields ``xi_a`` and the matrix ``a``.
"""
from .errors import InvalidInputError
from .geometry import (
    BlockSwap,
    GenericInvolution,
    ValidationResult,
    apply_structure,
    inner_product,
    validate_structure,
)
from .submanifolds import (
    Hypersphere,
    ManifoldPoint,
    ProductOfSpheres,
    TangentVector,
    contains,
    normal_frame,
    project_tangent,
    sample_point,
    sample_tangent,
)
from .induction import (
    InducedStructure,
    apply_induced_P,
    chain_induce,
    compare_structures,
    evaluate_u,
    induce_at_point,
    perturb,
)

__version__ = "0.1.0"

__all__ = [
    "InvalidInputError",
    "BlockSwap",
    "GenericInvolution",
    "ValidationResult",
    "apply_structure",
    "inner_product",
    "validate_structure",
    "Hypersphere",
    "ManifoldPoint",
    "ProductOfSpheres",
    "TangentVector",
    "contains",
    "normal_frame",
    "project_tangent",
    "sample_point",
    "sample_tangent",
    "InducedStructure",
    "apply_induced_P",
    "chain_induce",
    "compare_structures",
    "evaluate_u",
    "induce_at_point",
    "perturb",
]
