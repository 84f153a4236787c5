"""Exact engine for acyclic quantum cluster algebras.

Subpackages cover: quivers and their framed patterns, quantum torus
arithmetic, seed mutation, the bigraded weight calculus, subrepresentation
counting over prime fields, triangular character bases, and transport of
multiplication relations between exchange patterns sharing a principal
part.
"""

from .errors import QClusterError
from .quiver import (
    IceQuiver,
    Quiver,
    build_quiver,
    cartan_matrix,
    lambda_z,
    path_counts,
    z_pattern,
    z_pattern_square,
)
from .torus import (
    CompatiblePair,
    DoubleTorusContext,
    DoubleTorusElement,
    QLaurent,
    TorusElement,
    WeaklyCompatiblePair,
    check_compatibility,
    exact_divide,
    hat_pi,
    twisted_mul,
)
from .weights import Weight

__all__ = [
    "QClusterError",
    "Quiver",
    "IceQuiver",
    "build_quiver",
    "path_counts",
    "z_pattern",
    "z_pattern_square",
    "lambda_z",
    "cartan_matrix",
    "QLaurent",
    "TorusElement",
    "DoubleTorusElement",
    "DoubleTorusContext",
    "CompatiblePair",
    "WeaklyCompatiblePair",
    "check_compatibility",
    "twisted_mul",
    "exact_divide",
    "hat_pi",
    "Weight",
]

__version__ = "0.1.0"
