"""Prefactorization algebras valued in finite-dimensional rational vector spaces."""
from .algebra import (Algebra, Bimodule, LeftModule, RightModule, bar_relative_tensor, circle_sections,
                      commutator_quotient, diagonal, enveloping, from_structure_constants, ground_field,
                      matrix_algebra, random_left_module, random_right_module, regular_bimodule,
                      regular_left, regular_right, tensor_algebras, tensor_bimodule, truncated_poly,
                      upper_triangular, zoo)
from .checks import (CheckReport, check_constructible, check_locally_constructible, check_multiplicativity,
                     check_weiss_descent_chain, check_weiss_descent_finite, evaluate_on_family,
                     evaluate_on_precover)
from .cone import (ConeAlgebra, ConeData, assemble, collapse_data, cone_transform, cone_universe, decompose,
                   from_bimodule_data, radial_pushforward, random_cone_data)
from .constructors import BimoduleAlgebra, IntervalAlgebra, from_bimodule, from_interval_algebra
from .core import (ComponentwiseAlg, FunctionalAlg, PreFactAlg, TableAlg, coherence_sweep, materialize,
                   operations, same_algebra)
from .extend import (add_empty, check_decomposition_independence, extend_disjoint_completion,
                     extend_from_basis, glue_from_cover, strip_empty)
from .sections import circle_sections_via_pushforward, glue_setup, glued_interval_sections
from .transport import disjoint_sum, pushforward, restrict, tensor_product


def transport(f, mode: str, arg, universe=None):
    """``restrict`` to an open or sub-universe, or ``pushforward`` along a map."""
    if mode == "restrict":
        return restrict(f, arg)
    if mode == "pushforward":
        return pushforward(f, arg, universe)
    raise ValueError(f"unknown transport mode {mode!r}")
