"""hbar-deformed Schubert calculus on type-A partial flag varieties.

Exact weight-function representatives of CSM and motivic Chern classes,
numeric elliptic classes, their orthogonality relations, and
Littlewood-Richardson-type structure constants.
"""

from .flags import (FlagShape, IndexTuple, Permutation, act, dim_cell,
                    enumerate_tuples, j_invariant, neighbor_pairs, p_invariant,
                    partition_to_subset, subset_to_partition)
from .scalars import (HBAR, DenomFactor, FactoredRational, MultiPoly, PoleError,
                      Var, VarSpace, divide_exact, muvar, tvar, zvar)
from .weights import (GKMTuple, Theory, class_tuple, fund_U, fund_W, gkm_check,
                      space_for, weight_U, weight_W_restriction)
from .elliptic import (EllipticContext, Mono, NearPole, NonConvergence, delta,
                       elliptic_class_tuple, elliptic_weight_restriction,
                       fay_residual, generic_context, gkm_check_numeric,
                       removable_limit, theta, theta_prime_1)
from .pairing import DenomPair, denoms, dual_class, inner, iota, max_deviation, \
    orthogonality_check, tau
from .structure import (LRTable, NonPolynomial, elliptic_pn_closed_form,
                        expand_product, lr_coefficient, pn_shape, pn_tuple,
                        render_table, specialize_nonequivariant)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
