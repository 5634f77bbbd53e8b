"""Exact classifying-spectral-sequence engine for finite-dimensional Lie algebras.

Builds the bigraded dga E_0 = Lambda(g*) (x) k[g*] of a Lie algebra g
from its structure constants, computes Lie algebra cohomology
H*(g, S^s(ad*)) per Hodge degree over Z, Q or F_p, runs the spectral
sequence to its stable page, detects integral torsion primes, and
mechanically verifies the mod-p structure of the sl2 complex.
"""

from .rings import ZZ, QQ, GF, Ring, parse_ring
from .linalg import SparseMatrix, rank, rank_and_kernel, solve
from .smith import (CohomologyGroup, CompositionError, SmithForm,
                    cohomology_at, integer_kernel_basis, smith_normal_form)
from .algebra import (BilinearForm, InvariantPolynomial, LieAlgebra, abelian,
                      builtin, direct_sum, jacobi_check, killing_form,
                      nonabelian2, sigma_invariant, sl, so, sp)
from .koszul import (BasisElement, CochainBlock, KoszulComplex, block_basis,
                     build_d0, build_d1, weight_of)

__version__ = "0.1.0"
