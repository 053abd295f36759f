"""Positive definiteness and nonnegativity of self-adjoint block matrices
through Schur-complement recursions, with auditable certificates."""

from .blocks import (
    BlockMatrix,
    assemble,
    block_identity,
    flatten,
    make_block_matrix,
    partition_first,
    partition_second,
    quadratic_form,
    scalar_blocks,
)
from .errors import (
    AsymmetricInput,
    NoConvergence,
    NonFinite,
    NonFiniteEvaluation,
    NonSquare,
    NotBidiagonal,
    NotSelfAdjoint,
    NumericallySingular,
    OpSignError,
    OrderTooSmall,
    ShapeMismatch,
)
from .extremum import (
    Classification,
    ExtremumReport,
    ProductFunctional,
    check_necessary_3var,
    check_sufficient_2var,
    check_sufficient_3var,
    classify_critical_point,
    classify_hessian,
    example_l2_functional,
    example_l2_hessian,
    gradient_fd,
    hessian_fd,
)
from .linalg import DEFAULT_TOL, Tolerances, invert, is_nn_leaf, is_pd_leaf, sym_eig_min
from .oracle import compare_with_oracle, random_bidiagonal, random_self_adjoint, standard_instance, sweep
from .schur_first import (
    SignCertificate,
    Verdict,
    check_pd,
    count_inequalities,
    enumerate_chains,
    recursion_depth,
    schur_first,
)
from .schur_second import NNCertificate, NNVerdict, check_nn, check_nn_2x2, energy_identity_residual, schur_second
from .small import (
    check_nn_3x3,
    check_pd_3x3,
    check_pd_bidiagonal,
    gen_schur_first_3,
    inverse_sub_blocks_3,
    is_bidiagonal,
)

__version__ = "0.1.0"
