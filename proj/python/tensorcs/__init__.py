"""Mode-wise compressed sensing of sparse tensors.

Tensors are numpy arrays; they are passed to the core in Fortran order so
the first index varies fastest, matching the C++ layout.
"""

from ._core import (
    PSNR_CAP,
    BudgetExceeded,
    ContractMismatch,
    IoError,
    NumericalFailure,
    __version__,
    add_noise,
    c2_constant,
    check_nsp_exhaustive,
    dct_forward,
    dct_inverse,
    dct_matrix,
    dct_sparsify,
    fold,
    generate_ensemble,
    kcs_required_bytes,
    kronecker_chain,
    mode_product,
    oracle_solve,
    plan_measurements,
    psnr,
    recover,
    sample,
    solve_bp,
    solve_bpdn,
    svd,
    unfold,
    weak_tucker_decompose,
)

METHODS = ("csm_s", "csm_p", "gtcs_s", "gtcs_p", "kcs")

__all__ = [
    "METHODS",
    "PSNR_CAP",
    "BudgetExceeded",
    "ContractMismatch",
    "IoError",
    "NumericalFailure",
    "__version__",
    "add_noise",
    "c2_constant",
    "check_nsp_exhaustive",
    "dct_forward",
    "dct_inverse",
    "dct_matrix",
    "dct_sparsify",
    "fold",
    "generate_ensemble",
    "kcs_required_bytes",
    "kronecker_chain",
    "mode_product",
    "oracle_solve",
    "plan_measurements",
    "psnr",
    "recover",
    "sample",
    "solve_bp",
    "solve_bpdn",
    "svd",
    "unfold",
    "weak_tucker_decompose",
]
