"""Tubal tensor algebra and the Hot-SVD family of decompositions."""

from .algebra import (TubalMatrix, TubalScalar, TubalTensor, face_wise_product, frobenius_norm,
                      hermitian_transpose, identity_tubal_matrix, inner_product, is_partially_unitary,
                      is_unitary, scalar_tproduct, smallt_transpose, tproduct)
from .errors import (DimensionError, InvalidInputError, InvalidTransformError, NumericalError,
                     RankError, TransformMismatchError, TubalError, UnsupportedTransformError)
from .hotsvd import (HotSvdFactors, check_all_orthogonality, check_ordering, core_mode_ranks,
                     error_bound, error_decomposition, hotsvd, mode_spectra, seq_tr_hotsvd,
                     thin_tsvd_from_hotsvd, tr_hotsvd, truncation_bound)
from .multiway import fold, kron_all, mode_n_product, mode_n_tubal_rank, multi_mode_product, tubal_kron, unfold
from .transform import TransformKind, TransformSpec, apply_along_tubal_axis
from .tsvd import TsvdFactors, multi_rank, t_rank, truncate_tsvd, tsvd

__version__ = "0.1.0"
