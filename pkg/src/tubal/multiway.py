"""Unfolding, folding, n-mode products and the tubal Kronecker product.

Modes are numbered from 0.  The mode-``n`` unfolding places entry
``(i_0, ..., i_{N-1})`` in column ``sum_{k != n} i_k * prod_{m < k, m != n} I_m``,
i.e. the lowest remaining mode varies fastest.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

from .algebra import (TubalMatrix, TubalTensor, _check_same_transform, _real_result,
                      from_hat, wrap)
from .errors import DimensionError
from .tsvd import T_RANK_TOL, t_rank, tsvd


def _check_mode(n: int, order: int) -> int:
    if not 0 <= n < order:
        raise DimensionError(f"mode {n} out of range for an order-{order} tubal tensor")
    return n


def unfold_array(data: np.ndarray, n: int) -> np.ndarray:
    """Mode-``n`` unfolding of a raw ``(I_0, ..., I_{N-1}, p)`` array."""
    order = data.ndim - 1
    rest = [k for k in range(order) if k != n]
    # reversing the remaining modes makes a C-order reshape put the lowest mode fastest
    moved = np.transpose(data, [n] + rest[::-1] + [order])
    return moved.reshape(data.shape[n], -1, data.shape[-1])


def fold_array(mat: np.ndarray, n: int, dims) -> np.ndarray:
    """Inverse of :func:`unfold_array` for target sizes ``dims`` (tubal axis excluded)."""
    dims = tuple(int(d) for d in dims)
    order = len(dims)
    rest = [k for k in range(order) if k != n]
    moved_shape = (dims[n],) + tuple(dims[k] for k in rest[::-1]) + (mat.shape[-1],)
    if mat.shape[:2] != (dims[n], int(np.prod([dims[k] for k in rest], dtype=int))):
        raise DimensionError(f"matrix of shape {mat.shape[:2]} does not fold into {dims} along mode {n}")
    moved = mat.reshape(moved_shape)
    perm = [n] + rest[::-1] + [order]
    return np.transpose(moved, np.argsort(perm))


def mode_product_array(data: np.ndarray, mat: np.ndarray, n: int) -> np.ndarray:
    """Slice-wise mode-``n`` product: ``out[..., j, ..., s] = sum_i mat[j, i, s] data[..., i, ..., s]``."""
    if mat.shape[1] != data.shape[n]:
        raise DimensionError(f"factor with {mat.shape[1]} columns cannot act on mode {n} of size {data.shape[n]}")
    x = np.moveaxis(data, [data.ndim - 1, n], [0, data.ndim - 1])
    lead = x.shape[:-1]
    x = x.reshape(x.shape[0], -1, x.shape[-1])
    y = np.matmul(x, np.transpose(mat, (2, 1, 0)))
    y = y.reshape(lead + (mat.shape[0],))
    return np.moveaxis(y, [0, data.ndim - 1], [data.ndim - 1, n])


def unfold(A: TubalTensor, n: int) -> TubalMatrix:
    """Mode-``n`` unfolding ``A_(n)``, a tubal matrix ``I_n x prod_{k != n} I_k``."""
    _check_mode(n, A.order)
    return TubalMatrix(unfold_array(A.entries, n), A.transform)


def fold(M: TubalMatrix, n: int, dims) -> TubalTensor:
    """Rebuild the tubal tensor of sizes ``dims`` whose mode-``n`` unfolding is ``M``."""
    _check_mode(n, len(dims))
    return wrap(fold_array(M.entries, n, dims), M.transform)


def mode_n_product(A: TubalTensor, U: TubalMatrix, n: int) -> TubalTensor:
    """``A *_n U``: t-product of ``U`` with every mode-``n`` tube vector of ``A``."""
    _check_mode(n, A.order)
    _check_same_transform(A, U)
    hat = mode_product_array(A.hat, U.hat, n)
    return from_hat(hat, A.transform, _real_result(A, U),
                    scale=np.linalg.norm(A.hat) * np.linalg.norm(U.hat))


def multi_mode_product(A: TubalTensor, factors, modes=None) -> TubalTensor:
    """Apply ``A *_{m_0} F_0 *_{m_1} F_1 ...`` in the transform domain, inverting once."""
    modes = range(len(factors)) if modes is None else modes
    hat = A.hat
    real = A.is_real
    scale = np.linalg.norm(hat)
    for F, m in zip(factors, modes):
        _check_same_transform(A, F)
        _check_mode(m, A.order)
        hat = mode_product_array(hat, F.hat, m)
        real = real and F.is_real
        scale *= np.linalg.norm(F.hat)
    return from_hat(hat, A.transform, real and A.transform.preserves_real, scale=scale)


def tubal_kron(A: TubalMatrix, B: TubalMatrix) -> TubalMatrix:
    """Tubal Kronecker product ``A (x)_t B`` of size ``IK x JL``.

    Entry ``(i*K + k, j*L + l)`` (0-based) is the tubal scalar ``A(i,j) * B(k,l)``,
    so the right factor's indices vary fastest.
    """
    _check_same_transform(A, B)
    I, J = A.shape
    K, L = B.shape
    hat = np.einsum("ijs,kls->ikjls", A.hat, B.hat).reshape(I * K, J * L, A.p)
    return from_hat(hat, A.transform, _real_result(A, B),
                    scale=np.linalg.norm(A.hat) * np.linalg.norm(B.hat))


def kron_all(mats) -> TubalMatrix:
    """Left fold of :func:`tubal_kron` over ``mats`` (first factor outermost)."""
    mats = list(mats)
    if not mats:
        raise ValueError("need at least one factor")
    return reduce(tubal_kron, mats)


def mode_n_tubal_rank(A: TubalTensor, n: int, tol: float = T_RANK_TOL) -> int:
    """t-rank of the mode-``n`` unfolding."""
    return t_rank(tsvd(unfold(A, n)), tol)
