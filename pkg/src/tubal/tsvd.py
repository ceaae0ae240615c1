"""t-SVD of tubal matrices, its truncation, and the two tubal rank notions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import TubalMatrix, from_hat, hermitian_transpose, tproduct
from .errors import InvalidInputError, RankError
from .transform import TransformSpec

T_RANK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class TsvdFactors:
    """Factorization ``A = U * S * V^H``.

    ``slice_norms[i]`` is the Frobenius norm of the diagonal tubal scalar
    ``S(i, i)``. ``spectrum`` holds the transform-domain singular values,
    shape ``(min(I, J), p)``; it is ``None`` for factorizations that were
    not produced slice by slice.
    """

    U: TubalMatrix
    S: TubalMatrix
    V: TubalMatrix
    slice_norms: np.ndarray
    spectrum: np.ndarray | None = None

    def reconstruct(self) -> TubalMatrix:
        return tproduct(tproduct(self.U, self.S), hermitian_transpose(self.V))


def slice_svd(mat_hat: np.ndarray, spec: TransformSpec, real: bool, *,
              full: bool = True, compute_v: bool = True):
    """SVD of every transform-domain frontal slice of ``mat_hat``.

    ``mat_hat`` has shape ``(I, J, w)`` where ``w`` is either ``p`` or, for
    real data under the DFT, ``spec.spectral_width(True)``; only the given
    slices are decomposed.  Within each slice every left singular vector is
    rotated so that its largest-magnitude entry is real and positive, and
    the matching right vector receives the same rotation.

    Returns
    -------
    U : ndarray, shape ``(I, I or k, w)``
    s : ndarray, shape ``(k, w)`` with ``k = min(I, J)``, nonincreasing per slice
    V : ndarray, shape ``(J, J or k, w)``, or None
    """
    rows, cols, w = mat_hat.shape
    k = min(rows, cols)
    stack = np.moveaxis(mat_hat, -1, 0)
    self_conjugate = _self_conjugate_slices(spec, real, w)
    need_full = full or rows > cols
    u_all = np.empty((w, rows, rows if need_full else k), dtype=complex)
    s_all = np.empty((w, k))
    v_all = np.empty((w, cols, cols if (full and compute_v) else k), dtype=complex) if compute_v else None
    groups = [(self_conjugate, True), (~self_conjugate, False)]
    for mask, as_real in groups:
        if not mask.any():
            continue
        block = stack[mask].real if as_real else stack[mask]
        if compute_v:
            u, s, vh = np.linalg.svd(block, full_matrices=need_full)
            v = np.conj(np.swapaxes(vh, -1, -2))
            v_all[mask] = v[:, :, :v_all.shape[2]]
        else:
            u, s, _ = np.linalg.svd(block, full_matrices=need_full)
        u_all[mask] = u
        s_all[mask] = s
    _fix_phases(u_all, v_all, k)
    u_out = np.moveaxis(u_all, 0, -1)
    s_out = np.moveaxis(s_all, 0, -1)
    v_out = np.moveaxis(v_all, 0, -1) if compute_v else None
    return u_out, s_out, v_out


def slice_singular_values(mat_hat: np.ndarray, spec: TransformSpec, real: bool) -> np.ndarray:
    """Singular values only, shape ``(min(I, J), w)``."""
    w = mat_hat.shape[-1]
    stack = np.moveaxis(mat_hat, -1, 0)
    mask = _self_conjugate_slices(spec, real, w)
    k = min(mat_hat.shape[:2])
    s_all = np.empty((w, k))
    if mask.any():
        s_all[mask] = np.linalg.svd(stack[mask].real, compute_uv=False)
    if (~mask).any():
        s_all[~mask] = np.linalg.svd(stack[~mask], compute_uv=False)
    return s_all.T


def _self_conjugate_slices(spec: TransformSpec, real: bool, w: int) -> np.ndarray:
    # slices whose transform-domain data is real for real input
    mask = np.zeros(w, dtype=bool)
    if not real:
        return mask
    if spec.kind.value != "dft":
        mask[:] = True
        return mask
    mask[0] = True
    if spec.p % 2 == 0 and w > spec.p // 2:
        mask[spec.p // 2] = True
    return mask


def _fix_phases(u: np.ndarray, v: np.ndarray | None, k: int) -> None:
    idx = np.argmax(np.abs(u), axis=1)[:, None, :]
    pivot = np.take_along_axis(u, idx, axis=1)
    mag = np.abs(pivot)
    phase = np.where(mag > 0, pivot / np.where(mag > 0, mag, 1.0), 1.0)
    u *= np.conj(phase)
    if v is not None:
        v[:, :, :k] *= np.conj(phase[:, :, :k])


def spectrum_norms(s_hat: np.ndarray, spec: TransformSpec) -> np.ndarray:
    """Frobenius norms of the tubal scalars whose transforms are the rows of ``s_hat``."""
    full = spec.complete_spectrum(s_hat.astype(complex))
    if spec.is_scaled_unitary:
        return np.linalg.norm(full, axis=-1) / spec.c_magnitude
    return np.linalg.norm(spec.inverse(full), axis=-1)


def tsvd(A: TubalMatrix) -> TsvdFactors:
    """Full t-SVD: transform, per-slice SVD, inverse transform."""
    if not np.all(np.isfinite(A.entries)):
        raise InvalidInputError("t-SVD input has non-finite entries")
    spec = A.transform
    real = A.is_real and spec.preserves_real
    rows, cols = A.shape
    w = spec.spectral_width(real)
    u, s, v = slice_svd(A.hat[..., :w], spec, real, full=True)
    k = min(rows, cols)
    s_mat = np.zeros((rows, cols, w), dtype=complex)
    s_mat[np.arange(k), np.arange(k), :] = s
    scale = np.linalg.norm(A.hat)
    U = from_hat(spec.complete_spectrum(u), spec, real, scale=1.0)
    S = from_hat(spec.complete_spectrum(s_mat), spec, real, scale=scale)
    V = from_hat(spec.complete_spectrum(v), spec, real, scale=1.0)
    full_s = spec.complete_spectrum(s.astype(complex)).real
    return TsvdFactors(U, S, V, np.linalg.norm(S.entries[np.arange(k), np.arange(k), :], axis=-1),
                       full_s)


def t_rank(F: TsvdFactors, tol: float = T_RANK_TOL) -> int:
    """Number of diagonal tubal scalars with norm above ``tol * sigma_1``."""
    sig = np.asarray(F.slice_norms)
    if sig.size == 0 or sig.max() == 0:
        return 0
    return int(np.count_nonzero(sig > tol * sig.max()))


def multi_rank(A: TubalMatrix) -> np.ndarray:
    """Numerical rank of each transform-domain frontal slice."""
    s = slice_singular_values(A.hat, A.transform, real=False)
    top = s.max(axis=0) if s.size else np.zeros(A.p)
    thresh = max(A.shape) * np.finfo(float).eps * top
    return np.count_nonzero(s > thresh[None, :], axis=0).astype(int)


def truncate_tsvd(F: TsvdFactors, k: int) -> TubalMatrix:
    """Best t-rank-``k`` approximation ``sum_{i<k} U(:,i) * S(i,i) * V(:,i)^H``."""
    spec = F.U.transform
    spec.require_scaled_unitary("t-SVD truncation optimality")
    kmax = min(F.S.shape)
    if not 1 <= k <= kmax:
        raise RankError(f"truncation rank must lie in [1, {kmax}], got {k}")
    U = TubalMatrix(F.U.entries[:, :k], spec)
    S = TubalMatrix(F.S.entries[:k, :k], spec)
    V = TubalMatrix(F.V.entries[:, :k], spec)
    return tproduct(tproduct(U, S), hermitian_transpose(V))
