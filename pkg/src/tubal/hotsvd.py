"""Higher-order t-SVD of tubal tensors and its truncated variants.

All per-mode work happens in the transform domain.  For real data under the
DFT only the leading ``p // 2 + 1`` slices are decomposed and the rest are
filled in by conjugate symmetry, so real inputs give real factors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (TubalMatrix, TubalTensor, from_hat, hermitian_transpose,
                      identity_tubal_matrix, tproduct, wrap)
from .errors import InvalidInputError, RankError
from .multiway import (fold_array, mode_product_array, multi_mode_product,
                       unfold, unfold_array)
from .tsvd import T_RANK_TOL, TsvdFactors, slice_singular_values, slice_svd, spectrum_norms

ORDERING_SLACK = 1e-10
NORM_MATCH_RTOL = 1e-8


@dataclass(frozen=True, eq=False)
class HotSvdFactors:
    """Core tensor and factor matrices with ``A ~= S *_0 U_0 *_1 U_1 ... *_{N-1} U_{N-1}``.

    Attributes
    ----------
    core : TubalTensor
        Core of size ``I_0' x ... x I_{N-1}'``.
    factors : tuple of TubalMatrix
        ``U_n`` of size ``I_n x I_n'``.
    slice_norms_per_mode : tuple of ndarray
        ``sigma^(n)``, the diagonal tube norms from the t-SVD of the mode-``n``
        unfolding, padded with zeros to length ``I_n``.  For the sequential
        algorithm these come from the unfolding of the partially truncated
        core at the moment mode ``n`` was processed.
    truncation : tuple of int or None
        Requested core sizes, ``None`` for the full decomposition.
    processing_order : tuple of int or None
        Mode order used by the sequential algorithm.
    algorithm : str
    """

    core: TubalTensor
    factors: tuple
    slice_norms_per_mode: tuple
    truncation: tuple | None = None
    processing_order: tuple | None = None
    algorithm: str = "hotsvd"

    @property
    def is_full(self) -> bool:
        return all(U.shape[0] == U.shape[1] for U in self.factors)

    @property
    def ranks(self) -> tuple:
        return tuple(U.shape[1] for U in self.factors)

    def reconstruct(self) -> TubalTensor:
        """``S *_0 U_0 ... *_{N-1} U_{N-1}``."""
        return multi_mode_product(self.core, self.factors)


def _prepare(A: TubalTensor):
    if not np.all(np.isfinite(A.entries)):
        raise InvalidInputError("input has non-finite entries")
    spec = A.transform
    real = A.is_real and spec.preserves_real
    w = spec.spectral_width(real)
    return spec, real, np.asarray(A.hat[..., :w])


def _check_ranks(ranks, dims) -> tuple:
    if ranks is None:
        return tuple(dims)
    ranks = tuple(ranks)
    if len(ranks) != len(dims):
        raise RankError(f"need {len(dims)} truncation ranks, got {len(ranks)}")
    out = []
    for n, (r, d) in enumerate(zip(ranks, dims)):
        if int(r) != r or not 1 <= r <= d:
            raise RankError(f"rank {r!r} for mode {n} must lie in [1, {d}]")
        out.append(int(r))
    return tuple(out)


def _padded_norms(s: np.ndarray, size: int, spec) -> np.ndarray:
    norms = spectrum_norms(s, spec)
    return np.concatenate([norms, np.zeros(size - norms.size)])


def _left_factor(hat, n, spec, real, rank):
    # leading columns of the left unitary factor of the mode-n unfolding
    u, s, _ = slice_svd(unfold_array(hat, n), spec, real, full=False, compute_v=False)
    return u[:, :rank], _padded_norms(s, hat.shape[n], spec)


def _factor(u_hat, spec, real) -> TubalMatrix:
    return from_hat(spec.complete_spectrum(u_hat), spec, real, scale=1.0)


def _adjoint(u_hat):
    return np.conj(np.swapaxes(u_hat, 0, 1))


def _project(A, hat, spec, real, ranks, algorithm):
    facs, norms = [], []
    for n, r in enumerate(ranks):
        u, sig = _left_factor(hat, n, spec, real, r)
        facs.append(u)
        norms.append(sig)
    core = hat
    for n, u in enumerate(facs):
        core = mode_product_array(core, _adjoint(u), n)
    core = from_hat(spec.complete_spectrum(core), spec, real, scale=np.linalg.norm(A.hat))
    return HotSvdFactors(core, tuple(_factor(u, spec, real) for u in facs), tuple(norms),
                         truncation=None if algorithm == "hotsvd" else ranks,
                         algorithm=algorithm)


def hotsvd(A: TubalTensor) -> HotSvdFactors:
    """Full higher-order t-SVD.

    ``U_n`` is the left unitary factor of the t-SVD of ``unfold(A, n)`` and
    ``S = A *_0 U_0^H ... *_{N-1} U_{N-1}^H``.

    Raises
    ------
    InvalidInputError
        If ``A`` has non-finite entries.
    """
    spec, real, hat = _prepare(A)
    return _project(A, hat, spec, real, A.shape, "hotsvd")


def tr_hotsvd(A: TubalTensor, ranks) -> HotSvdFactors:
    """Truncated Hot-SVD: keep the leading ``ranks[n]`` left singular tubal vectors per mode."""
    ranks = _check_ranks(ranks, A.shape)
    spec, real, hat = _prepare(A)
    return _project(A, hat, spec, real, ranks, "tr")


def seq_tr_hotsvd(A: TubalTensor, ranks, order=None) -> HotSvdFactors:
    """Sequentially truncated Hot-SVD.

    Modes are processed in ``order`` (0-based permutation, identity by
    default).  After each t-SVD the current core is replaced by
    ``Sigma_hat * V_hat^H``, which equals ``U_hat^H`` times the current
    unfolding, so later modes work on a smaller tensor.
    """
    ranks = _check_ranks(ranks, A.shape)
    N = A.order
    order = tuple(range(N)) if order is None else tuple(order)
    if sorted(order) != list(range(N)):
        raise InvalidInputError(f"processing order {order} is not a permutation of 0..{N - 1}")
    spec, real, hat = _prepare(A)
    dims = list(A.shape)
    facs, norms = [None] * N, [None] * N
    current = hat
    for n in order:
        mat = unfold_array(current, n)
        r = ranks[n]
        k = min(mat.shape[:2])
        if r <= k:
            u, s, v = slice_svd(mat, spec, real, full=False, compute_v=True)
            new = s[:r, None, :] * _adjoint(v[:, :r])
        else:
            # more columns requested than the unfolding has singular values
            u, s, _ = slice_svd(mat, spec, real, full=False, compute_v=False)
            new = np.matmul(np.moveaxis(_adjoint(u[:, :r]), -1, 0),
                            np.moveaxis(mat, -1, 0))
            new = np.moveaxis(new, 0, -1)
        facs[n] = u[:, :r]
        norms[n] = _padded_norms(s, dims[n], spec)
        dims[n] = r
        current = fold_array(new, n, dims)
    core = from_hat(spec.complete_spectrum(current), spec, real, scale=np.linalg.norm(A.hat))
    return HotSvdFactors(core, tuple(_factor(u, spec, real) for u in facs), tuple(norms),
                         truncation=ranks, processing_order=order, algorithm="seq-tr")


def _tail_bound(norms, ranks) -> float:
    return float(np.sqrt(sum(np.sum(np.asarray(sig[r:]) ** 2) for sig, r in zip(norms, ranks))))


def error_bound(F: HotSvdFactors) -> float:
    """``sqrt(sum_n sum_{i >= I_n'} (sigma^(n)_i)^2)`` from the stored spectra.

    For the sequential algorithm the stored spectra belong to the shrinking
    core, and the value equals the approximation error up to roundoff.
    """
    return _tail_bound(F.slice_norms_per_mode, F.ranks)


def mode_spectra(A: TubalTensor) -> list:
    """``sigma^(n)`` of every mode-``n`` unfolding of ``A``."""
    spec, real, hat = _prepare(A)
    return [_padded_norms(slice_singular_values(unfold_array(hat, n), spec, real), A.shape[n], spec)
            for n in range(A.order)]


def truncation_bound(A: TubalTensor, ranks) -> float:
    """Error bound for core sizes ``ranks`` computed from the spectra of ``A`` itself.

    Valid for both the one-shot and the sequential truncation.
    """
    A.transform.require_scaled_unitary("the truncation error bound")
    ranks = _check_ranks(ranks, A.shape)
    return _tail_bound(mode_spectra(A), ranks)


def _mode_slice_norms(core: TubalTensor, n: int) -> np.ndarray:
    return np.linalg.norm(unfold_array(core.entries, n).reshape(core.shape[n], -1), axis=1)


def check_all_orthogonality(F: HotSvdFactors) -> float:
    """Largest norm of ``sum S(..., a, ...)^H * S(..., b, ...)`` over modes and ``a != b``.

    The sum runs over all indices other than mode ``n``; each term is a
    tubal scalar and the result is its Frobenius norm.
    """
    core = F.core
    spec = core.transform
    worst = 0.0
    for n in range(core.order):
        m = np.moveaxis(unfold_array(core.hat, n), -1, 0)
        # entry (a, b) of slice s: sum over other indices of conj(S_a) S_b
        gram = np.matmul(np.conj(m), np.swapaxes(m, 1, 2))
        size = gram.shape[1]
        if size < 2:
            continue
        off = ~np.eye(size, dtype=bool)
        tubes = spec.inverse(np.moveaxis(gram, 0, -1)[off])
        worst = max(worst, float(np.max(np.linalg.norm(tubes, axis=-1))))
    return worst


def check_ordering(F: HotSvdFactors) -> bool:
    """Whether the core slice norms are nonincreasing in every mode and match ``sigma^(n)``."""
    F.core.transform.require_scaled_unitary("the ordering property")
    if not F.is_full:
        raise RankError("ordering is only defined for the untruncated decomposition")
    total = F.core.norm()
    for n in range(F.core.order):
        norms = _mode_slice_norms(F.core, n)
        if np.any(np.diff(norms) > ORDERING_SLACK * max(total, 1.0)):
            return False
        if not np.allclose(norms, F.slice_norms_per_mode[n], rtol=NORM_MATCH_RTOL,
                           atol=NORM_MATCH_RTOL * total):
            return False
    return True


def core_mode_ranks(F: HotSvdFactors, tol: float = T_RANK_TOL) -> tuple:
    """Per mode, the highest index whose core slice norm exceeds ``tol * ||S||``."""
    total = F.core.norm()
    out = []
    for n in range(F.core.order):
        big = np.nonzero(_mode_slice_norms(F.core, n) > tol * total)[0]
        out.append(int(big[-1]) + 1 if big.size else 0)
    return tuple(out)


def _projector(U: TubalMatrix) -> TubalMatrix:
    return tproduct(U, hermitian_transpose(U))


def error_decomposition(A: TubalTensor, factors) -> np.ndarray:
    """Norms of the mutually orthogonal pieces of ``A - A *_0 P_0 ... *_{N-1} P_{N-1}``.

    With ``P_k = U_k * U_k^H``, piece ``n`` is
    ``A *_0 P_0 ... *_{n-1} P_{n-1} *_n (I - P_n)``; the squared norms sum
    to the squared approximation error when every ``U_k`` is partially unitary.
    """
    factors = list(factors)
    if len(factors) != A.order:
        raise RankError(f"need {A.order} factors, got {len(factors)}")
    terms = []
    running = A
    for n, U in enumerate(factors):
        P = _projector(U)
        comp = identity_tubal_matrix(U.shape[0], U.transform) - P
        terms.append(multi_mode_product(running, [comp], [n]).norm())
        running = multi_mode_product(running, [P], [n])
    return np.array(terms)


def thin_tsvd_from_hotsvd(F: HotSvdFactors, n: int, tol: float = T_RANK_TOL) -> TsvdFactors:
    """Thin t-SVD of ``unfold(A, n)`` assembled from a full Hot-SVD.

    ``Sigma`` is diagonal with entries ``sigma_a * 1`` where ``sigma_a`` is
    the norm of core row ``a``; the rows of ``V^H`` are those of
    ``unfold(S *_{m != n} U_m, n)`` divided by ``sigma_a``.  They are
    mutually orthogonal but in general not of unit norm.  Rows with
    ``sigma_a <= tol * sigma_0`` are dropped.
    """
    if not F.is_full:
        raise RankError("a thin t-SVD needs the untruncated decomposition")
    core = F.core
    spec = core.transform
    others = [m for m in range(core.order) if m != n]
    mixed = multi_mode_product(core, [F.factors[m] for m in others], others)
    rows = unfold(mixed, n).entries
    sig = _mode_slice_norms(core, n)
    keep = int(np.count_nonzero(sig > tol * sig.max())) if sig.size and sig.max() > 0 else 0
    sig = sig[:keep]
    one = spec.identity_fiber()
    S = np.zeros((keep, keep, spec.p), dtype=one.dtype)
    S[np.arange(keep), np.arange(keep)] = sig[:, None] * one
    Vh = wrap(rows[:keep] / sig[:, None, None], spec)
    U = TubalMatrix(F.factors[n].entries[:, :keep], spec)
    return TsvdFactors(U, TubalMatrix(S, spec), hermitian_transpose(Vh), sig)


__all__ = [
    "HotSvdFactors", "hotsvd", "tr_hotsvd", "seq_tr_hotsvd", "error_bound", "mode_spectra",
    "truncation_bound", "check_all_orthogonality", "check_ordering", "core_mode_ranks",
    "error_decomposition", "thin_tsvd_from_hotsvd",
]
