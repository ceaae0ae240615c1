"""Tubal scalars, tubal matrices and tubal tensors under a transform ``L``.

Every object stores its entries as a numpy array with the tubal axis last:
a tubal scalar has shape ``(p,)``, a tubal matrix ``(I, J, p)`` and an
order-``N`` tubal tensor ``(I_1, ..., I_N, p)``.  Products are evaluated in
the transform domain, where they become slice-by-slice matrix products.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from numbers import Number

import numpy as np

from .errors import DimensionError, TransformMismatchError
from .transform import TransformSpec

STRUCTURAL_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class TubalTensor:
    """Order-``N`` array of tubal scalars.

    Parameters
    ----------
    entries : array_like
        Data of shape ``(I_1, ..., I_N, p)``.
    transform : TransformSpec
        The transform defining the product; its length must equal ``p``.
    """

    entries: np.ndarray
    transform: TransformSpec

    def __post_init__(self):
        data = np.array(self.entries)
        if not np.issubdtype(data.dtype, np.number):
            raise TypeError(f"tubal entries must be numeric, got {data.dtype}")
        if not np.iscomplexobj(data):
            data = data.astype(float)
        if data.ndim == 0 or data.shape[-1] != self.transform.p:
            raise DimensionError(
                f"last axis must have the tubal length {self.transform.p}, got shape {data.shape}")
        data.setflags(write=False)
        object.__setattr__(self, "entries", data)

    @classmethod
    def from_array(cls, data, transform: TransformSpec | None = None):
        """Wrap ``data`` using the DFT of the last-axis length unless told otherwise."""
        data = np.asarray(data)
        if transform is None:
            transform = TransformSpec.dft(data.shape[-1])
        return cls(data, transform)

    @property
    def order(self) -> int:
        return self.entries.ndim - 1

    @property
    def shape(self) -> tuple[int, ...]:
        return self.entries.shape[:-1]

    @property
    def p(self) -> int:
        return self.transform.p

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.entries)

    @cached_property
    def hat(self) -> np.ndarray:
        """Entries after applying ``L`` to every tube (read-only)."""
        out = self.transform.forward(self.entries)
        out.setflags(write=False)
        return out

    def norm(self) -> float:
        return frobenius_norm(self)

    def _binary(self, other, op):
        if isinstance(other, TubalTensor):
            _check_same_transform(self, other)
            if self.shape != other.shape:
                raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")
            return wrap(op(self.entries, other.entries), self.transform)
        return NotImplemented

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __neg__(self):
        return wrap(-self.entries, self.transform)

    def __mul__(self, other):
        if isinstance(other, Number):
            return wrap(self.entries * other, self.transform)
        return NotImplemented

    __rmul__ = __mul__

    def __repr__(self) -> str:
        kind = type(self).__name__
        return f"{kind}(shape={self.shape}, p={self.p}, kind={self.transform.kind.value})"


class TubalMatrix(TubalTensor):
    """Tubal tensor of order two, i.e. a third-order array ``I x J x p``."""

    def __post_init__(self):
        super().__post_init__()
        if self.entries.ndim != 3:
            raise DimensionError(f"a tubal matrix needs a 3-d array, got {self.entries.ndim}-d")

    @property
    def H(self) -> TubalMatrix:
        return hermitian_transpose(self)

    @property
    def t(self) -> TubalMatrix:
        return smallt_transpose(self)

    def __matmul__(self, other):
        if isinstance(other, TubalMatrix):
            return tproduct(self, other)
        return NotImplemented


class TubalScalar(TubalTensor):
    """A single tube of length ``p``; elements of the ring under the t-product."""

    def __post_init__(self):
        super().__post_init__()
        if self.entries.ndim != 1:
            raise DimensionError("a tubal scalar is a 1-d array")

    @property
    def values(self) -> np.ndarray:
        return self.entries

    def __matmul__(self, other):
        if isinstance(other, TubalScalar):
            return scalar_tproduct(self, other)
        return NotImplemented


def wrap(entries, transform: TransformSpec) -> TubalTensor:
    """Build the most specific tubal type for an array of the given rank."""
    ndim = np.ndim(entries)
    if ndim == 1:
        return TubalScalar(entries, transform)
    if ndim == 3:
        return TubalMatrix(entries, transform)
    return TubalTensor(entries, transform)


def from_hat(hat: np.ndarray, transform: TransformSpec, real: bool, scale: float = 0.0):
    """Invert ``L`` on transform-domain data and wrap the result.

    ``scale`` is the transform-domain magnitude of the operands that
    produced ``hat``; it keeps the realness check meaningful when the
    result cancels to roundoff.
    """
    out = transform.inverse(hat, real=real, scale=scale * transform.fiber_scale())
    return wrap(out, transform)


def _check_same_transform(*objs: TubalTensor) -> None:
    first = objs[0].transform
    for obj in objs[1:]:
        if obj.transform != first:
            raise TransformMismatchError("operands use different transforms")


def _real_result(*objs: TubalTensor) -> bool:
    return all(o.is_real for o in objs) and objs[0].transform.preserves_real


def _slice_matmul(a_hat: np.ndarray, b_hat: np.ndarray) -> np.ndarray:
    # (I, J, p) x (J, K, p) -> (I, K, p), one matrix product per slice
    out = np.matmul(np.moveaxis(a_hat, -1, 0), np.moveaxis(b_hat, -1, 0))
    return np.moveaxis(out, 0, -1)


def scalar_tproduct(a: TubalScalar, b: TubalScalar) -> TubalScalar:
    """Tensor-tensor product ``L^{-1}(L(a) * L(b))`` of two tubal scalars.

    Under the DFT this is circular convolution.
    """
    _check_same_transform(a, b)
    hat = a.hat * b.hat
    return from_hat(hat, a.transform, _real_result(a, b),
                    scale=np.linalg.norm(a.hat) * np.linalg.norm(b.hat))


def face_wise_product(A: TubalMatrix, B: TubalMatrix) -> TubalMatrix:
    """Slice-by-slice matrix product of the raw frontal slices (no transform)."""
    if A.p != B.p:
        raise DimensionError(f"tubal lengths differ: {A.p} vs {B.p}")
    if A.shape[1] != B.shape[0]:
        raise DimensionError(f"inner dimensions differ: {A.shape} vs {B.shape}")
    return TubalMatrix(_slice_matmul(A.entries, B.entries), A.transform)


def tproduct(A: TubalMatrix, B: TubalMatrix) -> TubalMatrix:
    """Tensor-tensor product ``L^{-1}(L(A) face-wise L(B))``."""
    _check_same_transform(A, B)
    if A.shape[1] != B.shape[0]:
        raise DimensionError(f"cannot multiply {A.shape} by {B.shape}")
    hat = _slice_matmul(A.hat, B.hat)
    return from_hat(hat, A.transform, _real_result(A, B),
                    scale=np.linalg.norm(A.hat) * np.linalg.norm(B.hat))


def hermitian_transpose(A: TubalMatrix) -> TubalMatrix:
    """Capital-H transpose: conjugate-transpose every transform-domain slice."""
    hat = np.conj(np.swapaxes(A.hat, 0, 1))
    return from_hat(hat, A.transform, _real_result(A), scale=np.linalg.norm(A.hat))


def smallt_transpose(A: TubalMatrix) -> TubalMatrix:
    """Small-t transpose: ``A^t(j, i) = A(i, j)``, slice order kept."""
    return TubalMatrix(np.swapaxes(A.entries, 0, 1), A.transform)


def identity_tubal_matrix(n: int, spec: TransformSpec) -> TubalMatrix:
    """Unit ``I`` of the t-product: every transform-domain slice is the identity."""
    if n < 1:
        raise DimensionError(f"identity size must be positive, got {n}")
    hat = np.broadcast_to(np.eye(n)[:, :, None], (n, n, spec.p)).astype(complex)
    return from_hat(hat, spec, spec.preserves_real)


def zeros(shape, spec: TransformSpec) -> TubalTensor:
    return wrap(np.zeros(tuple(shape) + (spec.p,)), spec)


def frobenius_norm(A: TubalTensor) -> float:
    """Euclidean norm over all scalar entries of the underlying array."""
    return float(np.linalg.norm(A.entries))


def inner_product(A: TubalTensor, B: TubalTensor):
    """``<A, B> = sum(conj(A) * B)`` over all scalar entries."""
    if A.entries.shape != B.entries.shape:
        raise DimensionError(f"shape mismatch {A.entries.shape} vs {B.entries.shape}")
    return np.vdot(A.entries, B.entries)


def is_partially_unitary(A: TubalMatrix, tol: float = STRUCTURAL_TOL) -> bool:
    """True iff ``||A^H * A - I|| <= tol`` (requires ``I >= J``)."""
    rows, cols = A.shape
    if rows < cols:
        return False
    gram = tproduct(hermitian_transpose(A), A)
    return frobenius_norm(gram - identity_tubal_matrix(cols, A.transform)) <= tol


def is_unitary(A: TubalMatrix, tol: float = STRUCTURAL_TOL) -> bool:
    """True iff ``A^H * A`` and ``A * A^H`` are both within ``tol`` of ``I``."""
    rows, cols = A.shape
    if rows != cols:
        return False
    eye = identity_tubal_matrix(rows, A.transform)
    AH = hermitian_transpose(A)
    return (frobenius_norm(tproduct(AH, A) - eye) <= tol
            and frobenius_norm(tproduct(A, AH) - eye) <= tol)
