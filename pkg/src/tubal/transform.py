"""Invertible linear transforms acting along the tubal (last) axis.

The default transform is the non-normalized discrete Fourier transform,
for which the tensor-tensor product reduces to the classical t-product.
Arbitrary invertible matrices are accepted as well; operations whose
guarantees need a scaled-unitary map check :attr:`TransformSpec.is_scaled_unitary`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InvalidTransformError, NumericalError, UnsupportedTransformError

#: Condition number above which a user matrix is rejected as non-invertible.
MAX_CONDITION = 1e12
#: Relative bound on the imaginary residual tolerated when a result must be real.
IMAG_RTOL = 1e-10


class TransformKind(enum.Enum):
    DFT = "dft"
    SCALED_UNITARY = "scaled_unitary"
    GENERAL = "general"


@dataclass(frozen=True, eq=False)
class TransformSpec:
    """Description of the map ``L`` applied to every length-``p`` fiber.

    Use the constructors :meth:`dft`, :meth:`scaled_unitary` and
    :meth:`general` rather than instantiating directly.

    Attributes
    ----------
    p : int
        Tubal length.
    kind : TransformKind
        How ``L`` acts on a fiber.
    matrix : ndarray or None
        The ``p x p`` matrix of ``L`` for matrix-backed kinds.
    c_magnitude : float or None
        ``|c|`` when ``L = cW`` with ``W`` unitary; ``sqrt(p)`` for the DFT.
    """

    p: int
    kind: TransformKind
    matrix: np.ndarray | None = None
    c_magnitude: float | None = None
    _inverse_matrix: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def dft(cls, p: int) -> TransformSpec:
        """Non-normalized DFT of length ``p`` (``c = sqrt(p)``)."""
        p = _check_length(p)
        return cls(p=p, kind=TransformKind.DFT, c_magnitude=float(np.sqrt(p)))

    @classmethod
    def scaled_unitary(cls, matrix, tol: float = 1e-10) -> TransformSpec:
        """Transform ``L = cW`` given by its matrix; ``|c|`` is inferred.

        Raises
        ------
        InvalidTransformError
            If ``matrix^H matrix`` is not a multiple of the identity to
            relative accuracy ``tol``.
        """
        m = _check_matrix(matrix)
        gram = m.conj().T @ m
        c2 = float(np.real(np.trace(gram))) / m.shape[0]
        if not np.allclose(gram, c2 * np.eye(m.shape[0]), rtol=0, atol=tol * c2):
            raise InvalidTransformError("matrix is not a scalar multiple of a unitary matrix")
        m = _frozen(m)
        inv = _frozen(m.conj().T / c2)
        return cls(p=m.shape[0], kind=TransformKind.SCALED_UNITARY, matrix=m,
                   c_magnitude=float(np.sqrt(c2)), _inverse_matrix=inv)

    @classmethod
    def general(cls, matrix) -> TransformSpec:
        """Arbitrary invertible transform given by its matrix."""
        m = _frozen(_check_matrix(matrix))
        return cls(p=m.shape[0], kind=TransformKind.GENERAL, matrix=m,
                   _inverse_matrix=_frozen(np.linalg.inv(m)))

    @property
    def is_scaled_unitary(self) -> bool:
        return self.kind is not TransformKind.GENERAL

    @property
    def preserves_real(self) -> bool:
        """Whether real operands give real results under products and transposes."""
        if self.kind is TransformKind.DFT:
            return True
        return not np.iscomplexobj(self.matrix)

    def require_scaled_unitary(self, what: str) -> None:
        if not self.is_scaled_unitary:
            raise UnsupportedTransformError(f"{what} requires a transform of the form L = cW")

    def forward(self, x) -> np.ndarray:
        """Apply ``L`` along the last axis of ``x``."""
        x = self._check(x)
        if self.kind is TransformKind.DFT:
            return np.fft.fft(x, axis=-1)
        return x @ self.matrix.T

    def inverse(self, y, real: bool = False, scale: float = 0.0) -> np.ndarray:
        """Apply ``L^{-1}`` along the last axis of ``y``.

        With ``real=True`` the imaginary residual is checked against
        :data:`IMAG_RTOL` times ``max(|real part|, scale)`` and dropped.
        ``scale`` lets callers supply the magnitude of the operands when the
        result itself may cancel to roundoff level.
        """
        y = self._check(y)
        if self.kind is TransformKind.DFT:
            out = np.fft.ifft(y, axis=-1)
        else:
            out = y @ self._inverse_matrix.T
        return to_real(out, scale=scale) if real else out

    def spectral_width(self, real: bool) -> int:
        """Number of transform-domain slices that determine a real array.

        For the DFT of real data the slices past ``p // 2`` are conjugates of
        earlier ones and need not be computed.
        """
        if real and self.kind is TransformKind.DFT:
            return self.p // 2 + 1
        return self.p

    def complete_spectrum(self, half: np.ndarray) -> np.ndarray:
        """Rebuild all ``p`` slices from the leading :meth:`spectral_width` ones."""
        h = half.shape[-1]
        if h == self.p:
            return half
        full = np.empty(half.shape[:-1] + (self.p,), dtype=complex)
        full[..., :h] = half
        full[..., h:] = np.conj(half[..., self.p - h:0:-1])
        return full

    def fiber_scale(self) -> float:
        """Upper bound on ``||L^{-1} y|| / ||y||``."""
        if self.is_scaled_unitary:
            return 1.0 / self.c_magnitude
        return float(np.linalg.norm(self._inverse_matrix, 2))

    def identity_fiber(self) -> np.ndarray:
        """The unit of the tubal-scalar ring, ``L^{-1}((1, ..., 1))``."""
        return self.inverse(np.ones(self.p, dtype=complex), real=self.preserves_real)

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x)
        if x.ndim == 0 or x.shape[-1] != self.p:
            raise DimensionError(f"tubal axis has length {x.shape[-1] if x.ndim else 0}, expected {self.p}")
        return x

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, TransformSpec):
            return NotImplemented
        if self.kind is not other.kind or self.p != other.p:
            return False
        if self.matrix is None:
            return True
        return bool(np.array_equal(self.matrix, other.matrix))

    def __hash__(self) -> int:
        key = None if self.matrix is None else self.matrix.tobytes()
        return hash((self.kind, self.p, key))


def apply_along_tubal_axis(data, spec: TransformSpec, direction: str = "forward",
                           real: bool = False) -> np.ndarray:
    """Transform every tubal fiber of ``data`` independently.

    ``direction`` is ``"forward"`` or ``"inverse"``; ``real`` only applies to
    the inverse direction.
    """
    if direction == "forward":
        return spec.forward(data)
    if direction == "inverse":
        return spec.inverse(data, real=real)
    raise ValueError(f"unknown direction {direction!r}")


def to_real(x: np.ndarray, rtol: float = IMAG_RTOL, scale: float = 0.0) -> np.ndarray:
    """Drop the imaginary part of ``x`` after checking it is negligible."""
    if not np.iscomplexobj(x):
        return x
    imag = np.linalg.norm(x.imag)
    if imag > rtol * max(np.linalg.norm(x.real), scale) and imag > np.finfo(float).tiny:
        raise NumericalError(f"imaginary residual {imag:.3e} is not negligible")
    return np.ascontiguousarray(x.real)


def _check_length(p) -> int:
    if int(p) != p or p < 1:
        raise DimensionError(f"tubal length must be a positive integer, got {p!r}")
    return int(p)


def _check_matrix(matrix) -> np.ndarray:
    m = np.array(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise InvalidTransformError(f"transform matrix must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidTransformError("transform matrix has non-finite entries")
    if np.linalg.cond(m) > MAX_CONDITION:
        raise InvalidTransformError("transform matrix is singular or ill-conditioned")
    if not np.iscomplexobj(m):
        m = m.astype(float)
    return m


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a
