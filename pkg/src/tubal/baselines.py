"""Classical HOSVD, truncated HOSVD and sequentially truncated HOSVD on plain arrays.

These use ordinary matrix SVDs of the mode unfoldings and serve as the
reference point for the tubal decompositions.  A ``rank`` of ``None`` for a
mode leaves that mode untouched, which is how the tubal axis of a
benchmark tensor is kept intact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, RankError


@dataclass(frozen=True, eq=False)
class HosvdFactors:
    """``A ~= core x_0 U_0 x_1 U_1 ...``; ``mode_singular_values[n]`` padded to ``A.shape[n]``."""

    core: np.ndarray
    factors: tuple
    mode_singular_values: tuple
    truncation: tuple | None = None

    @property
    def ranks(self) -> tuple:
        return tuple(U.shape[1] for U in self.factors)

    def reconstruct(self) -> np.ndarray:
        out = self.core
        for n, U in enumerate(self.factors):
            out = mode_product(out, U, n)
        return out


def unfold(X: np.ndarray, n: int) -> np.ndarray:
    """Mode-``n`` unfolding, lowest remaining mode fastest."""
    rest = [k for k in range(X.ndim) if k != n]
    return np.transpose(X, [n] + rest[::-1]).reshape(X.shape[n], -1)


def mode_product(X: np.ndarray, M: np.ndarray, n: int) -> np.ndarray:
    """``X x_n M``: multiply every mode-``n`` fiber by ``M``."""
    return np.moveaxis(np.tensordot(M, X, axes=(1, n)), 0, n)


def _check(X, ranks):
    X = np.asarray(X)
    if X.ndim < 1 or not np.all(np.isfinite(X)):
        raise InvalidInputError("input must be a finite array of order >= 1")
    if ranks is None:
        return X, tuple(X.shape)
    ranks = tuple(ranks)
    if len(ranks) != X.ndim:
        raise RankError(f"need {X.ndim} ranks, got {len(ranks)}")
    out = []
    for n, (r, d) in enumerate(zip(ranks, X.shape)):
        if r is None:
            out.append(d)
        elif int(r) != r or not 1 <= r <= d:
            raise RankError(f"rank {r!r} for mode {n} must lie in [1, {d}]")
        else:
            out.append(int(r))
    return X, tuple(out)


def _left(M: np.ndarray, size: int):
    u, s, _ = np.linalg.svd(M, full_matrices=M.shape[0] > M.shape[1])
    return u, np.concatenate([s, np.zeros(size - s.size)])


def _one_shot(X, ranks, truncated):
    facs, svals = [], []
    for n, r in enumerate(ranks):
        u, s = _left(unfold(X, n), X.shape[n])
        facs.append(u[:, :r])
        svals.append(s)
    core = X
    for n, U in enumerate(facs):
        core = mode_product(core, U.conj().T, n)
    return HosvdFactors(core, tuple(facs), tuple(svals), ranks if truncated else None)


def hosvd(X) -> HosvdFactors:
    """Full HOSVD."""
    X, ranks = _check(X, None)
    return _one_shot(X, ranks, False)


def tr_hosvd(X, ranks) -> HosvdFactors:
    """Truncated HOSVD with all factors computed from ``X``."""
    X, ranks = _check(X, ranks)
    return _one_shot(X, ranks, True)


def seq_tr_hosvd(X, ranks, order=None) -> HosvdFactors:
    """Sequentially truncated HOSVD; each mode works on the already reduced core."""
    X, ranks = _check(X, ranks)
    order = tuple(range(X.ndim)) if order is None else tuple(order)
    if sorted(order) != list(range(X.ndim)):
        raise InvalidInputError(f"processing order {order} is not a permutation")
    facs, svals = [None] * X.ndim, [None] * X.ndim
    core = X
    for n in order:
        u, s = _left(unfold(core, n), core.shape[n])
        facs[n] = u[:, :ranks[n]]
        svals[n] = s
        core = mode_product(core, facs[n].conj().T, n)
    return HosvdFactors(core, tuple(facs), tuple(svals), ranks)


def error_bound(F: HosvdFactors) -> float:
    """``sqrt`` of the summed squared singular-value tails."""
    return float(np.sqrt(sum(np.sum(s[r:] ** 2) for s, r in zip(F.mode_singular_values, F.ranks))))


def all_orthogonality(F: HosvdFactors) -> float:
    """Largest off-diagonal magnitude of ``core_(n) core_(n)^H`` over all modes."""
    worst = 0.0
    for n in range(F.core.ndim):
        m = unfold(F.core, n)
        g = m @ m.conj().T
        np.fill_diagonal(g, 0)
        worst = max(worst, float(np.max(np.abs(g), initial=0.0)))
    return worst


def is_ordered(F: HosvdFactors, slack: float = 1e-10) -> bool:
    """Core slice norms nonincreasing in every mode."""
    total = max(np.linalg.norm(F.core), 1.0)
    for n in range(F.core.ndim):
        norms = np.linalg.norm(unfold(F.core, n), axis=1)
        if np.any(np.diff(norms) > slack * total):
            return False
    return True
