"""Small-size invariant suite behind ``tubal selftest``.

Each check computes a residual from random data and compares it to a
tolerance.  A check receives a ``tamper`` function that it applies to one
intermediate result; normally ``tamper`` is the identity, and the hidden
``--inject-fault NAME`` option swaps in a perturbation for check ``NAME``
so the suite can be shown to catch it.
"""

from __future__ import annotations

import io
import tempfile
from pathlib import Path

import numpy as np

from . import baselines, bench, tensorfile
from .algebra import (TubalMatrix, TubalScalar, TubalTensor, hermitian_transpose,
                      identity_tubal_matrix, is_unitary, scalar_tproduct, smallt_transpose,
                      tproduct)
from .hotsvd import (check_all_orthogonality, check_ordering, error_bound, error_decomposition,
                     hotsvd, seq_tr_hotsvd, tr_hotsvd, truncation_bound)
from .multiway import fold, kron_all, multi_mode_product, tubal_kron, unfold
from .transform import TransformSpec
from .tsvd import tsvd, truncate_tsvd

CHECKS = []


def check(name):
    def deco(fn):
        CHECKS.append((name, fn))
        return fn
    return deco


def _mat(rng, i, j, p):
    return TubalMatrix.from_array(rng.standard_normal((i, j, p)))


def _rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)


@check("transform-roundtrip")
def _(rng, tamper):
    x = rng.standard_normal((4, 7))
    spec = TransformSpec.dft(7)
    return _rel(tamper(spec.inverse(spec.forward(x))), x), 1e-12


@check("transform-norm-scaling")
def _(rng, tamper):
    x = rng.standard_normal(9)
    y = tamper(TransformSpec.dft(9).forward(x))
    return abs(np.linalg.norm(y) - 3.0 * np.linalg.norm(x)) / np.linalg.norm(x), 1e-12


@check("dft-conjugate-symmetry")
def _(rng, tamper):
    y = tamper(TransformSpec.dft(6).forward(rng.standard_normal(6)))
    return np.max(np.abs(y[1:] - np.conj(y[1:][::-1]))), 1e-12


@check("scalar-product-convolution")
def _(rng, tamper):
    a, b = rng.standard_normal(5), rng.standard_normal(5)
    oracle = np.array([sum(a[j] * b[(k - j) % 5] for j in range(5)) for k in range(5)])
    got = scalar_tproduct(TubalScalar.from_array(a), TubalScalar.from_array(b)).entries
    return _rel(tamper(got), oracle), 1e-12


@check("tproduct-summation-oracle")
def _(rng, tamper):
    A, B = _mat(rng, 3, 4, 5), _mat(rng, 4, 2, 5)
    oracle = np.zeros((3, 2, 5))
    for i in range(3):
        for j in range(2):
            for k in range(4):
                oracle[i, j] += scalar_tproduct(TubalScalar.from_array(A.entries[i, k]),
                                                TubalScalar.from_array(B.entries[k, j])).entries
    return _rel(tamper(tproduct(A, B).entries), oracle), 1e-10


@check("identity-is-unit")
def _(rng, tamper):
    A = _mat(rng, 3, 3, 4)
    I = identity_tubal_matrix(3, A.transform)
    return _rel(tamper(tproduct(A, I).entries), A.entries), 1e-12


@check("hermitian-transpose-rule")
def _(rng, tamper):
    A, B = _mat(rng, 3, 4, 5), _mat(rng, 4, 2, 5)
    lhs = hermitian_transpose(tproduct(A, B)).entries
    rhs = tproduct(hermitian_transpose(B), hermitian_transpose(A)).entries
    return _rel(tamper(lhs), rhs), 1e-10


@check("smallt-transpose-rule")
def _(rng, tamper):
    A, B = _mat(rng, 3, 4, 5), _mat(rng, 4, 2, 5)
    lhs = smallt_transpose(tproduct(A, B)).entries
    rhs = tproduct(smallt_transpose(B), smallt_transpose(A)).entries
    return _rel(tamper(lhs), rhs), 1e-10


@check("tsvd-reconstruction")
def _(rng, tamper):
    A = _mat(rng, 5, 3, 4)
    return _rel(tamper(tsvd(A).reconstruct().entries), A.entries), 1e-10


@check("tsvd-unitary-factors")
def _(rng, tamper):
    F = tsvd(_mat(rng, 4, 6, 5))
    U = TubalMatrix(tamper(F.U.entries), F.U.transform)
    return 0.0 if is_unitary(U) and is_unitary(F.V) else 1.0, 0.5


@check("tsvd-slice-oracle")
def _(rng, tamper):
    A = _mat(rng, 4, 3, 6)
    hat = np.fft.fft(A.entries, axis=-1)
    oracle = np.stack([np.linalg.svd(hat[:, :, s], compute_uv=False) for s in range(6)], axis=-1)
    return _rel(tamper(tsvd(A).spectrum), oracle), 1e-10


@check("eckart-young-probe")
def _(rng, tamper):
    A = _mat(rng, 5, 4, 3)
    F = tsvd(A)
    best = np.linalg.norm(A.entries - tamper(truncate_tsvd(F, 2).entries))
    # the optimal error is the transform-domain tail energy
    optimum = np.sqrt(np.sum(F.spectrum[2:] ** 2) / 3)
    rivals = [np.linalg.norm(A.entries - tproduct(_mat(rng, 5, 2, 3), _mat(rng, 2, 4, 3)).entries)
              for _ in range(50)]
    return max(0.0, best - min(rivals)) + abs(best - optimum) / A.norm(), 1e-12


@check("unfold-fold-roundtrip")
def _(rng, tamper):
    A = TubalTensor.from_array(rng.standard_normal((2, 3, 4, 3)))
    worst = max(_rel(tamper(fold(unfold(A, n), n, A.shape).entries), A.entries) for n in range(3))
    return worst, 0.0


@check("unfolding-identity")
def _(rng, tamper):
    S = TubalTensor.from_array(rng.standard_normal((2, 3, 2, 4)))
    Us = [_mat(rng, d + 1, d, 4) for d in S.shape]
    X = multi_mode_product(S, Us)
    worst = 0.0
    for n in range(3):
        others = [Us[m] for m in reversed(range(3)) if m != n]
        rhs = tproduct(tproduct(Us[n], unfold(S, n)), smallt_transpose(kron_all(others)))
        worst = max(worst, _rel(tamper(unfold(X, n).entries), rhs.entries))
    return worst, 1e-10


@check("kronecker-mixed-product")
def _(rng, tamper):
    A, B = _mat(rng, 2, 3, 4), _mat(rng, 3, 2, 4)
    C, D = _mat(rng, 3, 2, 4), _mat(rng, 2, 3, 4)
    lhs = tproduct(tubal_kron(A, B), tubal_kron(C, D)).entries
    rhs = tubal_kron(tproduct(A, C), tproduct(B, D)).entries
    return _rel(tamper(lhs), rhs), 1e-10


def _tensor(rng, shape=(3, 4, 2), p=3):
    return TubalTensor.from_array(rng.standard_normal(shape + (p,)))


def _near_low_rank(rng, shape=(4, 5, 3), ranks=(2, 3, 2), p=4, noise=1e-3):
    core = TubalTensor.from_array(rng.standard_normal(tuple(ranks) + (p,)))
    facs = [_mat(rng, d, r, p) for d, r in zip(shape, ranks)]
    X = multi_mode_product(core, facs).entries
    return TubalTensor.from_array(X + noise * np.linalg.norm(X) * rng.standard_normal(X.shape) / np.sqrt(X.size))


@check("hotsvd-reconstruction")
def _(rng, tamper):
    A = _tensor(rng)
    return _rel(tamper(hotsvd(A).reconstruct().entries), A.entries), 1e-10


@check("hotsvd-norm")
def _(rng, tamper):
    A = _tensor(rng)
    return abs(np.linalg.norm(tamper(hotsvd(A).core.entries)) - A.norm()) / A.norm(), 1e-10


@check("all-orthogonality")
def _(rng, tamper):
    A = _tensor(rng)
    F = hotsvd(A)
    G = type(F)(TubalTensor(tamper(F.core.entries), F.core.transform), F.factors, F.slice_norms_per_mode)
    return check_all_orthogonality(G), 1e-8 * A.norm() ** 2


@check("ordering")
def _(rng, tamper):
    F = hotsvd(_tensor(rng))
    G = type(F)(TubalTensor(tamper(F.core.entries), F.core.transform), F.factors, F.slice_norms_per_mode)
    return 0.0 if check_ordering(G) else 1.0, 0.5


@check("order2-matches-tsvd")
def _(rng, tamper):
    A = _mat(rng, 4, 3, 5)
    return _rel(tamper(hotsvd(A).slice_norms_per_mode[0][:3]), tsvd(A).slice_norms), 1e-10


@check("tr-error-bound")
def _(rng, tamper):
    A = _near_low_rank(rng)
    F = tr_hotsvd(A, (2, 3, 2))
    core = TubalTensor(tamper(F.core.entries), F.core.transform)
    err = np.linalg.norm(A.entries - multi_mode_product(core, F.factors).entries)
    return max(0.0, err - error_bound(F)), 1e-10 * A.norm()


@check("seq-error-bound")
def _(rng, tamper):
    A = _near_low_rank(rng)
    F = seq_tr_hotsvd(A, (2, 3, 2))
    core = TubalTensor(tamper(F.core.entries), F.core.transform)
    err = np.linalg.norm(A.entries - multi_mode_product(core, F.factors).entries)
    return max(0.0, err - truncation_bound(A, (2, 3, 2))), 1e-10 * A.norm()


@check("error-decomposition")
def _(rng, tamper):
    A = _tensor(rng, (4, 5, 3), 4)
    F = tr_hotsvd(A, (2, 3, 2))
    terms = error_decomposition(A, F.factors)
    err = np.linalg.norm(A.entries - tamper(F.reconstruct().entries))
    return abs(np.sum(terms ** 2) - err ** 2) / A.norm() ** 2, 1e-8


@check("hosvd-p1-agreement")
def _(rng, tamper):
    X = rng.standard_normal((3, 4, 2))
    F = tr_hotsvd(TubalTensor.from_array(X[..., None]), (2, 2, 1))
    G = baselines.tr_hosvd(X, (2, 2, 1))
    return _rel(tamper(F.reconstruct().entries[..., 0]), G.reconstruct()), 1e-10


@check("tensorfile-roundtrip")
def _(rng, tamper):
    X = rng.standard_normal((3, 2, 4)) + 1j * rng.standard_normal((3, 2, 4))
    return _rel(tamper(tensorfile.decode(tensorfile.encode(X))), X), 0.0


@check("compress-roundtrip")
def _(rng, tamper):
    X = rng.standard_normal((3, 4, 3))
    with tempfile.TemporaryDirectory() as tmp:
        src = Path(tmp) / "in.tten"
        tensorfile.write(src, X)
        bench.compress(src, (3, 4), "seq", Path(tmp) / "f")
        bench.decompress(Path(tmp) / "f", Path(tmp) / "out.tten")
        return _rel(tamper(tensorfile.read(Path(tmp) / "out.tten")), X), 1e-10


@check("hilbert-reference")
def _(rng, tamper):
    norms = bench.hilbert_demo()["slice_norms"][0]
    return np.max(np.abs(tamper(norms) - np.array(bench.HILBERT_NORMS))), bench.HILBERT_TOL


def _perturb(x):
    x = np.array(x, dtype=np.result_type(x, float))
    return x + 0.1 * np.max(np.abs(x), initial=1.0) * np.cos(np.arange(x.size)).reshape(x.shape)


def run(inject_fault: str | None = None, seed: int = 2024, out=None) -> int:
    """Run every check, print one line each, return 0 iff all pass."""
    out = out if out is not None else __import__("sys").stdout
    names = [n for n, _ in CHECKS]
    if inject_fault is not None and inject_fault not in names:
        print(f"unknown check {inject_fault!r}; choose from: {', '.join(names)}", file=out)
        return 2
    failures = 0
    for name, fn in CHECKS:
        tamper = _perturb if name == inject_fault else (lambda x: x)
        try:
            value, tol = fn(np.random.default_rng([seed, len(name)]), tamper)
            ok = bool(value <= tol)
            detail = f"residual {value:.3e} (tol {tol:.1e})"
        except Exception as exc:  # a crash counts as a failure
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        failures += not ok
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}", file=out)
    print(f"{len(CHECKS) - failures}/{len(CHECKS)} checks passed", file=out)
    return 0 if failures == 0 else 1


def run_captured(**kwargs):
    buf = io.StringIO()
    code = run(out=buf, **kwargs)
    return code, buf.getvalue()
